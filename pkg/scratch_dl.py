import numpy as np
import sys
sys.path.insert(0, "src")
from autocast.deeplearn import (
    Adam, CnnConfig, CnnNetwork, NormStats, build_training_windows,
    cnn_forecast, loss_and_grads, train_shared_cnn,
)
from autocast.series import Frequency, Period, SalesSeries

# ---- 1. receptive field probe on default config ----
cfg = CnnConfig()
print("RF default:", cfg.receptive_field)
for seed in range(5):
    net = CnnNetwork(CnnConfig(seed=seed))
    rng = np.random.default_rng(42)
    x = rng.uniform(0.5, 1.5, size=24)
    base = net.predict_one(x)
    x17 = x.copy(); x17[24 - 17] += 1.0
    x16 = x.copy(); x16[24 - 16] += 1.0
    p17 = net.predict_one(x17)
    p16 = net.predict_one(x16)
    print(f"seed {seed}: base {base:+.6f} perturb@-17 delta {p17-base:+.3e} perturb@-16 delta {p16-base:+.3e}")

# ---- 2. gradient check protocol ----
def gradcheck(seed, h=1e-5):
    config = CnnConfig(input_window=8, kernel_size=2, dilations=(1, 2), channels=3, seed=seed)
    net = CnnNetwork(config)
    rng = np.random.default_rng(seed + 100)
    X = rng.uniform(0.2, 2.0, size=(4, 8))
    y = rng.uniform(0.2, 2.0, size=4)
    _, grads = loss_and_grads(net, X, y)
    analytic = [g.copy() for g in grads]
    worst = 0.0
    worst_at = None
    for pi, param in enumerate(net.params()):
        flat = param.reshape(-1)
        aflat = analytic[pi].reshape(-1)
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + h
            lp = float(np.mean((net.forward(X) - y) ** 2))
            flat[j] = orig - h
            lm = float(np.mean((net.forward(X) - y) ** 2))
            flat[j] = orig
            fd = (lp - lm) / (2 * h)
            rel = abs(aflat[j] - fd) / max(abs(aflat[j]), abs(fd), 1e-4)
            if rel > worst:
                worst = rel
                worst_at = (pi, j, aflat[j], fd)
    return worst, worst_at

for seed in (0, 1, 2, 7):
    w, at = gradcheck(seed)
    print(f"gradcheck seed {seed}: worst rel {w:.3e} at {at}")

# ---- 3. constant corpus training ----
def mk(pid, values, start=240):
    return SalesSeries(pid, Frequency.MONTHLY, Period(Frequency.MONTHLY, start), np.asarray(values, dtype=float))

tiny = CnnConfig(input_window=6, kernel_size=2, dilations=(1, 2), channels=4, seed=0, max_epochs=60)
corpus = [mk("a", [50.0] * 30), mk("b", [50.0] * 30)]
net, stats = train_shared_cnn(corpus, tiny)
pred = net.predict_one(np.ones(6))
print("constant corpus predict_one(ones):", pred)
fr = cnn_forecast(net, stats["a"], corpus[0], 4)
print("cnn_forecast values:", fr.values, "start idx:", fr.start.index)

# ---- 4. on_epoch learnable toy: >=50% train loss decrease ----
rng = np.random.default_rng(0)
t = np.arange(60)
vals = 100 + 30 * np.sin(2 * np.pi * t / 12)
corpus2 = [mk("s1", vals), mk("s2", np.roll(vals, 3))]
losses = []
net2, _ = train_shared_cnn(corpus2, CnnConfig(input_window=12, kernel_size=2, dilations=(1, 2, 4), channels=8, seed=0, max_epochs=40), on_epoch=lambda e, tr, va: losses.append((tr, va)))
print("epochs run:", len(losses), "first train loss:", losses[0][0], "last:", losses[-1][0], "ratio:", losses[-1][0] / losses[0][0])

# ---- 5. scale equivariance ----
base_vals = 20 + 10 * np.abs(np.sin(np.arange(40)))
c = 0.5
ca = [mk("a", base_vals)]
cb = [mk("a", base_vals * c)]
cfgq = CnnConfig(input_window=8, kernel_size=2, dilations=(1, 2), channels=4, seed=0, max_epochs=20)
na, sa = train_shared_cnn(ca, cfgq)
nb, sb = train_shared_cnn(cb, cfgq)
fa = cnn_forecast(na, sa["a"], ca[0], 6).values
fb = cnn_forecast(nb, sb["a"], cb[0], 6).values
print("equivariance max rel:", np.max(np.abs(fb - c * fa) / np.maximum(np.abs(c * fa), 1e-12)))

# ---- 6. zero-weight constant predictor ----
net3 = CnnNetwork(tiny)
zeros = [np.zeros_like(p) for p in net3.params()]
net3.set_weights(zeros)
params = net3.params()
params[-1][...] = np.array([1.0])  # dense bias
s500 = mk("z", [500.0] * 12)
f500 = cnn_forecast(net3, NormStats.from_series(s500), s500, 5)
print("constant-predictor x500:", f500.values)
params[-1][...] = np.array([-1.0])
fneg = cnn_forecast(net3, NormStats.from_series(s500), s500, 5)
print("negative bias floored:", fneg.values)
