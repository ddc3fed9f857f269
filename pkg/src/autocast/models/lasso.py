"""Cyclic coordinate descent for lasso regression with an unpenalized intercept.

Minimizes (1/2n)||y - M b||^2 + lambda * sum_{j>0} |b_j|. Column 0 is the
intercept; all other columns are expected to be standardized by the caller.
"""
from __future__ import annotations

import numpy as np

CONVERGENCE_TOL = 1e-8
MAX_SWEEPS = 10_000


def soft_threshold(value: float, threshold: float) -> float:
    if value > threshold:
        return value - threshold
    if value < -threshold:
        return value + threshold
    return 0.0


def _affine_sweep_map(gram, corr, lam: float, active, signs):
    """One cyclic sweep over a frozen activity pattern, as an affine map.

    With the active set and coefficient signs fixed, a soft-thresholded
    Gauss-Seidel sweep solves (D + L) beta_new = b - U beta_old, so the sweep
    is beta_new = T beta_old + w with T and w precomputable.
    """
    sub = gram[np.ix_(active, active)]
    lower = np.tril(sub)
    b = corr[active] - lam * signs
    T = np.linalg.solve(lower, -np.triu(sub, 1))
    w = np.linalg.solve(lower, b)
    return T, w


def _affine_sweeps(gram, corr, lam: float, tol: float, beta, sweep: int, max_sweeps: int):
    """Run sweeps via the affine map while the activity pattern holds.

    Mutates beta in place; returns (sweeps done so far, converged flag). Any
    sign flip, dead-zone exit, or non-finite value abandons the candidate
    sweep untouched so the coordinate-wise loop can take over again.
    """
    k = len(beta)
    idx = np.arange(k)
    usable = gram.diagonal() != 0.0
    active = idx[usable & ((beta != 0.0) | (idx == 0))]
    inactive = idx[usable & ~((beta != 0.0) | (idx == 0))]
    if len(active) == 0:
        return sweep, False
    signs = np.sign(beta[active])
    signs[active == 0] = 0.0  # intercept is unpenalized
    penalized = active != 0
    T, w = _affine_sweep_map(gram, corr, lam, active, signs)
    # a parked coordinate stays parked only while its mid-sweep gradient sits
    # inside the dead zone; earlier active columns count at their new values
    sub = gram[np.ix_(inactive, active)]
    earlier = active[None, :] < inactive[:, None]
    low = np.where(earlier, sub, 0.0)
    up = np.where(~earlier, sub, 0.0)
    corr_in = corr[inactive]
    while sweep < max_sweeps:
        old = beta[active]
        new = T @ old + w
        if not np.all(np.isfinite(new)):
            return sweep, False
        if lam > 0.0 and not np.array_equal(np.sign(new[penalized]), signs[penalized]):
            return sweep, False
        if len(inactive):
            rho = corr_in - low @ new - up @ old
            if np.any(np.abs(rho) > lam):
                return sweep, False
        max_delta = float(np.max(np.abs(new - old)))
        beta[active] = new
        sweep += 1
        if max_delta < tol:
            return sweep, True
    return sweep, False


def lasso_coordinate_descent(
    design, target, lam: float, tol: float = CONVERGENCE_TOL, max_sweeps: int = MAX_SWEEPS, beta0=None
):
    """Returns the coefficient vector; raises on non-finite intermediates.

    beta0 warm-starts the sweep (default: zeros); on a lambda path the
    neighboring solution is a much closer starting point than the origin.
    """
    M = np.asarray(design, dtype=float)
    y = np.asarray(target, dtype=float)
    if M.ndim != 2 or M.shape[0] != y.shape[0]:
        raise ValueError(f"design {M.shape} does not match target {y.shape}")
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    n, k = M.shape
    if beta0 is None:
        beta = np.zeros(k)
    else:
        beta = np.array(beta0, dtype=float)
        if beta.shape != (k,):
            raise ValueError(f"warm start has shape {beta.shape}, expected ({k},)")
    # non-finite intermediates are detected and raised explicitly, so the
    # interim numpy warnings on the way there are pure noise
    with np.errstate(invalid="ignore", over="ignore"):
        # the coordinate update needs (1/n) M_j'(y - M beta); with M'M and M'y
        # precomputed each sweep costs O(k^2) instead of O(n k)
        gram = (M.T @ M) / n
        corr = (M.T @ y) / n
        col_scale = gram.diagonal()  # z_j = (1/n) ||M_j||^2
        # q tracks (1/n) M'M beta; a fresh start means q = 0 exactly, and the
        # matmul is skipped so a non-finite column cannot poison other entries
        q = np.zeros(k) if beta0 is None else gram @ beta
        sweep = 0
        stable = 0
        prev_signs = None
        while sweep < max_sweeps:
            if stable >= 2:
                # pattern held for three sweeps: batch sweeps as affine maps
                # until convergence or the pattern breaks
                sweep, converged = _affine_sweeps(gram, corr, lam, tol, beta, sweep, max_sweeps)
                stable = 0
                prev_signs = None
                if converged:
                    break
                q = gram @ beta
                continue
            max_delta = 0.0
            for j in range(k):
                z = col_scale[j]
                if z == 0.0:
                    continue
                rho = corr[j] - q[j] + z * beta[j]
                if not np.isfinite(rho):
                    raise ValueError(f"non-finite intermediate in column {j}")
                if j == 0:
                    new = rho / z
                else:
                    new = soft_threshold(rho, lam) / z
                delta = new - beta[j]
                if delta != 0.0:
                    q += delta * gram[:, j]
                    beta[j] = new
                    max_delta = max(max_delta, abs(delta))
            sweep += 1
            if max_delta < tol:
                break
            signs = np.sign(beta)
            if prev_signs is not None and np.array_equal(signs, prev_signs):
                stable += 1
            else:
                stable = 0
            prev_signs = signs
    return beta


def lasso_objective(design, target, beta, lam: float) -> float:
    M = np.asarray(design, dtype=float)
    y = np.asarray(target, dtype=float)
    r = y - M @ beta
    return float((r @ r) / (2 * len(y)) + lam * np.abs(beta[1:]).sum())


def lambda_max(design, target) -> float:
    """Smallest lambda that zeroes every penalized coefficient."""
    M = np.asarray(design, dtype=float)
    y = np.asarray(target, dtype=float)
    centered = y - y.mean()
    n = len(y)
    return float(np.max(np.abs(M[:, 1:].T @ centered)) / n)


def default_lambda_grid(design, target, points: int = 10) -> np.ndarray:
    """10-point log grid from lambda_max down four decades."""
    top = lambda_max(design, target)
    if top <= 0:
        top = 1.0
    return np.geomspace(top, top * 1e-4, points)


def select_lambda(design, target, grid=None) -> float:
    """Pick lambda by squared error on the last 20% of rows (time-ordered)."""
    M = np.asarray(design, dtype=float)
    y = np.asarray(target, dtype=float)
    if grid is None:
        grid = default_lambda_grid(M, y)
    lams = sorted((float(lam) for lam in grid), reverse=True)
    if len(lams) == 1:
        return lams[0]
    n = len(y)
    cut = max(1, int(round(n * 0.8)))
    if cut >= n:
        cut = n - 1
    head_M, head_y = M[:cut], y[:cut]
    tail_M, tail_y = M[cut:], y[cut:]
    best_lam = lams[0]
    best_err = np.inf
    beta = None
    # walk the path from the sparse end, warm-starting each fit
    for lam in lams:
        beta = lasso_coordinate_descent(head_M, head_y, lam, beta0=beta)
        err = float(np.mean((tail_y - tail_M @ beta) ** 2))
        # ties favor the larger lambda, i.e. the sparser model
        if err < best_err - 1e-12:
            best_err = err
            best_lam = lam
    return best_lam
