"""Vectorized NumPy implementations of the hot kernels.

This is the fallback backend; the compiled extension in ``_ckernels.pyx``
implements the same three functions with identical semantics.  Callers
precompute the trig tables so that repeated evaluations with fixed
frequencies and a fixed grid only pay for the weighted reductions:

* ``s2_t[i, j] = sin^2(w_i * delta_j / 2)`` -- the half-angle form of
  ``1 - cos`` avoids catastrophic cancellation near the 0 and 2*pi seams;
* ``sin_t[i, j] = sin(w_i * delta_j)``.
"""

import numpy as np

_CORR_CHUNK = 1024


def rho_sq_table(r2, w, b, deltas, s2_t, sin_t):
    """Squared circumradius at each grid separation.

    Returns ``(values, min_sin_sq)`` where ``min_sin_sq`` is the smallest
    ``(t1*t2 - t3^2) / (t1*t2)`` encountered, i.e. the squared sine of the
    chord/tangent angle; the caller uses it to detect geometric degeneracy
    (a straight-line segment).  Grid points inside the near-zero
    cancellation band must be excluded by the caller.
    """
    r2 = np.asarray(r2, dtype=float)
    w = np.asarray(w, dtype=float)
    t2 = float(r2 @ (w * w)) + b * b
    t1 = 4.0 * (r2 @ s2_t)
    t3 = (r2 * w) @ sin_t
    if b != 0.0:
        t1 = t1 + (b * b) * deltas * deltas
        t3 = t3 + (b * b) * deltas
    prod = t1 * t2
    num = prod - t3 * t3
    min_sin_sq = float((num / prod).min()) if prod.size else np.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        values = t1 * prod / (4.0 * num)
    return values, min_sin_sq


def rho_sq_scan(r2, w, b, deltas, s2_t, sin_t):
    """Minimum of the squared circumradius over the grid.

    Returns ``(best_value, best_index, min_sin_sq)``; ties resolve to the
    smaller separation (first occurrence).
    """
    values, min_sin_sq = rho_sq_table(r2, w, b, deltas, s2_t, sin_t)
    idx = int(np.argmin(values))
    return float(values[idx]), idx, min_sin_sq


def corr_argmax(yc, ys, cos_t, sin_t):
    """Index of the maximizing grid angle for each observation row.

    ``yc``/``ys`` hold the radius-weighted cos/sin components, shape
    ``(T, m)``; ``cos_t``/``sin_t`` are ``cos(w_i * alpha_j)`` tables of
    shape ``(m, G)``.  Ties resolve to the smaller grid index.
    """
    yc = np.ascontiguousarray(yc, dtype=float)
    ys = np.ascontiguousarray(ys, dtype=float)
    trials = yc.shape[0]
    out = np.empty(trials, dtype=np.int64)
    for start in range(0, trials, _CORR_CHUNK):
        stop = min(start + _CORR_CHUNK, trials)
        scores = yc[start:stop] @ cos_t
        scores += ys[start:stop] @ sin_t
        out[start:stop] = np.argmax(scores, axis=1)
    return out
