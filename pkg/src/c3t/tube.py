"""Circumradius profiles, global tube radius, and packing density.

The circumradius through two curve points with the tangent at the second
depends only on the parameter separation ``delta`` for constant curvature
curves:

    rho^2(delta) = t1^2 t2 / (4 (t1 t2 - t3^2))

with

    t1 = 2 sum r_i^2 (1 - cos(w_i delta))   (+ b^2 delta^2, odd n)
    t2 = sum r_i^2 w_i^2                    (+ b^2,         odd n)
    t3 = sum r_i^2 w_i sin(w_i delta)       (+ b^2 delta,   odd n)

As delta -> 0 both numerator and denominator vanish; the limit is
``(A / sqrt(B))^2`` with ``A = sum r^2 w^2 + b^2`` and ``B = sum r^2 w^4``,
which equals the inverse first curvature squared.  The minimum of rho over
separations is the tube radius: the largest insulating radius the curve
supports without self-intersection.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .curves import path_length
from .errors import GeometricDegeneracyError, ProfileError
from .profiles import CodeProfile

TWO_PI = 2.0 * math.pi

#: below this separation (also measured from 2*pi for closed curves) the
#: closed form suffers 0/0 cancellation and the analytic limit is returned
NEAR_ZERO_DELTA = 1e-6

#: golden-section refinement never descends into the cancellation band
_REFINE_FLOOR = 1e-5

#: golden-section interval tolerance for the global minimum
REFINE_TOL = 1e-8

#: squared sine of the chord/tangent angle below which the configuration is
#: treated as a straight-line segment
_DEGENERACY_TOL = 1e-15

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class CircumradiusProfile:
    """rho(delta) sampled on a uniform grid, plus the delta -> 0 limit."""

    deltas: np.ndarray
    rho_values: np.ndarray
    limit_at_zero: float


@dataclass(frozen=True)
class GlobalRadius:
    """Tube radius and the separation where the minimum is attained
    (0.0 encodes the delta -> 0 limit)."""

    rho: float
    argmin_delta: float


@dataclass(frozen=True)
class TubeMetrics:
    """Derived geometry of one profile."""

    rho_global: float
    argmin_delta: float
    path_length: float
    density: float

    def to_dict(self):
        return {
            "rho_global": self.rho_global,
            "argmin_delta": self.argmin_delta,
            "path_length": self.path_length,
            "density": self.density,
        }


def sphere_volume_coeff(n: int):
    """Unit n-ball volume coefficient C_n = pi^(n/2) / Gamma(n/2 + 1).

    Evaluated through the even/odd closed forms (factorial and double
    factorial) so results are bit-reproducible.
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if n % 2 == 0:
        return math.pi ** (n // 2) / math.factorial(n // 2)
    dfact = math.prod(range(n, 0, -2))
    return 2.0 ** ((n + 1) // 2) * math.pi ** ((n - 1) // 2) / dfact


def _params(profile: CodeProfile):
    r2 = profile.radii_array() ** 2
    w = profile.frequency_array()
    return r2, w, profile.b


def _limit_rho_sq(r2, w, b):
    a = float(r2 @ (w * w)) + b * b
    return a * a / float(r2 @ w**4)


def _rho_sq_scalar(r2, w, b, delta):
    """Guarded scalar evaluation of rho^2(delta)."""
    wrapped = delta % TWO_PI
    near_seam = min(wrapped, TWO_PI - wrapped) < NEAR_ZERO_DELTA
    if (b == 0.0 and near_seam) or delta < NEAR_ZERO_DELTA:
        return _limit_rho_sq(r2, w, b)
    t2 = float(r2 @ (w * w)) + b * b
    # 1 - cos via the half-angle identity: stable at both seams
    t1 = 4.0 * float(r2 @ np.sin(0.5 * w * delta) ** 2) + b * b * delta * delta
    t3 = float((r2 * w) @ np.sin(w * delta)) + b * b * delta
    prod = t1 * t2
    num = prod - t3 * t3
    if num < _DEGENERACY_TOL * prod:
        raise GeometricDegeneracyError(
            f"chord nearly parallel to tangent at delta={delta!r}: "
            "straight-line segment"
        )
    return t1 * prod / (4.0 * num)


def circumradius_sq_delta(profile: CodeProfile, delta):
    """Squared circumradius as a function of the parameter separation.

    ``delta`` must lie in [0, 2*pi]; separations below the cancellation
    threshold return the analytic limit.
    """
    r2, w, b = _params(profile)
    deltas = np.asarray(delta, dtype=float)
    if np.any(deltas < 0.0) or np.any(deltas > TWO_PI + 1e-12):
        raise ValueError("separation must lie in (0, 2*pi]")
    if deltas.ndim == 0:
        return _rho_sq_scalar(r2, w, b, float(deltas))
    return np.array([_rho_sq_scalar(r2, w, b, d) for d in deltas])


def circumradius_tangent_point(profile: CodeProfile, alpha1, alpha2):
    """Circumradius from two points and the tangent at the second.

    Direct evaluation of the tangent-point form; serves as an independent
    oracle for :func:`circumradius_sq_delta` (the value depends only on
    ``alpha1 - alpha2``).
    """
    from .curves import curve_derivative, evaluate_curve

    x1 = evaluate_curve(profile, float(alpha1))
    x2 = evaluate_curve(profile, float(alpha2))
    d = x1 - x2
    chord = np.linalg.norm(d)
    if chord < 1e-12:
        raise ValueError("coincident points: circumradius is undefined")
    tangent = curve_derivative(profile, float(alpha2), 1)
    tnorm = np.linalg.norm(tangent)
    cos_angle = max(-1.0, min(1.0, float(d @ tangent) / (chord * tnorm)))
    sin_angle = math.sqrt(max(0.0, 1.0 - cos_angle * cos_angle))
    if sin_angle < 1e-12:
        raise GeometricDegeneracyError(
            "chord parallel to tangent: straight-line segment"
        )
    return chord / (2.0 * sin_angle)


def _grid(step):
    count = int(math.floor(TWO_PI / step))  # stay inside (0, 2*pi]
    return step * np.arange(1, count + 1)


def _tables(w, deltas):
    phase = np.multiply.outer(w, deltas)
    s2 = np.sin(0.5 * phase) ** 2
    return np.ascontiguousarray(s2), np.ascontiguousarray(np.sin(phase))


def _golden_min(f, lo, hi, tol=REFINE_TOL):
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _scan_min(r2, w, b, deltas, s2_t, sin_t, step, refine):
    """Grid minimum of rho^2 plus the delta->0 limit.

    Grid points inside the cancellation band (near 0 and, for closed even-n
    curves, near 2*pi) are excluded from the kernel scan and represented by
    the analytic limit.  With ``refine`` the best grid cell and the
    first-cell interval are polished by golden section.
    """
    limit = _limit_rho_sq(r2, w, b)
    hi_cut = TWO_PI - _REFINE_FLOOR if b == 0.0 else TWO_PI + step
    valid = (deltas >= _REFINE_FLOOR) & (deltas <= hi_cut)
    if not valid.all():
        idx_map = np.flatnonzero(valid)
        sub = deltas[idx_map]
        val, local_idx, min_sin_sq = kernels.rho_sq_scan(
            r2, w, b, sub, np.ascontiguousarray(s2_t[:, idx_map]),
            np.ascontiguousarray(sin_t[:, idx_map]))
        best_delta = float(sub[local_idx])
    else:
        val, local_idx, min_sin_sq = kernels.rho_sq_scan(r2, w, b, deltas, s2_t, sin_t)
        best_delta = float(deltas[local_idx])
    if min_sin_sq < _DEGENERACY_TOL:
        raise GeometricDegeneracyError(
            "chord nearly parallel to tangent on the separation grid: "
            "straight-line segment"
        )

    best_val = val
    if refine:
        f = lambda d: _rho_sq_scalar(r2, w, b, d)
        lo = max(best_delta - step, _REFINE_FLOOR)
        hi = min(best_delta + step, TWO_PI)
        x, fx = _golden_min(f, lo, hi)
        if fx < best_val:
            best_val, best_delta = fx, x
        # the open interval below the first grid point is covered separately
        x, fx = _golden_min(f, _REFINE_FLOOR, max(2.0 * step, 2.0 * _REFINE_FLOOR))
        if fx < best_val:
            best_val, best_delta = fx, x

    if limit <= best_val:  # ties resolve to the smaller separation
        return limit, 0.0
    return best_val, best_delta


def global_circumradius(profile: CodeProfile, grid_step: float = 1e-4) -> GlobalRadius:
    """Tube radius: minimum circumradius over all separations.

    Scans a uniform grid of the given step over (0, 2*pi], evaluates the
    delta -> 0 limit explicitly, then refines around the best cell by golden
    section.  ``argmin_delta == 0.0`` encodes a minimum attained in the
    limit.
    """
    if not 0.0 < grid_step <= 1e-3:
        raise ValueError("grid step must be positive and <= 1e-3")
    r2, w, b = _params(profile)
    deltas = _grid(grid_step)
    s2_t, sin_t = _tables(w, deltas)
    best_val, best_delta = _scan_min(
        r2, w, b, deltas, s2_t, sin_t, grid_step, refine=True
    )
    return GlobalRadius(rho=math.sqrt(best_val), argmin_delta=best_delta)


def circumradius_profile(
    profile: CodeProfile, grid_step: float = 1e-4
) -> CircumradiusProfile:
    """rho(delta) on the uniform separation grid (for export and plots)."""
    if not 0.0 < grid_step <= 1e-3:
        raise ValueError("grid step must be positive and <= 1e-3")
    r2, w, b = _params(profile)
    deltas = _grid(grid_step)
    s2_t, sin_t = _tables(w, deltas)
    values, min_sin_sq = kernels.rho_sq_table(r2, w, b, deltas, s2_t, sin_t)
    limit = _limit_rho_sq(r2, w, b)
    guard = deltas < _REFINE_FLOOR
    if b == 0.0:
        guard |= (TWO_PI - deltas) < _REFINE_FLOOR
    values = np.where(guard, limit, values)
    if not guard.all() and min_sin_sq < _DEGENERACY_TOL:
        raise GeometricDegeneracyError("degenerate circumradius profile")
    return CircumradiusProfile(
        deltas=deltas, rho_values=np.sqrt(values), limit_at_zero=math.sqrt(limit)
    )


def packing_density(profile: CodeProfile, grid_step: float = 1e-4, rho_global=None):
    """Fraction of the bounding sphere occupied by the tube.

    density = L * C_{n-1} * rho^(n-1) / (C_n * (1 + rho)^n).
    """
    n = profile.n
    if rho_global is None:
        rho_global = global_circumradius(profile, grid_step).rho
    length = path_length(profile)
    return (
        length
        * sphere_volume_coeff(n - 1)
        * rho_global ** (n - 1)
        / (sphere_volume_coeff(n) * (1.0 + rho_global) ** n)
    )


def tube_metrics(profile: CodeProfile, grid_step: float = 1e-4) -> TubeMetrics:
    """Assemble the tube radius, path length, and packing density."""
    radius = global_circumradius(profile, grid_step)
    length = path_length(profile)
    density = packing_density(profile, grid_step, rho_global=radius.rho)
    return TubeMetrics(
        rho_global=radius.rho,
        argmin_delta=radius.argmin_delta,
        path_length=length,
        density=density,
    )


class PackingObjective:
    """Tube-packing figure of merit J for harmonic frequencies 1..m.

    J(r) = L * rho_G^(n-1) / (1 + rho_G)^n, where rho_G is the grid minimum
    of the circumradius (the bounded-time surrogate used inside the
    optimizer: no golden refinement, which only shifts rho by O(step^2)).
    The trig tables over the separation grid are precomputed once, so each
    evaluation costs two weighted reductions over the grid.

    For odd ``n`` the parameter vector is ``[r_1..r_m, b]``.
    """

    def __init__(self, n: int, grid_step: float = 1e-3):
        if n < 2:
            raise ValueError("dimension must be >= 2")
        if not 0.0 < grid_step <= 1e-3:
            raise ValueError("grid step must be positive and <= 1e-3")
        self.n = n
        self.m = n // 2
        self.grid_step = grid_step
        self.w = np.arange(1, self.m + 1, dtype=float)
        self._w2 = self.w * self.w
        self._w4 = self._w2 * self._w2
        deltas = _grid(grid_step)
        keep = (deltas >= _REFINE_FLOOR) & (deltas <= TWO_PI - _REFINE_FLOOR)
        self.deltas = np.ascontiguousarray(deltas[keep])
        self.s2_t, self.sin_t = _tables(self.w, self.deltas)

    @property
    def dim(self):
        """Length of the parameter vector."""
        return self.m + (0 if self.n % 2 == 0 else 1)

    def __call__(self, params):
        params = np.asarray(params, dtype=float)
        if params.shape != (self.dim,):
            raise ProfileError(
                f"expected parameter vector of length {self.dim}, got {params.shape}"
            )
        if self.n % 2 == 0:
            radii, b = params, 0.0
        else:
            radii, b = params[:-1], float(params[-1])
            if b < 0.0:
                raise ProfileError("helix coefficient must be >= 0")
        if np.any(radii <= 0.0) or not np.all(np.isfinite(radii)):
            raise ProfileError("radius must be > 0 for full dimensionality")
        r2 = radii * radii
        rho_sq, _, min_sin_sq = kernels.rho_sq_scan(
            r2, self.w, b, self.deltas, self.s2_t, self.sin_t
        )
        if min_sin_sq < _DEGENERACY_TOL:
            raise GeometricDegeneracyError(
                "chord nearly parallel to tangent on the separation grid: "
                "straight-line segment"
            )
        t2 = float(r2 @ self._w2) + b * b
        limit = t2 * t2 / float(r2 @ self._w4)
        if limit < rho_sq:
            rho_sq = limit
        rho = math.sqrt(rho_sq)
        return TWO_PI * math.sqrt(t2) * rho ** (self.n - 1) / (1.0 + rho) ** self.n


@functools.lru_cache(maxsize=8)
def _cached_objective(n, grid_step):
    return PackingObjective(n, grid_step)


def packing_objective(radii, n: int, grid_step: float = 1e-3):
    """J(r) for an even-n code with unit-norm radii and harmonics 1..n/2."""
    if n % 2 != 0:
        raise ValueError("packing_objective expects even n; use PackingObjective")
    return _cached_objective(n, grid_step)(np.asarray(radii, dtype=float))
