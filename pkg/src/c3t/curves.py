"""Curve evaluation, closed-form derivatives, Frenet frames, and curvatures.

The encoder locus of an even-n code is

    x(a) = [r_1 cos(w_1 a), r_1 sin(w_1 a), ..., r_m cos(w_m a), r_m sin(w_m a)]

and an odd-n code appends a linear component ``b*a`` (a generalized helix).
Derivatives of any order come from the phase-shift identity: differentiating
a cos/sin pair k times multiplies it by ``w^k`` and advances its phase by
``k*pi/2``, so no numerical differencing is needed.  Frenet frames follow by
Gram-Schmidt on the derivative ladder, and the generalized curvatures from
central differences of the frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCurveError
from .profiles import CodeProfile

#: step for central differences of the frame when computing curvatures;
#: analytic frame derivatives exist, but finite differences keep this an
#: independent check of the constant-curvature property.
FRAME_DIFF_STEP = 1e-5

_RANK_TOL = 1e-12


@dataclass(frozen=True)
class FrenetFrame:
    """Orthonormal frame vectors e_1..e_m at one curve parameter."""

    alpha: float
    vectors: np.ndarray  # shape (m, n)

    def gram(self):
        return self.vectors @ self.vectors.T


@dataclass(frozen=True)
class CurvatureVector:
    """The n-1 generalized curvatures of an n-dimensional curve."""

    values: np.ndarray


def evaluate_curve(profile: CodeProfile, alpha):
    """Point on the encoder curve; ``alpha`` may be a scalar or an array.

    Returns shape ``(..., n)``.  Even-n points have unit norm by the radius
    constraint.
    """
    alpha_arr = np.asarray(alpha, dtype=float)
    r = profile.radii_array()
    w = profile.frequency_array()
    phase = np.multiply.outer(alpha_arr, w)  # (..., m)
    out = np.empty(alpha_arr.shape + (profile.n,), dtype=float)
    out[..., 0 : 2 * profile.m : 2] = r * np.cos(phase)
    out[..., 1 : 2 * profile.m : 2] = r * np.sin(phase)
    if not profile.is_even:
        out[..., -1] = profile.b * alpha_arr
    return out


def curve_derivative(profile: CodeProfile, alpha, k: int):
    """k-th derivative of the curve via the closed phase-shift form."""
    if k < 1:
        raise ValueError(f"derivative order must be >= 1, got {k}")
    alpha_arr = np.asarray(alpha, dtype=float)
    r = profile.radii_array()
    w = profile.frequency_array()
    scale = r * w**k
    phase = np.multiply.outer(alpha_arr, w) + 0.5 * math.pi * k
    out = np.empty(alpha_arr.shape + (profile.n,), dtype=float)
    out[..., 0 : 2 * profile.m : 2] = scale * np.cos(phase)
    out[..., 1 : 2 * profile.m : 2] = scale * np.sin(phase)
    if not profile.is_even:
        out[..., -1] = profile.b if k == 1 else 0.0
    return out


def speed(profile: CodeProfile):
    """Constant parametric speed ||x'(a)||."""
    r = profile.radii_array()
    w = profile.frequency_array()
    return math.sqrt(float(r * r @ (w * w)) + profile.b**2)


def path_length(profile: CodeProfile):
    """Total path length over a in [-pi, pi]: 2*pi*||x'||."""
    return 2.0 * math.pi * speed(profile)


def frenet_frame(profile: CodeProfile, alpha, m: int = None) -> FrenetFrame:
    """Orthonormal Frenet frame of order ``m`` (default: full order n).

    Modified Gram-Schmidt with one re-orthogonalization pass on the
    derivatives x', x'', ..., x^(m).  Raises :class:`DegenerateCurveError`
    naming the failing order when the derivatives lose rank (e.g. an odd-n
    profile with b = 0 at order n).
    """
    if m is None:
        m = profile.n
    if m > profile.n:
        raise ValueError(f"frame order {m} exceeds dimension {profile.n}")
    alpha = float(alpha)
    vectors = []
    for k in range(1, m + 1):
        d = curve_derivative(profile, alpha, k)
        scale = np.linalg.norm(d)
        v = d.copy()
        for _ in range(2):  # MGS + re-orthogonalization for 1e-9 class frames
            for e in vectors:
                v -= (v @ e) * e
        norm = np.linalg.norm(v)
        if norm < _RANK_TOL * max(1.0, scale):
            raise DegenerateCurveError(k)
        vectors.append(v / norm)
    return FrenetFrame(alpha=alpha, vectors=np.array(vectors))


def generalized_curvatures(
    profile: CodeProfile, alpha, step: float = FRAME_DIFF_STEP
) -> CurvatureVector:
    """All n-1 generalized curvatures at ``alpha``.

    chi_m = <e'_m, e_{m+1}> / ||x'|| with e'_m from central differences of
    the frame at ``alpha +/- step``.
    """
    n = profile.n
    alpha = float(alpha)
    center = frenet_frame(profile, alpha, n)
    plus = frenet_frame(profile, alpha + step, n)
    minus = frenet_frame(profile, alpha - step, n)
    dframe = (plus.vectors - minus.vectors) / (2.0 * step)
    v = speed(profile)
    chis = np.einsum("ij,ij->i", dframe[: n - 1], center.vectors[1:]) / v
    return CurvatureVector(values=chis)


def first_curvature(profile: CodeProfile):
    """Closed form chi_1 = ||x''|| / ||x'||^2 (constant along the curve)."""
    r2 = profile.radii_array() ** 2
    w = profile.frequency_array()
    num = math.sqrt(float(r2 @ w**4))
    den = float(r2 @ w**2) + profile.b**2
    return num / den
