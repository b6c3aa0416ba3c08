"""Source-to-curve encoding, the AWGN channel, and decoders.

A source symbol s in [-1, 1] is stretched to a curve parameter, folded onto
the encoder curve, and transmitted as one n-vector.  Decoding reverses the
pipeline from a noisy observation:

* grid-search correlation decoding (the exact posterior maximizer for a
  uniform source),
* torus projection: snap the observation onto the flat torus carrying the
  curve before decoding,
* angles-only decoding from the per-pair phases, with the pair amplitudes
  marginalized out analytically.

The per-component transmit power convention is P = E[||x||^2] / n, which is
1/n for even-n unit-sphere curves; SNR in dB fixes the noise variance as
sigma_w^2 = P / 10^(SNR/10).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import erfc, erfcx

from . import kernels
from .curves import evaluate_curve
from .profiles import CodeProfile, StretchMode

SOURCE_VARIANCE = 1.0 / 3.0  # variance of s ~ U[-1, 1]

_SQRT_PI = math.sqrt(math.pi)
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

#: golden-section half-width target for decoder refinement
MAP_REFINE_TOL = 1e-10

_PAIR_NORM_TOL = 1e-12


class FeatureMode(str, Enum):
    RAW = "raw"
    TORUS_PROJECTION = "tp"
    ANGLES_ONLY = "ao"


@dataclass(frozen=True)
class FeatureVector:
    """One decoder-input encoding of a channel output."""

    mode: FeatureMode
    data: np.ndarray


# ---------------------------------------------------------------------------
# stretching and encoding


def stretch(s, mode: StretchMode, n: int):
    """Map source symbols in [-1, 1] to curve parameters.

    Full-circle stretching uses the whole parameter interval, alpha = pi*s;
    the aliasing-safe variant compresses to alpha = 2*pi*s/n so that the
    fastest pair phase w_max * alpha stays within one branch of atan2.
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(np.abs(s_arr) > 1.0):
        raise ValueError("source symbol outside [-1, 1]")
    factor = math.pi if mode == StretchMode.FULL_CIRCLE else 2.0 * math.pi / n
    out = factor * s_arr
    return float(out) if np.ndim(s) == 0 else out


def unstretch(alpha, mode: StretchMode, n: int):
    """Exact inverse of :func:`stretch`."""
    alpha_arr = np.asarray(alpha, dtype=float)
    factor = math.pi if mode == StretchMode.FULL_CIRCLE else 2.0 * math.pi / n
    out = alpha_arr / factor
    return float(out) if np.ndim(alpha) == 0 else out


def stretch_image(mode: StretchMode, n: int):
    """Closed parameter interval reachable by the stretch map."""
    hi = math.pi if mode == StretchMode.FULL_CIRCLE else 2.0 * math.pi / n
    return -hi, hi


def encode(profile: CodeProfile, s):
    """Encode source symbols onto the curve; returns shape (..., n)."""
    return evaluate_curve(profile, stretch(s, profile.stretch, profile.n))


# ---------------------------------------------------------------------------
# channel


def average_power(profile: CodeProfile, stretch_mode: StretchMode = None):
    """Per-component average transmit power E[||x||^2] / n.

    Even-n curves sit on the unit sphere, so the power is exactly 1/n.  For
    odd n the helix component contributes b^2 E[alpha^2] under the uniform
    source and the configured stretch.
    """
    n = profile.n
    if profile.is_even:
        return 1.0 / n
    mode = profile.stretch if stretch_mode is None else stretch_mode
    hi = stretch_image(mode, n)[1]
    alpha_sq = hi * hi / 3.0  # E[alpha^2] for alpha ~ U[-hi, hi]
    r2 = float(profile.radii_array() @ profile.radii_array())
    return (r2 + profile.b**2 * alpha_sq) / n


@dataclass(frozen=True)
class ChannelSpec:
    """AWGN noise level bound to a transmit-power convention."""

    snr_db: float
    noise_var: float
    power: float

    @classmethod
    def from_power(cls, power: float, snr_db: float):
        if power <= 0:
            raise ValueError("power must be positive")
        return cls(
            snr_db=snr_db,
            noise_var=power / 10.0 ** (snr_db / 10.0),
            power=power,
        )

    @classmethod
    def for_profile(cls, profile: CodeProfile, snr_db: float):
        return cls.from_power(average_power(profile), snr_db)

    @property
    def snr_linear(self):
        return 10.0 ** (self.snr_db / 10.0)


def awgn_channel(x, spec: ChannelSpec, rng: np.random.Generator):
    """y = x + w with i.i.d. zero-mean Gaussian components."""
    x = np.asarray(x, dtype=float)
    return x + rng.normal(0.0, math.sqrt(spec.noise_var), x.shape)


# ---------------------------------------------------------------------------
# correlation (posterior) decoding


def _golden_max_vec(f, lo, hi, tol):
    """Vectorized golden-section maximization on per-row brackets.

    Fixed iteration count derived from the widest bracket keeps the control
    flow identical across rows; ties keep the lower subinterval.
    """
    lo = lo.astype(float).copy()
    hi = hi.astype(float).copy()
    width = float(np.max(hi - lo))
    if width <= tol:
        return 0.5 * (lo + hi)
    iters = max(1, int(math.ceil(math.log(tol / width) / math.log(_INVPHI))))
    for _ in range(iters):
        c = hi - _INVPHI * (hi - lo)
        d = lo + _INVPHI * (hi - lo)
        keep_low = f(c) >= f(d)
        hi = np.where(keep_low, d, hi)
        lo = np.where(keep_low, lo, c)
    return 0.5 * (lo + hi)


def _pair_parts(profile, y):
    r = profile.radii_array()
    m = profile.m
    yc = np.ascontiguousarray(y[:, 0 : 2 * m : 2] * r)
    ys = np.ascontiguousarray(y[:, 1 : 2 * m : 2] * r)
    return yc, ys


def map_decode(profile: CodeProfile, y, grid_points: int = 10000):
    """Posterior-maximizing decode over the configured stretch image.

    Coarse argmax of the pair correlation sum(r_i (y_c cos(w_i a) +
    y_s sin(w_i a))) on a uniform grid, then golden-section refinement.
    For odd n the score carries the helix term and the non-constant
    ||x(a)||^2 correction.
    """
    if grid_points < 2:
        raise ValueError("grid_points must be >= 2")
    y_arr = np.atleast_2d(np.asarray(y, dtype=float))
    if y_arr.shape[-1] != profile.n:
        raise ValueError(f"observation width {y_arr.shape[-1]} != n={profile.n}")
    w = profile.frequency_array()
    lo, hi = stretch_image(profile.stretch, profile.n)
    grid = np.linspace(lo, hi, grid_points)
    yc, ys = _pair_parts(profile, y_arr)

    if profile.is_even:
        cos_t = np.ascontiguousarray(np.cos(np.multiply.outer(w, grid)))
        sin_t = np.ascontiguousarray(np.sin(np.multiply.outer(w, grid)))
        idx = kernels.corr_argmax(yc, ys, cos_t, sin_t)

        def score(alpha):
            phase = alpha[:, None] * w
            return np.sum(yc * np.cos(phase) + ys * np.sin(phase), axis=1)

    else:
        b = profile.b
        tail = y_arr[:, -1]
        phase = np.multiply.outer(grid, w)
        # <y, x(a)> - ||x(a)||^2 / 2 up to constants; the helix component
        # makes the curve norm alpha-dependent
        corr = np.cos(phase) @ yc.T + np.sin(phase) @ ys.T  # (G, T)
        corr += np.outer(b * grid, tail)
        corr -= 0.5 * (b * b) * (grid * grid)[:, None]
        idx = np.argmax(corr, axis=0)

        def score(alpha):
            ph = alpha[:, None] * w
            s = np.sum(yc * np.cos(ph) + ys * np.sin(ph), axis=1)
            return s + b * alpha * tail - 0.5 * b * b * alpha * alpha

    spacing = (hi - lo) / (grid_points - 1)
    alpha_lo = np.maximum(grid[idx] - spacing, lo)
    alpha_hi = np.minimum(grid[idx] + spacing, hi)
    alpha_hat = _golden_max_vec(score, alpha_lo, alpha_hi, MAP_REFINE_TOL)
    s_hat = np.clip(unstretch(alpha_hat, profile.stretch, profile.n), -1.0, 1.0)
    return float(s_hat[0]) if np.ndim(y) == 1 else s_hat


# ---------------------------------------------------------------------------
# feature extractions


def torus_projection(profile: CodeProfile, y) -> FeatureVector:
    """Snap an observation onto the flat torus carrying the curve.

    Each cos/sin pair is replaced by the nearest point on its circle of
    radius r_i: the maximum-likelihood per-pair phase from atan2, rescaled
    to the known transmit radius.
    """
    if not profile.is_even:
        raise ValueError("torus projection requires even n")
    y_arr = np.atleast_2d(np.asarray(y, dtype=float))
    m = profile.m
    a = y_arr[:, 0 : 2 * m : 2]
    b = y_arr[:, 1 : 2 * m : 2]
    norms = np.hypot(a, b)
    if np.any(norms < _PAIR_NORM_TOL):
        raise ValueError("zero-norm pair: projection angle undefined")
    r = profile.radii_array()
    out = np.empty_like(y_arr)
    out[:, 0 : 2 * m : 2] = r * a / norms
    out[:, 1 : 2 * m : 2] = r * b / norms
    data = out[0] if np.ndim(y) == 1 else out
    return FeatureVector(mode=FeatureMode.TORUS_PROJECTION, data=data)


def angles_features(y) -> FeatureVector:
    """Per-pair four-quadrant angles of the observation; radii discarded."""
    y_arr = np.atleast_2d(np.asarray(y, dtype=float))
    if y_arr.shape[-1] % 2 != 0:
        raise ValueError("angles-only features require even n")
    a = y_arr[:, 0::2]
    b = y_arr[:, 1::2]
    if np.any(np.hypot(a, b) < _PAIR_NORM_TOL):
        raise ValueError("zero-norm pair: angle undefined")
    eta = np.arctan2(b, a)
    eta = np.where(eta <= -math.pi, math.pi, eta)  # land in (-pi, pi]
    data = eta[0] if np.ndim(y) == 1 else eta
    return FeatureVector(mode=FeatureMode.ANGLES_ONLY, data=data)


def features_for(profile: CodeProfile, y, mode: FeatureMode):
    """Plain feature array for a decoder input mode."""
    mode = FeatureMode(mode)
    if mode == FeatureMode.RAW:
        return np.asarray(y, dtype=float)
    if mode == FeatureMode.TORUS_PROJECTION:
        return torus_projection(profile, y).data
    return angles_features(y).data


# ---------------------------------------------------------------------------
# angles-only likelihood


def _log_angle_term(q):
    """log(1 + sqrt(pi) q e^(q^2) erfc(-q)), stable for all q.

    For q >= 0 the e^(q^2) growth is folded into the log; for q < 0 the
    scaled complementary error function avoids the 1 - (1 - eps)
    cancellation until far into the tail.
    """
    q = np.asarray(q, dtype=float)
    out = np.empty_like(q)
    pos = q >= 0
    qp = q[pos]
    out[pos] = qp * qp + np.log(
        2.0 * _SQRT_PI * qp + np.exp(-qp * qp) - _SQRT_PI * qp * erfc(qp)
    )
    qn = -q[~pos]
    out[~pos] = np.log1p(-_SQRT_PI * qn * erfcx(qn))
    return out


def angles_log_likelihood(profile: CodeProfile, eta, alpha, noise_var: float):
    """Log-likelihood of the pair angles given the curve parameter.

    Up to an alpha-independent constant this is

        sum_i log(1 + sqrt(pi) q_i e^(q_i^2) erfc(-q_i)),
        q_i = r_i cos(eta_i - w_i alpha) / sqrt(2 sigma_w^2).

    The additive form (erfc of -q) makes the likelihood largest where an
    angle agrees with its pair phase; the subtractive variant
    1 - sqrt(pi) q e^(q^2) erfc(q) decays there instead and disagrees with
    direct quadrature of the amplitude marginal.
    """
    if noise_var <= 0:
        raise ValueError("noise variance must be positive")
    eta_arr = np.asarray(eta, dtype=float)
    alpha_arr = np.asarray(alpha, dtype=float)
    r = profile.radii_array()
    w = profile.frequency_array()
    phase = eta_arr - np.multiply.outer(alpha_arr, w)
    q = r / math.sqrt(2.0 * noise_var) * np.cos(phase)
    val = np.sum(_log_angle_term(q), axis=-1)
    return float(val) if val.ndim == 0 else val


def angles_likelihood_approx(q):
    """Closed-form approximation of sqrt(pi) q e^(q^2) erfc(q).

    Rational/exponential fit with constants c = 1 - 2/pi, a = 0.8577,
    b = 0.024; accurate to a few percent for q >= 0 (the domain used by the
    approximate angles-only posterior).  The q -> 0 limit is 0.
    """
    q_arr = np.asarray(q, dtype=float)
    c = 1.0 - 2.0 / math.pi
    a = 0.8577
    b = 0.024
    with np.errstate(divide="ignore", invalid="ignore"):
        p = a * (1.0 - b * q_arr**2 * (1.0 - (a / math.pi**2) * q_arr))
        phi = 1.0 - c * np.exp(-q_arr * p)
        val = 2.0 / (1.0 + np.sqrt(1.0 + 2.0 * phi / q_arr**2))
    val = np.where(q_arr == 0.0, 0.0, val)
    return float(val) if np.ndim(q) == 0 else val


_AO_CHUNK = 512


def angles_map_decode(
    profile: CodeProfile, eta, noise_var: float, grid_points: int = 10000
):
    """Maximum-likelihood decode from pair angles only.

    Requires the aliasing-safe stretch so the observed angles are
    unambiguous over the parameter image.
    """
    if profile.stretch != StretchMode.ALIASING_SAFE:
        raise ValueError("angles-only decoding requires the aliasing-safe stretch")
    if grid_points < 2:
        raise ValueError("grid_points must be >= 2")
    eta_arr = np.atleast_2d(np.asarray(eta, dtype=float))
    if eta_arr.shape[-1] != profile.m:
        raise ValueError(f"expected {profile.m} angles, got {eta_arr.shape[-1]}")
    r = profile.radii_array()
    w = profile.frequency_array()
    scale = r / math.sqrt(2.0 * noise_var)
    lo, hi = stretch_image(profile.stretch, profile.n)
    grid = np.linspace(lo, hi, grid_points)

    trials = eta_arr.shape[0]
    idx = np.empty(trials, dtype=np.int64)
    for start in range(0, trials, _AO_CHUNK):
        stop = min(start + _AO_CHUNK, trials)
        # (chunk, G, m) phases
        phase = eta_arr[start:stop, None, :] - grid[None, :, None] * w
        q = scale * np.cos(phase)
        idx[start:stop] = np.argmax(np.sum(_log_angle_term(q), axis=-1), axis=-1)

    def score(alpha):
        q = scale * np.cos(eta_arr - alpha[:, None] * w)
        return np.sum(_log_angle_term(q), axis=-1)

    spacing = (hi - lo) / (grid_points - 1)
    alpha_lo = np.maximum(grid[idx] - spacing, lo)
    alpha_hi = np.minimum(grid[idx] + spacing, hi)
    alpha_hat = _golden_max_vec(score, alpha_lo, alpha_hi, MAP_REFINE_TOL)
    s_hat = np.clip(unstretch(alpha_hat, profile.stretch, profile.n), -1.0, 1.0)
    return float(s_hat[0]) if np.ndim(eta) == 1 else s_hat


# ---------------------------------------------------------------------------
# repetition baseline


def repetition_code(n: int, s, spec: ChannelSpec, rng: np.random.Generator):
    """Transmit the symbol n times at per-component power P, decode by mean.

    The pre-clamp closed form is SDR = n * SNR (linear): every repetition
    averages one more independent noise sample.
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(np.abs(s_arr) > 1.0):
        raise ValueError("source symbol outside [-1, 1]")
    amp = math.sqrt(spec.power / SOURCE_VARIANCE)
    x = np.repeat((amp * s_arr)[..., None], n, axis=-1)
    y = awgn_channel(x, spec, rng)
    s_hat = np.clip(y.mean(axis=-1) / amp, -1.0, 1.0)
    return float(s_hat) if np.ndim(s) == 0 else s_hat
