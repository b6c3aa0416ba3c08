"""Code profiles: the complete parameterization of one curve code.

A profile fixes the ambient dimension ``n``, the per-pair radii ``r_1..r_m``
(``m = n//2``), the integer frequencies ``w_1..w_m``, an optional helix
coefficient ``b`` (odd ``n`` only), and the stretch convention that maps
source symbols onto the curve parameter.  Even-n curves live on a flat torus
inside the unit sphere, so the radii must satisfy ``sum(r_i^2) == 1``; odd-n
generalized helices satisfy ``sum(r_i^2) + pi^2 b^2 <= 1``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import ProfileError

UNIT_NORM_TOL = 1e-12


class StretchMode(str, Enum):
    """How source symbols in [-1, 1] map onto the curve parameter."""

    FULL_CIRCLE = "full"
    ALIASING_SAFE = "aliasing_safe"


def default_frequencies(n):
    """Lowest unique harmonics 1..m for an n-dimensional code."""
    return tuple(range(1, n // 2 + 1))


def unit_radii(values):
    """Scale a positive radius vector onto the unit sphere."""
    arr = np.asarray(values, dtype=float)
    norm = math.sqrt(float(arr @ arr))
    if norm <= 0.0:
        raise ProfileError("radius vector must be nonzero")
    return tuple(float(v) for v in arr / norm)


@dataclass(frozen=True)
class CodeProfile:
    """Immutable parameter set for one constant curvature curve code."""

    n: int
    radii: tuple
    frequencies: tuple = None
    helix_coeff: float = None
    stretch: StretchMode = StretchMode.FULL_CIRCLE

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise ProfileError(f"dimension must be an integer >= 2, got {self.n!r}")
        m = self.n // 2
        radii = tuple(float(r) for r in self.radii)
        object.__setattr__(self, "radii", radii)
        if len(radii) != m:
            raise ProfileError(f"expected {m} radii for n={self.n}, got {len(radii)}")
        if not all(math.isfinite(r) and r > 0.0 for r in radii):
            raise ProfileError("all radii must be positive and finite")

        freqs = self.frequencies
        if freqs is None:
            freqs = default_frequencies(self.n)
        freqs = tuple(int(w) for w in freqs)
        object.__setattr__(self, "frequencies", freqs)
        if len(freqs) != m:
            raise ProfileError(f"expected {m} frequencies for n={self.n}, got {len(freqs)}")
        if any(w <= 0 for w in freqs):
            raise ProfileError("frequencies must be positive integers")
        if len(set(freqs)) != m:
            raise ProfileError("frequencies must be distinct (the curve must be twisted)")

        object.__setattr__(self, "stretch", StretchMode(self.stretch))

        sum_sq = math.fsum(r * r for r in radii)
        if self.n % 2 == 0:
            if self.helix_coeff is not None:
                raise ProfileError("helix coefficient is only defined for odd n")
            if abs(sum_sq - 1.0) > UNIT_NORM_TOL:
                raise ProfileError(
                    f"even-n radii must satisfy sum(r^2) = 1 within {UNIT_NORM_TOL}; "
                    f"got sum(r^2) = {sum_sq!r}"
                )
        else:
            if self.helix_coeff is None:
                raise ProfileError("odd n requires a helix coefficient b >= 0")
            b = float(self.helix_coeff)
            object.__setattr__(self, "helix_coeff", b)
            if not math.isfinite(b) or b < 0.0:
                raise ProfileError("helix coefficient must be finite and >= 0")
            if b == 0.0:
                warnings.warn(
                    "helix coefficient b = 0 degenerates to a planar even-structure "
                    "curve; frame construction beyond order n-1 will fail",
                    stacklevel=3,
                )
            if sum_sq + math.pi**2 * b * b > 1.0 + UNIT_NORM_TOL:
                raise ProfileError(
                    "odd-n curve exceeds the unit sphere: require "
                    f"sum(r^2) + pi^2 b^2 <= 1, got {sum_sq + math.pi ** 2 * b * b!r}"
                )

    @property
    def m(self):
        """Number of cos/sin pairs."""
        return self.n // 2

    @property
    def is_even(self):
        return self.n % 2 == 0

    @property
    def b(self):
        """Helix coefficient as a float (0.0 for even n)."""
        return 0.0 if self.helix_coeff is None else self.helix_coeff

    def radii_array(self):
        return np.asarray(self.radii, dtype=float)

    def frequency_array(self):
        return np.asarray(self.frequencies, dtype=float)

    def to_dict(self):
        doc = {
            "n": self.n,
            "radii": list(self.radii),
            "frequencies": list(self.frequencies),
            "stretch": self.stretch.value,
        }
        if self.helix_coeff is not None:
            doc["b"] = self.helix_coeff
        return doc

    @classmethod
    def from_dict(cls, doc):
        try:
            n = doc["n"]
            radii = doc["radii"]
        except KeyError as exc:
            raise ProfileError(f"profile document missing field {exc}") from exc
        return cls(
            n=int(n),
            radii=tuple(radii),
            frequencies=tuple(doc["frequencies"]) if "frequencies" in doc else None,
            helix_coeff=doc.get("b"),
            stretch=StretchMode(doc.get("stretch", "full")),
        )

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text()))
