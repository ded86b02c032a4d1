"""Physical parameter types, unit conventions, and stable special functions.

Default unit system: c = 1 and gamma_a = 1, so lengths are in units of
c/gamma_a and times in 1/gamma_a.  All exported probabilities are
independent of the mode density ``rho``, of the propagation speed ``c``,
of the bare transition frequency ``omega_a`` (a rotating-frame phase) and
of the ground-state splitting ``delta_ab`` (a phase on the outgoing
cross-polarized amplitude).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class AtomParams:
    """Three-level lambda atom: two ground states a, b below one excited state e.

    gamma_a, gamma_b are the e->a and e->b decay rates, omega_a the e<->a
    transition frequency (enters only as a global phase), delta_ab the
    ground-state splitting omega_a - omega_b.
    """

    gamma_a: float
    gamma_b: float
    omega_a: float = 0.0
    delta_ab: float = 0.0

    def __post_init__(self):
        if not (self.gamma_a >= 0 and math.isfinite(self.gamma_a)):
            raise ConfigError(f"gamma_a must be >= 0 and finite, got {self.gamma_a}")
        if not (self.gamma_b >= 0 and math.isfinite(self.gamma_b)):
            raise ConfigError(f"gamma_b must be >= 0 and finite, got {self.gamma_b}")
        if self.gamma_a + self.gamma_b <= 0:
            raise ConfigError("gamma_a + gamma_b must be > 0")
        if not math.isfinite(self.omega_a) or not math.isfinite(self.delta_ab):
            raise ConfigError("omega_a and delta_ab must be finite")

    @property
    def gamma_total(self) -> float:
        """Total excited-state decay rate gamma_a + gamma_b."""
        return self.gamma_a + self.gamma_b


@dataclass(frozen=True)
class PulseParams:
    """Two exponential-envelope photons: linewidths and carrier detunings.

    detuning1/2 are the carrier offsets from the e<->a transition; the
    closed-form evaluators require both to be exactly zero.
    """

    delta1: float
    delta2: float
    detuning1: float = 0.0
    detuning2: float = 0.0

    def __post_init__(self):
        if not (self.delta1 > 0 and math.isfinite(self.delta1)):
            raise ConfigError(f"delta1 must be > 0 and finite, got {self.delta1}")
        if not (self.delta2 > 0 and math.isfinite(self.delta2)):
            raise ConfigError(f"delta2 must be > 0 and finite, got {self.delta2}")
        if not math.isfinite(self.detuning1) or not math.isfinite(self.detuning2):
            raise ConfigError("detunings must be finite")

    @property
    def is_resonant(self) -> bool:
        return self.detuning1 == 0.0 and self.detuning2 == 0.0

    def swapped(self) -> "PulseParams":
        """Photon 1 <-> photon 2 exchange (the initial state is symmetric)."""
        return PulseParams(self.delta2, self.delta1, self.detuning2, self.detuning1)


@dataclass(frozen=True)
class ModelConfig:
    """Atom + pulse + numerical conventions (mode density rho, speed c)."""

    atom: AtomParams
    pulse: PulseParams
    rho: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if not (self.rho > 0 and math.isfinite(self.rho)):
            raise ConfigError(f"rho must be > 0 and finite, got {self.rho}")
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ConfigError(f"c must be > 0 and finite, got {self.c}")


def coupling_g(gamma: float, rho: float) -> float:
    """Per-mode coupling reproducing the decay rate gamma on a continuum of
    mode density rho: g = sqrt(gamma / (2 pi rho))."""
    if gamma < 0:
        raise ConfigError(f"gamma must be >= 0, got {gamma}")
    if rho <= 0:
        raise ConfigError(f"rho must be > 0, got {rho}")
    return math.sqrt(gamma / (TWO_PI * rho))


# phi1 Taylor switch point; 6 terms at |z| < 1e-4 leave relative error
# below 1e-25 while avoiding the (e^z - 1) cancellation.
_PHI1_SERIES_CUT = 1e-4


def phi1(x, t: float):
    """(e^{x t} - 1) / x with the removable singularity at x = 0 -> t.

    Accepts real or complex rate x; t must be >= 0.
    """
    if t < 0:
        raise ConfigError(f"t must be >= 0, got {t}")
    z = x * t
    if isinstance(z, complex):
        if abs(z) < 0.5:
            # longer series: complex exp has no expm1, direct form cancels
            term = 1.0 + 0j
            acc = 1.0 + 0j
            for n in range(2, 18):
                term *= z / n
                acc += term
                if abs(term) < 1e-18 * abs(acc):
                    break
            return t * acc
        return (cmath.exp(z) - 1.0) / x
    if abs(z) < _PHI1_SERIES_CUT:
        return t * (1.0 + z * (1.0 / 2 + z * (1.0 / 6 + z * (1.0 / 24 + z * (1.0 / 120 + z / 720)))))
    return math.expm1(z) / x


def exp_dd(a, b):
    """Divided difference (e^a - e^b)/(a - b), elementwise and stable.

    The removable singularity at a = b evaluates to e^a.  Safe against
    overflow for non-positive arguments of any magnitude; this is the
    workhorse behind every (Gamma - Delta_k) denominator, so the closed
    forms stay finite at Delta_k = Gamma.  Note phi1(x, t) = t * exp_dd(x t, 0).
    """
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    hi = np.maximum(a, b)
    lo = np.minimum(a, b)
    d = hi - lo
    safe = np.where(d == 0.0, 1.0, d)
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.where(
            d < 1e-12,
            np.exp(hi),
            np.where(
                d > 50.0,
                # e^lo negligible relative to e^hi: direct form, no cancellation
                (np.exp(hi) - np.exp(lo)) / safe,
                np.exp(lo) * np.expm1(d) / safe,
            ),
        )
    if out.ndim == 0:
        return float(out)
    return out
