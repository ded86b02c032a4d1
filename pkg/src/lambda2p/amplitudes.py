"""Closed-form field and excited-state amplitudes.

All evaluators work in the frame rotating at the bare transition
frequency, where the resonant closed forms are real-valued; every
exported quantity is a modulus or a modulus-squared integral, so the
dropped global phase is unobservable.  Heaviside factors are closed on
the causal side (Theta(0) = 1).

Conventions for the two-photon initial state: photons propagate toward
+r, the atom sits at r = 0, and the packet occupies r <= 0 at t = 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import TWO_PI, ModelConfig, PulseParams, coupling_g, exp_dd
from .errors import ConfigError, UnsupportedConfigurationError
from .quadrature import QuadratureOptions, adaptive_vector_quad, geometric_breakpoints


def _require_resonant(pulse: PulseParams):
    if not pulse.is_resonant:
        raise UnsupportedConfigurationError(
            "closed-form path requires resonant photons (detuning1 = detuning2 = 0); "
            f"got detunings ({pulse.detuning1}, {pulse.detuning2})"
        )


def linewidth_ratio(pulse: PulseParams) -> float:
    """r12 = 4 d1 d2 / (d1 + d2)^2, in (0, 1]; equals 1 iff d1 = d2."""
    return 4.0 * pulse.delta1 * pulse.delta2 / (pulse.delta1 + pulse.delta2) ** 2


def normalization_N(pulse: PulseParams, rho: float) -> float:
    """Normalization of the symmetrized two-exponential packet,
    N = pi rho sqrt(d1 d2 / (1 + r12))."""
    _require_resonant(pulse)
    if rho <= 0:
        raise ConfigError(f"rho must be > 0, got {rho}")
    return math.pi * rho * math.sqrt(pulse.delta1 * pulse.delta2 / (1.0 + linewidth_ratio(pulse)))


def single_photon_envelope(r, delta: float, detuning: float = 0.0, c: float = 1.0):
    """f(r) = Theta(-r) exp[(delta/2 + i detuning) r / c] (rotating frame)."""
    r = np.asarray(r, dtype=float)
    inside = r <= 0.0
    amp = np.where(inside, np.exp(np.where(inside, 0.5 * delta * r / c, 0.0)), 0.0)
    out = amp * np.exp(1j * detuning * np.where(inside, r, 0.0) / c)
    return out if out.ndim else complex(out)


def initial_wavepacket(r1, r2, pulse: PulseParams, rho: float, c: float = 1.0):
    """phi^AA(r1, r2, 0) = N [f1(r1) f2(r2) + f1(r2) f2(r1)]."""
    norm = normalization_N(pulse, rho)
    f1r1 = single_photon_envelope(r1, pulse.delta1, pulse.detuning1, c)
    f2r2 = single_photon_envelope(r2, pulse.delta2, pulse.detuning2, c)
    f1r2 = single_photon_envelope(r2, pulse.delta1, pulse.detuning1, c)
    f2r1 = single_photon_envelope(r1, pulse.delta2, pulse.detuning2, c)
    return norm * (f1r1 * f2r2 + f1r2 * f2r1)


def _check_psi_args(t, config: ModelConfig):
    _require_resonant(config.pulse)
    if np.any(np.asarray(t) < 0):
        raise ConfigError("t must be >= 0")


def psi_A1(r, t, config: ModelConfig):
    """Single-drive part of the excited-state amplitude (one photon excites
    the atom while the other propagates freely).  Vanishes for r > c t."""
    _check_psi_args(t, config)
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    atom, pulse, c = config.atom, config.pulse, config.c
    g_tot = atom.gamma_total
    d1, d2 = pulse.delta1, pulse.delta2
    norm = normalization_N(pulse, config.rho)
    g_a = coupling_g(atom.gamma_a, config.rho)

    tau = t - r / c
    inside = tau >= 0.0
    tau_s = np.where(inside, tau, 0.0)
    k1 = t * exp_dd(-0.5 * d1 * t, -0.5 * g_tot * t)
    k2 = t * exp_dd(-0.5 * d2 * t, -0.5 * g_tot * t)
    val = -2.0 * norm * g_a * (
        np.exp(-0.5 * d1 * tau_s) * k2 + np.exp(-0.5 * d2 * tau_s) * k1
    )
    out = np.where(inside, val, 0.0).astype(complex)
    return out if out.ndim else complex(out)


def psi_A2(r, t, config: ModelConfig):
    """Stimulated-emission part of the excited-state amplitude (both photons
    have reached the atom).  Nonzero only for 0 <= r <= c t."""
    _check_psi_args(t, config)
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    atom, pulse, c = config.atom, config.pulse, config.c
    g_tot = atom.gamma_total
    d1, d2 = pulse.delta1, pulse.delta2
    norm = normalization_N(pulse, config.rho)
    g_a = coupling_g(atom.gamma_a, config.rho)

    tau = t - r / c
    inside = (r >= 0.0) & (tau >= 0.0)
    tau_s = np.where(inside, tau, 0.0)
    rt = t - tau_s  # = r/c inside the gate
    pd1 = rt * exp_dd(-0.5 * d1 * t, -0.5 * (g_tot * rt + d1 * tau_s))
    pd2 = rt * exp_dd(-0.5 * d2 * t, -0.5 * (g_tot * rt + d2 * tau_s))
    q1 = tau_s * exp_dd(-0.5 * d1 * tau_s, -0.5 * g_tot * tau_s)
    q2 = tau_s * exp_dd(-0.5 * d2 * tau_s, -0.5 * g_tot * tau_s)
    val = 2.0 * norm * g_a * atom.gamma_a * (pd1 * q2 + pd2 * q1)
    out = np.where(inside, val, 0.0).astype(complex)
    return out if out.ndim else complex(out)


def psi_A(r, t, config: ModelConfig):
    """Full excited-state amplitude for an atom starting in |a> (the
    homogeneous term vanishes): psi_A1 + psi_A2."""
    return psi_A1(r, t, config) + psi_A2(r, t, config)


class WavepacketKind(enum.Enum):
    SYMMETRIZED_EXPONENTIAL = "symmetrized_exponential"
    CUSTOM = "custom"


@dataclass(frozen=True)
class WavepacketSpec:
    """Initial two-photon packet phi^AA(r1, r2, 0).

    Custom packets supply a numpy-vectorized callable that is symmetric
    in its arguments and vanishes for r1 > 0 or r2 > 0, together with a
    support depth L > 0 beyond which the packet is negligible (sets the
    quadrature domain).
    """

    kind: WavepacketKind
    fn: Optional[Callable] = None
    support_depth: float = 0.0

    @staticmethod
    def symmetrized_exponential() -> "WavepacketSpec":
        return WavepacketSpec(WavepacketKind.SYMMETRIZED_EXPONENTIAL)

    @staticmethod
    def custom(fn: Callable, support_depth: float) -> "WavepacketSpec":
        if support_depth <= 0:
            raise ConfigError("support_depth must be > 0")
        spec = WavepacketSpec(WavepacketKind.CUSTOM, fn, support_depth)
        spec._validate()
        return spec

    def _validate(self, n_probe: int = 24):
        rng = np.random.default_rng(11)
        neg = -self.support_depth * rng.random(n_probe)
        pos = self.support_depth * rng.random(n_probe) + 1e-12
        if np.any(np.abs(self.fn(pos, neg)) > 0) or np.any(np.abs(self.fn(neg, pos)) > 0):
            raise ConfigError("custom packet must vanish for r1 > 0 or r2 > 0")
        a, b = self.fn(neg, neg[::-1]), self.fn(neg[::-1], neg)
        if not np.allclose(a, b, rtol=1e-10, atol=1e-12):
            raise ConfigError("custom packet must be symmetric under argument exchange")

    def evaluate(self, r1, r2, config: ModelConfig):
        if self.kind is WavepacketKind.SYMMETRIZED_EXPONENTIAL:
            return initial_wavepacket(r1, r2, config.pulse, config.rho, config.c)
        return np.asarray(self.fn(r1, r2), dtype=complex)

    def depth(self, config: ModelConfig) -> float:
        """Spatial extent used to bound quadrature domains."""
        if self.kind is WavepacketKind.SYMMETRIZED_EXPONENTIAL:
            return 80.0 * config.c / min(config.pulse.delta1, config.pulse.delta2)
        return self.support_depth


def psi_A_general(r: float, t: float, packet: WavepacketSpec, config: ModelConfig,
                  quad: QuadratureOptions | None = None) -> complex:
    """Excited-state amplitude for an arbitrary packet, by quadrature.

    Evaluates the single-drive time integral and the nested
    stimulated-emission double integral with their Heaviside gates; the
    homogeneous term vanishes for an atom starting in |a>.  Agrees with
    psi_A for the symmetrized-exponential packet to quadrature tolerance.
    """
    quad = quad or QuadratureOptions()
    if t < 0:
        raise ConfigError("t must be >= 0")
    atom, c = config.atom, config.c
    g_tot = atom.gamma_total
    g_a = coupling_g(atom.gamma_a, config.rho)
    tau = t - r / c
    if tau < 0 or t == 0:
        return 0.0 + 0.0j

    scale = 0.01 / max(g_tot, c / packet.depth(config))

    # one photon drives the atom while the other sits at r - c t
    def drive(tp):
        return np.stack([np.exp(-0.5 * g_tot * (t - tp)) * packet.evaluate(r - c * t, -c * tp, config)])

    pts = geometric_breakpoints(0.0, t, scale)
    term1, err1 = adaptive_vector_quad(drive, pts, quad, label="psi_A_general drive term")
    value = -2.0 * g_a * complex(term1[0])

    # both photons have arrived: nested integral over (t', t'') gated to
    # t' in [tau, t], t'' in [0, tau]; only present for 0 <= r <= c t
    if r >= 0.0:
        def outer(tp_arr):
            out = np.empty(len(tp_arr), dtype=complex)
            for j, tp in enumerate(tp_arr):
                def inner(tpp):
                    return np.stack([
                        np.exp(-0.5 * g_tot * (tau - tpp)) * packet.evaluate(-c * tp, -c * tpp, config)
                    ])
                ipts = geometric_breakpoints(0.0, tau, scale) if tau > 0 else np.array([0.0, 0.0])
                val, _ = adaptive_vector_quad(inner, ipts, quad, label="psi_A_general inner term")
                out[j] = val[0]
            return np.stack([np.exp(-0.5 * g_tot * (t - tp_arr)) * out])

        opts = geometric_breakpoints(tau, t, scale)
        term2, err2 = adaptive_vector_quad(outer, opts, quad, label="psi_A_general nested term")
        value += 2.0 * atom.gamma_a * g_a * complex(term2[0])

    return value


def phi_BA(r1, r2, t, config: ModelConfig):
    """Outgoing cross-polarized two-photon amplitude:
    sqrt(2 pi rho gamma_b)/2 * Theta(r2) Theta(t - r2/c)
    * exp(-i delta_ab r2 / c) * psi_A(r1 - r2, t - r2/c)."""
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    t = np.asarray(t, dtype=float)
    c = config.c
    gate = (r2 >= 0.0) & (t - r2 / c >= 0.0)
    r2_s = np.where(gate, r2, 0.0)
    pref = 0.5 * math.sqrt(TWO_PI * config.rho * config.atom.gamma_b)
    phase = np.exp(-1j * config.atom.delta_ab * r2_s / c)
    val = pref * phase * psi_A(r1 - r2_s, np.maximum(t - r2_s / c, 0.0), config)
    out = np.where(gate, val, 0.0)
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class AmplitudeField:
    """Sampled amplitude snapshot for export: values on an r grid (psi^A)
    or an (r1, r2) grid (phi^BA) at a fixed time."""

    t: float
    r1: np.ndarray
    values: np.ndarray
    r2: Optional[np.ndarray] = None

    def __post_init__(self):
        for axis in (self.r1, self.r2):
            if axis is not None and len(axis) > 1 and not np.all(np.diff(axis) > 0):
                raise ConfigError("grid axes must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ConfigError("field values must be finite")

    @property
    def abs2(self) -> np.ndarray:
        return np.abs(self.values) ** 2


def sample_psi_A(config: ModelConfig, t: float, r: np.ndarray) -> AmplitudeField:
    r = np.asarray(r, dtype=float)
    return AmplitudeField(t=t, r1=r, values=psi_A(r, t, config))


def sample_phi_BA(config: ModelConfig, t: float, r1: np.ndarray, r2: np.ndarray) -> AmplitudeField:
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    vals = phi_BA(r1[:, None], r2[None, :], t, config)
    return AmplitudeField(t=t, r1=r1, r2=r2, values=vals)
