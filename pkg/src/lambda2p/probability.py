"""Ground-state transition probability p_{a->b} and the cascaded model.

The exact probability integrates |phi^BA|^2 over its causal support.
After substituting the outgoing-amplitude relation, this reduces to
(2 pi rho gamma_b / (2 pi rho c)^2) * c * integral over t' in [0, t] of
the inner position integrals of |psi_A1|^2, |psi_A2|^2 and the cross
term, with the Heaviside gates folded into the limits.  The mode density
rho cancels between prefactor and amplitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .amplitudes import _require_resonant, psi_A1, psi_A2
from .core import TWO_PI, AtomParams, ModelConfig
from .errors import ConfigError, ConvergenceError
from .quadrature import (
    QuadratureOptions,
    geometric_breakpoints,
    integrate_with_error,
    refine_breakpoints,
)


@dataclass(frozen=True)
class TransitionResult:
    """p_{a->b} at time t (math.inf marks the converged asymptote).

    term_breakdown holds the (|psi_A1|^2, |psi_A2|^2, cross) contributions;
    they sum to p within estimated_error.  p is the raw quadrature value;
    p_reported clamps to [0, 1] for display.
    """

    p: float
    t: float
    estimated_error: float
    term_breakdown: Tuple[float, float, float]

    @property
    def p_reported(self) -> float:
        return min(max(self.p, 0.0), 1.0)


def _inner_integrals(config: ModelConfig, tp_arr: np.ndarray, quad: QuadratureOptions) -> np.ndarray:
    """Position integrals at each retarded time t'.

    Returns (4, m): integrals of psi1^2, psi2^2, 2 psi1 psi2 over
    s = r1 - r2, plus an error proxy (rule-pair difference + truncation
    tail bound).  psi2 is gated to s >= 0 by construction, so a single
    pass over [s_min, c t'] yields all three terms.
    """
    pulse, c = config.pulse, config.c
    kappa = min(pulse.delta1, pulse.delta2, config.atom.gamma_total)
    rate_max = max(pulse.delta1, pulse.delta2, config.atom.gamma_total)
    scale = 0.002 * c / rate_max
    out = np.empty((4, len(tp_arr)))
    for j, tp in enumerate(tp_arr):
        ct = c * tp
        s_min = -ct + quad.r1_cutoff * c / kappa
        if ct <= s_min:
            out[:, j] = 0.0
            continue
        # panels graded away from the pulse front (s = c t'), from the
        # atom position (s = 0, psi_A2 kink) and from the far cutoff
        pieces = [np.array([s_min, ct]),
                  ct - geometric_breakpoints(0.0, ct - s_min, scale)]
        if ct > 0:
            pieces.append(geometric_breakpoints(0.0, ct, scale))
        if s_min < 0:
            pieces.append(-geometric_breakpoints(0.0, -s_min, scale))
        pts = np.unique(np.concatenate(pieces))
        pts = pts[(pts >= s_min) & (pts <= ct)]

        def f(s):
            a = psi_A1(s, tp, config).real
            b = psi_A2(s, tp, config).real
            return np.stack([a * a, b * b, 2.0 * a * b])

        val, err = integrate_with_error(f, pts)
        # truncation tail: |psi1|^2 decays at least at rate kappa/c in -s
        edge = float(psi_A1(s_min, tp, config).real ** 2)
        out[:3, j] = val
        out[3, j] = err + edge * c / kappa
    return out


def _prefactor(config: ModelConfig) -> float:
    rho, c = config.rho, config.c
    return TWO_PI * rho * config.atom.gamma_b / (TWO_PI * rho * c) ** 2 * c


def transition_probability(t: float, config: ModelConfig,
                           quad: Optional[QuadratureOptions] = None) -> TransitionResult:
    """p_{a->b}(t) for the resonant symmetrized-exponential packet."""
    quad = quad or QuadratureOptions()
    _require_resonant(config.pulse)
    if t < 0:
        raise ConfigError("t must be >= 0")
    if t == 0 or config.atom.gamma_b == 0.0:
        return TransitionResult(0.0, t, 0.0, (0.0, 0.0, 0.0))

    pulse = config.pulse
    rate_max = max(pulse.delta1, pulse.delta2, config.atom.gamma_total)
    pts = geometric_breakpoints(0.0, t, 0.002 / rate_max)
    pref = _prefactor(config)

    def f(tp_arr):
        return _inner_integrals(config, tp_arr, quad)

    (i1, i2, i12, inner_err), outer_err = _adaptive_outer(f, pts, quad)
    p = pref * (i1 + i2 + i12)
    err = pref * (outer_err + inner_err)
    return TransitionResult(p, t, err, (pref * i1, pref * i2, pref * i12))


def _adaptive_outer(f, pts, quad: QuadratureOptions):
    """Outer time quadrature; error control on the probability components
    only (the integrated inner-error channel rides along)."""
    from .errors import QuadratureError

    for _ in range(quad.max_subdivisions):
        val, err = integrate_with_error(f, pts)
        bound = max(quad.abs_tol, quad.rel_tol * float(np.abs(val[:3]).sum()))
        if err <= bound:
            return val, err
        pts = refine_breakpoints(pts)
    raise QuadratureError(
        f"transition probability outer quadrature: error {err:.3e} above {bound:.3e}",
        partial=val, achieved_tol=err,
    )


def transition_probability_asymptotic(config: ModelConfig,
                                      quad: Optional[QuadratureOptions] = None,
                                      horizon_tol: float = 1e-6) -> TransitionResult:
    """p_{a->b}(infinity): evaluate at horizons t_n = n T0 with
    T0 = 10 max(1/Gamma, 1/delta1, 1/delta2) until successive values
    differ by less than horizon_tol."""
    quad = quad or QuadratureOptions()
    pulse, atom = config.pulse, config.atom
    t0 = 10.0 * max(1.0 / atom.gamma_total, 1.0 / pulse.delta1, 1.0 / pulse.delta2)
    prev = transition_probability(t0, config, quad)
    for n in range(2, 22):
        cur = transition_probability(n * t0, config, quad)
        if abs(cur.p - prev.p) < horizon_tol:
            err = cur.estimated_error + abs(cur.p - prev.p)
            return TransitionResult(cur.p, math.inf, err, cur.term_breakdown)
        prev = cur
    raise ConvergenceError(
        f"asymptotic probability did not settle within 20 horizon steps "
        f"(last change {abs(cur.p - prev.p):.3e})"
    )


def single_photon_probability(delta: float, atom: AtomParams) -> float:
    """One exponential photon of linewidth delta drives a->b with
    probability r_Gamma / (1 + delta/Gamma), r_Gamma = 4 Ga Gb / Gamma^2."""
    if delta <= 0:
        raise ConfigError(f"delta must be > 0, got {delta}")
    g_tot = atom.gamma_total
    r_gamma = 4.0 * atom.gamma_a * atom.gamma_b / g_tot**2
    return r_gamma / (1.0 + delta / g_tot)


def cascaded_probability(config: ModelConfig) -> float:
    """Two consecutive independent single-photon events:
    p1 + (1 - p1) p2."""
    p1 = single_photon_probability(config.pulse.delta1, config.atom)
    p2 = single_photon_probability(config.pulse.delta2, config.atom)
    return p1 + (1.0 - p1) * p2


def purified_population(p_a0: float, config: ModelConfig,
                        quad: Optional[QuadratureOptions] = None) -> float:
    """Asymptotic |b> population starting from the mixture
    p_a0 |a><a| + (1 - p_a0) |b><b|; photons leave |b> untouched."""
    if not 0.0 <= p_a0 <= 1.0:
        raise ConfigError(f"p_a0 must be in [0, 1], got {p_a0}")
    if p_a0 == 0.0:
        return 1.0
    return (1.0 - p_a0) + p_a0 * transition_probability_asymptotic(config, quad).p
