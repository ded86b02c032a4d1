"""Panel-based Gauss-Legendre quadrature with embedded error estimates.

The transition-probability integrands are smooth sums of exponentials
inside each Heaviside region, with dynamics on widely separated scales
(1/Gamma up to 1/min(Delta)).  Geometrically graded panels anchored at
the Heaviside breakpoints resolve every scale; a 15/31-point rule pair
per panel provides the error estimate.  Integrands are evaluated
vectorized over all nodes of all panels at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError, QuadratureError


@dataclass(frozen=True)
class QuadratureOptions:
    """Tolerances and domain-truncation controls for probability integrals.

    r1_cutoff stands in for the -infinity lower limit of the r1
    integration: the domain is truncated at r1 = -(c t) + r1_cutoff * c / kappa
    with kappa = min(delta1, delta2, gamma_total).  The exponential tail
    beyond the cutoff is bounded analytically and added to the error.
    """

    abs_tol: float = 1e-9
    rel_tol: float = 1e-7
    max_subdivisions: int = 4
    r1_cutoff: float = -40.0

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ConfigError("tolerances must be > 0")
        if self.max_subdivisions < 1:
            raise ConfigError("max_subdivisions must be >= 1")
        if self.r1_cutoff >= 0:
            raise ConfigError("r1_cutoff must be < 0")


@lru_cache(maxsize=None)
def _gl_rule(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def panel_integrate(f, pts: np.ndarray, n: int) -> np.ndarray:
    """Integrate vector-valued f over [pts[0], pts[-1]] split at pts.

    f maps a flat node array (m,) to values (k, m); returns (k,).
    """
    x, w = _gl_rule(n)
    a = pts[:-1]
    b = pts[1:]
    h = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    nodes = (mid[:, None] + h[:, None] * x[None, :]).ravel()
    vals = np.asarray(f(nodes))
    vals = vals.reshape(vals.shape[0], len(a), n)
    return np.einsum("kpn,n,p->k", vals, w, h)


def integrate_with_error(f, pts: np.ndarray, n_lo: int = 15, n_hi: int = 31):
    """(value, error) from an embedded low/high rule pair on shared panels."""
    lo = panel_integrate(f, pts, n_lo)
    hi = panel_integrate(f, pts, n_hi)
    return hi, float(np.abs(hi - lo).sum())


def geometric_breakpoints(lo: float, hi: float, scale: float, ratio: float = 2.0) -> np.ndarray:
    """Panel edges from lo to hi, geometrically graded away from lo.

    The first panel has width `scale`; widths then grow by `ratio`, so a
    feature of any width >= scale near lo is resolved with O(log) panels.
    """
    if hi <= lo:
        return np.array([lo, hi]) if hi == lo else np.array([lo])
    pts = [lo]
    step = scale
    while pts[-1] + step < hi:
        pts.append(pts[-1] + step)
        step *= ratio
    pts.append(hi)
    return np.array(pts)


def refine_breakpoints(pts: np.ndarray) -> np.ndarray:
    """Bisect every panel (one refinement level)."""
    mids = 0.5 * (pts[:-1] + pts[1:])
    return np.sort(np.concatenate([pts, mids]))


def adaptive_vector_quad(f, pts: np.ndarray, opts: QuadratureOptions, label: str = "integral"):
    """Integrate vector-valued f, refining all panels until the rule-pair
    error estimate on the component sum meets opts; raises QuadratureError
    (carrying the partial result) if max_subdivisions is exhausted."""
    pts = np.asarray(pts, dtype=float)
    for _ in range(opts.max_subdivisions):
        val, err = integrate_with_error(f, pts)
        bound = max(opts.abs_tol, opts.rel_tol * float(np.abs(val).sum()))
        if err <= bound:
            return val, err
        pts = refine_breakpoints(pts)
    raise QuadratureError(
        f"{label}: error estimate {err:.3e} above tolerance {bound:.3e} "
        f"after {opts.max_subdivisions} refinements",
        partial=val,
        achieved_tol=err,
    )
