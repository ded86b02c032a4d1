import math

import numpy as np
import pytest

from lambda2p import (
    AtomParams,
    ConfigError,
    ModelConfig,
    PulseParams,
    cascaded_probability,
    purified_population,
    single_photon_probability,
    transition_probability,
    transition_probability_asymptotic,
)

PANEL_C = ModelConfig(AtomParams(1.0, 0.5), PulseParams(0.5, 0.5))


def test_trivial_zeros():
    res = transition_probability(0.0, PANEL_C)
    assert res.p == 0.0 and res.estimated_error == 0.0
    no_b = ModelConfig(AtomParams(1.0, 0.0), PulseParams(0.5, 0.5))
    assert transition_probability(5.0, no_b).p == 0.0
    with pytest.raises(ConfigError):
        transition_probability(-1.0, PANEL_C)


def test_frozen_panel_c_values():
    # frozen against the discretized-mode integrator and an independent
    # quadrature prototype
    res = transition_probability(80.0 / 3.0, PANEL_C)
    assert res.p == pytest.approx(0.666664507431613, abs=5e-9)
    inf = transition_probability_asymptotic(PANEL_C)
    assert inf.p == pytest.approx(2.0 / 3.0, abs=1e-6)
    assert math.isinf(inf.t)


def test_term_breakdown_sums_to_p():
    res = transition_probability(5.0, PANEL_C)
    assert sum(res.term_breakdown) == pytest.approx(res.p, rel=1e-12)
    # cross term is negative here: stimulated emission removes population
    assert res.term_breakdown[2] < 0


def test_monotone_in_time():
    times = [0.5, 1.0, 2.0, 5.0, 12.0, 30.0]
    ps = [transition_probability(t, PANEL_C).p for t in times]
    assert all(b >= a - 1e-12 for a, b in zip(ps, ps[1:]))


def test_p_reported_clamps():
    from lambda2p.probability import TransitionResult

    r = TransitionResult(p=1.0 + 3e-12, t=1.0, estimated_error=1e-11,
                         term_breakdown=(1.0, 0.0, 3e-12))
    assert r.p_reported == 1.0
    assert TransitionResult(-1e-15, 1.0, 1e-12, (0, 0, 0)).p_reported == 0.0


def test_swap_symmetry():
    cfg = ModelConfig(AtomParams(1.0, 0.5), PulseParams(0.2, 3.0))
    swapped = ModelConfig(cfg.atom, cfg.pulse.swapped())
    a = transition_probability(8.0, cfg).p
    b = transition_probability(8.0, swapped).p
    assert a == pytest.approx(b, abs=1e-8)


def test_single_photon_probability():
    atom = AtomParams(1.0, 0.5)
    # r_Gamma / (1 + delta/Gamma) with r_Gamma = 8/9
    assert single_photon_probability(1.5, atom) == pytest.approx((8.0 / 9.0) / 2.0, rel=1e-14)
    with pytest.raises(ConfigError):
        single_photon_probability(0.0, atom)


def test_cascaded_probability_closed_values():
    narrow = ModelConfig(AtomParams(1.0, 0.5), PulseParams(1e-300, 1e-300))
    assert cascaded_probability(narrow) == pytest.approx(80.0 / 81.0, abs=1e-15)
    sym = ModelConfig(AtomParams(1.0, 1.0), PulseParams(1e-300, 1e-300))
    assert cascaded_probability(sym) == 1.0


def test_purified_population():
    assert purified_population(0.0, PANEL_C) == 1.0
    p_inf = transition_probability_asymptotic(PANEL_C).p
    got = purified_population(0.25, PANEL_C)
    assert got == pytest.approx(0.75 + 0.25 * p_inf, rel=1e-10)
    with pytest.raises(ConfigError):
        purified_population(1.5, PANEL_C)


def test_rho_and_c_independence():
    base = transition_probability(6.0, PANEL_C).p
    scaled = ModelConfig(PANEL_C.atom, PANEL_C.pulse, rho=7.0)
    assert transition_probability(6.0, scaled).p == pytest.approx(base, rel=1e-12)
    # c rescales space only; p(t) at fixed t is unchanged
    fast = ModelConfig(PANEL_C.atom, PANEL_C.pulse, c=3.0)
    assert transition_probability(6.0, fast).p == pytest.approx(base, rel=1e-9)


def test_error_estimate_is_honest():
    res = transition_probability(10.0, PANEL_C)
    ref = transition_probability(10.0, PANEL_C)  # deterministic
    assert res.p == ref.p
    assert res.estimated_error < 1e-6
    # the frozen asymptote sits inside the reported error band
    inf = transition_probability_asymptotic(PANEL_C)
    assert abs(inf.p - 2.0 / 3.0) <= max(inf.estimated_error, 1e-8)


def test_purified_population_inset_regime():
    cfg = ModelConfig(AtomParams(1.0, 1.0), PulseParams(0.001, 0.1))
    assert purified_population(0.5, cfg) >= 0.995
