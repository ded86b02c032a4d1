"""Acceptance gate: one test per published criterion, each printing a
single PASS/FAIL line (run pytest with -s or read captured output on
failure).  Tolerances are stated inline next to each assertion.
"""

import math
import time

import numpy as np
import pytest
from scipy import integrate as sciint

from lambda2p import (
    AtomParams,
    ModeGrid,
    ModelConfig,
    PulseParams,
    cascaded_probability,
    init_state,
    initial_wavepacket,
    integrate,
    transition_probability,
    transition_probability_asymptotic,
)
from lambda2p.cli import main as cli_main

GAMMA_A = 1.0
DELTA2_GRID = np.logspace(-3, 2, 40)


def report(idx, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {idx}: {detail}"
    print(line)
    assert ok, line


def panel_config(gamma_b, delta1, delta2):
    return ModelConfig(AtomParams(GAMMA_A, gamma_b), PulseParams(delta1, delta2))


def sweep_curves(gamma_b, delta1):
    exact, casc = [], []
    for d2 in DELTA2_GRID:
        cfg = panel_config(gamma_b, delta1, float(d2))
        exact.append(transition_probability_asymptotic(cfg).p)
        casc.append(cascaded_probability(cfg))
    return np.array(exact), np.array(casc)


def test_criterion_1_oracle_equivalence():
    """Panel C: analytic p(t) vs the discretized-mode integrator."""
    t0 = time.perf_counter()
    cfg = panel_config(0.5, 0.5, 0.5)
    gamma = cfg.atom.gamma_total
    grid = ModeGrid(center=0.0, half_width=30.0, n_modes=256)
    t_end = 40.0 / gamma
    sample_times = np.linspace(0.0, t_end, 41)
    state = init_state(cfg, grid)
    rep = integrate(state, cfg, grid, t_end, dt=0.01 / gamma,
                    sample_times=sample_times)
    diffs = []
    for t, p_oracle in zip(rep.times, rep.p_ab):
        p_exact = 0.0 if t == 0 else transition_probability(float(t), cfg).p
        diffs.append(abs(p_exact - p_oracle))
    max_diff = max(diffs)
    elapsed = time.perf_counter() - t0
    ok = max_diff <= 0.02 and rep.norm_drift <= 1e-7 and elapsed <= 300.0
    report(1, ok,
           f"max |p_analytic - p_oracle| = {max_diff:.4f} (<= 0.02), "
           f"norm drift = {rep.norm_drift:.2e} (<= 1e-7), {elapsed:.0f} s (<= 300)")


def test_criterion_2_panel_A_equivalence_regime():
    t0 = time.perf_counter()
    exact, casc = sweep_curves(gamma_b=0.5, delta1=0.001)
    dev = float(np.max(np.abs(exact - casc)))
    elapsed = time.perf_counter() - t0
    ok = dev <= 0.02 and elapsed <= 300.0
    report(2, ok, f"panel A max |p - p_cascaded| = {dev:.4f} (<= 0.02), {elapsed:.0f} s")


def test_criterion_3_panel_B_equivalence_regime():
    t0 = time.perf_counter()
    exact, casc = sweep_curves(gamma_b=0.5, delta1=100.0)
    dev = float(np.max(np.abs(exact - casc)))
    elapsed = time.perf_counter() - t0
    ok = dev <= 0.02 and elapsed <= 300.0
    report(3, ok, f"panel B max |p - p_cascaded| = {dev:.4f} (<= 0.02), {elapsed:.0f} s")


def test_criterion_4_panel_C_stimulated_emission_dip():
    exact, casc = sweep_curves(gamma_b=0.5, delta1=0.5)
    window = (DELTA2_GRID >= 0.1) & (DELTA2_GRID <= 10.0)
    idx = np.where(window)[0]
    interior = idx[(idx > 0) & (idx < len(DELTA2_GRID) - 1)]
    dips = [i for i in interior
            if exact[i] < exact[i - 1] and exact[i] < exact[i + 1]]
    casc_monotone = bool(np.all(np.diff(casc) <= 1e-12)
                         or np.all(np.diff(casc) >= -1e-12))
    gap = max((casc[i] - exact[i] for i in dips), default=0.0)
    ok = bool(dips) and casc_monotone and gap >= 0.02
    at = DELTA2_GRID[dips[0]] if dips else math.nan
    report(4, ok,
           f"panel C dip at delta2 = {at:.3g} with p_cascaded - p = {gap:.3f} "
           f"(>= 0.02), cascaded monotone = {casc_monotone}")


def test_criterion_5_inset_saturation():
    exact, casc = sweep_curves(gamma_b=1.0, delta1=0.001)
    ok = bool(np.all(exact >= 0.99) and np.all(casc >= 0.999))
    report(5, ok,
           f"inset min p = {exact.min():.5f} (>= 0.99), "
           f"min p_cascaded = {casc.min():.6f} (>= 0.999)")


def test_criterion_6_initial_state_normalization():
    rng = np.random.default_rng(20260823)
    rho = 1.0
    worst = 0.0
    for _ in range(10):
        d1, d2 = 10.0 ** rng.uniform(-1.3, 0.7, size=2)
        pulse = PulseParams(float(d1), float(d2))
        f = lambda r1, r2: np.abs(initial_wavepacket(r1, r2, pulse, rho)) ** 2
        L = 80.0 / min(pulse.delta1, pulse.delta2)
        val, _ = sciint.dblquad(f, -L, 0.0, -L, 0.0, epsabs=1e-13, epsrel=1e-13)
        total = 2.0 / (2.0 * np.pi * rho) ** 2 * val
        worst = max(worst, abs(total - 1.0))
    ok = worst <= 1e-9
    report(6, ok, f"max |norm - 1| over 10 random pulses = {worst:.2e} (<= 1e-9)")


def test_criterion_7_invariance_suite():
    base_cfg = panel_config(0.5, 0.5, 2.0)
    base = transition_probability_asymptotic(base_cfg).p

    rho7 = ModelConfig(base_cfg.atom, base_cfg.pulse, rho=7.0)
    wa = ModelConfig(AtomParams(1.0, 0.5, omega_a=5.0), base_cfg.pulse)
    dab = ModelConfig(AtomParams(1.0, 0.5, delta_ab=3.0), base_cfg.pulse)
    rel = max(abs(transition_probability_asymptotic(c).p - base) / base
              for c in (rho7, wa, dab))

    swap = ModelConfig(base_cfg.atom, base_cfg.pulse.swapped())
    swap_rel = abs(transition_probability_asymptotic(swap).p - base) / base

    rng = np.random.default_rng(7)
    bound_ok = True
    worst_p = 0.0
    for _ in range(500):
        ga, gb = 10.0 ** rng.uniform(-1, 1, size=2)
        d1, d2 = 10.0 ** rng.uniform(-2, 1.5, size=2)
        gamma = ga + gb
        t = float(rng.uniform(0.1, 20.0)) / gamma
        cfg = ModelConfig(AtomParams(float(ga), float(gb)),
                          PulseParams(float(d1), float(d2)))
        res = transition_probability(t, cfg)
        worst_p = max(worst_p, res.p)
        if not (-res.estimated_error <= res.p <= 1.0 + res.estimated_error):
            bound_ok = False
    ok = rel <= 1e-10 and swap_rel <= 1e-6 and bound_ok
    report(7, ok,
           f"max rel drift under rho*7 / omega_a+5 / delta_ab+3 = {rel:.1e} "
           f"(<= 1e-10), swap rel = {swap_rel:.1e} (<= 1e-6), "
           f"500-point bounds ok = {bound_ok} (max p = {worst_p:.4f})")


def test_criterion_8_removable_singularity_stability():
    gamma = 1.5  # gamma_a + gamma_b for panel-C rates
    lo = panel_config(0.5, 0.5, gamma * (1.0 - 1e-6))
    hi = panel_config(0.5, 0.5, gamma * (1.0 + 1e-6))
    p_lo = transition_probability_asymptotic(lo).p
    p_hi = transition_probability_asymptotic(hi).p
    rel = abs(p_hi - p_lo) / p_lo
    ok = rel <= 1e-4
    report(8, ok, f"rel change across delta2 = Gamma(1 +/- 1e-6): {rel:.2e} (<= 1e-4)")


def test_criterion_9_cascaded_closed_values():
    sym = cascaded_probability(
        ModelConfig(AtomParams(1.0, 1.0), PulseParams(1e-300, 1e-300)))
    asym = cascaded_probability(
        ModelConfig(AtomParams(1.0, 0.5), PulseParams(1e-300, 1e-300)))
    ok = sym == 1.0 and abs(asym - 80.0 / 81.0) <= 1e-12
    report(9, ok,
           f"p_cascaded(equal rates, narrowband) = {sym} (== 1), "
           f"p_cascaded(1, 0.5) = {asym:.15f} (80/81 to 1e-12)")


def test_criterion_10_fig2_determinism(tmp_path, monkeypatch):
    monkeypatch.setenv("LAMBDA2P_THREADS", "1")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli_main(["fig2", "--panel", "C", "--out", str(a)]) == 0
    assert cli_main(["fig2", "--panel", "C", "--out", str(b)]) == 0
    identical = a.read_bytes() == b.read_bytes()
    ok = identical and len(a.read_bytes()) > 0
    report(10, ok, f"two fig2 --panel C runs byte-identical = {identical}")
