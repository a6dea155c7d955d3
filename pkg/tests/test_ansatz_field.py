"""Phase-field assembly, field strength, currents and the vacuum scan."""

import math
import warnings

import numpy as np
import pytest

from su2reduce import ansatz_field, checks, config, lattice

import oracles


def small_grid(n=8):
    return lattice.Grid4.cubic(n)


def scenario_field(grid, scale=1.0):
    return checks.phase_field(config.ScenarioConfig(), grid, scale=scale)


def gradient_field(grid):
    return checks.gradient_base_field(config.ScenarioConfig(), grid)


def test_mode_validation():
    with pytest.raises(ValueError):
        ansatz_field.Mode(0, (0, 1, 0, 0), 1.0)
    with pytest.raises(ValueError):
        ansatz_field.Mode(5, (0, 1, 0, 0), 1.0)
    with pytest.raises(ValueError):
        ansatz_field.Mode(1, (0, 1, 0), 1.0)
    with pytest.raises(ValueError):
        ansatz_field.Mode(1, (0, 1.5, 0, 0), 1.0)
    with pytest.raises(ValueError):
        ansatz_field.Mode(1, (0, 1, 0, 0), math.inf)


def test_gradient_wave_modes_layout():
    grid = small_grid()
    modes = ansatz_field.gradient_wave_modes(grid, (1, 1, 0, 0), 0.7, phase=0.2)
    assert [m.component for m in modes] == [1, 2]
    for m in modes:
        k = 2.0 * math.pi * 1 / grid.length(m.component)
        assert m.amplitude == 0.7 * k
        assert m.phase == 0.2 + 0.5 * math.pi
        assert m.cycles == (1, 1, 0, 0)
    with pytest.raises(ValueError):
        ansatz_field.gradient_wave_modes(grid, (0, 0, 0, 0), 1.0)


def test_from_modes_matches_plain_sine_sum():
    grid = small_grid()
    rng = np.random.default_rng(3)
    recs = oracles.random_modes(rng, grid, count=4)
    modes = [ansatz_field.Mode(r.component, r.cycles, r.amplitude, r.phase) for r in recs]
    lam = ansatz_field.LambdaField.from_modes(grid, modes)
    assert np.max(np.abs(lam.values - oracles.lambda_values(grid, recs))) < 1e-15


def test_lambda_field_validation_and_scaling():
    grid = small_grid(4)
    with pytest.raises(lattice.GridMismatchError):
        ansatz_field.LambdaField(grid, np.zeros((3,) + grid.dims))
    bad = np.zeros((4,) + grid.dims)
    bad[0, 0, 0, 0, 0] = np.nan
    with pytest.raises(ValueError):
        ansatz_field.LambdaField(grid, bad)
    lam = scenario_field(grid)
    assert np.array_equal(lam.scaled(2.0).values, 2.0 * lam.values)


def test_zero_field_gives_exact_zeros():
    grid = small_grid(4)
    lam = ansatz_field.LambdaField.zero(grid)
    prof = ansatz_field.build_profile(lam)
    assert np.array_equal(prof.values, np.ones((4,) + grid.dims, dtype=complex))
    assert ansatz_field.field_strength_ansatz(lam).max_abs() == 0.0
    assert lattice.max_abs(ansatz_field.noether_current(lam)) == 0.0
    assert lattice.max_abs(ansatz_field.anomalous_current(lam, 1.0)) == 0.0
    assert lattice.max_abs(ansatz_field.anomaly_divergence_closed_form(lam, 1.0)) == 0.0
    assert lattice.max_abs(ansatz_field.field_equation_residual_full(lam, 1.0)) == 0.0
    den = ansatz_field.lagrangian_density(lam)
    assert lattice.max_abs(den.values) == 0.0


def test_profile_is_unit_modulus_phase():
    grid = small_grid()
    lam = scenario_field(grid)
    prof = ansatz_field.build_profile(lam)
    assert prof.unit_modulus_defect() < 1e-15
    assert lattice.max_abs(prof.values - np.exp(-1j * lam.values)) == 0.0


def test_phase_gradients_match_dispersion_table():
    grid = small_grid()
    cfg = config.ScenarioConfig()
    lam = checks.phase_field(cfg, grid)
    recs = [
        ansatz_field.Mode(comp, cyc, amp, ph)
        for comp, (cyc, amp, ph) in zip(cfg.phase_components, cfg.phase_waves)
    ]
    G = ansatz_field.phase_gradients(lam)
    assert np.max(np.abs(G - oracles.gradient_table(grid, recs))) < 1e-13


def test_field_strength_matches_oracle():
    grid = small_grid()
    cfg = config.ScenarioConfig()
    lam = checks.phase_field(cfg, grid)
    recs = [
        ansatz_field.Mode(comp, cyc, amp, ph)
        for comp, (cyc, amp, ph) in zip(cfg.phase_components, cfg.phase_waves)
    ]
    F = ansatz_field.field_strength_ansatz(lam)
    assert np.max(np.abs(F.values - oracles.field_strength_oracle(grid, recs))) < 1e-13
    assert F.antisymmetry_defect() == 0.0
    assert np.array_equal(F.component(1, 2), F.values[0, 1])


def test_direct_analytic_route_agrees_with_ansatz_form():
    grid = small_grid()
    lam = scenario_field(grid)
    prof = ansatz_field.build_profile(lam)
    Fa = ansatz_field.field_strength_ansatz(lam)
    Fd = ansatz_field.field_strength_direct(prof, 1.0, mode=ansatz_field.ANALYTIC)
    assert lattice.max_abs(Fa.values - Fd.values) < 1e-13


def test_direct_raw_route_converges_at_order_two():
    est = checks.raw_field_strength_order(config.ScenarioConfig(raw_order_grids=(8, 16, 32)))
    assert est.order is not None
    assert abs(est.order - 2.0) < 0.3


def test_field_strength_direct_input_guards():
    grid = small_grid(4)
    lam = scenario_field(grid)
    prof = ansatz_field.build_profile(lam)
    with pytest.raises(TypeError):
        ansatz_field.field_strength_direct(prof.values, 1.0)
    orphan = ansatz_field.GaugeProfile(grid, prof.values)
    with pytest.raises(ValueError):
        ansatz_field.field_strength_direct(orphan, 1.0, mode=ansatz_field.ANALYTIC)
    with pytest.raises(ValueError):
        ansatz_field.field_strength_direct(prof, 1.0, mode="spectral")
    with pytest.raises(ValueError):
        ansatz_field.field_strength_direct(prof, 0.0)


def test_matrix_reading_tensors_with_sigma():
    grid = small_grid()
    lam = scenario_field(grid)
    prof = ansatz_field.build_profile(lam)
    for a in (1, 3):
        A = ansatz_field.matrix_profile(prof, a=a)
        Fm = ansatz_field.field_strength_matrix(grid, A, 1.0)
        Fs = ansatz_field.field_strength_direct(prof, 1.0, mode=ansatz_field.RAW)
        sig = np.zeros((2, 2), dtype=complex)
        sig[:] = [[0, 1], [1, 0]] if a == 1 else [[1, 0], [0, -1]]
        want = Fs.values[..., None, None] * sig
        assert lattice.max_abs(Fm.values - want) < 1e-13
        assert Fm.matrix_valued


def test_lagrangian_identity_and_complexity():
    grid = small_grid()
    den = ansatz_field.lagrangian_density(scenario_field(grid))
    assert den.identity_defect() < 1e-12
    # the density is genuinely complex for this ansatz: profile squares
    # are phases, not positive weights
    assert np.max(np.abs(np.imag(den.values))) > 1e-3


def test_noether_current_vanishes_only_on_gradient_fields():
    grid = small_grid()
    jn_grad = ansatz_field.noether_current(gradient_field(grid))
    assert lattice.max_abs(jn_grad) < 1e-12
    jn_gen = ansatz_field.noether_current(scenario_field(grid))
    assert lattice.max_abs(jn_gen) > 1e-3


def test_anomalous_current_matches_contracted_oracle():
    grid = small_grid()
    cfg = config.ScenarioConfig()
    lam = checks.phase_field(cfg, grid)
    recs = [
        ansatz_field.Mode(comp, cyc, amp, ph)
        for comp, (cyc, amp, ph) in zip(cfg.phase_components, cfg.phase_waves)
    ]
    j = ansatz_field.anomalous_current(lam, cfg.coupling)
    want = oracles.anomalous_current_oracle(grid, recs, cfg.coupling)
    assert np.max(np.abs(j - want)) < 1e-13


def test_gauge_condition_componentwise():
    grid = small_grid()
    rep = ansatz_field.gauge_condition_check(scenario_field(grid))
    assert rep.satisfied
    assert max(rep.per_component) < 1e-12
    bad = ansatz_field.LambdaField.from_modes(
        grid, [ansatz_field.Mode(1, (1, 0, 0, 0), 0.5)]
    )
    rep_bad = ansatz_field.gauge_condition_check(bad)
    assert not rep_bad.satisfied
    assert rep_bad.per_component[0] > 0.1
    with pytest.warns(UserWarning):
        ansatz_field.field_equation_residual(bad, 1.0)


def test_residual_routes_agree():
    grid = small_grid()
    lam = scenario_field(grid)
    g = 1.0
    full = ansatz_field.field_equation_residual_full(lam, g)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        fixed = ansatz_field.field_equation_residual(lam, g, mode=ansatz_field.ANALYTIC)
    assert lattice.max_abs(full - fixed) < 1e-10
    contracted = checks.residual_contraction_route(lam, g)
    assert lattice.max_abs(full - contracted) < 1e-10


def test_vacuum_report_slopes_and_exact_cancellations():
    grid = small_grid()
    rep = ansatz_field.vacuum_report(gradient_field(grid), (1e-1, 1e-2, 1e-3, 1e-4), 1.0)
    assert rep.slope_current is not None
    assert abs(rep.slope_current - 2.0) < 0.1
    assert abs(rep.slope_box_profile - 1.0) < 0.1
    for e in rep.entries:
        assert e.noether_max < 1e-12
    assert rep.gauge_mismatch
    d = rep.to_dict()
    assert len(d["entries"]) == 4


def test_vacuum_report_validation_and_degenerate_base():
    grid = small_grid(4)
    base = gradient_field(grid)
    with pytest.raises(ValueError):
        ansatz_field.vacuum_report(base, (), 1.0)
    with pytest.raises(ValueError):
        ansatz_field.vacuum_report(base, (1e-2, -1e-3), 1.0)
    rep = ansatz_field.vacuum_report(ansatz_field.LambdaField.zero(grid), (1e-1, 1e-2), 1.0)
    assert rep.slope_current is None
    assert rep.slope_box_profile is None


def test_random_mode_sets_against_oracles():
    grid = small_grid(6)
    rng = np.random.default_rng(2024)
    for _ in range(6):
        recs = oracles.random_modes(rng, grid, count=3)
        modes = [ansatz_field.Mode(r.component, r.cycles, r.amplitude, r.phase) for r in recs]
        lam = ansatz_field.LambdaField.from_modes(grid, modes)
        prof = ansatz_field.build_profile(lam)
        assert prof.unit_modulus_defect() < 1e-14
        G = ansatz_field.phase_gradients(lam)
        assert np.max(np.abs(G - oracles.gradient_table(grid, recs))) < 1e-13
        F = ansatz_field.field_strength_ansatz(lam)
        assert F.antisymmetry_defect() == 0.0
        assert np.max(np.abs(F.values - oracles.field_strength_oracle(grid, recs))) < 1e-13
        Fd = ansatz_field.field_strength_direct(prof, 1.0, mode=ansatz_field.ANALYTIC)
        assert lattice.max_abs(F.values - Fd.values) < 1e-13
