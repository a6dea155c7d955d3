"""Stencil, refinement-fit and serialization tests for the grid layer."""

import math

import numpy as np
import pytest

from su2reduce import lattice

import oracles


def small_grid(n=8, metric=lattice.EUCLIDEAN):
    return lattice.Grid4.cubic(n, 2.0 * math.pi, metric)


def test_grid_validation():
    with pytest.raises(ValueError):
        lattice.Grid4((4, 4, 4), 0.1)
    with pytest.raises(ValueError):
        lattice.Grid4((4, 4, 4, 3), 0.1)
    with pytest.raises(ValueError):
        lattice.Grid4((4, 4, 4, 4), -1.0)
    with pytest.raises(ValueError):
        lattice.Grid4((4, 4, 4, 4), 0.1, "taxicab")


def test_grid_lengths_and_coords():
    grid = small_grid(8)
    assert grid.npoints == 8**4
    for mu in (1, 2, 3, 4):
        assert grid.length(mu) == pytest.approx(2.0 * math.pi)
    xs = grid.coords()
    assert xs[0].shape == (8, 1, 1, 1)
    assert float(xs[3][0, 0, 0, 1]) == pytest.approx(grid.h)


def test_partial_matches_discrete_dispersion():
    # a central stencil acts on sin(kx + p) as the exact multiplier sin(kh)/h
    grid = small_grid(12)
    xs = grid.coords()
    for mu, cycles in ((1, 1), (2, 2), (4, -1)):
        k = 2.0 * math.pi * cycles / grid.length(mu)
        f = np.broadcast_to(np.sin(k * xs[mu - 1] + 0.3), grid.dims).copy()
        want = oracles.first_diff_factor(k, grid.h) * np.cos(
            np.broadcast_to(k * xs[mu - 1] + 0.3, grid.dims)
        )
        got = lattice.partial(grid, f, mu)
        assert lattice.max_abs(got - want) < 1e-13


def test_second_diff_matches_discrete_dispersion():
    grid = small_grid(10)
    xs = grid.coords()
    k = 2.0 * math.pi * 2 / grid.length(3)
    f = np.broadcast_to(np.sin(k * xs[2] + 1.1), grid.dims).copy()
    want = oracles.second_diff_factor(k, grid.h) * f
    got = lattice.second_diff(grid, f, 3)
    assert lattice.max_abs(got - want) < 1e-12


def test_box_metric_signs():
    grid_e = small_grid(8, lattice.EUCLIDEAN)
    grid_l = lattice.Grid4(grid_e.dims, grid_e.h, lattice.LORENTZIAN)
    rng = np.random.default_rng(11)
    f = rng.standard_normal(grid_e.dims)
    box_e = lattice.box(grid_e, f)
    box_l = lattice.box(grid_l, f)
    # euclidean sums all four; lorentzian flips the three spatial terms
    parts = [lattice.second_diff(grid_e, f, mu) for mu in (1, 2, 3, 4)]
    assert lattice.max_abs(box_e - sum(parts)) == 0.0
    assert lattice.max_abs(box_l - (parts[3] - parts[0] - parts[1] - parts[2])) == 0.0
    assert lattice.max_abs(lattice.laplacian_spatial(grid_e, f) - (parts[0] + parts[1] + parts[2])) == 0.0


def test_divergence_and_shape_guards():
    grid = small_grid(8)
    rng = np.random.default_rng(3)
    v = rng.standard_normal((4,) + grid.dims)
    manual = sum(lattice.partial(grid, v[mu - 1], mu) for mu in (1, 2, 3, 4))
    assert lattice.max_abs(lattice.divergence(grid, v) - manual) == 0.0
    with pytest.raises(lattice.GridMismatchError):
        lattice.divergence(grid, v[:3])
    with pytest.raises(lattice.GridMismatchError):
        lattice.check_field(grid, np.zeros((8, 8, 8, 4)))
    with pytest.raises(ValueError):
        lattice.partial(grid, v[0], 5)


def test_periodic_sum_of_partial_vanishes():
    # rolled differences telescope to zero over the periodic box
    grid = small_grid(6)
    rng = np.random.default_rng(5)
    f = rng.standard_normal(grid.dims)
    total = lattice.grid_integral(grid, lattice.partial(grid, f, 2))
    assert abs(total) < 1e-12


def test_fit_order_recovers_synthetic_slope():
    hs = [0.4, 0.2, 0.1, 0.05]
    for p in (1.0, 2.0, 2.37):
        errs = [0.9 * h**p for h in hs]
        assert lattice.fit_order(hs, errs) == pytest.approx(p, abs=1e-12)
    with pytest.raises(ValueError):
        lattice.fit_order([0.1], [0.5])
    with pytest.raises(ValueError):
        lattice.fit_order([0.1, 0.05], [0.5, 0.0])


def test_convergence_order_exact_study():
    grids = [small_grid(n) for n in (6, 8, 10)]

    def op(grid, f):
        return f * 2.0

    est = lattice.convergence_order(op, (lambda x1, x2, x3, x4: np.sin(x1),
                                         lambda x1, x2, x3, x4: 2.0 * np.sin(x1)), grids)
    assert est.exact
    assert est.order is None


def test_convergence_order_second_order_stencil():
    grids = [small_grid(n) for n in (8, 16, 32)]

    def stencil(grid, f):
        return lattice.partial(grid, f, 1)

    est = lattice.convergence_order(
        stencil,
        (lambda x1, x2, x3, x4: np.sin(x1 + 0.0 * x2),
         lambda x1, x2, x3, x4: np.cos(x1 + 0.0 * x2)),
        grids,
    )
    assert est.order == pytest.approx(2.0, abs=0.05)


def test_csv_round_trip_real_and_complex(tmp_path):
    grid = small_grid(4)
    rng = np.random.default_rng(17)
    real = rng.standard_normal(grid.dims)
    path = tmp_path / "real.csv"
    lattice.save_field_csv(path, grid, real)
    g2, back = lattice.load_field_csv(path)
    assert g2.dims == grid.dims and g2.h == grid.h and g2.metric == grid.metric
    assert np.array_equal(back, real)

    cplx = rng.standard_normal(grid.dims) + 1j * rng.standard_normal(grid.dims)
    path_c = tmp_path / "cplx.csv"
    lattice.save_field_csv(path_c, grid, cplx)
    _, back_c = lattice.load_field_csv(path_c)
    assert np.array_equal(back_c, cplx)


def test_csv_rejects_component_fields(tmp_path):
    grid = small_grid(4)
    with pytest.raises(ValueError):
        lattice.save_field_csv(tmp_path / "bad.csv", grid, np.zeros(grid.dims + (4,)))


def test_npz_round_trip_with_trailing_axes(tmp_path):
    grid = small_grid(4)
    rng = np.random.default_rng(23)
    vals = rng.standard_normal(grid.dims + (4,)) + 1j * rng.standard_normal(grid.dims + (4,))
    path = tmp_path / "field.npz"
    lattice.save_field_npz(path, grid, vals)
    g2, back = lattice.load_field_npz(path)
    assert g2.dims == grid.dims and g2.h == grid.h
    assert np.array_equal(back, vals)
