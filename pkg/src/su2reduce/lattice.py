"""Periodic 4D lattice geometry and central-difference operators.

Fields are plain numpy arrays whose first four axes match the grid shape.
Trailing axes (matrix entries and the like) ride along untouched, so the
same stencils serve scalar, vector and matrix-valued data. All stencils
wrap periodically; that makes discrete integration by parts exact and
keeps every operator translation invariant.

Index convention: mu runs 1..4 and maps to array axis mu-1. Axis 4 is the
time axis, axes 1..3 are spatial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EUCLIDEAN = "euclidean"
LORENTZIAN = "lorentzian"

# below this max error a convergence study is reported as exact-to-rounding
EXACT_FLOOR = 1e-13


class GridMismatchError(ValueError):
    """A field's leading shape does not match the grid it is used with."""


@dataclass(frozen=True)
class Grid4:
    """Uniform periodic lattice with a shared spacing on all four axes.

    dims    points per axis, each at least 4 so central stencils see
            distinct neighbours
    h       lattice spacing
    metric  EUCLIDEAN sums all four second derivatives in `box`;
            LORENTZIAN counts axis 4 positive and axes 1..3 negative
    """

    dims: tuple[int, int, int, int]
    h: float
    metric: str = EUCLIDEAN

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        object.__setattr__(self, "dims", dims)
        if len(dims) != 4 or any(n < 4 for n in dims):
            raise ValueError(f"need four axes with at least 4 points each, got {dims}")
        if not (math.isfinite(self.h) and self.h > 0):
            raise ValueError(f"spacing must be finite and positive, got {self.h}")
        if self.metric not in (EUCLIDEAN, LORENTZIAN):
            raise ValueError(f"unknown metric {self.metric!r}")

    @classmethod
    def cubic(cls, n: int, length: float = 2.0 * math.pi, metric: str = EUCLIDEAN) -> "Grid4":
        """n points per axis spanning `length`; integer-cycle trig modes stay commensurate."""
        return cls((n, n, n, n), length / n, metric)

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.dims

    @property
    def npoints(self) -> int:
        return int(np.prod(self.dims))

    def length(self, mu: int) -> float:
        _check_mu(mu)
        return self.dims[mu - 1] * self.h

    def coords(self):
        """Sparse broadcastable coordinate arrays (x1, x2, x3, x4)."""
        axes = [self.h * np.arange(n) for n in self.dims]
        return np.meshgrid(*axes, indexing="ij", sparse=True)


def _check_mu(mu: int) -> None:
    if mu not in (1, 2, 3, 4):
        raise ValueError(f"direction index must be 1..4, got {mu}")


def check_field(grid: Grid4, f: np.ndarray) -> np.ndarray:
    f = np.asarray(f)
    if f.shape[:4] != grid.dims:
        raise GridMismatchError(f"field shape {f.shape} does not start with grid dims {grid.dims}")
    return f


def partial(grid: Grid4, f: np.ndarray, mu: int) -> np.ndarray:
    """Central first difference along direction mu: (f(x+h e) - f(x-h e)) / 2h."""
    _check_mu(mu)
    f = check_field(grid, f)
    ax = mu - 1
    return (np.roll(f, -1, axis=ax) - np.roll(f, 1, axis=ax)) / (2.0 * grid.h)


def second_diff(grid: Grid4, f: np.ndarray, mu: int) -> np.ndarray:
    """Compact second difference along mu: (f(x+h e) - 2 f(x) + f(x-h e)) / h^2."""
    _check_mu(mu)
    f = check_field(grid, f)
    ax = mu - 1
    return (np.roll(f, -1, axis=ax) - 2.0 * f + np.roll(f, 1, axis=ax)) / grid.h**2


def box(grid: Grid4, f: np.ndarray) -> np.ndarray:
    """Wave operator from compact second differences, signed by grid.metric.

    The compact stencil is used directly rather than composing two first
    differences; the two choices differ at O(h^2) and the compact one has
    the smaller stencil footprint.
    """
    f = check_field(grid, f)
    if grid.metric == EUCLIDEAN:
        out = second_diff(grid, f, 1)
        for mu in (2, 3, 4):
            out += second_diff(grid, f, mu)
        return out
    out = second_diff(grid, f, 4)
    for mu in (1, 2, 3):
        out -= second_diff(grid, f, mu)
    return out


def laplacian_spatial(grid: Grid4, f: np.ndarray) -> np.ndarray:
    """Compact Laplacian over the spatial axes 1..3 only."""
    f = check_field(grid, f)
    out = second_diff(grid, f, 1)
    for mu in (2, 3):
        out += second_diff(grid, f, mu)
    return out


def divergence(grid: Grid4, v: np.ndarray) -> np.ndarray:
    """sum_mu d_mu v_mu for a four-component field shaped (4, *dims)."""
    v = np.asarray(v)
    if v.shape[0] != 4:
        raise GridMismatchError(f"expected a leading component axis of length 4, got shape {v.shape}")
    out = partial(grid, v[0], 1)
    for mu in (2, 3, 4):
        out = out + partial(grid, v[mu - 1], mu)
    return out


def grid_integral(grid: Grid4, f: np.ndarray) -> complex:
    """Trapezoid-free periodic integral: h^4 times the plain sum."""
    f = check_field(grid, f)
    return complex(f.sum() * grid.h**4)


def max_abs(f: np.ndarray) -> float:
    """Max-norm used for every tolerance in this package."""
    return float(np.max(np.abs(f))) if np.asarray(f).size else 0.0


@dataclass(frozen=True)
class OrderEstimate:
    """Result of a grid-refinement study.

    order     least-squares slope of log(max error) against log(h);
              None when the study is exact to rounding
    exact     all errors were below EXACT_FLOOR, no slope is meaningful
    spacings  the h values visited
    errors    max-norm errors per grid
    """

    order: float | None
    exact: bool
    spacings: tuple[float, ...]
    errors: tuple[float, ...]


def fit_order(spacings, errors) -> float:
    """Slope of log(error) vs log(h). Caller guards against zero errors."""
    hs = np.asarray(spacings, dtype=float)
    es = np.asarray(errors, dtype=float)
    if hs.size != es.size or hs.size < 2:
        raise ValueError("need matching spacing/error sequences with at least 2 entries")
    if np.any(es <= 0):
        raise ValueError("errors must be positive for a log-log fit")
    return float(np.polyfit(np.log(hs), np.log(es), 1)[0])


def convergence_order(op, exact_pair, grids) -> OrderEstimate:
    """Measure the convergence order of a lattice operator.

    op          callable (grid, field) -> field
    exact_pair  (f, Tf): closed-form callables of the coordinate arrays,
                the input field and its exactly transformed counterpart
    grids       at least three Grid4 instances at different spacings
    """
    grids = list(grids)
    if len(grids) < 3:
        raise ValueError("a convergence study needs at least three resolutions")
    f_fn, t_fn = exact_pair
    spacings, errors = [], []
    for grid in grids:
        xs = grid.coords()
        err = max_abs(op(grid, np.broadcast_to(f_fn(*xs), grid.dims).copy()) - t_fn(*xs))
        spacings.append(grid.h)
        errors.append(err)
    if all(e <= EXACT_FLOOR for e in errors):
        return OrderEstimate(None, True, tuple(spacings), tuple(errors))
    return OrderEstimate(fit_order(spacings, errors), False, tuple(spacings), tuple(errors))


# ---------------------------------------------------------------------------
# serialization: header (dims, h, metric) then values in row-major order


def save_field_csv(path, grid: Grid4, f: np.ndarray) -> None:
    f = check_field(grid, f)
    if f.shape != grid.dims:
        raise ValueError("csv layout stores scalar fields only (shape == grid.dims)")
    complex_kind = np.iscomplexobj(f)
    flat = np.ravel(f, order="C")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("# dims=" + ",".join(str(n) for n in grid.dims) + "\n")
        fh.write(f"# h={float(grid.h)!r}\n")
        fh.write(f"# metric={grid.metric}\n")
        fh.write(f"# kind={'complex' if complex_kind else 'real'}\n")
        if complex_kind:
            for z in flat:
                fh.write(f"{float(z.real)!r},{float(z.imag)!r}\n")
        else:
            for v in flat:
                fh.write(f"{float(v)!r}\n")


def load_field_csv(path) -> tuple[Grid4, np.ndarray]:
    header = {}
    rows = []
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                header[key.strip()] = val.strip()
            else:
                rows.append(line)
    dims = tuple(int(s) for s in header["dims"].split(","))
    grid = Grid4(dims, float(header["h"]), header.get("metric", EUCLIDEAN))
    if header.get("kind") == "complex":
        parts = np.array([[float(a), float(b)] for a, b in (r.split(",") for r in rows)])
        values = (parts[:, 0] + 1j * parts[:, 1]).reshape(dims)
    else:
        values = np.array([float(r) for r in rows]).reshape(dims)
    return grid, values


def save_field_npz(path, grid: Grid4, f: np.ndarray) -> None:
    f = check_field(grid, f)
    np.savez(path, values=f, dims=np.array(grid.dims), h=np.array(grid.h), metric=np.array(grid.metric))


def load_field_npz(path) -> tuple[Grid4, np.ndarray]:
    data = np.load(path, allow_pickle=False)
    grid = Grid4(tuple(int(n) for n in data["dims"]), float(data["h"]), str(data["metric"]))
    return grid, data["values"]
