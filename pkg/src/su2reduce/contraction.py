"""Radial contraction maps on R^4 and Banach fixed-point machinery.

The map family is lam(x) = c * exp(-|c - x| / n) for a target point c and
an integer scale n: every image point is a scalar multiple of c, the
target is always a fixed point, and the best global Lipschitz constant is
|c| / n. The map is a contraction iff |c| / n < 1, which is a genuine
restriction (and the condition for the fixed point to be unique: past it
a second, stable fixed point appears on the ray), so validity is
certified rather than assumed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np


class NonConvergenceError(RuntimeError):
    """Fixed-point iteration hit the step limit; carries the partial trace."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


def _check_point(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 4:
        raise ValueError(f"points live in R^4, got trailing axis {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("point must be finite")
    return x


@dataclass(frozen=True)
class ContractionMap:
    """lam(x) = center * exp(-|center - x| / n)."""

    center: tuple[float, float, float, float]
    n: int

    def __post_init__(self):
        c = tuple(float(v) for v in np.asarray(self.center, dtype=float).reshape(4))
        if not all(math.isfinite(v) for v in c):
            raise ValueError("center must be a finite 4-vector")
        object.__setattr__(self, "center", c)
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"scale n must be an integer >= 1, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def center_array(self) -> np.ndarray:
        return np.array(self.center)

    @property
    def center_norm(self) -> float:
        return float(np.linalg.norm(self.center))

    @property
    def lipschitz_bound(self) -> float:
        """Global bound |center| / n; attained in the limit toward the center."""
        return self.center_norm / self.n

    @property
    def is_contraction(self) -> bool:
        return self.lipschitz_bound < 1.0


def evaluate(m: ContractionMap, x) -> np.ndarray:
    """Map one point or a (..., 4) batch of points."""
    x = _check_point(x)
    r = np.linalg.norm(m.center_array - x, axis=-1)
    return m.center_array * np.exp(-r / m.n)[..., None]


def closed_form_jacobian_norm(m: ContractionMap, x) -> float:
    """Spectral norm (|c|/n) exp(-r/n); the limit value |c|/n at x = c."""
    x = _check_point(x)
    r = float(np.linalg.norm(m.center_array - x))
    return m.lipschitz_bound * math.exp(-r / m.n)


@dataclass(frozen=True)
class JacobianEstimate:
    """Finite-difference Jacobian summary at one point.

    norm                  spectral norm of the FD Jacobian (or the limiting
                          bound when at_center is set)
    second_singular_value rank-1 witness; the map scales a single radial
                          direction, so this sits at FD noise level
    at_center             the map is not differentiable at the target; the
                          norm reported there is the limiting bound |c|/n
    """

    norm: float
    second_singular_value: float
    matrix: np.ndarray | None
    at_center: bool


def jacobian_norm(m: ContractionMap, x, step: float = 1e-5) -> JacobianEstimate:
    x = _check_point(x).reshape(4)
    if not (step > 0 and math.isfinite(step)):
        raise ValueError("step must be positive and finite")
    if np.array_equal(x, m.center_array):
        return JacobianEstimate(m.lipschitz_bound, 0.0, None, True)
    J = np.empty((4, 4))
    for k in range(4):
        dx = np.zeros(4)
        dx[k] = step
        J[:, k] = (evaluate(m, x + dx) - evaluate(m, x - dx)) / (2.0 * step)
    svals = np.linalg.svd(J, compute_uv=False)
    return JacobianEstimate(float(svals[0]), float(svals[1]), J, False)


def sample_ball(center, radius: float, count: int, rng) -> np.ndarray:
    """Uniform points in the open 4-ball, shaped (count, 4)."""
    center = _check_point(center).reshape(4)
    if radius <= 0:
        raise ValueError("radius must be positive")
    d = rng.standard_normal((count, 4))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    scale = radius * rng.random(count) ** 0.25
    return center + d * scale[:, None]


@dataclass(frozen=True)
class LipschitzEstimate:
    ratio_max: float
    bound: float
    pairs: int
    center: tuple[float, float, float, float]
    radius: float
    seed: int


def lipschitz_estimate(m: ContractionMap, center, radius: float, pairs: int = 10_000,
                       seed: int = 0) -> LipschitzEstimate:
    """Seeded sampled ratio sup d(lam x, lam x') / d(x, x') over a ball.

    The sampled value never exceeds the closed-form bound |c|/n and
    approaches it for radially aligned pairs near the target.
    """
    if pairs < 2:
        raise ValueError("need at least two pairs")
    rng = np.random.default_rng(seed)
    a = sample_ball(center, radius, pairs, rng)
    b = sample_ball(center, radius, pairs, rng)
    dist = np.linalg.norm(a - b, axis=1)
    keep = dist > 0
    img = np.linalg.norm(evaluate(m, a[keep]) - evaluate(m, b[keep]), axis=1)
    ratio = float(np.max(img / dist[keep]))
    return LipschitzEstimate(
        ratio, m.lipschitz_bound, int(np.count_nonzero(keep)),
        tuple(float(v) for v in np.asarray(center, dtype=float).reshape(4)),
        float(radius), seed,
    )


@dataclass(frozen=True)
class ValidityCertificate:
    """Record of the contraction criterion |center|/n < 1.

    The criterion is not automatic: a target with |center| >= n yields an
    expansion bound and no fixed-point guarantee, so the certificate is
    emitted explicitly instead of being silently assumed.
    """

    valid: bool
    bound: float
    center: tuple[float, float, float, float]
    n: int

    def to_dict(self) -> dict:
        return {"valid": self.valid, "bound": self.bound, "center": list(self.center), "n": self.n}


def contraction_validity(m: ContractionMap) -> ValidityCertificate:
    return ValidityCertificate(m.is_contraction, m.lipschitz_bound, m.center, m.n)


@dataclass(frozen=True)
class IterationTrace:
    """Banach iteration record.

    iterates   (k+1, 4) array of visited points, x_0 first
    distances  per-step displacements |x_{k+1} - x_k|
    ratios     consecutive distance ratios d_{k+1} / d_k
    residual   |lam(x_hat) - x_hat| at the final iterate
    error_bound  a-posteriori bound q/(1-q) * d_last with q the map bound
               (only meaningful when the map is a certified contraction)
    """

    iterates: np.ndarray
    distances: np.ndarray
    ratios: np.ndarray
    converged: bool
    residual: float
    measured_ratio: float
    error_bound: float

    @property
    def steps(self) -> int:
        return len(self.distances)

    @property
    def final(self) -> np.ndarray:
        return self.iterates[-1]

    def save_csv(self, path) -> None:
        """Columns: k, x1..x4, d (displacement taken at k), ratio."""
        with open(path, "w", newline="", encoding="ascii") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "x1", "x2", "x3", "x4", "d", "ratio"])
            for k, pt in enumerate(self.iterates):
                d = f"{float(self.distances[k - 1])!r}" if 1 <= k <= len(self.distances) else ""
                rat = f"{float(self.ratios[k - 2])!r}" if 2 <= k <= len(self.ratios) + 1 else ""
                w.writerow([k, *(f"{float(v)!r}" for v in pt), d, rat])


def banach_iterate(m: ContractionMap, x0, tol: float = 1e-12, max_iter: int = 200) -> IterationTrace:
    """Iterate x -> lam(x) until the displacement drops below tol.

    A point whose very first displacement is already below tol counts as
    converged in zero steps. Hitting max_iter raises NonConvergenceError
    with the partial trace attached.

    Every image of the map lies on the ray through the target, so after
    the first step the iteration is one-dimensional in the distance
    r = |x - c|, which obeys r' = -|c| expm1(-r/n). The displacements are
    computed from that recursion (d_k = r_k - r_{k+1}) instead of by
    subtracting near-equal points: near convergence a direct subtraction
    is dominated by exp rounding at about 1e-16 absolute, which would
    bury the per-step contraction ratios in noise, while the expm1 form
    keeps them at full relative precision.
    """
    if not (tol > 0 and math.isfinite(tol)):
        raise ValueError("tolerance must be positive and finite")
    if max_iter < 1:
        raise ValueError("need at least one allowed step")
    x = _check_point(x0).reshape(4).copy()
    iterates = [x.copy()]
    distances: list[float] = []
    q = m.lipschitz_bound
    cn = m.center_norm
    c = m.center_array

    # first step: x0 is generally off the ray, handle it pointwise
    nxt = evaluate(m, x)
    d = float(np.linalg.norm(nxt - x))
    if d < tol:
        return _finish_trace(iterates, distances, True, d, q)
    iterates.append(nxt.copy())
    distances.append(d)
    if cn == 0.0:
        # the map is identically zero: one step lands exactly on the target
        return _finish_trace(iterates, distances, True, 0.0, q)

    r = -cn * math.expm1(-float(np.linalg.norm(c - x)) / m.n)
    for _ in range(max_iter - 1):
        r_next = -cn * math.expm1(-r / m.n)
        # |.| matters in the expanding regime, where r can grow
        d = abs(r - r_next)
        if d < tol:
            return _finish_trace(iterates, distances, True, d, q)
        r = r_next
        iterates.append(c * (1.0 - r / cn))
        distances.append(d)
    trace = _finish_trace(iterates, distances, False, float("nan"), q)
    raise NonConvergenceError(
        f"no convergence to {tol} within {max_iter} steps (last displacement {distances[-1]:.3e})",
        trace,
    )


def _finish_trace(iterates, distances, converged, residual, q) -> IterationTrace:
    dist = np.array(distances)
    ratios = dist[1:] / dist[:-1] if len(dist) >= 2 else np.array([])
    measured = float(np.median(ratios)) if ratios.size else float("nan")
    if converged and distances and q < 1.0:
        bound = q / (1.0 - q) * distances[-1]
    elif converged:
        bound = residual  # already at the fixed point or no contraction certificate
    else:
        bound = float("inf")
    return IterationTrace(
        np.array(iterates), dist, ratios, converged, residual, measured, bound
    )


@dataclass(frozen=True)
class LimitSeries:
    """Deviation of the map value from the target along a scale schedule."""

    ns: tuple[int, ...]
    deviations: tuple[float, ...]
    decreasing: bool


def limit_large_n(center, x, n_seq) -> LimitSeries:
    """|lam_n(x) - center| per n: the maps pinch every point onto the target.

    The deviation is |center| (1 - exp(-r/n)) <= |center| r / n, so it
    falls off like 1/n once n dominates r.
    """
    ns = [int(n) for n in n_seq]
    if len(ns) < 2 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("need a strictly increasing schedule with at least two entries")
    c = _check_point(center).reshape(4)
    devs = []
    for n in ns:
        m = ContractionMap(tuple(c), n)
        devs.append(float(np.linalg.norm(evaluate(m, x) - c)))
    dec = all(b <= a for a, b in zip(devs, devs[1:]))
    return LimitSeries(tuple(ns), tuple(devs), dec)
