"""Read-Bajraktarevic operators on grid-sampled functions.

The operator acts piecewise through T f = q_i o L_i^-1 + s_i o L_i^-1 * f o L_i^-1
on the i-th tile, and its fixed point is the self-referential function with
psi(L_i(x)) = q_i(x) + s_i(x) psi(x).  Functions are carried on a uniform grid
of M intervals; when every pre-image of a grid point is itself a grid point
("aligned") the pullbacks are exact table lookups, otherwise they fall back
to linear interpolation with O(M^-2) bias.

Iteration always converges in the sup norm; the six per-space contraction
constants are separate certificates evaluated by gamma_gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from numpy.polynomial import polynomial as P

from .partition import AffinePartition

__all__ = [
    "AlignmentError",
    "ConvergenceError",
    "Field",
    "FixedPointResult",
    "GridFunction",
    "Poly",
    "RBParams",
    "SPACE_TAGS",
    "SpaceSpec",
    "empirical_gamma",
    "fif_from_data",
    "field_sup",
    "fixed_point",
    "gamma_gate",
    "norm",
    "rb_apply",
    "sup_norm",
]

# Pre-images further than this from the nearest grid index (in index units)
# mark a non-aligned configuration.
_ALIGN_ATOL = 1e-7


class AlignmentError(ValueError):
    """Raised when aligned mode is requested but pre-images miss the grid."""


class ConvergenceError(RuntimeError):
    """Fixed-point iteration hit max_iter; carries the last residual."""

    def __init__(self, message: str, *, iterations: int, residual: float):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


@dataclass(frozen=True)
class Poly:
    """Polynomial with coefficients in increasing degree order."""

    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        cs = tuple(float(c) for c in self.coeffs)
        if not cs:
            raise ValueError("a polynomial needs at least one coefficient")
        if not all(math.isfinite(c) for c in cs):
            raise ValueError("polynomial coefficients must be finite")
        object.__setattr__(self, "coeffs", cs)

    def __call__(self, x):
        return P.polyval(x, self.coeffs)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real function sampled at x_j = x_lo + j*(x_hi - x_lo)/M, j = 0..M."""

    partition: AffinePartition
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 1 or len(arr) < 2:
            raise ValueError("values must be a one-dimensional array of length M+1 >= 2")
        if len(arr) - 1 < self.partition.size:
            raise ValueError(
                f"grid must have M >= N intervals: M={len(arr) - 1} < N={self.partition.size}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("grid values must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def grid_m(self) -> int:
        return len(self.values) - 1

    @property
    def xs(self) -> np.ndarray:
        return _grid_points(self.partition, self.grid_m)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GridFunction):
            return NotImplemented
        return self.partition == other.partition and np.array_equal(self.values, other.values)

    __hash__ = None  # type: ignore[assignment]

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check_same_grid(other)
        return GridFunction(self.partition, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check_same_grid(other)
        return GridFunction(self.partition, self.values - other.values)

    def __mul__(self, factor: float) -> "GridFunction":
        return GridFunction(self.partition, self.values * float(factor))

    __rmul__ = __mul__

    def _check_same_grid(self, other: "GridFunction") -> None:
        if not isinstance(other, GridFunction):
            raise TypeError("expected a GridFunction")
        if self.partition != other.partition or self.grid_m != other.grid_m:
            raise ValueError("grid functions live on different grids")

    @classmethod
    def zeros(cls, partition: AffinePartition, grid_m: int) -> "GridFunction":
        return cls(partition, np.zeros(grid_m + 1))

    @classmethod
    def sample(
        cls, partition: AffinePartition, grid_m: int, fn: Callable[[np.ndarray], np.ndarray]
    ) -> "GridFunction":
        return cls(partition, np.asarray(fn(_grid_points(partition, grid_m)), dtype=float))


def _grid_points(partition: AffinePartition, grid_m: int) -> np.ndarray:
    h = partition.span / grid_m
    return partition.x_lo + h * np.arange(grid_m + 1)


# A q_i or s_i entry: a constant, a polynomial, or samples on the carrier grid.
Field = Union[float, int, Poly, GridFunction]


def _field_values(
    field: Field,
    points: np.ndarray,
    grid_indices: np.ndarray | None,
    xs: np.ndarray,
) -> np.ndarray:
    if isinstance(field, (int, float)):
        return np.full(len(points), float(field))
    if isinstance(field, Poly):
        return np.asarray(field(points), dtype=float)
    if isinstance(field, GridFunction):
        if grid_indices is not None:
            return field.values[grid_indices]
        return np.interp(points, xs, field.values)
    raise TypeError(f"unsupported field type {type(field).__name__}")


def field_sup(field: Field, partition: AffinePartition | None = None, grid_m: int = 256) -> float:
    """Sup-norm bound: |c| for constants, grid maximum for samples.

    Polynomials are bounded by sampling on the partition's interval.
    """
    if isinstance(field, (int, float)):
        return abs(float(field))
    if isinstance(field, GridFunction):
        return field.sup_norm()
    if isinstance(field, Poly):
        if partition is None:
            raise ValueError("bounding a polynomial needs the partition interval")
        return float(np.max(np.abs(field(_grid_points(partition, grid_m)))))
    raise TypeError(f"unsupported field type {type(field).__name__}")


@dataclass(frozen=True, eq=False)
class RBParams:
    """Problem data: the partition, one q_i and one bounded multiplier s_i per tile."""

    partition: AffinePartition
    q: tuple[Field, ...]
    s: tuple[Field, ...]

    def __post_init__(self) -> None:
        q = tuple(self.q)
        s = tuple(self.s)
        n_maps = self.partition.size
        if len(q) != n_maps or len(s) != n_maps:
            raise ValueError(
                f"q and s must both have one entry per map: N={n_maps}, "
                f"len(q)={len(q)}, len(s)={len(s)}"
            )
        for i, entry in enumerate(s):
            if not isinstance(entry, (int, float, GridFunction)):
                raise ValueError(f"s[{i}] must be a constant or a GridFunction")
        for i, entry in enumerate(q):
            if not isinstance(entry, (int, float, Poly, GridFunction)):
                raise ValueError(f"q[{i}] must be a constant, Poly, or GridFunction")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "s", s)

    def sup_s(self) -> tuple[float, ...]:
        return tuple(field_sup(entry, self.partition) for entry in self.s)


@dataclass(frozen=True)
class FixedPointResult:
    function: GridFunction
    iterations: int
    error_bound: float


# ---------------------------------------------------------------------------
# Operator application
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Segment:
    rows: slice
    pre_idx: np.ndarray | None  # grid indices of pre-images when aligned
    q_vals: np.ndarray
    s_vals: np.ndarray
    pre_x: np.ndarray


@dataclass(frozen=True)
class _Plan:
    grid_m: int
    aligned: bool
    xs: np.ndarray
    segments: tuple[_Segment, ...]

    def apply(self, values: np.ndarray) -> np.ndarray:
        out = np.empty(self.grid_m + 1)
        for seg in self.segments:
            if seg.pre_idx is not None:
                pulled = values[seg.pre_idx]
            else:
                pulled = np.interp(seg.pre_x, self.xs, values)
            out[seg.rows] = seg.q_vals + seg.s_vals * pulled
        return out


def _owned_ranges(partition: AffinePartition, grid_m: int, h: float) -> list[slice]:
    """Grid-index ranges per tile under the left-ownership junction rule."""
    ends = []
    for knot in partition.knots[1:-1]:
        g = (knot - partition.x_lo) / h
        nearest = round(g)
        ends.append(nearest if abs(g - nearest) < _ALIGN_ATOL else math.floor(g))
    ends.append(grid_m)
    starts = [0] + [e + 1 for e in ends[:-1]]
    return [slice(lo, hi + 1) for lo, hi in zip(starts, ends)]


def _build_plan(params: RBParams, grid_m: int, mode: str) -> _Plan:
    if mode not in ("auto", "aligned", "interp"):
        raise ValueError(f"mode must be 'auto', 'aligned' or 'interp', got {mode!r}")
    partition = params.partition
    if grid_m < partition.size:
        raise ValueError(f"grid must have M >= N intervals: M={grid_m} < N={partition.size}")
    h = partition.span / grid_m
    xs = _grid_points(partition, grid_m)
    ranges = _owned_ranges(partition, grid_m, h)

    raw = []
    aligned = True
    for amap, rows in zip(partition.maps, ranges):
        pre_x = amap.inverse(xs[rows])
        t = (pre_x - partition.x_lo) / h
        idx = np.rint(t).astype(np.int64)
        if len(t) and (np.max(np.abs(t - idx)) >= _ALIGN_ATOL or idx.min() < 0 or idx.max() > grid_m):
            aligned = False
        raw.append((rows, pre_x, idx))
    if mode == "aligned" and not aligned:
        raise AlignmentError(
            "pre-images of grid points miss the grid; use interpolation mode "
            "or choose M so every tile width divides the grid"
        )
    use_idx = aligned and mode != "interp"

    segments = []
    for (amap, (rows, pre_x, idx)), q_i, s_i in zip(zip(partition.maps, raw), params.q, params.s):
        for name, entry in (("q", q_i), ("s", s_i)):
            if isinstance(entry, GridFunction) and (
                entry.partition != partition or entry.grid_m != grid_m
            ):
                raise ValueError(f"sampled {name} entries must live on the carrier grid")
        pre_idx = idx if use_idx else None
        points = xs[idx] if use_idx else pre_x
        segments.append(
            _Segment(
                rows=rows,
                pre_idx=pre_idx,
                q_vals=_field_values(q_i, points, pre_idx, xs),
                s_vals=_field_values(s_i, points, pre_idx, xs),
                pre_x=points,
            )
        )
    return _Plan(grid_m=grid_m, aligned=use_idx, xs=xs, segments=tuple(segments))


def rb_apply(params: RBParams, f: GridFunction, mode: str = "auto") -> GridFunction:
    """One application of the operator on f's grid.

    Every grid point y in tile i receives q_i(x) + s_i(x) f(x) with
    x = L_i^-1(y); junction points follow the left-ownership rule.
    """
    if f.partition != params.partition:
        raise ValueError("f is sampled on a different partition")
    plan = _build_plan(params, f.grid_m, mode)
    return GridFunction(params.partition, plan.apply(f.values))


def fixed_point(
    params: RBParams,
    grid_m: int,
    *,
    tol: float,
    gamma: float,
    max_iter: int = 1000,
    initial: GridFunction | None = None,
    mode: str = "auto",
) -> FixedPointResult:
    """Banach iteration f_{k+1} = T f_k from f_0 = 0 (or `initial`).

    Stops once ||f_{k+1} - f_k||_inf <= tol*(1-gamma)/gamma, which bounds the
    sup-norm distance of the returned iterate to the fixed point by tol.
    gamma = 0 (all multipliers zero) makes T constant, so one step suffices.
    """
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be at least 1, got {max_iter}")
    plan = _build_plan(params, grid_m, mode)
    if initial is None:
        values = np.zeros(grid_m + 1)
    else:
        if initial.partition != params.partition or initial.grid_m != grid_m:
            raise ValueError("initial iterate must live on the carrier grid")
        values = initial.values
    threshold = math.inf if gamma == 0.0 else tol * (1.0 - gamma) / gamma

    diff = math.inf
    for iteration in range(1, max_iter + 1):
        new_values = plan.apply(values)
        diff = float(np.max(np.abs(new_values - values)))
        values = new_values
        if gamma == 0.0:
            return FixedPointResult(GridFunction(params.partition, values), iteration, 0.0)
        if diff <= threshold:
            bound = diff * gamma / (1.0 - gamma)
            return FixedPointResult(GridFunction(params.partition, values), iteration, bound)
    raise ConvergenceError(
        f"no convergence after {max_iter} iterations (last step {diff:.3e}, "
        f"needed {threshold:.3e})",
        iterations=max_iter,
        residual=diff,
    )


def empirical_gamma(
    params: RBParams, grid_m: int, trials: int, seed: int, mode: str = "auto"
) -> float:
    """Observed sup-norm contraction factor over seeded random pairs.

    Returns max ||Tf - Tg||_inf / ||f - g||_inf over `trials` pairs of
    standard-normal grid functions; deterministic for a given seed.
    """
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    plan = _build_plan(params, grid_m, mode)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        f = rng.standard_normal(grid_m + 1)
        g = rng.standard_normal(grid_m + 1)
        denom = float(np.max(np.abs(f - g)))
        if denom == 0.0:
            continue
        numer = float(np.max(np.abs(plan.apply(f) - plan.apply(g))))
        worst = max(worst, numer / denom)
    return worst


# ---------------------------------------------------------------------------
# Interpolation problems
# ---------------------------------------------------------------------------


def _interpolation_polys(
    x: np.ndarray, y: np.ndarray, s: Sequence[float]
) -> tuple[Poly, ...]:
    """Affine q_i pinning the fixed point to the data: q_i(x_0) + s_i y_0 = y_i-1
    and q_i(x_N) + s_i y_N = y_i."""
    x0, xn = float(x[0]), float(x[-1])
    y0, yn = float(y[0]), float(y[-1])
    polys = []
    for i, s_i in enumerate(s):
        left = float(y[i]) - s_i * y0
        right = float(y[i + 1]) - s_i * yn
        slope = (right - left) / (xn - x0)
        polys.append(Poly((left - slope * x0, slope)))
    return tuple(polys)


def fif_from_data(
    x: Sequence[float], y: Sequence[float], s: Sequence[float]
) -> RBParams:
    """Interpolation problem through the points (x_j, y_j) with multipliers s.

    The fixed point is continuous and passes through every data point; with
    all s_i = 0 it degenerates to the piecewise-linear interpolant.
    """
    from .partition import from_knots

    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape:
        raise ValueError("x and y must be one-dimensional arrays of equal length")
    if len(xs) < 3:
        raise ValueError("need at least 3 data points (N >= 2)")
    if np.any(np.diff(xs) <= 0):
        raise ValueError("data abscissae must be strictly increasing")
    scalars = tuple(float(v) for v in s)
    if len(scalars) != len(xs) - 1:
        raise ValueError(f"need one multiplier per subinterval: {len(xs) - 1}, got {len(scalars)}")
    if any(abs(v) >= 1.0 for v in scalars):
        raise ValueError("interpolation multipliers must satisfy |s_i| < 1")
    return RBParams(from_knots(xs), _interpolation_polys(xs, ys, scalars), scalars)


# ---------------------------------------------------------------------------
# Function-space gates and norms
# ---------------------------------------------------------------------------

SPACE_TAGS = ("Ck", "CkAlpha", "Lp", "Wsp", "Bspq", "Fspq")


@dataclass(frozen=True)
class SpaceSpec:
    """Function-space selector with the indices its gate formula needs."""

    tag: str
    k: int | None = None
    alpha: float | None = None
    p: float | None = None
    q: float | None = None
    s: float | None = None

    def __post_init__(self) -> None:
        if self.tag not in SPACE_TAGS:
            raise ValueError(f"unknown space tag {self.tag!r}; expected one of {SPACE_TAGS}")
        need = {
            "Ck": ("k",),
            "CkAlpha": ("k", "alpha"),
            "Lp": ("p",),
            "Wsp": ("s", "p"),
            "Bspq": ("s", "p", "q"),
            "Fspq": ("s", "p", "q"),
        }[self.tag]
        for name in need:
            if getattr(self, name) is None:
                raise ValueError(f"space {self.tag} requires parameter {name!r}")
        if "k" in need and (not isinstance(self.k, int) or self.k < 0):
            raise ValueError(f"k must be a nonnegative integer, got {self.k!r}")
        if "alpha" in need and not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        for name in ("p", "q"):
            if name in need and not getattr(self, name) >= 1.0:
                raise ValueError(f"{name} must satisfy 1 <= {name} < inf, got {getattr(self, name)}")
        if "s" in need and not self.s > 0.0:
            raise ValueError(f"s must be positive, got {self.s}")

    @classmethod
    def ck(cls, k: int = 0) -> "SpaceSpec":
        return cls("Ck", k=k)

    @classmethod
    def ck_alpha(cls, k: int, alpha: float) -> "SpaceSpec":
        return cls("CkAlpha", k=k, alpha=alpha)

    @classmethod
    def lp(cls, p: float) -> "SpaceSpec":
        return cls("Lp", p=p)

    @classmethod
    def sobolev(cls, s: float, p: float) -> "SpaceSpec":
        return cls("Wsp", s=s, p=p)

    @classmethod
    def besov(cls, s: float, p: float, q: float) -> "SpaceSpec":
        return cls("Bspq", s=s, p=p, q=q)

    @classmethod
    def triebel_lizorkin(cls, s: float, p: float, q: float) -> "SpaceSpec":
        return cls("Fspq", s=s, p=p, q=q)


def gamma_gate(space: SpaceSpec, params) -> float:
    """Contraction constant for the requested space; < 1 certifies a unique fixed point.

    Accepts scalar or Clifford problem parameters (anything exposing
    `partition` and `s`).  The C^k and Holder gates carry a negative power of
    the contraction ratios, so they sit at or above max ||s_i||; `check`
    surfaces them next to the observed sup-norm factor rather than adjusting.
    """
    lips = np.array([m.lip for m in params.partition.maps])
    sups = np.array([field_sup(entry, params.partition) for entry in params.s])
    if space.tag == "Ck":
        return float(np.max(lips ** -(space.k + 1) * sups))
    if space.tag == "CkAlpha":
        return float(np.max(lips ** -(space.k + space.alpha) * sups))
    if space.tag == "Lp":
        return float(np.sum(lips * sups ** space.p))
    if space.tag in ("Wsp", "Fspq"):
        return float(np.sum(lips ** (1.0 - space.s * space.p) * sups ** space.p))
    if space.tag == "Bspq":
        return float(np.sum(lips ** ((1.0 / space.p - space.s) * space.q) * sups ** space.q))
    raise ValueError(f"unknown space tag {space.tag!r}")


def sup_norm(f: GridFunction) -> float:
    return f.sup_norm()


def norm(space: SpaceSpec, f: GridFunction) -> float:
    """Numerically realized norms: C^0 (grid sup) and L^p (trapezoidal quadrature)."""
    if space.tag == "Ck":
        if space.k == 0:
            return f.sup_norm()
        raise NotImplementedError("only the k = 0 sup norm is evaluated numerically")
    if space.tag == "Lp":
        h = f.partition.span / f.grid_m
        integral = float(np.trapezoid(np.abs(f.values) ** space.p, dx=h))
        return integral ** (1.0 / space.p)
    raise NotImplementedError(
        f"the {space.tag} norm is not evaluated numerically; only its gate formula is"
    )
