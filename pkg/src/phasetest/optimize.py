"""Derivative-free search for extremal J and J' over point-set parameters.

The search space is (theta, x0, x1, y0, y1) for rectangles and triangles
plus (r, phi) of the squeeze map for parallelograms.  A coarse grid scan
picks the best cell, then coordinate-wise pattern searches (shrink
factor 0.5, box-constrained) run from the grid best, a Wigner-probing
heuristic seed, and seeded random starts.  Everything is deterministic
for a fixed seed; multistarts may run on a thread pool with an ordered
reduction.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np

from .errors import NumericError, ValidationError
from . import kernels
from .functionals import RectangleSpec
from .states import compile_state

_MODES = ("rectangle", "parallelogram", "triangle")
_OBJECTIVES = ("maximize", "minimize")
_PARAM_NAMES = ("theta", "x0", "x1", "y0", "y1", "r", "phi")


@dataclass(frozen=True)
class OptimConfig:
    """Search configuration.

    Grid counts are samples per axis of the coarse scan; ``coord_grid``
    0 means the per-mode default (7 for rectangle/triangle, 5 for the
    seven-dimensional parallelogram search).  ``prefilter`` random
    candidates per start are batch-evaluated and the best become the
    random multistart seeds; part of the cloud concentrates around the
    probed parity maximum, where the narrow high-squeeze basins sit.
    ``fix_r`` pins the squeeze strength instead of searching it (used by
    fixed-squeeze sweeps).
    """

    mode: str = "rectangle"
    objective: str = "maximize"
    coord_range: Tuple[float, float] = (-3.0, 3.0)
    theta_range: Tuple[float, float] = (0.0, math.pi)
    r_range: Tuple[float, float] = (0.0, 3.0)
    phi_range: Tuple[float, float] = (0.0, math.pi)
    coord_grid: int = 0
    theta_grid: int = 4
    r_grid: int = 4
    phi_grid: int = 4
    tolerance: float = 1e-4
    multistarts: int = 16
    prefilter: int = 256
    seed: int = 0
    threads: int = 1
    fix_r: Optional[float] = None

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValidationError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if self.objective not in _OBJECTIVES:
            raise ValidationError(
                f"objective must be one of {_OBJECTIVES}, got {self.objective!r}"
            )
        if not self.tolerance > 0:
            raise ValidationError(f"tolerance must be > 0, got {self.tolerance}")
        if self.multistarts < 1:
            raise ValidationError("multistarts must be >= 1")
        for name in ("coord_range", "theta_range", "r_range", "phi_range"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ValidationError(f"{name} must be a finite (lo, hi) pair, got {(lo, hi)}")
        for name in ("theta_grid", "r_grid", "phi_grid"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be >= 1 (empty grid)")
        if self.coord_grid < 0:
            raise ValidationError("coord_grid must be >= 0")
        if self.prefilter < 1:
            raise ValidationError("prefilter must be >= 1")
        if self.fix_r is not None and self.fix_r < 0:
            raise ValidationError("fix_r must be >= 0")

    @property
    def resolved_coord_grid(self):
        if self.coord_grid:
            return self.coord_grid
        return 5 if self.mode == "parallelogram" else 7

    def to_dict(self):
        d = {name: getattr(self, name) for name in self.__dataclass_fields__}
        for key in ("coord_range", "theta_range", "r_range", "phi_range"):
            d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, doc):
        kwargs = {}
        for name in cls.__dataclass_fields__:
            if name in doc:
                value = doc[name]
                if name.endswith("_range"):
                    value = (float(value[0]), float(value[1]))
                kwargs[name] = value
        return cls(**kwargs)


@dataclass(frozen=True)
class StartTrace:
    index: int
    origin: str
    start_value: float
    final_value: float
    evaluations: int


@dataclass(frozen=True)
class OptimReport:
    """Extremal value, where it occurs, and how the search got there."""

    value: float
    params: dict
    mode: str
    objective: str
    seed: int
    evaluations: int
    grid_best: float
    starts: Tuple[StartTrace, ...] = field(default_factory=tuple)

    def to_dict(self):
        return {
            "value": self.value,
            "params": dict(self.params),
            "mode": self.mode,
            "objective": self.objective,
            "seed": self.seed,
            "evaluations": self.evaluations,
            "grid_best": self.grid_best,
            "starts": [
                {
                    "index": s.index,
                    "origin": s.origin,
                    "start_value": s.start_value,
                    "final_value": s.final_value,
                    "evaluations": s.evaluations,
                }
                for s in self.starts
            ],
        }


def _box(cfg):
    """Per-parameter (lo, hi) arrays for the 7-vector (fixed dims collapse)."""
    clo, chi = cfg.coord_range
    lo = [cfg.theta_range[0], clo, clo, clo, clo, 0.0, 0.0]
    hi = [cfg.theta_range[1], chi, chi, chi, chi, 0.0, 0.0]
    if cfg.mode == "parallelogram":
        if cfg.fix_r is not None:
            lo[5] = hi[5] = cfg.fix_r
        else:
            lo[5], hi[5] = cfg.r_range
        lo[6], hi[6] = cfg.phi_range
    return np.array(lo), np.array(hi)


def _axes(cfg, lo, hi):
    cg = cfg.resolved_coord_grid
    counts = [cfg.theta_grid, cg, cg, cg, cg, 1, 1]
    if cfg.mode == "parallelogram":
        counts[5] = 1 if cfg.fix_r is not None else cfg.r_grid
        counts[6] = cfg.phi_grid
    axes = []
    for i, n in enumerate(counts):
        if lo[i] == hi[i] or n == 1:
            axes.append(np.array([0.5 * (lo[i] + hi[i])]))
        else:
            axes.append(np.linspace(lo[i], hi[i], n))
    return axes


def _make_objective(data, mode, sign):
    kern = kernels.j_triangle if mode == "triangle" else kernels.j_rectangle
    def f(v):
        val = kern(data, v[0], v[1], v[2], v[3], v[4], v[5], v[6])
        if not math.isfinite(val):
            raise NumericError(f"objective value non-finite at parameters {tuple(v)}")
        return sign * val
    return f


def _pattern_search(f, x0, lo, hi, tol, max_sweeps=400):
    x = np.clip(np.asarray(x0, dtype=float), lo, hi)
    fx = f(x)
    nev = 1
    step = (hi - lo) / 8.0
    active = np.nonzero(step > 0)[0]
    if active.size == 0:
        return x, fx, nev
    while step[active].max() >= tol and nev < max_sweeps * 2 * active.size:
        improved = False
        for i in active:
            for sgn in (1.0, -1.0):
                xi = min(max(x[i] + sgn * step[i], lo[i]), hi[i])
                if xi == x[i]:
                    continue
                xt = x.copy()
                xt[i] = xi
                ft = f(xt)
                nev += 1
                if ft > fx:
                    x, fx = xt, ft
                    improved = True
        if not improved:
            step = step * 0.5
    return x, fx, nev


def _probe_extrema(data, probe_range, probe_n):
    axis = np.linspace(probe_range[0], probe_range[1], probe_n)
    gx, gy = np.meshgrid(axis, axis, indexing="ij")
    vals = kernels.parity_grid(data, gx.ravel(), gy.ravel(), 0.0)
    i_min = int(np.argmin(vals))
    i_max = int(np.argmax(vals))
    return (
        (float(gx.ravel()[i_max]), float(gy.ravel()[i_max])),
        (float(gx.ravel()[i_min]), float(gy.ravel()[i_min])),
        float(vals[i_min]),
    )


def heuristic_seed(state, probe_range=(-3.0, 3.0), probe_n=61):
    """Rectangle seed from a parity probe of the Wigner function.

    The minus-signed vertex (x1, y1) goes to the most negative probed
    parity and (x0, y0) to the highest one; states with no probed
    negativity get a modest rectangle centered on the parity maximum.
    """
    if probe_n < 2:
        raise ValidationError("probe_n must be >= 2")
    (x_max, y_max), (x_min, y_min), v_min = _probe_extrema(
        compile_state(state), probe_range, probe_n
    )
    if v_min >= -1e-9:
        h = 0.25
        return RectangleSpec(theta=0.0, x0=x_max - h, x1=x_max + h, y0=y_max - h, y1=y_max + h)
    return RectangleSpec(theta=0.0, x0=x_max, x1=x_min, y0=y_max, y1=y_min)


def optimize(state, cfg):
    """Extremal J (or J') over the configured point-set family.

    The result is never worse than the best coarse-grid probe and is
    reproducible for a fixed (config, seed).
    """
    data = compile_state(state)
    sign = 1.0 if cfg.objective == "maximize" else -1.0
    lo, hi = _box(cfg)
    axes = _axes(cfg, lo, hi)

    mesh = np.meshgrid(*axes, indexing="ij")
    grid = np.stack([m.ravel() for m in mesh], axis=1)
    if grid.size == 0:
        raise ValidationError("empty coarse grid")
    batch = kernels.j_triangle_batch if cfg.mode == "triangle" else kernels.j_rectangle_batch
    grid_vals = sign * batch(data, grid)
    if not np.all(np.isfinite(grid_vals)):
        bad = grid[int(np.nonzero(~np.isfinite(grid_vals))[0][0])]
        raise NumericError(f"objective value non-finite at parameters {tuple(bad)}")
    i_best = int(np.argmax(grid_vals))
    grid_best_vec = grid[i_best]
    grid_best_val = float(grid_vals[i_best])
    evaluations = grid.shape[0]

    rng = np.random.default_rng(cfg.seed)
    f = _make_objective(data, cfg.mode, sign)
    if cfg.objective == "maximize":
        seed_rect = heuristic_seed(state)
        center = np.array(
            [0.5 * (seed_rect.x0 + seed_rect.x1), 0.5 * (seed_rect.y0 + seed_rect.y1)]
        )
        heuristic_coords = (seed_rect.x0, seed_rect.x1, seed_rect.y0, seed_rect.y1)
    else:
        # minimization heads for the deepest parity; a degenerate
        # rectangle there evaluates to twice the most negative value
        _, (x_min, y_min), _ = _probe_extrema(data, cfg.coord_range, 61)
        center = np.array([x_min, y_min])
        heuristic_coords = (x_min, x_min, y_min, y_min)
    heuristic_vec = np.clip(
        np.array([0.0, *heuristic_coords, lo[5], lo[6]]),
        lo,
        hi,
    )
    starts = [("grid", grid_best_vec), ("heuristic", heuristic_vec)][: cfg.multistarts]
    n_random = cfg.multistarts - len(starts)
    if n_random > 0:
        # random candidate cloud, partly concentrated around the probed
        # parity maximum at several scales; the best survivors seed the
        # local searches
        n_cand = cfg.prefilter * cfg.multistarts
        cloud = lo + (hi - lo) * rng.random((n_cand, 7))
        coord_center = np.repeat(center, 2)  # (x0, x1, y0, y1) around the probe max
        half_span = 0.5 * (hi[1:5] - lo[1:5])
        for block, scale in ((1, 0.5), (2, 0.15), (3, 0.05)):
            sel = np.arange(n_cand) % 4 == block
            coords = coord_center + rng.normal(0.0, scale, (int(sel.sum()), 4)) * half_span
            cloud[sel, 1:5] = np.clip(coords, lo[1:5], hi[1:5])
        cloud_vals = sign * batch(data, cloud)
        evaluations += n_cand
        order = np.argsort(-cloud_vals, kind="stable")[:n_random]
        for idx in order:
            starts.append(("random", cloud[int(idx)]))

    def run(item):
        index, (origin, vec) = item
        x, fx, nev = _pattern_search(f, vec, lo, hi, cfg.tolerance)
        return index, origin, f(vec), x, fx, nev + 1

    tasks = list(enumerate(starts))
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            outcomes = list(pool.map(run, tasks))
    else:
        outcomes = [run(t) for t in tasks]

    best_vec, best_val = grid_best_vec, grid_best_val
    traces = []
    for index, origin, f0, x, fx, nev in outcomes:
        evaluations += nev
        traces.append(
            StartTrace(
                index=index,
                origin=origin,
                start_value=sign * f0,
                final_value=sign * fx,
                evaluations=nev,
            )
        )
        if fx > best_val:
            best_val, best_vec = fx, x

    assert best_val >= grid_best_val
    names = _PARAM_NAMES if cfg.mode == "parallelogram" else _PARAM_NAMES[:5]
    params = {name: float(v) for name, v in zip(names, best_vec)}
    return OptimReport(
        value=sign * best_val,
        params=params,
        mode=cfg.mode,
        objective=cfg.objective,
        seed=cfg.seed,
        evaluations=evaluations,
        grid_best=sign * grid_best_val,
        starts=tuple(traces),
    )


@dataclass(frozen=True)
class ThresholdScan:
    """Crossing(s) of an optimized family value against a bound."""

    bound: float
    crossings: Tuple[float, ...]
    evidence: Tuple[Tuple[float, float], ...]

    @property
    def no_crossing(self):
        return not self.crossings

    @property
    def crossing(self):
        return self.crossings[0] if self.crossings else None

    def to_dict(self):
        return {
            "bound": self.bound,
            "crossings": list(self.crossings),
            "no_crossing": self.no_crossing,
            "evidence": [list(e) for e in self.evidence],
        }


def threshold_scan(family, param_range, bound, cfg, param_tol=1e-3, coarse=9):
    """Locate where the optimized value of a state family crosses a bound.

    ``family`` maps a scalar parameter to a StateSpec.  Endpoints plus a
    coarse scan establish brackets (several crossings are all reported
    when the family is not monotone); each bracket is bisected to
    ``param_tol``.  No sign change anywhere is a 'no crossing' result,
    not an error.
    """
    lo, hi = float(param_range[0]), float(param_range[1])
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValidationError(f"param_range must be finite with lo < hi, got {param_range}")
    if coarse < 2:
        raise ValidationError("coarse must be >= 2")

    def g(p):
        return optimize(family(p), cfg).value - bound

    ps = np.linspace(lo, hi, coarse)
    vals = [g(p) for p in ps]
    evidence = tuple((float(p), float(v) + bound) for p, v in zip(ps, vals))

    crossings = []
    for (p0, v0), (p1, v1) in zip(zip(ps, vals), zip(ps[1:], vals[1:])):
        if v0 == 0.0:
            crossings.append(float(p0))
            continue
        if (v0 > 0) == (v1 > 0) and v1 != 0.0:
            continue
        a, fa, b = p0, v0, p1
        while b - a > param_tol:
            mid = 0.5 * (a + b)
            fm = g(mid)
            if fm == 0.0:
                a = b = mid
                break
            if (fm > 0) == (fa > 0):
                a, fa = mid, fm
            else:
                b = mid
        crossings.append(0.5 * (a + b))
    if vals[-1] == 0.0:
        crossings.append(float(ps[-1]))
    return ThresholdScan(bound=float(bound), crossings=tuple(crossings), evidence=evidence)
