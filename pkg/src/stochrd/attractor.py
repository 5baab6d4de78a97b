"""Absorbing radii and pullback approximation of the random attractor.

The absorbing radius at anchor (tau, w) is the calibrated square root of
the exponentially weighted memory integral

    M_alpha(tau, w) = c_abs * ( int_{-S}^0 e^{lam s} e^{-2 alpha w(s)}
                                (1 + |g(s + tau)|^2) ds )^{1/2},

its deterministic counterpart drops the path weight, and the
alpha-uniform envelope R replaces e^{-2 alpha w(s)} by e^{2 |w(s)|},
which dominates pointwise for every alpha in [0, 1]; the quadratures
share nodes and weights, so the domination survives discretization
node by node.

pullback_ensemble approximates the attractor section at an anchor by
running the solution operator from ever deeper starting times: for each
horizon t it draws fresh initial states from a tempered family at
symbol time tau - t with the path shifted by -t, transports them to the
anchor, and declares the approximation converged once consecutive
endpoint sets stop moving (symmetric Hausdorff distance below eps_att).
Endpoint sets are deduplicated at a fixed resolution, which collapses
the approximation to its distinct states (a single one for strongly
contracting models).
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import CalibrationError
from .cocycle import CocycleQuery, phi
from .fields import Field, Grid, l2_distance, norms, read_field_block, tail_mass, write_field_block
from .model import ModelSpec
from .wiener import WienerPath, quad_exp, sample_two_sided_path, shift_path


@dataclass(frozen=True)
class AbsorbingSpec:
    """Radius calibration constant plus quadrature truncation and step."""

    c_abs: float = 2.0
    s_trunc: float = 40.0
    step: float = 0.01

    def __post_init__(self):
        if not self.c_abs > 0:
            raise ValueError("c_abs must be positive")
        if not (self.s_trunc > 0 and self.step > 0):
            raise ValueError("s_trunc and step must be positive")


def _radius_integral(tau: float, spec: ModelSpec, absorbing: AbsorbingSpec,
                     grid: Grid, weight: Callable[[np.ndarray], np.ndarray]) -> float:
    def h(s):
        return weight(s) * (1.0 + np.asarray(spec.g.l2norm_sq(s + tau, grid), dtype=float))

    return quad_exp(h, spec.lam, absorbing.s_trunc, absorbing.step)


def absorbing_radius(tau: float, path: WienerPath, alpha: float, spec: ModelSpec,
                     absorbing: AbsorbingSpec, grid: Grid) -> float:
    """Pathwise absorbing radius M_alpha(tau, w)."""
    integral = _radius_integral(
        tau, spec, absorbing, grid, lambda s: np.exp(-2.0 * alpha * path.value_at(s))
    )
    return absorbing.c_abs * float(np.sqrt(integral))


def deterministic_radius(tau: float, spec: ModelSpec, absorbing: AbsorbingSpec,
                         grid: Grid) -> float:
    """Zero-noise radius M_0(tau); path weight identically one."""
    integral = _radius_integral(tau, spec, absorbing, grid, lambda s: np.ones_like(s))
    return absorbing.c_abs * float(np.sqrt(integral))


def uniform_radius(tau: float, path: WienerPath, spec: ModelSpec,
                   absorbing: AbsorbingSpec, grid: Grid) -> float:
    """Envelope radius R(tau, w) dominating M_alpha for every alpha in [0, 1]."""
    integral = _radius_integral(
        tau, spec, absorbing, grid, lambda s: np.exp(2.0 * np.abs(path.value_at(s)))
    )
    return absorbing.c_abs * float(np.sqrt(integral))


# -- tempered initial families ----------------------------------------------


@dataclass(frozen=True)
class TemperedFamilySpec:
    """How pullback runs draw their initial states.

    family 'constant'       : L2 ball of fixed radius
    family 'absorbing-ball' : radius = factor * M_alpha at the starting
                              anchor (the tempered absorbing family)
    family 'custom'         : radius_fn(tau, path) -> radius
    """

    family: str = "absorbing-ball"
    radius: float = 1.0
    factor: float = 1.0
    radius_fn: Callable | None = None
    modes: int = 8

    def __post_init__(self):
        if self.family not in ("constant", "absorbing-ball", "custom"):
            raise ValueError(f"unknown tempered family {self.family!r}")
        if self.family == "custom" and self.radius_fn is None:
            raise ValueError("custom family needs radius_fn")
        if self.modes < 1:
            raise ValueError("modes must be >= 1")

    def radius_at(self, tau: float, path: WienerPath, alpha: float, spec: ModelSpec,
                  absorbing: AbsorbingSpec, grid: Grid) -> float:
        if self.family == "constant":
            return self.radius
        if self.family == "absorbing-ball":
            return self.factor * absorbing_radius(tau, path, alpha, spec, absorbing, grid)
        return float(self.radius_fn(tau, path))


def _mode_table(grid: Grid, modes: int) -> np.ndarray:
    """First Dirichlet sine modes stacked along axis 0."""
    xi = (grid.axis + grid.half_width) / (2.0 * grid.half_width)
    table = np.stack([np.sin(np.pi * j * xi) for j in range(1, modes + 1)])
    if grid.dim == 1:
        return table
    return np.stack([np.outer(table[j], table[j]) for j in range(modes)])


def sample_initial(family: TemperedFamilySpec, grid: Grid, radius: float,
                   rng: np.random.Generator) -> Field:
    """Smooth random state with L2 norm radius * xi, xi uniform in (0, 1]."""
    table = _mode_table(grid, family.modes)
    coeff = rng.normal(0.0, 1.0, size=family.modes) / np.arange(1, family.modes + 1)
    shape = np.tensordot(coeff, table, axes=(0, 0))
    f = Field(grid, shape)
    n = norms(f).l2
    if n == 0.0:
        return Field.zeros(grid)
    scale = radius * (1.0 - rng.uniform(0.0, 1.0)) / n
    return Field(grid, scale * f.values)


# -- set machinery -------------------------------------------------------------


def _as_fields(a) -> list[Field]:
    if isinstance(a, AttractorApprox):
        return a.endpoints
    return list(a)


def hausdorff_semidist(a, b) -> float:
    """One-sided Hausdorff distance max over a of min over b in grid L2."""
    fa, fb = _as_fields(a), _as_fields(b)
    if not fa or not fb:
        raise ValueError("hausdorff_semidist needs nonempty sets")
    grid = fa[0].grid
    for f in fa + fb:
        if f.grid != grid:
            raise ValueError("all fields must share one grid")
    return max(min(l2_distance(x, y) for y in fb) for x in fa)


def hausdorff_dist(a, b) -> float:
    """Symmetric Hausdorff distance."""
    return max(hausdorff_semidist(a, b), hausdorff_semidist(b, a))


def _dedup(fields: list[Field], tol: float) -> list[Field]:
    kept: list[Field] = []
    for f in fields:
        if all(l2_distance(f, g) > tol for g in kept):
            kept.append(f)
    return kept


# -- pullback approximation ----------------------------------------------------


@dataclass
class AttractorApprox:
    """Endpoint sets of ever deeper pullback runs at one anchor."""

    tau: float
    alpha: float
    horizons: list[float]
    m_samples: int
    endpoints: list[Field]
    distances: list[float]
    converged: bool
    seed: int
    eps_att: float

    def max_tail(self, k: float) -> float:
        return max(tail_mass(f, k) for f in self.endpoints)

    def to_json_dict(self) -> dict:
        return {
            "tau": self.tau,
            "alpha": self.alpha,
            "horizons": list(map(float, self.horizons)),
            "m_samples": self.m_samples,
            "n_endpoints": len(self.endpoints),
            "distances": list(map(float, self.distances)),
            "converged": bool(self.converged),
            "seed": self.seed,
            "eps_att": self.eps_att,
        }

    def write(self, out_dir: str) -> None:
        """JSON metadata, one binary block per endpoint, distances CSV."""
        os.makedirs(out_dir, exist_ok=True)
        meta = self.to_json_dict()
        meta["endpoint_files"] = [f"endpoint_{i:03d}.bin" for i in range(len(self.endpoints))]
        with open(os.path.join(out_dir, "attractor.json"), "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
        for name, f in zip(meta["endpoint_files"], self.endpoints):
            write_field_block(f, os.path.join(out_dir, name))
        with open(os.path.join(out_dir, "distances.csv"), "w") as fh:
            fh.write("horizon,set_distance\n")
            for t, d in zip(self.horizons[1:], self.distances):
                fh.write(f"{float(t)!r},{float(d)!r}\n")

    @classmethod
    def read(cls, out_dir: str) -> "AttractorApprox":
        with open(os.path.join(out_dir, "attractor.json")) as fh:
            meta = json.load(fh)
        endpoints = [
            read_field_block(os.path.join(out_dir, name)) for name in meta["endpoint_files"]
        ]
        return cls(
            tau=meta["tau"], alpha=meta["alpha"], horizons=meta["horizons"],
            m_samples=meta["m_samples"], endpoints=endpoints,
            distances=meta["distances"], converged=meta["converged"],
            seed=meta["seed"], eps_att=meta["eps_att"],
        )


def _endpoint_task(args) -> np.ndarray:
    (spec, grid, tau, alpha, t, shifted, family, absorbing, dt, seed_key) = args
    rng = np.random.default_rng(np.random.SeedSequence(seed_key))
    radius = family.radius_at(tau - t, shifted, alpha, spec, absorbing, grid)
    u0 = sample_initial(family, grid, radius, rng)
    out = phi(CocycleQuery(t, tau - t, shifted, u0, alpha), spec, dt)
    return out.values


def _run_tasks(tasks, workers: int):
    if workers <= 1:
        return [_endpoint_task(t) for t in tasks]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_endpoint_task, tasks))


def pullback_ensemble(
    tau: float,
    path: WienerPath,
    alpha: float,
    spec: ModelSpec,
    grid: Grid,
    horizons: Sequence[float],
    m_samples: int,
    family: TemperedFamilySpec,
    absorbing: AbsorbingSpec,
    dt: float = 1e-3,
    eps_att: float = 1e-3,
    dedup_tol: float = 1e-9,
    seed: int = 0,
    workers: int = 1,
) -> AttractorApprox:
    """Approximate the attractor section at (tau, path) for one intensity.

    For each horizon t, m_samples initial states are drawn from the
    tempered family at symbol time tau - t (path shifted by -t) and
    transported to the anchor.  Consecutive endpoint sets are compared
    in symmetric Hausdorff distance; the approximation is converged when
    the final comparison drops below eps_att.  Member draws are keyed by
    (seed, horizon index, member index), so ensembles with equal seeds
    share their initial shapes across intensities.
    """
    horizons = [float(t) for t in horizons]
    if not horizons or any(t <= 0 for t in horizons):
        raise ValueError("horizons must be positive")
    if sorted(horizons) != horizons:
        raise ValueError("horizons must increase")
    if m_samples < 1:
        raise ValueError("m_samples must be >= 1")

    sets: list[list[Field]] = []
    distances: list[float] = []
    for i, t in enumerate(horizons):
        shifted = shift_path(path, -t)
        tasks = [
            (spec, grid, tau, alpha, t, shifted, family, absorbing, dt, (seed, i, j))
            for j in range(m_samples)
        ]
        endpoints = [Field(grid, vals) for vals in _run_tasks(tasks, workers)]
        current = _dedup(endpoints, dedup_tol)
        sets.append(current)
        if i > 0:
            distances.append(hausdorff_dist(current, sets[i - 1]))

    converged = bool(distances and distances[-1] < eps_att)
    return AttractorApprox(
        tau=tau, alpha=alpha, horizons=horizons, m_samples=m_samples,
        endpoints=sets[-1], distances=distances, converged=converged,
        seed=seed, eps_att=eps_att,
    )


def attractor_periodicity_check(
    spec: ModelSpec,
    tau: float,
    path: WienerPath,
    alpha: float,
    grid: Grid,
    horizons: Sequence[float],
    m_samples: int,
    family: TemperedFamilySpec,
    absorbing: AbsorbingSpec,
    dt: float = 1e-3,
    eps_att: float = 1e-3,
    seed: int = 0,
    workers: int = 1,
) -> tuple[float, AttractorApprox, AttractorApprox]:
    """Symmetric Hausdorff distance between sections at tau and tau + T.

    Requires periodic forcing.  The two approximations use independent
    initial draws (child seeds), so agreement certifies set convergence
    rather than replaying identical arithmetic.
    """
    if spec.g.period is None:
        raise ValueError("attractor_periodicity_check needs forcing with a period")
    common = dict(
        path=path, alpha=alpha, spec=spec, grid=grid, horizons=horizons,
        m_samples=m_samples, family=family, absorbing=absorbing, dt=dt,
        eps_att=eps_att, workers=workers,
    )
    a = pullback_ensemble(tau=tau, seed=seed * 2 + 1, **common)
    b = pullback_ensemble(tau=tau + spec.g.period, seed=seed * 2 + 2, **common)
    return hausdorff_dist(a, b), a, b


# -- calibration ----------------------------------------------------------------


@dataclass(frozen=True)
class CalibrationConfig:
    seeds: tuple = (101, 102)
    alphas: tuple = (0.0, 0.5, 1.0)
    tau: float = 0.0
    horizon: float = 8.0
    m_samples: int = 3
    init_radius: float = 8.0
    c_floor: float = 2.0 ** -0.5
    c_cap: float = 2.0 ** 10
    safety: float = 2.0
    dt: float = 1e-3
    modes: int = 8


def calibrate_c(spec: ModelSpec, grid: Grid, absorbing_base: AbsorbingSpec | None = None,
                config: CalibrationConfig | None = None) -> float:
    """Smallest grid constant absorbing a reference ensemble, doubled.

    Runs pullback trajectories from a large constant ball across the
    configured seeds and intensities, computes for each run the ratio of
    the terminal norm to the unit-constant radius integral, and walks
    the candidate grid c = c_floor * sqrt(2)^k upward until every ratio
    is covered.  The first covering candidate times the safety factor is
    returned; exhausting the grid raises CalibrationError.
    """
    cfg = config or CalibrationConfig()
    base = absorbing_base or AbsorbingSpec(c_abs=1.0)
    unit = AbsorbingSpec(c_abs=1.0, s_trunc=base.s_trunc, step=base.step)
    family = TemperedFamilySpec("constant", radius=cfg.init_radius, modes=cfg.modes)

    s_max = max(cfg.horizon, base.s_trunc)
    ratios = []
    for seed in cfg.seeds:
        path = sample_two_sided_path(seed, s_max, cfg.dt)
        for alpha in cfg.alphas:
            shifted = shift_path(path, -cfg.horizon)
            m_unit = absorbing_radius(cfg.tau, path, alpha, spec, unit, grid)
            for j in range(cfg.m_samples):
                rng = np.random.default_rng(np.random.SeedSequence((seed, 7, j)))
                u0 = sample_initial(family, grid, cfg.init_radius, rng)
                out = phi(CocycleQuery(cfg.horizon, cfg.tau - cfg.horizon, shifted, u0, alpha),
                          spec, cfg.dt)
                ratios.append(norms(out).l2 / m_unit)

    needed = max(ratios)
    c = cfg.c_floor
    while c <= cfg.c_cap:
        if c >= needed:
            return cfg.safety * c
        c *= 2.0 ** 0.5
    raise CalibrationError(
        f"no candidate below cap {cfg.c_cap} absorbs the ensemble (needed {needed:.3g})"
    )


# -- tail report ------------------------------------------------------------------


@dataclass
class TailReport:
    radii: list[float]
    per_alpha: dict
    uniform_max: dict
    smallest_radius: float | None
    target: float | None

    def to_json_dict(self) -> dict:
        return {
            "radii": self.radii,
            "per_alpha": {repr(a): v for a, v in self.per_alpha.items()},
            "uniform_max": {repr(k): v for k, v in self.uniform_max.items()},
            "smallest_radius": self.smallest_radius,
            "target": self.target,
        }


def tail_uniformity_report(approxes: dict, radii: Sequence[float],
                           target: float | None = None) -> TailReport:
    """Max endpoint tail mass per cutoff radius and intensity.

    approxes maps alpha -> AttractorApprox.  When a target is given, the
    report also carries the smallest cutoff whose tail mass is below the
    target uniformly in alpha (None when no cutoff achieves it).
    """
    radii = [float(k) for k in radii]
    per_alpha = {
        a: {repr(k): ap.max_tail(k) for k in radii} for a, ap in approxes.items()
    }
    uniform = {k: max(per_alpha[a][repr(k)] for a in per_alpha) for k in radii}
    smallest = None
    if target is not None:
        for k in sorted(radii):
            if uniform[k] <= target:
                smallest = k
                break
    return TailReport(
        radii=radii, per_alpha=per_alpha,
        uniform_max={k: uniform[k] for k in radii},
        smallest_radius=smallest, target=target,
    )
