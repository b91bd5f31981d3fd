"""Fairness metric, parameter sweeps, and age trade-off curves.

A sweep walks a grid of source-1 loads (with either the total load or the
source-2 load held fixed) and evaluates each (policy, point) by closed
form, by the chain solver, or by simulation.  Source 2's value comes from
swapping the two arrival rates for the analytic backends and directly from
the run for simulation.  Failed points are collected and reported instead
of aborting the sweep.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import AoiqError, DomainError
from .policies import ANALYTIC_POLICIES, EvalMethod, PolicyId, SourceView, average_aoi_for
from .shs import LoadPoint
from .sim import SimConfig, SimResult, simulate


def jain_index(d1: float, d2: float) -> float:
    """Fairness of a pair of per-source averages: (d1+d2)^2 / (2(d1^2+d2^2)),
    in [0.5, 1] with 1 iff the two are equal."""
    if not (d1 > 0.0 and d2 > 0.0):
        raise DomainError(f"jain_index needs positive values, got {d1!r}, {d2!r}")
    return (d1 + d2) ** 2 / (2.0 * (d1 * d1 + d2 * d2))


@dataclass(frozen=True)
class SimSettings:
    """Simulation effort for sweep points evaluated by the simulator."""

    horizon_events: int = 400_000
    replications: int = 8
    warmup_fraction: float = 0.1
    seed: int = 0
    workers: int = 1


@dataclass(frozen=True)
class SweepSpec:
    """A sweep over source-1 load with either total or source-2 load fixed.

    ``methods`` overrides the evaluation backend per policy; the default is
    closed form for the three source-aware policies and simulation for the
    baselines.
    """

    policies: tuple[PolicyId, ...]
    rho1_grid: tuple[float, ...]
    mu: float = 1.0
    total_rho: float | None = None
    rho2: float | None = None
    methods: dict[PolicyId, EvalMethod] = field(default_factory=dict)
    sim: SimSettings = field(default_factory=SimSettings)

    def __post_init__(self):
        if (self.total_rho is None) == (self.rho2 is None):
            raise DomainError("set exactly one of total_rho and rho2")
        if not self.policies:
            raise DomainError("policy list is empty")
        if self.mu <= 0.0:
            raise DomainError("mu must be positive")
        grid = self.rho1_grid
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            raise DomainError("rho1 grid must be nonempty and strictly increasing")
        if grid[0] <= 0.0:
            raise DomainError("rho1 grid must be positive")
        if self.total_rho is not None and grid[-1] >= self.total_rho:
            raise DomainError("rho1 grid must stay below the fixed total load")
        if self.rho2 is not None and self.rho2 <= 0.0:
            raise DomainError("fixed rho2 must be positive")

    def method_for(self, policy: PolicyId) -> EvalMethod:
        if policy in self.methods:
            return self.methods[policy]
        return EvalMethod.CLOSED_FORM if policy in ANALYTIC_POLICIES else EvalMethod.SIM

    def rho2_at(self, rho1: float) -> float:
        return self.total_rho - rho1 if self.total_rho is not None else self.rho2


@dataclass(frozen=True)
class SweepRow:
    """One evaluated (policy, load point).

    ``ci_low``/``ci_high`` bound delta1 at three standard errors for
    simulation rows; the ``se_*`` fields are extra simulation detail that
    is not serialized.
    """

    policy: PolicyId
    rho1: float
    rho2: float
    mu: float
    delta1: float
    delta2: float
    sum_aoi: float
    jain: float
    method: EvalMethod
    ci_low: float | None = None
    ci_high: float | None = None
    seed: int | None = None
    se_delta1: float | None = None
    se_delta2: float | None = None
    se_sum: float | None = None

    def canonical(self) -> "SweepRow":
        """The row restricted to the serialized columns."""
        return replace(self, se_delta1=None, se_delta2=None, se_sum=None)


@dataclass(frozen=True)
class SweepFailure:
    policy: PolicyId
    rho1: float
    rho2: float
    message: str


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    failures: tuple[SweepFailure, ...]


def _point_seed(base: int, policy_index: int, point_index: int) -> int:
    return int(np.random.SeedSequence((base, policy_index, point_index)).generate_state(1)[0])


def _evaluate_point(
    policy: PolicyId,
    rho1: float,
    rho2: float,
    mu: float,
    method: EvalMethod,
    sim_settings: SimSettings,
    seed: int,
) -> SweepRow:
    loads = LoadPoint.from_loads(rho1, rho2, mu)
    if method is EvalMethod.SIM:
        result = simulate(
            SimConfig(
                policy=policy,
                loads=loads,
                horizon_events=sim_settings.horizon_events,
                warmup_fraction=sim_settings.warmup_fraction,
                seed=seed,
                replications=sim_settings.replications,
            ),
            workers=sim_settings.workers,
        )
        sums = [a + b for a, b in result.per_rep]
        n = len(sums)
        mean_sum = sum(sums) / n
        se_sum = 0.0
        if n > 1:
            se_sum = math.sqrt(sum((s - mean_sum) ** 2 for s in sums) / (n - 1) / n)
        return SweepRow(
            policy=policy,
            rho1=rho1,
            rho2=rho2,
            mu=mu,
            delta1=result.delta1,
            delta2=result.delta2,
            sum_aoi=result.delta1 + result.delta2,
            jain=jain_index(result.delta1, result.delta2),
            method=method,
            ci_low=result.delta1 - 3.0 * result.se1,
            ci_high=result.delta1 + 3.0 * result.se1,
            seed=seed,
            se_delta1=result.se1,
            se_delta2=result.se2,
            se_sum=se_sum,
        )
    d1 = average_aoi_for(policy, SourceView.SOURCE1, loads, method)
    d2 = average_aoi_for(policy, SourceView.SOURCE2, loads, method)
    return SweepRow(
        policy=policy,
        rho1=rho1,
        rho2=rho2,
        mu=mu,
        delta1=d1,
        delta2=d2,
        sum_aoi=d1 + d2,
        jain=jain_index(d1, d2),
        method=method,
    )


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Evaluate every (policy, grid point); rows sorted by (policy, rho1)."""
    rows: list[SweepRow] = []
    failures: list[SweepFailure] = []
    for p_idx, policy in enumerate(spec.policies):
        method = spec.method_for(policy)
        for g_idx, rho1 in enumerate(spec.rho1_grid):
            rho2 = spec.rho2_at(rho1)
            seed = _point_seed(spec.sim.seed, p_idx, g_idx)
            try:
                rows.append(
                    _evaluate_point(policy, rho1, rho2, spec.mu, method, spec.sim, seed)
                )
            except AoiqError as exc:
                failures.append(SweepFailure(policy, rho1, rho2, str(exc)))
    rows.sort(key=lambda r: (r.policy.value, r.rho1))
    return SweepResult(rows=tuple(rows), failures=tuple(failures))


def tradeoff_curve(
    policy: PolicyId,
    total_rho: float,
    mu: float = 1.0,
    num_points: int = 25,
    method: EvalMethod | None = None,
    sim: SimSettings | None = None,
) -> list[tuple[float, float]]:
    """Achievable (delta1, delta2) pairs as the load split varies at fixed
    total load.  Endpoints stay one percent of the total away from the
    divergent extremes."""
    if total_rho <= 0.0:
        raise DomainError("total_rho must be positive")
    if num_points < 2:
        raise DomainError("num_points must be at least 2")
    eps = 0.01 * total_rho
    grid = tuple(np.linspace(eps, total_rho - eps, num_points).tolist())
    spec = SweepSpec(
        policies=(policy,),
        rho1_grid=grid,
        mu=mu,
        total_rho=total_rho,
        methods={policy: method} if method is not None else {},
        sim=sim if sim is not None else SimSettings(),
    )
    result = run_sweep(spec)
    if result.failures:
        first = result.failures[0]
        raise DomainError(f"trade-off point ({first.rho1:g}, {first.rho2:g}) failed: {first.message}")
    return [(row.delta1, row.delta2) for row in result.rows]
