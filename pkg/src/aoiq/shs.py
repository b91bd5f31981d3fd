"""Generic solver for finite stochastic hybrid age models.

A model couples a finite continuous-time Markov chain over occupancy
states with a row vector of age components that grow linearly between
transitions and are remapped through a binary reset matrix whenever a
transition fires.  Solving the model yields the stationary occupancy
distribution, the per-state age correlation vectors, and the average age
of the tracked source (the sum of the first correlation component over
all states).

All solves are dense direct solves with partial pivoting; the systems
involved have at most a few dozen unknowns.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import NegativeSolution, NonPositiveRate, SingularSystem

# Residual bound for the stationary balance equations (relative).
BALANCE_RTOL = 1e-12
# Residual bound for the correlation-vector equations (relative).
CORRELATION_RTOL = 1e-10
# Round-off tolerated below zero in correlation entries before raising.
NEGATIVITY_SLACK = 1e-9


class Rate(Enum):
    """Symbolic transition rate, bound to a number per load point."""

    LAMBDA1 = "lambda1"
    LAMBDA2 = "lambda2"
    MU = "mu"


@dataclass(frozen=True)
class LoadPoint:
    """Arrival rates of the two sources and the shared service rate.

    All rates are in events per unit time and must be strictly positive.
    The per-source loads are ``rho1 = lambda1/mu`` and ``rho2 = lambda2/mu``.
    """

    lambda1: float
    lambda2: float
    mu: float

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "mu"):
            value = getattr(self, name)
            if not (value > 0.0) or not np.isfinite(value):
                raise NonPositiveRate(f"{name} must be finite and > 0, got {value!r}")

    @classmethod
    def from_loads(cls, rho1: float, rho2: float, mu: float = 1.0) -> "LoadPoint":
        """Build a load point from per-source loads and a service rate."""
        return cls(lambda1=rho1 * mu, lambda2=rho2 * mu, mu=mu)

    @property
    def rho1(self) -> float:
        return self.lambda1 / self.mu

    @property
    def rho2(self) -> float:
        return self.lambda2 / self.mu

    @property
    def rho(self) -> float:
        return (self.lambda1 + self.lambda2) / self.mu

    def value(self, rate: Rate) -> float:
        if rate is Rate.LAMBDA1:
            return self.lambda1
        if rate is Rate.LAMBDA2:
            return self.lambda2
        return self.mu

    def swapped(self) -> "LoadPoint":
        """The same point with the two source labels exchanged."""
        return LoadPoint(self.lambda2, self.lambda1, self.mu)


@dataclass(frozen=True, eq=False)
class Transition:
    """One directed transition of the occupancy chain.

    ``reset`` is applied on firing as ``x' = x @ reset``; self-transitions
    (``frm == to``) are allowed and still remap the age vector.  ``tag`` is
    a stable identifier used in diagnostics and tests.
    """

    frm: int
    to: int
    rate: Rate
    reset: np.ndarray
    tag: int = 0


@dataclass(frozen=True, eq=False)
class SHSModel:
    """A finite occupancy chain with age resets and growth vectors.

    ``growth`` holds one binary row per state; component j grows at unit
    rate in state q iff ``growth[q, j] == 1``.  Construction checks shapes
    and index bounds only; semantic problems (non-binary entries, missing
    strong connectivity) are reported by :func:`validate_model` and
    rejected by the solvers.
    """

    num_states: int
    age_dim: int
    transitions: tuple[Transition, ...]
    growth: np.ndarray

    def __post_init__(self):
        if self.num_states < 1 or self.age_dim < 1:
            raise ValueError("num_states and age_dim must be positive")
        if self.growth.shape != (self.num_states, self.age_dim):
            raise ValueError(
                f"growth must be {(self.num_states, self.age_dim)}, got {self.growth.shape}"
            )
        for tr in self.transitions:
            if not (0 <= tr.frm < self.num_states and 0 <= tr.to < self.num_states):
                raise ValueError(f"transition {tr.tag}: state index out of range")
            if tr.reset.shape != (self.age_dim, self.age_dim):
                raise ValueError(
                    f"transition {tr.tag}: reset map must be "
                    f"{(self.age_dim, self.age_dim)}, got {tr.reset.shape}"
                )

    def outgoing(self, q: int) -> list[Transition]:
        return [tr for tr in self.transitions if tr.frm == q]

    def incoming(self, q: int) -> list[Transition]:
        return [tr for tr in self.transitions if tr.to == q]


@dataclass(frozen=True, eq=False)
class StationaryDistribution:
    """Stationary probabilities of the occupancy chain."""

    probabilities: np.ndarray


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Stationary age correlation vectors, one row per occupancy state.

    The first column summed over states is the average age of the tracked
    source.
    """

    v: np.ndarray


def _reachable(num_states: int, edges: list[tuple[int, int]], start: int) -> set[int]:
    adj: list[list[int]] = [[] for _ in range(num_states)]
    for a, b in edges:
        adj[a].append(b)
    seen = {start}
    stack = [start]
    while stack:
        node = stack.pop()
        for nxt in adj[node]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def validate_model(model: SHSModel) -> list[str]:
    """Diagnose structural problems; returns an empty list for a sound model."""
    problems: list[str] = []
    edges = [(tr.frm, tr.to) for tr in model.transitions]

    forward = _reachable(model.num_states, edges, 0)
    for q in range(model.num_states):
        if q not in forward:
            problems.append(f"state {q} unreachable from state 0")
    backward = _reachable(model.num_states, [(b, a) for a, b in edges], 0)
    for q in range(model.num_states):
        if q not in backward:
            problems.append(f"state 0 unreachable from state {q}")

    used = {tr.rate for tr in model.transitions}
    for rate in Rate:
        if rate not in used:
            problems.append(f"rate symbol {rate.value} never used")

    for tr in model.transitions:
        if not np.isin(tr.reset, (0, 1)).all():
            problems.append(f"transition {tr.tag}: non-binary reset map")
    if not np.isin(model.growth, (0, 1)).all():
        problems.append("non-binary growth vector")

    return problems


def _require_solvable(model: SHSModel, loads: LoadPoint) -> None:
    problems = validate_model(model)
    if problems:
        raise SingularSystem("model fails validation: " + "; ".join(problems))
    # LoadPoint construction already guarantees positive rates.
    assert loads.mu > 0


def stationary_distribution(model: SHSModel, loads: LoadPoint) -> StationaryDistribution:
    """Solve the balance equations of the occupancy chain.

    For each state the outflow rate times its probability equals the
    rate-weighted inflow; one balance row is replaced by the normalization
    row (probabilities sum to one).  Every original balance equation is
    checked against ``BALANCE_RTOL`` afterwards.
    """
    _require_solvable(model, loads)
    m = model.num_states
    a = np.zeros((m, m))
    for tr in model.transitions:
        r = loads.value(tr.rate)
        a[tr.frm, tr.frm] += r
        a[tr.to, tr.frm] -= r
    balance = a.copy()

    a[0, :] = 1.0
    rhs = np.zeros(m)
    rhs[0] = 1.0
    try:
        pi = np.linalg.solve(a, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"balance system is singular: {exc}") from exc

    residual = balance @ pi
    scale = np.abs(balance) @ np.abs(pi)
    if np.any(np.abs(residual) > BALANCE_RTOL * np.maximum(scale, 1e-300)):
        raise SingularSystem("balance equations not satisfied to tolerance")
    if pi.min() < -BALANCE_RTOL:
        raise SingularSystem("stationary probabilities came out negative")
    pi = np.maximum(pi, 0.0)
    return StationaryDistribution(probabilities=pi)


def correlation_vectors(
    model: SHSModel, loads: LoadPoint, pi: StationaryDistribution
) -> CorrelationMatrix:
    """Solve the linear system tying age correlation vectors together.

    For each state q, the outflow rate times its correlation row equals the
    growth vector scaled by the state probability plus the rate-weighted,
    reset-mapped inflow rows.  Unknowns are flattened row-major by state
    then age index.  Entries marginally below zero (round-off) are clamped;
    anything below ``-NEGATIVITY_SLACK`` relative raises.
    """
    _require_solvable(model, loads)
    m, d = model.num_states, model.age_dim
    n = m * d
    mat = np.zeros((n, n))
    rhs = np.zeros(n)

    out_rate = np.zeros(m)
    for tr in model.transitions:
        out_rate[tr.frm] += loads.value(tr.rate)
    for q in range(m):
        sl = slice(q * d, (q + 1) * d)
        mat[sl, sl] += out_rate[q] * np.eye(d)
        rhs[sl] = model.growth[q] * pi.probabilities[q]
    for tr in model.transitions:
        r = loads.value(tr.rate)
        to, frm = tr.to * d, tr.frm * d
        # (v_frm @ reset)[j] couples unknown (frm, i) into row (to, j).
        mat[to : to + d, frm : frm + d] -= r * tr.reset.T

    try:
        flat = np.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"correlation system is singular: {exc}") from exc

    residual = mat @ flat - rhs
    scale = np.abs(mat) @ np.abs(flat) + np.abs(rhs)
    if np.any(np.abs(residual) > CORRELATION_RTOL * np.maximum(scale, 1e-300)):
        raise SingularSystem("correlation equations not satisfied to tolerance")

    v = flat.reshape(m, d)
    vmax = max(1.0, float(np.abs(v).max()))
    if v.min() < -NEGATIVITY_SLACK * vmax:
        raise NegativeSolution(
            f"correlation solve produced negative entry {v.min():.3e}"
        )
    return CorrelationMatrix(v=np.maximum(v, 0.0))


def average_aoi(model: SHSModel, loads: LoadPoint) -> float:
    """Average age of the tracked source: first correlation column summed."""
    pi = stationary_distribution(model, loads)
    corr = correlation_vectors(model, loads, pi)
    return float(corr.v[:, 0].sum())
