"""Event-driven simulator for all seven packet-management policies.

Interarrival times per source and service times are exponential; each
event is drawn by racing the active exponential clocks (one uniform for
the holding time, one for the event kind, both by inverse transform), so a
replication is a single deterministic stream fixed by (seed, replication
index).  Per-source age is integrated exactly as piecewise-linear area:
unit slope between deliveries, a drop to (delivery time - generation time)
at each delivery.

The policy semantics live in small per-policy arrival handlers over a
primitive occupancy tuple; the public :func:`step` wraps the same handlers
for inspection and property tests, and the replication loop uses them
directly.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import IllegalEvent, InvalidConfig, NegativeElapsed
from .policies import PolicyId
from .shs import LoadPoint

_BLOCK = 1 << 15


@dataclass(frozen=True)
class Packet:
    """A status update: source index (1 or 2) and generation time."""

    source: int
    gen: float


@dataclass(frozen=True)
class Arrival:
    source: int
    time: float


@dataclass(frozen=True)
class ServiceCompletion:
    time: float


@dataclass(frozen=True)
class SystemState:
    """Occupancy snapshot: in-service packet and ordered waiting slots."""

    serving: Packet | None = None
    queue: tuple[Packet, ...] = ()


@dataclass(frozen=True)
class SimConfig:
    """One simulation request; identical configs give identical results."""

    policy: PolicyId
    loads: LoadPoint
    horizon_events: int = 1_000_000
    warmup_fraction: float = 0.1
    seed: int = 0
    replications: int = 1

    def __post_init__(self):
        if self.horizon_events < 10_000:
            raise InvalidConfig(f"horizon_events must be >= 10000, got {self.horizon_events}")
        if not 0.0 <= self.warmup_fraction < 1.0:
            raise InvalidConfig(f"warmup_fraction must be in [0, 1), got {self.warmup_fraction}")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfig(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.replications < 1:
            raise InvalidConfig(f"replications must be >= 1, got {self.replications}")


@dataclass(frozen=True)
class SimResult:
    """Per-source time-average age estimates with replication spread."""

    policy: PolicyId
    delta1: float
    delta2: float
    se1: float
    se2: float
    replications: int
    sim_time: float
    per_rep: tuple[tuple[float, float], ...]


def aoi_area_increment(prev_aoi: float, elapsed: float) -> float:
    """Area under a unit-slope age segment: trapezoid with heights
    ``prev_aoi`` and ``prev_aoi + elapsed``."""
    if elapsed < 0.0:
        raise NegativeElapsed(f"elapsed must be >= 0, got {elapsed}")
    return prev_aoi * elapsed + 0.5 * elapsed * elapsed


# --- policy arrival semantics -------------------------------------------------
#
# Occupancy as primitives: (s_src, s_gen) in service, (a_src, a_gen) first
# waiting slot, (b_src, b_gen) second waiting slot; source 0 marks an empty
# slot.  Every handler returns the full 6-tuple.  An arrival at an empty
# system always enters service; completions are handled uniformly by the
# caller (head of queue moves up).


def _arrive_policy1(s_src, s_gen, a_src, a_gen, b_src, b_gen, src, t):
    # Waiting packet of the same source is replaced in place; service is
    # never preempted; otherwise join the tail (at most one slot per source).
    if s_src == 0:
        return src, t, a_src, a_gen, b_src, b_gen
    if a_src == src:
        return s_src, s_gen, src, t, b_src, b_gen
    if b_src == src:
        return s_src, s_gen, a_src, a_gen, src, t
    if a_src == 0:
        return s_src, s_gen, src, t, b_src, b_gen
    return s_src, s_gen, a_src, a_gen, src, t


def _arrive_policy2(s_src, s_gen, a_src, a_gen, b_src, b_gen, src, t):
    # Same-source packet anywhere in the system is replaced (self-preemption
    # in service); otherwise the arrival waits.
    if s_src == 0 or s_src == src:
        return src, t, a_src, a_gen, b_src, b_gen
    return s_src, s_gen, src, t, b_src, b_gen


def _arrive_policy3(s_src, s_gen, a_src, a_gen, b_src, b_gen, src, t):
    # As policy 2 but no preemption in service: same-source arrivals during
    # service are discarded.
    if s_src == 0:
        return src, t, a_src, a_gen, b_src, b_gen
    if s_src == src:
        return s_src, s_gen, a_src, a_gen, b_src, b_gen
    return s_src, s_gen, src, t, b_src, b_gen


def _arrive_lcfs_s(s_src, s_gen, a_src, a_gen, b_src, b_gen, src, t):
    # No waiting room; the arrival always takes the server.
    return src, t, a_src, a_gen, b_src, b_gen


def _arrive_lcfs_w(s_src, s_gen, a_src, a_gen, b_src, b_gen, src, t):
    # One waiting slot; the newest arrival always holds it.
    if s_src == 0:
        return src, t, a_src, a_gen, b_src, b_gen
    return s_src, s_gen, src, t, b_src, b_gen


def _arrive_pp_nw(s_src, s_gen, a_src, a_gen, b_src, b_gen, src, t):
    # No waiting room; preempt iff arriving priority >= in-service priority
    # (source 2 is the high-priority source, so the index is the priority).
    if s_src == 0 or src >= s_src:
        return src, t, a_src, a_gen, b_src, b_gen
    return s_src, s_gen, a_src, a_gen, b_src, b_gen


def _arrive_pp_ww(s_src, s_gen, a_src, a_gen, b_src, b_gen, src, t):
    # One waiting slot, no preemption in service; a full slot is replaced
    # iff the arriving priority >= the waiting priority.
    if s_src == 0:
        return src, t, a_src, a_gen, b_src, b_gen
    if a_src == 0 or src >= a_src:
        return s_src, s_gen, src, t, b_src, b_gen
    return s_src, s_gen, a_src, a_gen, b_src, b_gen


_ARRIVE = {
    PolicyId.POLICY1: _arrive_policy1,
    PolicyId.POLICY2: _arrive_policy2,
    PolicyId.POLICY3: _arrive_policy3,
    PolicyId.LCFS_S: _arrive_lcfs_s,
    PolicyId.LCFS_W: _arrive_lcfs_w,
    PolicyId.PP_NW: _arrive_pp_nw,
    PolicyId.PP_WW: _arrive_pp_ww,
}


def step(
    policy: PolicyId, state: SystemState, event: Arrival | ServiceCompletion
) -> tuple[SystemState, Packet | None]:
    """Apply one event under the given policy.

    Returns the next state and, for a completion, the delivered packet.
    """
    if len(state.queue) > 2:
        raise IllegalEvent("no policy holds more than two waiting packets")
    if isinstance(event, ServiceCompletion):
        if state.serving is None:
            raise IllegalEvent("service completion while the server is idle")
        queue = state.queue
        nxt = SystemState(serving=queue[0] if queue else None, queue=queue[1:])
        return nxt, state.serving
    if event.source not in (1, 2):
        raise IllegalEvent(f"source must be 1 or 2, got {event.source}")
    slots = state.queue + (None,) * (2 - len(state.queue))
    prim = [
        (p.source, p.gen) if p is not None else (0, 0.0)
        for p in (state.serving, slots[0], slots[1])
    ]
    s_src, s_gen, a_src, a_gen, b_src, b_gen = _ARRIVE[policy](
        prim[0][0], prim[0][1], prim[1][0], prim[1][1], prim[2][0], prim[2][1],
        event.source, event.time,
    )
    queue = tuple(Packet(src, gen) for src, gen in ((a_src, a_gen), (b_src, b_gen)) if src)
    return SystemState(serving=Packet(s_src, s_gen) if s_src else None, queue=queue), None


# --- replication loop ---------------------------------------------------------


def _run_replication(policy, lam1, lam2, mu, horizon, warmup_fraction, seed, rep, deliveries=None):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, rep))))
    arrive = _ARRIVE[policy]
    lam = lam1 + lam2
    rate_busy = lam + mu
    pb1 = lam1 / rate_busy
    pb2 = lam / rate_busy
    pi1 = lam1 / lam

    t = 0.0
    s_src, s_gen = 0, 0.0
    a_src, a_gen = 0, 0.0
    b_src, b_gen = 0, 0.0
    # Age trackers: aoi_c is the age value at time last_c.
    aoi1 = aoi2 = 0.0
    last1 = last2 = 0.0
    area1 = area2 = 0.0
    t_start = 0.0

    warm_at = int(warmup_fraction * horizon)
    warm_pending = warm_at > 0
    done = 0
    while done < horizon:
        n = min(_BLOCK, horizon - done)
        u_t = rng.random(_BLOCK)
        u_e = rng.random(_BLOCK)
        dt_busy = (-np.log1p(-u_t) / rate_busy).tolist()
        dt_idle = (-np.log1p(-u_t) / lam).tolist()
        kind_busy = ((u_e >= pb1).astype(np.int8) + (u_e >= pb2)).tolist()
        kind_idle = (u_e >= pi1).astype(np.int8).tolist()
        for i in range(n):
            if s_src:
                t += dt_busy[i]
                kind = kind_busy[i]
            else:
                t += dt_idle[i]
                kind = kind_idle[i]
            if kind == 2:
                if s_src == 1:
                    dt_el = t - last1
                    area1 += (aoi1 + 0.5 * dt_el) * dt_el
                    aoi1 = t - s_gen
                    last1 = t
                else:
                    dt_el = t - last2
                    area2 += (aoi2 + 0.5 * dt_el) * dt_el
                    aoi2 = t - s_gen
                    last2 = t
                if deliveries is not None:
                    deliveries.append((s_src, s_gen, t))
                s_src, s_gen = a_src, a_gen
                a_src, a_gen = b_src, b_gen
                b_src, b_gen = 0, 0.0
            else:
                s_src, s_gen, a_src, a_gen, b_src, b_gen = arrive(
                    s_src, s_gen, a_src, a_gen, b_src, b_gen, kind + 1, t
                )
            done += 1
            if warm_pending and done >= warm_at:
                warm_pending = False
                aoi1 += t - last1
                aoi2 += t - last2
                last1 = last2 = t_start = t
                area1 = area2 = 0.0

    dt_el = t - last1
    area1 += (aoi1 + 0.5 * dt_el) * dt_el
    dt_el = t - last2
    area2 += (aoi2 + 0.5 * dt_el) * dt_el
    measured = t - t_start
    return area1 / measured, area2 / measured, measured


def _replication_task(args):
    policy, lam1, lam2, mu, horizon, warmup, seed, rep = args
    return _run_replication(policy, lam1, lam2, mu, horizon, warmup, seed, rep)


def _mean_se(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n == 1:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var / n)


def simulate(config: SimConfig, trace_path=None, workers: int = 1) -> SimResult:
    """Run the configured replications and pool their age estimates.

    Replications use independent streams derived from (seed, replication
    index); results are identical for identical configs regardless of
    ``workers``.  When ``trace_path`` is given, every delivery is written
    there as ``policy,source,gen_time,delivery_time`` (forces serial
    execution).
    """
    loads = config.loads
    base = (
        config.policy,
        loads.lambda1,
        loads.lambda2,
        loads.mu,
        config.horizon_events,
        config.warmup_fraction,
        config.seed,
    )
    outcomes = []
    if trace_path is not None:
        with open(trace_path, "w", newline="") as fh:
            fh.write("policy,source,gen_time,delivery_time\n")
            for rep in range(config.replications):
                deliveries: list[tuple[int, float, float]] = []
                outcomes.append(_run_replication(*base, rep, deliveries))
                for src, gen, at in deliveries:
                    fh.write(f"{config.policy.value},{src},{gen!r},{at!r}\n")
    elif workers > 1 and config.replications > 1:
        tasks = [base + (rep,) for rep in range(config.replications)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_replication_task, tasks))
    else:
        for rep in range(config.replications):
            outcomes.append(_run_replication(*base, rep))

    d1, se1 = _mean_se([o[0] for o in outcomes])
    d2, se2 = _mean_se([o[1] for o in outcomes])
    return SimResult(
        policy=config.policy,
        delta1=d1,
        delta2=d2,
        se1=se1,
        se2=se2,
        replications=config.replications,
        sim_time=sum(o[2] for o in outcomes),
        per_rep=tuple((o[0], o[1]) for o in outcomes),
    )
