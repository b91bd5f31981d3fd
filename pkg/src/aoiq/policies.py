"""Occupancy-chain models of the source-aware packet-management policies.

Three policies have an exact hybrid-age model here:

* ``POLICY1`` — the queue holds up to two waiting packets, one per source;
  a busy-server arrival replaces the waiting packet of its own source.
* ``POLICY2`` — the whole system holds up to two packets, one per source;
  an arrival replaces its own source's packet even in service.
* ``POLICY3`` — like ``POLICY2`` but without preemption in service: an
  arrival of the source currently being served is discarded.

The other four identifiers are source-agnostic or priority baselines that
exist only for the event-driven simulator; asking them for an analytic
model raises :class:`~aoiq.errors.UnsupportedPolicy`.

Only source 1's age is modelled; source 2 is evaluated by swapping the two
arrival rates, which is exact because the policies treat the sources
symmetrically.
"""
from __future__ import annotations

from enum import Enum

import numpy as np

from . import closed_form, shs
from .errors import UnsupportedPolicy
from .shs import LoadPoint, Rate, SHSModel, Transition

L1, L2, MU = Rate.LAMBDA1, Rate.LAMBDA2, Rate.MU


class PolicyId(Enum):
    """Packet-management policies known to the package."""

    POLICY1 = "p1"
    POLICY2 = "p2"
    POLICY3 = "p3"
    LCFS_S = "lcfs-s"
    LCFS_W = "lcfs-w"
    PP_NW = "pp-nw"
    PP_WW = "pp-ww"


#: Policies with an analytic (chain + closed-form) treatment.
ANALYTIC_POLICIES = (PolicyId.POLICY1, PolicyId.POLICY2, PolicyId.POLICY3)


class SourceView(Enum):
    """Which source's average age a query refers to."""

    SOURCE1 = 1
    SOURCE2 = 2


class EvalMethod(Enum):
    """Backend used to produce a number for a (policy, load) point."""

    CLOSED_FORM = "closed-form"
    SHS = "shs"
    SIM = "sim"


def _reset(assignment: tuple[int | None, ...]) -> np.ndarray:
    """Binary reset map sending new component j to old component
    ``assignment[j]`` (``None`` zeroes the component)."""
    d = len(assignment)
    a = np.zeros((d, d))
    for j, i in enumerate(assignment):
        if i is not None:
            a[i, j] = 1.0
    return a


# Each row: (tag, from, to, rate, new-age assignment).  The assignment
# tuple spells out x' componentwise, e.g. (0, None, 2, 3) means
# x' = [x0, 0, x2, x3].

_POLICY1_ROWS = (
    (1, 0, 1, L1, (0, None, 2, 3)),
    (2, 0, 1, L2, (0, 0, 2, 3)),
    (3, 1, 0, MU, (1, 1, 2, 3)),
    (4, 1, 2, L1, (0, 1, None, 3)),
    (5, 1, 3, L2, (0, 1, 1, 3)),
    (6, 2, 1, MU, (1, 2, 2, 3)),
    (7, 3, 1, MU, (1, 1, 2, 3)),
    (8, 2, 2, L1, (0, 1, None, 3)),
    (9, 2, 4, L2, (0, 1, 2, 2)),
    (10, 3, 5, L1, (0, 1, 1, None)),
    (11, 4, 4, L1, (0, 1, None, None)),
    (12, 5, 5, L1, (0, 1, 1, None)),
    (13, 4, 3, MU, (1, 2, 2, 3)),
    (14, 5, 2, MU, (1, 1, 3, 3)),
)

_POLICY2_ROWS = (
    (1, 0, 1, L1, (0, None, 2)),
    (2, 0, 2, L2, (0, 0, 2)),
    (3, 1, 1, L1, (0, None, 2)),
    (4, 1, 3, L2, (0, 1, 1)),
    (5, 2, 4, L1, (0, 0, None)),
    (6, 3, 3, L1, (0, None, None)),
    (7, 4, 4, L1, (0, 0, None)),
    (8, 1, 0, MU, (1, 1, 2)),
    (9, 2, 0, MU, (0, 1, 2)),
    (10, 3, 2, MU, (1, 1, 2)),
    (11, 4, 1, MU, (0, 2, 2)),
)

# Identical chain to POLICY2 except rows 3 and 6: the blocked same-source
# arrival leaves the age vector unchanged (row 3) or pins the queued
# component to the in-service one (row 6).
_POLICY3_REPLACED = {
    3: (3, 1, 1, L1, (0, 1, 2)),
    6: (6, 3, 3, L1, (0, 1, 1)),
}
_POLICY3_ROWS = tuple(_POLICY3_REPLACED.get(row[0], row) for row in _POLICY2_ROWS)


def _build(rows, num_states: int, age_dim: int) -> SHSModel:
    transitions = tuple(
        Transition(frm=frm, to=to, rate=rate, reset=_reset(assign), tag=tag)
        for tag, frm, to, rate, assign in rows
    )
    return SHSModel(
        num_states=num_states,
        age_dim=age_dim,
        transitions=transitions,
        growth=np.ones((num_states, age_dim)),
    )


def build_policy1_model() -> SHSModel:
    """Six states (idle; busy with 0-2 waiting packets in either source
    order), four age components, fourteen transitions."""
    return _build(_POLICY1_ROWS, num_states=6, age_dim=4)


def build_policy2_model() -> SHSModel:
    """Five states (idle; either source in service, with or without the
    other source waiting), three age components, eleven transitions."""
    return _build(_POLICY2_ROWS, num_states=5, age_dim=3)


def build_policy3_model() -> SHSModel:
    """Same chain as policy 2 with rows 3 and 6 replaced (no preemption in
    service)."""
    return _build(_POLICY3_ROWS, num_states=5, age_dim=3)


_BUILDERS = {
    PolicyId.POLICY1: build_policy1_model,
    PolicyId.POLICY2: build_policy2_model,
    PolicyId.POLICY3: build_policy3_model,
}

_CLOSED_FORM = {
    PolicyId.POLICY1: closed_form.theorem1_aoi,
    PolicyId.POLICY2: closed_form.theorem2_aoi,
    PolicyId.POLICY3: closed_form.theorem3_aoi,
}


def build_model(policy: PolicyId) -> SHSModel:
    """Analytic model for one of the three source-aware policies."""
    try:
        return _BUILDERS[policy]()
    except KeyError:
        raise UnsupportedPolicy(
            f"{policy.value} has no analytic model in scope; use the simulator"
        ) from None


def average_aoi_for(
    policy: PolicyId,
    view: SourceView,
    loads: LoadPoint,
    method: EvalMethod = EvalMethod.CLOSED_FORM,
) -> float:
    """Average age of the requested source under an analytic policy.

    The source-2 value is the source-1 value at swapped arrival rates.
    """
    if method is EvalMethod.SIM:
        raise ValueError("average_aoi_for is analytic; run the simulator for sim results")
    if view is SourceView.SOURCE2:
        loads = loads.swapped()
    if method is EvalMethod.SHS:
        return shs.average_aoi(build_model(policy), loads)
    try:
        formula = _CLOSED_FORM[policy]
    except KeyError:
        raise UnsupportedPolicy(
            f"{policy.value} has no closed form in scope; use the simulator"
        ) from None
    return formula(loads.rho1, loads.rho2, loads.mu)
