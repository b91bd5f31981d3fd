"""Exact average-age expressions for the three source-aware policies.

Everything here is a rational function of the two source loads and the
service rate.  Coefficient tables are stored ascending in powers, with the
outer index the power of the source-1 load and each entry a polynomial in
the source-2 load; evaluation is Horner in both variables.  The tables are
cross-checked against the numerical chain solver by the validation suite
(and, exactly, by ``scripts/exact_coefficient_check.py``), which is the
arbiter used to settle transcription questions.
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError
from .shs import StationaryDistribution


def _polyval(coeffs, x: float) -> float:
    """Horner evaluation; ``coeffs`` ascending."""
    total = 0.0
    for c in reversed(coeffs):
        total = total * x + c
    return total


def _bivariate(table, rho1: float, rho2: float) -> float:
    """Horner in rho1 of per-power polynomials in rho2 (all ascending)."""
    total = 0.0
    for coeffs in reversed(table):
        total = total * rho1 + _polyval(coeffs, rho2)
    return total


def _require_domain(rho1: float, rho2: float, mu: float) -> None:
    if not rho1 > 0.0:
        raise DomainError(f"rho1 must be > 0, got {rho1!r}")
    if rho2 < 0.0:
        raise DomainError(f"rho2 must be >= 0, got {rho2!r}")
    if not mu > 0.0:
        raise DomainError(f"mu must be > 0, got {mu!r}")


# --- policy 1 ---------------------------------------------------------------

THEOREM1_NUM = (
    (1, 2, 3, 2, 1),
    (6, 14, 21, 15, 7),
    (16, 42, 64, 46, 17),
    (26, 78, 118, 73, 15),
    (30, 102, 124, 52, 5),
    (24, 79, 66, 15),
    (11, 31, 15),
    (2, 5),
)

THEOREM1_DEN = (
    (1, 2, 3, 2, 1),
    (3, 7, 9, 6, 2),
    (4, 10, 12, 6),
    (3, 8, 6),
    (1, 2),
)


def theorem1_aoi(rho1: float, rho2: float, mu: float = 1.0) -> float:
    """Average age of source 1 under policy 1 (replacement in queue)."""
    _require_domain(rho1, rho2, mu)
    num = _bivariate(THEOREM1_NUM, rho1, rho2)
    den = mu * rho1 * (1.0 + rho1) ** 2 * _bivariate(THEOREM1_DEN, rho1, rho2)
    return num / den


# --- policy 2 ---------------------------------------------------------------

THEOREM2_NUM = (
    (1, 2, 1),
    (5, 11, 6),
    (10, 24, 13),
    (10, 27, 10),
    (5, 14, 3),
    (1, 3),
)


def _policy23_bracket(rho1: float, rho2: float) -> float:
    return rho1 * rho1 * (2.0 * rho2 + 1.0) + (rho2 + 1.0) ** 2 * (2.0 * rho1 + 1.0)


def theorem2_aoi(rho1: float, rho2: float, mu: float = 1.0) -> float:
    """Average age of source 1 under policy 2 (replacement anywhere,
    including self-preemption in service)."""
    _require_domain(rho1, rho2, mu)
    num = _bivariate(THEOREM2_NUM, rho1, rho2)
    den = mu * rho1 * (1.0 + rho1) ** 2 * _policy23_bracket(rho1, rho2)
    return num / den


# --- policy 3 ---------------------------------------------------------------

THEOREM3_NUM = (
    (1, 3, 3, 1),
    (4, 13, 14, 5),
    (7, 25, 28, 10),
    (6, 23, 22, 5),
    (2, 8, 5),
)


def theorem3_aoi(rho1: float, rho2: float, mu: float = 1.0) -> float:
    """Average age of source 1 under policy 3 (replacement in queue only;
    same-source arrivals during service are discarded)."""
    _require_domain(rho1, rho2, mu)
    num = _bivariate(THEOREM3_NUM, rho1, rho2)
    den = mu * rho1 * (1.0 + rho1) * (1.0 + rho2) * _policy23_bracket(rho1, rho2)
    return num / den


# --- stationary occupancy distributions -------------------------------------


def policy1_stationary(rho1: float, rho2: float) -> StationaryDistribution:
    """Stationary occupancy probabilities of the six-state policy-1 chain."""
    if rho1 < 0.0 or rho2 < 0.0 or rho1 + rho2 == 0.0:
        raise DomainError("loads must be nonnegative and not both zero")
    rho = rho1 + rho2
    raw = np.array(
        [1.0, rho, rho1 * rho, rho2 * rho, rho1 * rho2 * rho, rho1 * rho2 * rho]
    )
    norm = rho * rho + rho * (2.0 * rho1 * rho2 + 1.0) + 1.0
    return StationaryDistribution(probabilities=raw / norm)


def policy23_stationary(rho1: float, rho2: float) -> StationaryDistribution:
    """Stationary occupancy probabilities of the five-state chain shared by
    policies 2 and 3."""
    if rho1 < 0.0 or rho2 < 0.0 or rho1 + rho2 == 0.0:
        raise DomainError("loads must be nonnegative and not both zero")
    raw = np.array([1.0, rho1, rho2, rho1 * rho2, rho1 * rho2])
    norm = 2.0 * rho1 * rho2 + rho1 + rho2 + 1.0
    return StationaryDistribution(probabilities=raw / norm)


# --- per-state age correlation first components ------------------------------
#
# Policy-1 tables: one bivariate numerator per occupancy state, plus the
# denominator structure (whether it carries a bare rho1 factor and the
# powers of (1+rho) and (1+rho2)); all states share mu, (1+rho1)^2,
# (rho+1)^2 - rho2 and the stationary-normalization polynomial.

POLICY1_V_NUM = (
    # state 0
    (
        (1, 1, 1),
        (5, 6, 4),
        (10, 11, 2),
        (9, 5),
        (3,),
    ),
    # state 1
    (
        (0, 1, 3, 4, 3, 1),
        (1, 9, 22, 26, 16, 4),
        (6, 35, 70, 64, 25, 2),
        (16, 72, 107, 62, 11),
        (23, 77, 75, 23, 1),
        (18, 41, 23, 3),
        (7, 10, 3),
        (1, 1),
    ),
    # state 2
    (
        (0, 1, 4, 7, 7, 4, 1),
        (1, 10, 32, 51, 46, 23, 5),
        (7, 46, 119, 156, 108, 36, 4),
        (21, 111, 222, 213, 100, 20, 1),
        (33, 138, 202, 134, 40, 4),
        (28, 87, 89, 39, 6),
        (12, 26, 18, 4),
        (2, 3, 1),
    ),
    # state 3
    (
        (0, 0, 1, 3, 4, 3, 1),
        (0, 1, 10, 25, 30, 19, 5),
        (0, 6, 41, 87, 84, 37, 5),
        (0, 18, 91, 149, 101, 27, 2),
        (0, 30, 110, 126, 55, 8),
        (0, 27, 69, 51, 12),
        (0, 12, 20, 8),
        (0, 2, 2),
    ),
    # state 4
    (
        (0, 0, 1, 4, 7, 7, 4, 1),
        (0, 1, 11, 36, 58, 53, 27, 6),
        (0, 8, 55, 145, 193, 137, 48, 6),
        (0, 26, 140, 287, 286, 143, 32, 2),
        (0, 43, 183, 281, 201, 67, 8),
        (0, 38, 123, 137, 67, 12),
        (0, 17, 40, 31, 8),
        (0, 3, 5, 2),
    ),
    # state 5
    (
        (0, 0, 1, 3, 4, 3, 1),
        (0, 1, 11, 28, 34, 22, 6),
        (0, 7, 49, 105, 103, 47, 7),
        (0, 23, 115, 190, 133, 38, 3),
        (0, 40, 145, 170, 78, 12),
        (0, 37, 95, 73, 18),
        (0, 17, 29, 12),
        (0, 3, 3),
    ),
)

# (bare rho1 factor, power of (1+rho), power of (1+rho2)) per state.
POLICY1_V_DEN = (
    (True, 0, 0),
    (True, 1, 1),
    (False, 1, 2),
    (True, 1, 1),
    (False, 1, 2),
    (False, 1, 1),
)


def policy1_vq0(rho1: float, rho2: float, mu: float = 1.0) -> np.ndarray:
    """First correlation components of the six policy-1 states; their sum
    is :func:`theorem1_aoi`."""
    _require_domain(rho1, rho2, mu)
    rho = rho1 + rho2
    shared = (
        mu
        * (1.0 + rho1) ** 2
        * ((rho + 1.0) ** 2 - rho2)
        * (rho * rho + rho * (2.0 * rho1 * rho2 + 1.0) + 1.0)
    )
    out = np.empty(6)
    for q, (table, (bare_rho1, pow_rho, pow_rho2)) in enumerate(
        zip(POLICY1_V_NUM, POLICY1_V_DEN)
    ):
        den = shared * (1.0 + rho) ** pow_rho * (1.0 + rho2) ** pow_rho2
        if bare_rho1:
            den *= rho1
        out[q] = _bivariate(table, rho1, rho2) / den
    return out


def policy2_vq0(rho1: float, rho2: float, mu: float = 1.0) -> np.ndarray:
    """First correlation components of the five policy-2 states; their sum
    is :func:`theorem2_aoi`."""
    _require_domain(rho1, rho2, mu)
    rho = rho1 + rho2
    s = 1.0 + rho + 2.0 * rho1 * rho2
    den_a = mu * rho1 * (1.0 + rho1) ** 2 * (1.0 + rho) * s
    den_b = mu * (1.0 + rho2) * (1.0 + rho1) ** 2 * s
    v00 = (rho1**2 * (2.0 * rho + 5.0) + (4.0 * rho1 + 1.0) * (rho2 + 1.0)) / den_a
    v10 = ((1.0 + rho2) * (rho1**3 + 4.0 * rho1**2 + 1.0) + rho1 * (5.0 * rho2 + 4.0)) / den_b
    v20 = rho2 * (rho1**2 * (2.0 * rho + 6.0) + (4.0 * rho1 + 1.0) * (rho2 + 1.0)) / den_a
    v30 = rho2 * ((1.0 + rho2) * (2.0 * rho1**3 + 6.0 * rho1**2 + 1.0) + rho1 * (6.0 * rho2 + 5.0)) / den_b
    v40 = (
        rho2
        * (rho1**2 * (rho1**2 + 5.0 * rho1 + rho1 * rho2 + 4.0 * rho2 + 9.0) + (5.0 * rho1 + 1.0) * (1.0 + rho2))
        / (mu * (1.0 + rho1) ** 2 * (1.0 + rho) * s)
    )
    return np.array([v00, v10, v20, v30, v40])


def policy3_vq0(rho1: float, rho2: float, mu: float = 1.0) -> np.ndarray:
    """First correlation components of the five policy-3 states; their sum
    is :func:`theorem3_aoi`."""
    _require_domain(rho1, rho2, mu)
    rho = rho1 + rho2
    s = 1.0 + rho + 2.0 * rho1 * rho2
    den_a = mu * rho1 * (1.0 + rho1) * (1.0 + rho2) * (1.0 + rho) * s
    den_b = mu * (1.0 + rho2) * (1.0 + rho1) * s
    v00 = (rho1**3 + rho1**2 * ((rho2 + 2.0) ** 2 - 1.0) + (rho2 + 1.0) ** 2 * (3.0 * rho1 + 1.0)) / den_a
    v10 = ((1.0 + rho2) * (2.0 * rho1**2 + 1.0) + rho1 * (4.0 * rho2 + 3.0)) / den_b
    v20 = (
        rho2
        * (rho1**3 * (rho2 + 2.0) + rho1**2 * (rho2**2 + 5.0 * rho2 + 4.0) + (3.0 * rho1 + 1.0) * (rho2 + 1.0) ** 2)
        / den_a
    )
    v30 = rho2 * ((rho2 + 1.0) * (3.0 * rho1**2 + 1.0) + rho1 * (5.0 * rho2 + 4.0)) / den_b
    v40 = (
        rho2
        * (rho1**3 * (2.0 * rho2 + 3.0) + 2.0 * rho1**2 * ((rho2 + 2.0) ** 2 - 1.0) + (4.0 * rho1 + 1.0) * (rho2 + 1.0) ** 2)
        / (mu * (1.0 + rho1) * (1.0 + rho2) * (1.0 + rho) * s)
    )
    return np.array([v00, v10, v20, v30, v40])
