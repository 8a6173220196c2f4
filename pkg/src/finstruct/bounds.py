"""Exact integer evaluation of the spot-counting threshold condition.

Everything here is plain Python integer arithmetic; no floating point.
The condition compares the number of canonical blow-up embeddings (spots)
against a threshold built from the number of their r-element restrictions
(partial spots) and the count of atomic tuple types available to an
expanded signature.
"""

from __future__ import annotations

from math import comb
from typing import Optional

from .core import StructureError


def bell_number(n: int) -> int:
    """Bell number via the Bell triangle."""
    if n < 0:
        raise StructureError("Bell numbers need n >= 0")
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for value in row:
            nxt.append(nxt[-1] + value)
        row = nxt
    return row[0]


def atomic_type_count(t: int, r: int, include_equalities: bool = True) -> int:
    """Upper bound on atomic types of (r+1)-tuples for t predicates of arity <= r.

    Counted as equality patterns on r+1 coordinates (Bell(r+1)) times the
    subsets of coordinate-index tuples for t predicates at the maximizing
    arity r: Bell(r+1) * 2^(t*(r+1)^r).  Whether equality types belong in
    the count is settable; they are included by default, and a larger count
    only strengthens the condition, never weakens a positive verdict.
    """
    if t < 0:
        raise StructureError("predicate count must be >= 0")
    if r < 1:
        raise StructureError("arity bound must be >= 1")
    equality_types = bell_number(r + 1) if include_equalities else 1
    return equality_types * 2 ** (t * (r + 1) ** r)


def log_ceil2(q: int) -> int:
    """Smallest p with 2^p >= q."""
    if q < 1:
        raise StructureError("log_ceil2 needs q >= 1")
    return (q - 1).bit_length()


class BoundsParams:
    """Threshold-condition parameters: arity bound, predicate count, |A|, multiplicity."""

    __slots__ = ("r", "t", "n", "m")

    def __init__(self, r: int, t: int, n: int, m: int):
        for label, value in (("r", r), ("n", n), ("m", m)):
            if value < 1:
                raise StructureError(f"{label} must be >= 1")
        if t < 0:
            raise StructureError("t must be >= 0")
        self.r = r
        self.t = t
        self.n = n
        self.m = m


class BoundsReport:
    """Exact values entering the threshold condition and its verdict.

    ``spot_count`` is m^n, ``partial_spot_count`` the exact deduplicated
    restriction count C(n,r)*m^r; ``proof_partial_spot_count`` records the
    coarser m^r figure for comparison.  The verdict is
    spot_count > p*partial_spot_count + q^C(n,r).
    """

    __slots__ = (
        "params",
        "q",
        "p",
        "spot_count",
        "partial_spot_count",
        "proof_partial_spot_count",
        "threshold",
        "verdict",
        "include_equalities",
    )

    def __init__(self, params: BoundsParams, include_equalities: bool = True):
        if params.r > params.n:
            raise StructureError("restriction arity exceeds the base order")
        self.params = params
        self.include_equalities = include_equalities
        self.q = atomic_type_count(params.t, params.r, include_equalities)
        self.p = log_ceil2(self.q)
        self.spot_count = params.m**params.n
        self.partial_spot_count = comb(params.n, params.r) * params.m**params.r
        self.proof_partial_spot_count = params.m**params.r
        self.threshold = self.p * self.partial_spot_count + self.q ** comb(params.n, params.r)
        self.verdict = self.spot_count > self.threshold

    def to_dict(self) -> dict:
        return {
            "r": self.params.r,
            "t": self.params.t,
            "n": self.params.n,
            "m": self.params.m,
            "include_equalities": self.include_equalities,
            "q": str(self.q),
            "p": self.p,
            "spot_count": str(self.spot_count),
            "partial_spot_count": str(self.partial_spot_count),
            "proof_partial_spot_count": str(self.proof_partial_spot_count),
            "threshold": str(self.threshold),
            "verdict": self.verdict,
        }


def condition_holds(params: BoundsParams, include_equalities: bool = True) -> BoundsReport:
    """Evaluate the threshold condition exactly."""
    return BoundsReport(params, include_equalities)


def minimal_m(
    n: int,
    r: int,
    t: int,
    cap: int,
    include_equalities: bool = True,
) -> Optional[int]:
    """Least multiplicity m <= cap satisfying the condition, or None.

    A true verdict is upward closed in m (the spot count scales by a higher
    power than the threshold terms), so doubling followed by bisection is
    exact.
    """
    if r >= n:
        raise StructureError("needs r < n")
    if cap < 1:
        return None

    def holds(m: int) -> bool:
        return condition_holds(BoundsParams(r, t, n, m), include_equalities).verdict

    lo = 1
    hi: Optional[int] = None
    probe = 1
    while probe <= cap:
        if holds(probe):
            hi = probe
            break
        lo = probe + 1
        probe *= 2
    if hi is None:
        if lo <= cap and holds(cap):
            hi = cap
        else:
            return None
    while lo < hi:
        mid = (lo + hi) // 2
        if holds(mid):
            hi = mid
        else:
            lo = mid + 1
    return hi
