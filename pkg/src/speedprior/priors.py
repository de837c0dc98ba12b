"""Certified interval approximations of the two speed priors.

Both priors are sums over discovered computations (p -> x in t steps):

* the Kt-weighted prior assigns each computation 2^(-|p|) / t;
* the phase-weighted prior assigns 2^(-i) * 2^(-|p|) for every phase i at
  which the computation appears, i.e. a geometric series starting at the
  computation's first phase.

Enumerating to phase k yields an exact lower bound; the mass still missing
is at most 2^(-k) for the phase-weighted prior and 2^(-k) + 1/(k+1) for the
Kt prior (undiscovered computations either run longer than 2^k steps or
have programs longer than k bits). An estimate is *certified* once
tail <= epsilon * lower, which implies |lower / S - 1| <= epsilon without
knowing the true value S. All arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .bits import validate_bits
from .enumeration import ComputationRecord, targeted_records
from .rationals import rational_to_pair

__all__ = [
    "PriorKind",
    "PriorEstimate",
    "PROJECTION_CAP",
    "lower_bound",
    "tail_bound",
    "kraft_sum",
    "estimate_prior",
    "s_kt_estimate",
    "s_fast_estimate",
    "alternate_form_sum",
    "conditional",
    "joint_enclosure",
    "phases_needed",
    "contribution_masses",
]

ZERO = Fraction(0)
ONE = Fraction(1)

# Projected phase counts beyond this are reported as None; the Kt stopping
# rule's harmonic tail routinely pushes projections past any feasible range.
PROJECTION_CAP = 1_000_000


class PriorKind(str, Enum):
    KT = "kt"
    FAST = "fast"


@dataclass(frozen=True)
class PriorEstimate:
    """Certified enclosure [lower, lower + tail] for a prior value."""

    kind: PriorKind
    target: str
    lower: Fraction
    tail: Fraction
    phases_used: int
    epsilon: Fraction
    certified: bool
    phases_needed: int | None  # stopping-rule projection from found records

    @property
    def upper(self) -> Fraction:
        return self.lower + self.tail

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "x": self.target,
            "lower": rational_to_pair(self.lower),
            "tail": rational_to_pair(self.tail),
            "k": self.phases_used,
            "epsilon": rational_to_pair(self.epsilon),
            "certified": self.certified,
            "phases_needed": self.phases_needed,
        }


def _fast_contribution(rec: ComputationRecord, k: int) -> Fraction:
    """Sum over phases i = first_phase .. k of 2^(-i - |p|)."""
    if rec.first_phase > k:
        return ZERO
    length = len(rec.program)
    return Fraction((1 << (k - rec.first_phase + 1)) - 1, 1 << (k + length))


def _kt_contribution(rec: ComputationRecord) -> Fraction:
    return Fraction(1, (1 << len(rec.program)) * rec.time)


def lower_bound(kind: PriorKind, records: Iterable[ComputationRecord], k: int) -> Fraction:
    """Exact partial sum of the prior over records with first phase <= k."""
    if kind is PriorKind.FAST:
        return sum((_fast_contribution(r, k) for r in records), ZERO)
    return sum((_kt_contribution(r) for r in records if r.first_phase <= k), ZERO)


def tail_bound(kind: PriorKind, k: int) -> Fraction:
    if kind is PriorKind.FAST:
        return Fraction(1, 1 << k)
    return Fraction(1, 1 << k) + Fraction(1, k + 1)


def kraft_sum(records: Iterable[ComputationRecord]) -> Fraction:
    """Sum of 2^(-|p|) over the programs of the given records."""
    return sum((Fraction(1, 1 << len(r.program)) for r in records), ZERO)


def phases_needed(
    kind: PriorKind,
    records: Sequence[ComputationRecord],
    epsilon: Fraction,
    *,
    cap: int = PROJECTION_CAP,
) -> int | None:
    """Least k at which the stopping rule would certify, given these records.

    The projection extends the record contributions arithmetically to any
    phase depth; it is the number of phases the estimator would need, not a
    claim that running them is feasible (for the Kt prior it typically is
    not). Returns None when no records exist or the cap is exceeded.

    The stopping predicate is monotone in k (the tail shrinks while the
    lower bound grows), so binary search below an exponentially found
    bracket returns the exact minimum.
    """
    if not records:
        return None

    def certifies(k: int) -> bool:
        return tail_bound(kind, k) <= epsilon * lower_bound(kind, records, k)

    lo = min(r.first_phase for r in records)
    hi = lo
    while not certifies(hi):
        if hi > cap:
            return None
        hi = hi * 2 + 1
    while lo < hi:
        mid = (lo + hi) // 2
        if certifies(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo if lo <= cap else None


def estimate_prior(
    kind: PriorKind,
    x: str,
    epsilon: Fraction,
    k_cap: int,
    *,
    records: Sequence[ComputationRecord] | None = None,
    workers: int = 1,
) -> PriorEstimate:
    """Estimate the prior of x, increasing phases until certification or k_cap.

    The empty string has prior exactly 1 by convention and bypasses
    enumeration. An uncertified result is returned as such, never silently
    degraded.
    """
    validate_bits(x, name="x")
    if not (ZERO < epsilon < ONE):
        raise ValueError("epsilon must satisfy 0 < epsilon < 1")
    if x == "":
        return PriorEstimate(kind, x, ONE, ZERO, 0, epsilon, True, 0)
    if records is None:
        records = [
            r for r in targeted_records([x], k_cap, workers=workers) if r.output == x
        ]
    else:
        records = [r for r in records if r.output == x and r.first_phase <= k_cap]
    for k in range(1, k_cap + 1):
        lower = lower_bound(kind, records, k)
        tail = tail_bound(kind, k)
        if tail <= epsilon * lower:
            return PriorEstimate(
                kind, x, lower, tail, k, epsilon, True, phases_needed(kind, records, epsilon)
            )
    lower = lower_bound(kind, records, k_cap)
    return PriorEstimate(
        kind,
        x,
        lower,
        tail_bound(kind, k_cap),
        k_cap,
        epsilon,
        False,
        phases_needed(kind, records, epsilon),
    )


def s_kt_estimate(
    x: str, epsilon: Fraction, k_cap: int, *, records=None, workers: int = 1
) -> PriorEstimate:
    return estimate_prior(PriorKind.KT, x, epsilon, k_cap, records=records, workers=workers)


def s_fast_estimate(
    x: str, epsilon: Fraction, k_cap: int, *, records=None, workers: int = 1
) -> PriorEstimate:
    return estimate_prior(PriorKind.FAST, x, epsilon, k_cap, records=records, workers=workers)


def alternate_form_sum(
    kind: PriorKind, records: Iterable[ComputationRecord], k: int
) -> Fraction:
    """Cross-check forms: phase-count form for Kt, squared-length cost form
    for the phase-weighted prior. Used only to test the envelope relations
    against the defining forms on identical record sets."""
    total = ZERO
    for rec in records:
        if rec.first_phase > k:
            continue
        if kind is PriorKind.FAST:
            total += Fraction(1, (1 << (2 * len(rec.program))) * rec.time)
        else:
            # sum over phases i = first_phase .. k of 2^(-i), counting 1 per program
            total += Fraction((1 << (k - rec.first_phase + 1)) - 1, 1 << k)
    return total


class InsufficientPhases(ValueError):
    """The prefix's lower bound is zero, so no conditional enclosure exists."""


def joint_enclosure(
    kind: PriorKind, records: Sequence[ComputationRecord], k: int
) -> tuple[Fraction, Fraction]:
    """[lower, lower + tail] for one string's records, evaluated at phase k."""
    lower = lower_bound(kind, records, k)
    return lower, lower + tail_bound(kind, k)


def conditional(
    kind: PriorKind,
    prefix: str,
    bit: str,
    epsilon: Fraction,
    k_cap: int,
    *,
    workers: int = 1,
) -> tuple[Fraction, Fraction]:
    """Certified enclosure of S(bit | prefix):
    [lowerJoint / (lowerPrefix + tailPrefix), (lowerJoint + tailJoint) / lowerPrefix].
    """
    if bit not in ("0", "1"):
        raise ValueError("bit must be '0' or '1'")
    joint = estimate_prior(kind, prefix + bit, epsilon, k_cap, workers=workers)
    if prefix == "":
        return joint.lower, joint.upper
    pref = estimate_prior(kind, prefix, epsilon, k_cap, workers=workers)
    if pref.lower == 0:
        raise InsufficientPhases(
            f"prefix {prefix!r} has zero lower bound at k={k_cap}; no enclosure"
        )
    return joint.lower / pref.upper, joint.upper / pref.lower


def contribution_masses(
    records: Iterable[ComputationRecord],
    x: str,
    slow_threshold: int,
    fast_threshold: int,
) -> tuple[Fraction, Fraction]:
    """Kt-weighted record mass of x split into slow (t > slow_threshold) and
    fast (t <= fast_threshold) computations; the ratio's decay along a
    sequence with a fast generator is the fastest-programs trend diagnostic.
    """
    slow = ZERO
    fast = ZERO
    for rec in records:
        if rec.output != x:
            continue
        value = _kt_contribution(rec)
        if rec.time > slow_threshold:
            slow += value
        if rec.time <= fast_threshold:
            fast += value
    return slow, fast
