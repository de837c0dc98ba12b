"""Loss-minimizing prediction from prior enclosures, experiment runner,
and adversarial sequence construction.

The predictor picks the action whose expected loss is smallest. Expected
losses are computed as exact intervals from the unnormalized joint
enclosures of the two continuations (the shared conditioning denominator
cannot change an argmin). If the intervals separate, the minimizer is
returned; overlapping intervals are ordered by their exact lower endpoints
and then by their upper endpoints (the estimators' returned point value is
the lower bound, and upper comparison resolves dominated actions); only a
full tie falls back to the declared tie-break bit.

Experiments evaluate all joints at the configured phase cap, so both
continuations carry identical tail bounds; a step whose estimates fail the
certification rule at the cap is marked uncertified in the trace, never
silently degraded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .bits import validate_bits
from .enumeration import ComputationRecord, targeted_records
from .measures import MeasureSpec, generate_sequence, measure_eval
from .priors import (
    PriorKind,
    joint_enclosure,
    lower_bound,
    phases_needed,
    tail_bound,
)

__all__ = [
    "SplitMix64",
    "LossSpec",
    "predict_next",
    "sample_sequence",
    "TraceStep",
    "PredictionTrace",
    "run_experiment",
    "run_on_sequence",
    "adversarial_sequence",
    "deviation_sum",
]

ZERO = Fraction(0)
ONE = Fraction(1)

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 generator; the one fixed PRNG for stochastic environments."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def bernoulli_bit(self, theta: Fraction) -> str:
        """1 iff the 64-bit uniform fraction is < theta (exact comparison)."""
        u = self.next_u64()
        return "1" if u * theta.denominator < theta.numerator << 64 else "0"


@dataclass(frozen=True)
class LossSpec:
    """Loss matrix ell(actual, predicted) with entries in [0, 1]."""

    entries: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]

    def __post_init__(self):
        for row in self.entries:
            for v in row:
                if not (ZERO <= v <= ONE):
                    raise ValueError("loss entries must lie in [0, 1]")

    @staticmethod
    def zero_one() -> "LossSpec":
        return LossSpec(((ZERO, ONE), (ONE, ZERO)))

    def loss(self, actual: str, predicted: str) -> Fraction:
        return self.entries[int(actual)][int(predicted)]


def predict_next(
    enclosure0: tuple[Fraction, Fraction],
    enclosure1: tuple[Fraction, Fraction],
    loss: LossSpec,
    tie_break: str,
) -> str:
    """Pick the prediction minimizing expected loss against the (possibly
    uncertified) joint enclosures of the two continuations."""
    if tie_break not in ("0", "1"):
        raise ValueError("tie_break must be '0' or '1'")
    lo = {}
    hi = {}
    for y in ("0", "1"):
        lo[y] = enclosure0[0] * loss.loss("0", y) + enclosure1[0] * loss.loss("1", y)
        hi[y] = enclosure0[1] * loss.loss("0", y) + enclosure1[1] * loss.loss("1", y)
    if hi["0"] < lo["1"]:
        return "0"
    if hi["1"] < lo["0"]:
        return "1"
    if lo["0"] != lo["1"]:
        return "0" if lo["0"] < lo["1"] else "1"
    if hi["0"] != hi["1"]:
        return "0" if hi["0"] < hi["1"] else "1"
    return tie_break


def sample_sequence(env: MeasureSpec, n: int, seed: int) -> str:
    """Draw x_{1:n} from the environment, deterministically from the seed."""
    if env.variant == "detseq":
        return generate_sequence(env, n)
    rng = SplitMix64(seed)
    theta = env.theta if env.variant == "bernoulli" else Fraction(1, 2)
    return "".join(rng.bernoulli_bit(theta) for _ in range(n))


@dataclass(frozen=True)
class TraceStep:
    t: int
    actual: str
    predicted: str
    informed: str
    loss: Fraction
    informed_loss: Fraction
    cond0: tuple[Fraction, Fraction]  # enclosure of S(0 | prefix), clamped to [0, 1]
    cond1: tuple[Fraction, Fraction]
    joint0: tuple[Fraction, Fraction]  # unnormalized joint enclosures
    joint1: tuple[Fraction, Fraction]
    k_used: int
    certified: bool
    prefix_lower: Fraction  # lower bound of the realized prefix x_{1:t}
    cum_loss: Fraction
    cum_informed_loss: Fraction


@dataclass(frozen=True)
class PredictionTrace:
    env_label: str
    prior_kind: PriorKind
    n: int
    epsilon: Fraction
    seed: int
    tie_break: str
    k_cap: int
    sequence: str
    steps: tuple[TraceStep, ...]
    error_count: int
    final_lower: Fraction  # lower bound of x_{1:n}
    d_hat: float | None  # ln mu(x_{1:n}) - ln lower, when mu is known and both positive

    @property
    def total_loss(self) -> Fraction:
        return self.steps[-1].cum_loss if self.steps else ZERO

    @property
    def total_informed_loss(self) -> Fraction:
        return self.steps[-1].cum_informed_loss if self.steps else ZERO


def _experiment_targets(x: str) -> list[str]:
    targets = set()
    for t in range(1, len(x) + 1):
        targets.add(x[:t])
        targets.add(x[: t - 1] + ("1" if x[t - 1] == "0" else "0"))
    return sorted(targets)


def _joint(
    kind: PriorKind,
    records: Sequence[ComputationRecord],
    k_cap: int,
    epsilon: Fraction,
) -> tuple[tuple[Fraction, Fraction], bool]:
    enclosure = joint_enclosure(kind, records, k_cap)
    needed = phases_needed(kind, records, epsilon)
    return enclosure, needed is not None and needed <= k_cap


def _clamped_conditional(
    joint: tuple[Fraction, Fraction], prefix: tuple[Fraction, Fraction]
) -> tuple[Fraction, Fraction]:
    """Conditional enclosure clamped to [0, 1]; vacuous when the prefix
    lower bound is still zero (semimeasure conditionals always lie in [0, 1])."""
    if prefix[0] == 0:
        return (ZERO, ONE)
    lo = joint[0] / prefix[1] if prefix[1] > 0 else ZERO
    hi = min(ONE, joint[1] / prefix[0])
    return (min(lo, ONE), hi)


def run_on_sequence(
    x: str,
    prior_kind: PriorKind,
    epsilon: Fraction,
    *,
    env: MeasureSpec | None = None,
    env_label: str = "",
    seed: int = 0,
    loss: LossSpec | None = None,
    tie_break: str = "0",
    k_cap: int = 20,
    workers: int = 1,
) -> PredictionTrace:
    """Predict along a fixed sequence; the informed predictor uses the
    environment's exact conditionals when given, else the point measure on x."""
    validate_bits(x, name="sequence")
    loss = loss or LossSpec.zero_one()
    records = targeted_records(_experiment_targets(x), k_cap, workers=workers)
    by_output: dict[str, list[ComputationRecord]] = {}
    for rec in records:
        by_output.setdefault(rec.output, []).append(rec)

    steps: list[TraceStep] = []
    cum = ZERO
    cum_inf = ZERO
    errors = 0
    for t in range(1, len(x) + 1):
        prefix = x[: t - 1]
        actual = x[t - 1]
        joint0, cert0 = _joint(prior_kind, by_output.get(prefix + "0", []), k_cap, epsilon)
        joint1, cert1 = _joint(prior_kind, by_output.get(prefix + "1", []), k_cap, epsilon)
        predicted = predict_next(joint0, joint1, loss, tie_break)

        if env is not None and env.variant != "detseq":
            base = measure_eval(env, prefix)
            mu0 = measure_eval(env, prefix + "0") / base
            mu1 = measure_eval(env, prefix + "1") / base
        else:
            mu0 = ONE if actual == "0" else ZERO
            mu1 = ONE - mu0
        informed = predict_next((mu0, mu0), (mu1, mu1), loss, tie_break)

        step_loss = loss.loss(actual, predicted)
        informed_loss = loss.loss(actual, informed)
        cum += step_loss
        cum_inf += informed_loss
        if predicted != actual:
            errors += 1

        prefix_enclosure = (
            (ONE, ONE)
            if prefix == ""
            else joint_enclosure(prior_kind, by_output.get(prefix, []), k_cap)
        )
        realized = joint0 if actual == "0" else joint1
        steps.append(
            TraceStep(
                t=t,
                actual=actual,
                predicted=predicted,
                informed=informed,
                loss=step_loss,
                informed_loss=informed_loss,
                cond0=_clamped_conditional(joint0, prefix_enclosure),
                cond1=_clamped_conditional(joint1, prefix_enclosure),
                joint0=joint0,
                joint1=joint1,
                k_used=k_cap,
                certified=cert0 and cert1 and prefix_enclosure[0] > 0,
                prefix_lower=realized[0],
                cum_loss=cum,
                cum_informed_loss=cum_inf,
            )
        )

    final_lower = lower_bound(prior_kind, by_output.get(x, []), k_cap) if x else ONE
    d_hat = None
    if env is not None and final_lower > 0:
        mu = measure_eval(env, x)
        if mu > 0:
            d_hat = math.log(mu) - math.log(final_lower)
    return PredictionTrace(
        env_label=env_label or (env.label if env else "sequence"),
        prior_kind=prior_kind,
        n=len(x),
        epsilon=epsilon,
        seed=seed,
        tie_break=tie_break,
        k_cap=k_cap,
        sequence=x,
        steps=tuple(steps),
        error_count=errors,
        final_lower=final_lower,
        d_hat=d_hat,
    )


def run_experiment(
    env: MeasureSpec,
    prior_kind: PriorKind,
    n: int,
    epsilon: Fraction,
    seed: int,
    *,
    loss: LossSpec | None = None,
    tie_break: str = "0",
    k_cap: int = 20,
    workers: int = 1,
) -> PredictionTrace:
    """Sample x_{1:n} from the environment and predict it step by step,
    recording the informed predictor's loss alongside for regret reports."""
    x = sample_sequence(env, n, seed)
    return run_on_sequence(
        x,
        prior_kind,
        epsilon,
        env=env,
        env_label=env.label,
        seed=seed,
        loss=loss,
        tie_break=tie_break,
        k_cap=k_cap,
        workers=workers,
    )


def adversarial_sequence(
    prior_kind: PriorKind,
    epsilon: Fraction,
    n: int,
    *,
    k_cap: int = 20,
    workers: int = 1,
) -> str:
    """Build x_{1:n} emitting, at each step, the bit the estimator's point
    value (the lower-bound ratio) ranks less likely; comparison ties emit 1.
    Deterministic: repeated calls produce identical strings."""
    x = ""
    for _ in range(n):
        targets = [x + "0", x + "1"] if x else ["0", "1"]
        records = targeted_records(targets, k_cap, workers=workers)
        lower0 = lower_bound(
            prior_kind, [r for r in records if r.output == x + "0"], k_cap
        )
        lower1 = lower_bound(
            prior_kind, [r for r in records if r.output == x + "1"], k_cap
        )
        # Shared prefix denominator: comparing the conditional point values
        # is comparing the joint lower bounds.
        x += "1" if lower0 >= lower1 else "0"
    return x


def deviation_sum(trace: PredictionTrace) -> tuple[Fraction, Fraction]:
    """Enclosure of sum over steps of |1 - S(x_t | x_{<t})|, from the
    per-step conditional enclosures of the realized bits."""
    lo_total = ZERO
    hi_total = ZERO
    for s in trace.steps:
        cond = s.cond0 if s.actual == "0" else s.cond1
        lo_total += max(ZERO, ONE - cond[1])
        hi_total += ONE - cond[0]
    return lo_total, hi_total
