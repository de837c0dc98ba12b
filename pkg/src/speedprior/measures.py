"""Exactly-evaluated measures and the arithmetic-coding decoder machine.

Measures supported: the uniform measure, Bernoulli(theta) with rational
theta, and deterministic point measures driven by a sequence generator
(the built-in alternating sequence, or the output stream of a REF-1
program). Evaluation is exact and polynomial in |x|.

The decoder machine for a measure nu maps input bit strings to output
strings through nested half-open intervals: output string x owns an
interval of width nu(x), children split the parent left-to-right in order
0 then 1, and an input prefix p (owning the dyadic interval
[0.p, 0.p + 2^-|p|)) decodes to the deepest output string whose interval
contains it. Input mass over minimal decoding programs reconstructs nu
exactly in the limit, and the largest dyadic interval inside an output
interval is never smaller than a quarter of it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .bits import validate_bits
from .rationals import parse_rational
from .vm import MachineState, NeedsMoreInput, step

__all__ = [
    "MeasureSpec",
    "parse_measure_spec",
    "measure_eval",
    "measure_conditional",
    "generate_sequence",
    "DyadicInterval",
    "output_interval",
    "decoder_run",
    "decoder_km",
    "decoder_mass",
    "DepthCapInsufficient",
    "ZeroWidthInterval",
    "GeneratorExhausted",
]

ZERO = Fraction(0)
ONE = Fraction(1)

_REF1_STEP_CAP = 1_000_000


class GeneratorExhausted(ValueError):
    """A deterministic generator could not supply the requested prefix."""


class ZeroWidthInterval(ValueError):
    """Requested the output interval of a string with measure zero."""


class DepthCapInsufficient(ValueError):
    """No decoding program exists within the given depth cap."""


def _alternating(n: int) -> str:
    return "".join("01"[i % 2] for i in range(n))


def _ref1_stream(program: str, n: int) -> str:
    """First n output bits of REF-1 on `program`; explicit error if the run
    halts, goes invalid, needs more input, or exceeds the step cap first."""
    state = MachineState()
    while len(state.output) < n:
        if not state.alive or state.steps >= _REF1_STEP_CAP:
            raise GeneratorExhausted(
                f"ref1 generator produced only {len(state.output)} of {n} bits"
            )
        try:
            step(state, program)
        except NeedsMoreInput:
            raise GeneratorExhausted(
                f"ref1 generator consumed its program after {len(state.output)} bits"
            ) from None
    return state.output[:n]


@dataclass(frozen=True)
class MeasureSpec:
    """Textual forms: "uniform", "bernoulli:2/3", "detseq:alternating",
    "detseq:ref1:<bits>"."""

    variant: str  # "uniform" | "bernoulli" | "detseq"
    theta: Fraction | None = None
    generator: Callable[[int], str] | None = None
    label: str = ""

    def __str__(self) -> str:
        return self.label


def parse_measure_spec(text: str) -> MeasureSpec:
    text = text.strip()
    if text == "uniform":
        return MeasureSpec("uniform", label=text)
    if text.startswith("bernoulli:"):
        theta = parse_rational(text.split(":", 1)[1])
        if not (ZERO < theta < ONE):
            raise ValueError("bernoulli theta must satisfy 0 < theta < 1")
        return MeasureSpec("bernoulli", theta=theta, label=text)
    if text == "detseq:alternating":
        return MeasureSpec("detseq", generator=_alternating, label=text)
    if text.startswith("detseq:ref1:"):
        program = validate_bits(text.split(":", 2)[2], name="ref1 program")
        return MeasureSpec(
            "detseq", generator=lambda n: _ref1_stream(program, n), label=text
        )
    raise ValueError(f"unknown measure spec {text!r}")


def generate_sequence(spec: MeasureSpec, n: int) -> str:
    if spec.variant != "detseq":
        raise ValueError("only deterministic specs generate a sequence directly")
    assert spec.generator is not None
    out = spec.generator(n)
    if len(out) != n:
        raise GeneratorExhausted(f"generator returned {len(out)} of {n} bits")
    return validate_bits(out, name="generated sequence")


def measure_eval(spec: MeasureSpec, x: str) -> Fraction:
    """Exact mu(x); mu of the empty string is 1."""
    validate_bits(x, name="x")
    if spec.variant == "uniform":
        return Fraction(1, 1 << len(x))
    if spec.variant == "bernoulli":
        assert spec.theta is not None
        ones = x.count("1")
        value = ONE
        for _ in range(ones):
            value *= spec.theta
        for _ in range(len(x) - ones):
            value *= ONE - spec.theta
        return value
    assert spec.generator is not None
    return ONE if x == generate_sequence(spec, len(x)) else ZERO


def measure_conditional(spec: MeasureSpec, prefix: str, bit: str) -> Fraction:
    base = measure_eval(spec, prefix)
    if base == 0:
        raise ZeroDivisionError("conditional on a measure-zero prefix")
    return measure_eval(spec, prefix + bit) / base


@dataclass(frozen=True)
class DyadicInterval:
    """Half-open [low, high); endpoints need not be dyadic."""

    low: Fraction
    high: Fraction

    def __post_init__(self):
        if not (ZERO <= self.low < self.high <= ONE):
            raise ValueError(f"not a valid subinterval of [0, 1): [{self.low}, {self.high})")

    @property
    def width(self) -> Fraction:
        return self.high - self.low

    def contains(self, other: "DyadicInterval") -> bool:
        return self.low <= other.low and other.high <= self.high


def _input_interval(bits: str) -> DyadicInterval:
    low = Fraction(int(bits, 2), 1 << len(bits)) if bits else ZERO
    return DyadicInterval(low, low + Fraction(1, 1 << len(bits)))


def output_interval(spec: MeasureSpec, x: str) -> DyadicInterval:
    """Interval of width mu(x); children partition the parent, 0 then 1."""
    validate_bits(x, name="x")
    width = measure_eval(spec, x)
    if width == 0:
        raise ZeroWidthInterval(f"mu({x!r}) = 0 has no output interval")
    low = ZERO
    for j, bit in enumerate(x):
        if bit == "1":
            low += measure_eval(spec, x[:j] + "0")
    return DyadicInterval(low, low + width)


def decoder_run(spec: MeasureSpec, input_bits: str, max_output: int) -> str:
    """Decode: emit the deepest output string whose interval contains the
    input interval, up to max_output bits (exhaustion returns partial
    output, never an error)."""
    validate_bits(input_bits, name="input bits")
    interval = _input_interval(input_bits)
    out = ""
    while len(out) < max_output:
        advanced = False
        for bit in "01":
            if measure_eval(spec, out + bit) == 0:
                continue
            if output_interval(spec, out + bit).contains(interval):
                out += bit
                advanced = True
                break
        if not advanced:
            break
    return out


def _grid_bounds(interval: DyadicInterval, depth: int) -> tuple[int, int]:
    """Dyadic grid cells of size 2^-depth inside [low, high):
    cells m with ceil(low * 2^d) <= m and m + 1 <= floor-limit."""
    scale = 1 << depth
    lo_cell = -((-interval.low.numerator * scale) // interval.low.denominator)
    hi_cell = (interval.high.numerator * scale) // interval.high.denominator
    return lo_cell, hi_cell


def decoder_km(spec: MeasureSpec, x: str, depth_cap: int) -> int:
    """Length of the shortest input that decodes to exactly x: breadth-first
    over input depths, at each depth asking (on the exact dyadic grid)
    whether some input interval fits inside the output interval of x."""
    target = output_interval(spec, x)
    for depth in range(0, depth_cap + 1):
        lo_cell, hi_cell = _grid_bounds(target, depth)
        if lo_cell + 1 <= hi_cell:
            return depth
    raise DepthCapInsufficient(
        f"no decoding program of length <= {depth_cap} for {x!r} (mu = {target.width})"
    )


def decoder_mass(spec: MeasureSpec, x: str, depth: int) -> Fraction:
    """Sum of 2^-|p| over minimal inputs p (|p| <= depth) whose decoding
    exactly reaches x: the total length of the maximal dyadic subintervals
    of x's output interval, truncated at the given depth."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    target = output_interval(spec, x)
    lo_cell, hi_cell = _grid_bounds(target, depth)
    if hi_cell <= lo_cell:
        return ZERO
    return Fraction(hi_cell - lo_cell, 1 << depth)
