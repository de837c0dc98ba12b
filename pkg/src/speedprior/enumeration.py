"""Dovetailed exploration of all programs via the FAST phase schedule.

Phase i executes every program of length <= i for 2^(i - |p|) steps; a
computation (p, x, t) surfaces in phase i exactly when |p| + log2(t) <= i.
Two drivers produce the same ledger:

* ``naive`` re-runs every program in every phase and tallies the allocated
  steps (phase i charges 2^(i-|p|) to each of the 2^|p| programs of every
  length |p| <= i, so the tally is sum(i * 2^i) = 2^(k+1)(k-1) + 2 after k
  phases);
* ``tree`` explores the fork-on-read execution tree once, forking 8 ways
  whenever a run requests its next 3-bit instruction and budgeting each
  branch by its consumed length.

The tree driver also supports *targeted* sweeps: given a prefix-closed
target set, branches whose output leaves the target family are dropped.
A targeted sweep finds exactly the records whose output lies in the family,
which is what the prior estimators need along a sequence; deep phases stay
tractable because inconsistent emitters die immediately and provably-silent
loops are cut by exact state-cycle detection.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Iterable, Sequence

from .bits import all_bitstrings, prefix_closure, validate_bits
from .vm import (
    OP_INC,
    OP_OUT,
    OPCODE_BITS,
    MachineState,
    NeedsMoreInput,
    Status,
    computes,
    step,
)

__all__ = [
    "GLOBAL_PHASE_CAP",
    "TARGETED_PHASE_CAP",
    "PhaseCapExceeded",
    "ComputationRecord",
    "ComputationLedger",
    "first_phase",
    "naive_step_formula",
    "enumerate_up_to_phase",
    "targeted_records",
    "records_to_jsonl",
    "kt_complexity",
    "km_complexity",
    "ComplexityEstimate",
    "incomputable_prefix_set",
]

# Desk-scale caps: a full sweep fans out 8 ways per instruction read, so the
# exact global ledger is kept to small phases; targeted sweeps prune hard
# enough to go deeper.
GLOBAL_PHASE_CAP = 24
TARGETED_PHASE_CAP = 34

# Cycle detection digests the full machine state; once the tape has grown
# past this many nonzero cells the digest is skipped and the branch simply
# runs out its (by then small) budget. Digesting starts only after a quiet
# stretch with no input or output, so short-lived branches never pay for it.
_CYCLE_TAPE_LIMIT = 32
_CYCLE_QUIET_THRESHOLD = 16


class PhaseCapExceeded(ValueError):
    def __init__(self, k: int, cap: int):
        super().__init__(f"phase {k} exceeds the configured cap {cap}")
        self.k = k
        self.cap = cap


def first_phase(program_length: int, time: int) -> int:
    """Least i with time <= 2^(i - program_length), exact integer arithmetic."""
    if time < 1:
        raise ValueError("time must be >= 1")
    return program_length + (time - 1).bit_length()


@dataclass(frozen=True, order=True)
class ComputationRecord:
    """One discovered computation event: program -> output in `time` steps."""

    first_phase: int
    program: str
    time: int
    output: str

    @property
    def kt_cost(self) -> tuple[int, int]:
        """Exact cost as the pair (|p|, t); the scalar cost is |p| + log2 t."""
        return (len(self.program), self.time)

    def reproduces(self) -> bool:
        budget = 1 << (self.first_phase - len(self.program))
        res = computes(self.program, self.output, budget)
        return res.status is Status.COMPUTES and res.steps == self.time


@dataclass(frozen=True)
class ComputationLedger:
    """All records with first phase <= max_phase, in canonical order."""

    max_phase: int
    records: tuple[ComputationRecord, ...]
    naive_step_count: int | None  # set by the naive driver (allocation accounting)
    executed_steps: int

    def records_for(self, x: str) -> list[ComputationRecord]:
        return [r for r in self.records if r.output == x]


def naive_step_formula(k: int) -> int:
    """Steps allocated by the first k phases: 2^(k+1) (k-1) + 2."""
    return (1 << (k + 1)) * (k - 1) + 2


def _canonical(records: Iterable[ComputationRecord]) -> tuple[ComputationRecord, ...]:
    return tuple(sorted(set(records), key=lambda r: (r.first_phase, r.program, r.time)))


def _run_collect(program: str, budget: int) -> tuple[list[tuple[int, str, int]], int]:
    """Run exactly `program` for at most `budget` steps; collect output events."""
    state = MachineState()
    events: list[tuple[int, str, int]] = []
    while state.alive and state.steps < budget:
        try:
            bit = step(state, program)
        except NeedsMoreInput:
            break
        if bit is not None:
            events.append((state.consumed, state.output, state.steps))
    return events, state.steps


# ---------------------------------------------------------------------------
# naive driver


def _naive(k: int) -> tuple[set[ComputationRecord], int, int]:
    records: set[ComputationRecord] = set()
    allocated = 0
    executed = 0
    for i in range(1, k + 1):
        for length in range(1, i + 1):
            budget = 1 << (i - length)
            for program in all_bitstrings(length):
                allocated += budget
                events, ran = _run_collect(program, budget)
                executed += ran
                for consumed, output, t in events:
                    if consumed == length:
                        records.add(
                            ComputationRecord(first_phase(length, t), program, t, output)
                        )
    return records, allocated, executed


# ---------------------------------------------------------------------------
# tree driver


class _TargetFamily:
    """Prefix-closed output targets with cheap compatibility queries."""

    def __init__(self, targets: Iterable[str]):
        self.members = prefix_closure(targets)

    def compatible(self, output: str) -> bool:
        """Some target still extends (or equals) this output."""
        return output == "" or output in self.members

    def extendable(self, output: str) -> bool:
        """A strictly longer target exists, so another record is possible."""
        if output and output not in self.members:
            return False
        return (output + "0") in self.members or (output + "1") in self.members


def _run_branch(
    state: MachineState,
    bits: str,
    k: int,
    family: _TargetFamily | None,
    sink: set[ComputationRecord],
) -> int | None:
    """Run one branch until it dies or asks for input; returns the pending
    cost of the interrupted step when the branch should fork, else None."""
    length = len(bits)
    limit = 1 << (k - length)
    seen: set[tuple] = set()
    quiet = 0
    last_consumed = state.consumed
    while True:
        if not state.alive or state.steps >= limit:
            return None
        if quiet >= _CYCLE_QUIET_THRESHOLD and len(state.tape) <= _CYCLE_TAPE_LIMIT:
            digest = (state.ip, state.dp, tuple(sorted(state.tape.items())))
            if digest in seen:
                return None  # exact state repeat with no output since: silent forever
            seen.add(digest)
        try:
            bit = step(state, bits)
        except NeedsMoreInput as pause:
            return pause.pending
        quiet += 1
        if state.consumed != last_consumed:
            last_consumed = state.consumed
            quiet = 0
        if bit is None:
            continue
        quiet = 0
        seen.clear()  # output events invalidate old digests: later repeats emit anew
        out = state.output
        if family is None or out in family.members:
            # In the fork-on-read tree, every output event lands with
            # consumed == len(bits): the branch bits are exactly the program.
            assert state.consumed == length
            sink.add(ComputationRecord(first_phase(length, state.steps), bits, state.steps, out))
        if family is not None and not family.compatible(out):
            return None


def _explore(
    roots: Sequence[tuple[MachineState, str]],
    k: int,
    family: _TargetFamily | None,
) -> tuple[set[ComputationRecord], int]:
    records: set[ComputationRecord] = set()
    executed = 0
    stack = list(roots)
    while stack:
        state, bits = stack.pop()
        before = state.steps
        pending = _run_branch(state, bits, k, family, records)
        executed += state.steps - before
        if pending is None:
            continue
        child_len = len(bits) + 3
        if child_len > k:
            continue
        allowance = 1 << (k - child_len)
        if family is not None and not family.extendable(state.output):
            continue
        # Completing the interrupted step costs at least `pending`, at a
        # consumption of child_len or more where the phase budget has
        # shrunk to `allowance` at most; an interrupted scan (pending > 1)
        # completes with a skip, never an output, so an event needs one
        # step beyond that.
        if state.steps + pending + (1 if pending > 1 else 0) > allowance:
            continue
        for op in range(8):
            stack.append((state.clone(), bits + OPCODE_BITS[op]))
    return records, executed


def _initial_branches(k: int) -> list[tuple[MachineState, str]]:
    if k < 3:
        return []
    return [(MachineState(), OPCODE_BITS[op]) for op in range(8)]


def _explore_subtree(args) -> set[ComputationRecord]:
    bits, k, targets = args
    family = _TargetFamily(targets) if targets is not None else None
    records, _ = _explore([(MachineState(), bits)], k, family)
    return records


def _tree(
    k: int, targets: tuple[str, ...] | None, workers: int
) -> tuple[set[ComputationRecord], int]:
    family = _TargetFamily(targets) if targets is not None else None
    roots = _initial_branches(k)
    if workers <= 1 or not roots:
        return _explore(roots, k, family)
    with Pool(processes=workers) as pool:
        parts = pool.map(_explore_subtree, [(bits, k, targets) for _, bits in roots])
    merged: set[ComputationRecord] = set()
    for part in parts:
        merged |= part
    return merged, 0


# ---------------------------------------------------------------------------
# public API


def enumerate_up_to_phase(
    k: int,
    mode: str = "tree",
    *,
    workers: int = 1,
    phase_cap: int = GLOBAL_PHASE_CAP,
) -> ComputationLedger:
    """Return the ledger of every computation with cost <= k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > phase_cap:
        raise PhaseCapExceeded(k, phase_cap)
    if mode == "naive":
        records, allocated, executed = _naive(k)
        return ComputationLedger(k, _canonical(records), allocated, executed)
    if mode == "tree":
        records, executed = _tree(k, None, workers)
        return ComputationLedger(k, _canonical(records), None, executed)
    raise ValueError(f"unknown enumeration mode {mode!r}")


_targeted_cache: dict[tuple[int, tuple[str, ...]], tuple[ComputationRecord, ...]] = {}
_TARGETED_CACHE_MAX = 64


def targeted_records(
    targets: Iterable[str],
    k_cap: int,
    *,
    workers: int = 1,
    phase_cap: int = TARGETED_PHASE_CAP,
) -> tuple[ComputationRecord, ...]:
    """All records whose output lies in the prefix closure of `targets`,
    with first phase <= k_cap.

    Exact for that family: pruning only drops branches that provably cannot
    produce such a record within phase k_cap (deviating output, exhausted
    branch budget, or an exact silent state cycle).
    """
    if k_cap < 1:
        raise ValueError("k_cap must be >= 1")
    if k_cap > phase_cap:
        raise PhaseCapExceeded(k_cap, phase_cap)
    family = tuple(sorted(prefix_closure(targets)))
    key = (k_cap, family)
    hit = _targeted_cache.get(key)
    if hit is not None:
        return hit
    records, _ = _tree(k_cap, family, workers)
    result = _canonical(records)
    if len(_targeted_cache) >= _TARGETED_CACHE_MAX:
        _targeted_cache.clear()
    _targeted_cache[key] = result
    return result


def records_to_jsonl(records: Iterable[ComputationRecord]) -> str:
    """Ledger export: one record per line, deterministic sort order."""
    lines = [
        json.dumps(
            {"program": r.program, "output": r.output, "time": r.time, "firstPhase": r.first_phase},
            separators=(", ", ": "),
        )
        for r in _canonical(records)
    ]
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# brute-force complexity estimators


@dataclass(frozen=True)
class ComplexityEstimate:
    """Minimum cost found by search, with an exactness status."""

    value: tuple[int, int] | int | None
    exact: bool
    bound: int  # the phase depth backing the estimate


def kt_complexity(x: str, k_max: int) -> ComplexityEstimate:
    """Minimum cost pair (|p|, t) over computations of x with phase <= k_max.

    Exact iff k_max covers the found minimum's ceiling, so any undiscovered
    computation would cost strictly more than what was found.
    """
    validate_bits(x, name="x")
    if not x:
        raise ValueError("x must be nonempty")
    if k_max < 1:
        return ComplexityEstimate(None, False, max(k_max, 0))
    best: tuple[int, int] | None = None
    for rec in targeted_records([x], k_max):
        if rec.output != x:
            continue
        cost = (len(rec.program), rec.time)
        if best is None or _kt_less(cost, best):
            best = cost
    if best is None:
        return ComplexityEstimate(None, False, k_max)
    return ComplexityEstimate(best, first_phase(*best) <= k_max, k_max)


def _kt_less(a: tuple[int, int], b: tuple[int, int]) -> bool:
    """Compare |p| + log2 t exactly: 2^|pa| * ta < 2^|pb| * tb."""
    return (1 << a[0]) * a[1] < (1 << b[0]) * b[1]


def km_complexity(x: str, k_max: int) -> ComplexityEstimate:
    """Shortest program length for x; exact iff every shorter program is
    resolved (computes / does not compute) within budget 2^k_max."""
    validate_bits(x, name="x")
    if not x:
        raise ValueError("x must be nonempty")
    if k_max < 1:
        return ComplexityEstimate(None, False, max(k_max, 0))
    budget = 1 << k_max
    best = min(
        (len(r.program) for r in targeted_records([x], k_max) if r.output == x),
        default=None,
    )
    if best is None:
        return ComplexityEstimate(None, False, k_max)
    exact = True
    for length in range(3, best, 3):  # other lengths cannot reach consumed == |p|
        for program in all_bitstrings(length):
            if computes(program, x, budget).status is Status.BUDGET_EXHAUSTED:
                exact = False
                break
        if not exact:
            break
    return ComplexityEstimate(best, exact, k_max)


# ---------------------------------------------------------------------------
# minimal strings incomputable in time t

_INCOMPUTABLE_SWEEP_CAP = 10


def _computable_outputs(t: int, max_len: int) -> set[str]:
    """All x with |x| <= max_len printable within t steps (exact sweep;
    any program printing within t steps consumes at most 3t bits)."""
    results: set[str] = set()
    stack = [(MachineState(), OPCODE_BITS[op]) for op in range(8)]
    while stack:
        state, bits = stack.pop()
        fork = False
        # Budgets here are tiny (t <= 10), so cycle detection buys nothing.
        while state.alive and state.steps < t:
            try:
                bit = step(state, bits)
            except NeedsMoreInput as pause:
                scan_penalty = 1 if pause.pending > 1 else 0
                fork = (
                    state.steps + pause.pending + scan_penalty <= t
                    and len(bits) + 3 <= 3 * t
                )
                break
            if bit is not None:
                if len(state.output) <= max_len:
                    results.add(state.output)
                if len(state.output) >= max_len:
                    break  # output only grows; nothing this short can follow
        if fork:
            for op in range(8):
                stack.append((state.clone(), bits + OPCODE_BITS[op]))
    return results


def _straight_line_printer(x: str) -> str:
    """A program printing x with one OUT per bit and one INC per toggle."""
    ops: list[int] = []
    cell_lsb = 0
    for ch in x:
        want = int(ch)
        if want != cell_lsb:
            ops.append(OP_INC)
            cell_lsb = want
        ops.append(OP_OUT)
    return "".join(OPCODE_BITS[op] for op in ops)


def incomputable_prefix_set(t: int, max_len: int) -> frozenset[str]:
    """C_t restricted to strings of length <= max_len: every member is
    incomputable in time t while all its nonempty proper prefixes are
    computable in time t. Prefix-free by construction.

    Exact for t <= 10 (full sweep) and for t >= 2 * max_len (every string
    is printable that fast, verified constructively); the band in between
    is refused rather than approximated.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    if t <= _INCOMPUTABLE_SWEEP_CAP:
        computable = _computable_outputs(t, max_len)
    elif t >= 2 * max_len:
        computable = set()
        for length in range(1, max_len + 1):
            for x in all_bitstrings(length):
                res = computes(_straight_line_printer(x), x, t)
                if not res.is_computes:
                    raise AssertionError(f"straight-line printer failed for {x}")
                computable.add(x)
    else:
        raise ValueError(
            f"t={t} is beyond the exact sweep cap ({_INCOMPUTABLE_SWEEP_CAP}) but below "
            f"the constructive threshold (2 * max_len = {2 * max_len})"
        )

    members: set[str] = set()
    for length in range(1, max_len + 1):
        for x in all_bitstrings(length):
            if x in computable:
                continue
            if all(x[:n] in computable for n in range(1, length)):
                members.add(x)
    return frozenset(members)
