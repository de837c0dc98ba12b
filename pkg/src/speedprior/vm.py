"""REF-1: the fixed reference monotone machine.

A step-budgeted, resumable interpreter with a unidirectional input tape
(program bits, consumed 3 at a time as opcodes are fetched on demand), an
append-only output tape, and an unbounded two-sided work tape of 8-bit
wrapping cells.

Opcode table (3 bits, fetched on demand into a program buffer so that loops
can jump within already-consumed program text without re-reading input):

    000 INC    cell := (cell + 1) mod 256
    001 DEC    cell := (cell - 1) mod 256
    010 LEFT   data pointer -= 1
    011 RIGHT  data pointer += 1
    100 OUT    append (cell mod 2) to the output
    101 JZ     if cell == 0, skip forward past the matching JNZ, fetching
               as needed; each skipped instruction costs one extra step
    110 JNZ    if cell != 0, jump back to just after the matching JZ;
               executing JNZ with no matching JZ in the buffer is invalid
    111 HALT   stop

Every executed instruction costs one step; a taken JZ additionally costs one
step per skipped instruction. Acceptance rule: program p computes string x
(p -> x) iff the first step at which the output extends x occurs with
consumed input exactly p; t(p, x) is that step index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

__all__ = [
    "OP_INC",
    "OP_DEC",
    "OP_LEFT",
    "OP_RIGHT",
    "OP_OUT",
    "OP_JZ",
    "OP_JNZ",
    "OP_HALT",
    "OPCODE_BITS",
    "NeedsMoreInput",
    "MachineState",
    "Status",
    "ComputationResult",
    "step",
    "run_events",
    "computes",
]

OP_INC, OP_DEC, OP_LEFT, OP_RIGHT, OP_OUT, OP_JZ, OP_JNZ, OP_HALT = range(8)

OPCODE_BITS = {op: format(op, "03b") for op in range(8)}


class NeedsMoreInput(Exception):
    """The input oracle was exhausted mid-fetch or mid-scan.

    The machine state is left exactly as it was before the failed step, so
    the same state can be resumed with a longer input. `pending` is a lower
    bound on what the interrupted step will cost once it can complete
    (1 for a plain fetch; 1 + instructions already scanned for a JZ scan),
    which budgeted enumerations need: rollback hides scan progress from the
    step counter.
    """

    def __init__(self, pending: int = 1):
        super().__init__("input exhausted")
        self.pending = pending


@dataclass
class MachineState:
    """Self-contained machine value; `clone()` supports enumeration trees."""

    tape: dict[int, int] = field(default_factory=dict)  # sparse, zero cells absent
    dp: int = 0
    buffer: list[int] = field(default_factory=list)  # decoded opcodes
    ip: int = 0
    consumed: int = 0  # input bits read so far; always 3 * len(buffer)
    output: str = ""
    steps: int = 0
    halted: bool = False
    invalid: bool = False

    def clone(self) -> "MachineState":
        return MachineState(
            tape=dict(self.tape),
            dp=self.dp,
            buffer=list(self.buffer),
            ip=self.ip,
            consumed=self.consumed,
            output=self.output,
            steps=self.steps,
            halted=self.halted,
            invalid=self.invalid,
        )

    @property
    def alive(self) -> bool:
        return not (self.halted or self.invalid)


def _fetch(state: MachineState, bits: str, index: int) -> int:
    """Return the opcode at buffer position `index`, fetching 3-bit groups
    from the input as needed. Raises NeedsMoreInput when the input runs out
    (caller is responsible for rollback)."""
    buf = state.buffer
    while len(buf) <= index:
        lo = state.consumed
        hi = lo + 3
        if hi > len(bits):
            raise NeedsMoreInput
        buf.append(int(bits[lo:hi], 2))
        state.consumed = hi
    return buf[index]


def step(state: MachineState, bits: str) -> str | None:
    """Execute exactly one instruction; return the output bit if OUT fired.

    Atomic: on NeedsMoreInput the state is rolled back to its pre-step value
    (including buffer/consumed from partial scan fetches).
    """
    if not state.alive:
        raise RuntimeError("machine is halted or invalid")

    ip0, consumed0, blen0, steps0 = state.ip, state.consumed, len(state.buffer), state.steps
    scan_pos = state.ip
    try:
        op = _fetch(state, bits, state.ip)
        cell = state.tape.get(state.dp, 0)

        if op == OP_JZ and cell == 0:
            # Forward scan past the matching JNZ; skipped instructions
            # (everything up to and including that JNZ) cost a step each.
            depth = 1
            j = state.ip + 1
            while True:
                scan_pos = j
                scanned = _fetch(state, bits, j)
                if scanned == OP_JZ:
                    depth += 1
                elif scanned == OP_JNZ:
                    depth -= 1
                    if depth == 0:
                        break
                j += 1
            state.steps += 1 + (j - state.ip)
            state.ip = j + 1
            return None
    except NeedsMoreInput:
        state.ip, state.consumed, state.steps = ip0, consumed0, steps0
        del state.buffer[blen0:]
        raise NeedsMoreInput(pending=1 + (scan_pos - ip0)) from None

    state.steps += 1

    if op == OP_INC:
        v = (cell + 1) % 256
        if v:
            state.tape[state.dp] = v
        else:
            state.tape.pop(state.dp, None)
    elif op == OP_DEC:
        v = (cell - 1) % 256
        if v:
            state.tape[state.dp] = v
        else:
            state.tape.pop(state.dp, None)
    elif op == OP_LEFT:
        state.dp -= 1
    elif op == OP_RIGHT:
        state.dp += 1
    elif op == OP_OUT:
        bit = "1" if cell & 1 else "0"
        state.output += bit
        state.ip += 1
        return bit
    elif op == OP_JZ:
        pass  # cell != 0: fall through
    elif op == OP_JNZ:
        depth = 1
        j = state.ip - 1
        while j >= 0:
            back = state.buffer[j]
            if back == OP_JNZ:
                depth += 1
            elif back == OP_JZ:
                depth -= 1
                if depth == 0:
                    break
            j -= 1
        if j < 0:
            state.invalid = True
            return None
        state.ip = (j + 1) if cell != 0 else (state.ip + 1)
        return None
    elif op == OP_HALT:
        state.halted = True
        return None

    state.ip += 1
    return None


def run_events(program: str, budget: int) -> list[tuple[int, str, int]]:
    """Run REF-1 on exactly `program` for at most `budget` steps.

    Returns every output event as (consumedBits, outputSoFar, stepIndex).
    Output events are the raw material of all computation records.
    """
    state = MachineState()
    events: list[tuple[int, str, int]] = []
    while state.alive and state.steps < budget:
        try:
            bit = step(state, program)
        except NeedsMoreInput:
            break
        if bit is not None:
            events.append((state.consumed, state.output, state.steps))
    return events


class Status(Enum):
    COMPUTES = "computes"
    DOES_NOT_COMPUTE = "doesNotCompute"
    BUDGET_EXHAUSTED = "budgetExhausted"
    NEEDS_MORE_INPUT = "needsMoreInput"
    INVALID_PROGRAM = "invalidProgram"


@dataclass(frozen=True)
class ComputationResult:
    status: Status
    steps: int | None = None

    @property
    def is_computes(self) -> bool:
        return self.status is Status.COMPUTES


def computes(program: str, x: str, budget: int) -> ComputationResult:
    """Decide whether program -> x within the step budget.

    COMPUTES(t): the first step at which the output extends x happened with
    consumed input exactly `program`, at step t <= budget.
    DOES_NOT_COMPUTE: the run provably never satisfies this with the given
    input (output deviated from x, x appeared at strictly smaller
    consumption, the machine halted or went invalid, or it needs more input).
    BUDGET_EXHAUSTED: undecided within the budget; callers treat as unknown.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if not x:
        raise ValueError("x must be nonempty (the empty string is handled by prior conventions)")

    state = MachineState()
    while True:
        if not state.alive:
            return ComputationResult(Status.DOES_NOT_COMPUTE)
        if state.steps >= budget:
            return ComputationResult(Status.BUDGET_EXHAUSTED)
        try:
            bit = step(state, program)
        except NeedsMoreInput:
            return ComputationResult(Status.DOES_NOT_COMPUTE)
        if bit is None:
            continue
        n = len(state.output)
        if n > len(x):  # unreachable: decided at n == len(x)
            return ComputationResult(Status.DOES_NOT_COMPUTE)
        if state.output[n - 1] != x[n - 1]:
            return ComputationResult(Status.DOES_NOT_COMPUTE)
        if n == len(x):
            if state.consumed == len(program):
                return ComputationResult(Status.COMPUTES, steps=state.steps)
            return ComputationResult(Status.DOES_NOT_COMPUTE)
