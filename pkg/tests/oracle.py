"""Independent brute-force oracles used to cross-check the fast paths.

These deliberately avoid the enumeration drivers: they re-run every program
one at a time through the bare interpreter step function and re-derive
record sets, decoder programs, and decoder masses from first principles.
"""

from __future__ import annotations

from itertools import product

from speedprior.enumeration import ComputationRecord, first_phase
from speedprior.measures import decoder_run
from speedprior.vm import MachineState, NeedsMoreInput, step


def program_events(program: str, budget: int) -> list[tuple[int, str, int]]:
    """(consumed, output, step) for every output event of one program run."""
    state = MachineState()
    events = []
    while state.alive and state.steps < budget:
        try:
            bit = step(state, program)
        except NeedsMoreInput:
            break
        if bit is not None:
            events.append((state.consumed, state.output, state.steps))
    return events


def brute_force_records(k: int) -> set[ComputationRecord]:
    """Every computation with cost <= k, found by running each program of
    each length <= k for its phase-k budget."""
    records: set[ComputationRecord] = set()
    for length in range(1, k + 1):
        budget = 1 << (k - length)
        for bits_tuple in product("01", repeat=length):
            program = "".join(bits_tuple)
            for consumed, output, t in program_events(program, budget):
                if consumed == length:
                    records.add(ComputationRecord(first_phase(length, t), program, t, output))
    return records


def brute_decoder_km(spec, x: str, depth_cap: int) -> int | None:
    """Shortest input decoding to an extension of x, with the proper prefix
    not yet reaching x: plain breadth-first search over actual bit strings."""
    if decoder_run(spec, "", len(x)).startswith(x):
        return 0
    frontier = [""]
    for depth in range(1, depth_cap + 1):
        nxt = []
        for prefix in frontier:
            for bit in "01":
                candidate = prefix + bit
                out = decoder_run(spec, candidate, len(x))
                if out.startswith(x):
                    return depth
                if x.startswith(out):
                    nxt.append(candidate)
        frontier = nxt
    return None


def brute_decoder_mass(spec, x: str, depth: int):
    """Sum of 2^-|p| over minimal inputs (<= depth) that decode to x,
    enumerated one bit string at a time."""
    from fractions import Fraction

    total = Fraction(0)
    stack = [""]
    while stack:
        prefix = stack.pop()
        out = decoder_run(spec, prefix, len(x))
        if out.startswith(x):
            total += Fraction(1, 1 << len(prefix))
            continue
        if len(prefix) >= depth:
            continue
        if x.startswith(out):
            stack.extend([prefix + "0", prefix + "1"])
    return total
