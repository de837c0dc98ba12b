from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from speedprior.vm import (
    MachineState,
    NeedsMoreInput,
    Status,
    computes,
    run_events,
    step,
)

# opcodes as bit strings, for readable program construction
INC, DEC, LEFT, RIGHT, OUT, JZ, JNZ, HALT = (format(i, "03b") for i in range(8))


def fresh():
    return MachineState()


class TestStep:
    def test_out_emits_zero_on_fresh_cell(self):
        state = fresh()
        bit = step(state, OUT)
        assert bit == "0"
        assert state.consumed == 3
        assert state.steps == 1
        assert state.output == "0"

    def test_halt_sets_flag_without_output(self):
        state = fresh()
        assert step(state, HALT) is None
        assert state.halted
        assert state.steps == 1

    def test_inc_then_out_emits_one(self):
        state = fresh()
        program = INC + OUT
        assert step(state, program) is None
        assert state.tape[0] == 1
        bit = step(state, program)
        assert bit == "1"
        assert state.consumed == 6
        assert state.steps == 2

    def test_needs_more_input_is_atomic(self):
        state = fresh()
        step(state, INC)
        snapshot = state.clone()
        with pytest.raises(NeedsMoreInput):
            step(state, INC)
        assert state.__dict__ == snapshot.__dict__

    def test_scan_rollback_is_atomic(self):
        # JZ with cell 0 starts a forward scan that runs out of input.
        state = fresh()
        with pytest.raises(NeedsMoreInput) as exc:
            step(state, JZ + INC + INC)
        assert state.consumed == 0
        assert state.buffer == []
        assert state.steps == 0
        assert exc.value.pending > 1  # scan progress is reported

    def test_jz_skip_costs_one_step_per_skipped_instruction(self):
        # JZ INC INC JNZ: cell 0 skips three instructions (two INDs + JNZ).
        state = fresh()
        program = JZ + INC + INC + JNZ + OUT
        assert step(state, program) is None
        assert state.steps == 4  # 1 for JZ + 3 skipped
        assert state.consumed == 12
        assert step(state, program) == "0"
        assert state.tape.get(0, 0) == 0  # skipped INCs never executed

    def test_jz_falls_through_on_nonzero(self):
        state = fresh()
        program = INC + JZ + OUT
        step(state, program)
        assert step(state, program) is None
        assert state.steps == 2
        assert step(state, program) == "1"

    def test_nested_jz_matching(self):
        # outer JZ skips past the matching (outer) JNZ, not the inner one
        state = fresh()
        program = JZ + JZ + JNZ + JNZ + OUT
        step(state, program)
        assert state.ip == 4
        assert state.steps == 4
        assert step(state, program) == "0"

    def test_jnz_without_matching_jz_is_invalid(self):
        state = fresh()
        step(state, JNZ)
        assert state.invalid

    def test_jnz_jumps_back_after_matching_jz(self):
        # INC JZ OUT INC JNZ: an emitting loop
        state = fresh()
        program = INC + JZ + OUT + INC + JNZ
        for _ in range(5):
            step(state, program)
        # INC, JZ(fall), OUT('1'), INC, JNZ(jump back to just after JZ)
        assert state.output == "1"
        assert state.ip == 2
        bit = step(state, program)
        assert bit == "0"  # cell is now 2

    def test_cells_wrap_mod_256(self):
        state = fresh()
        step(state, DEC)
        assert state.tape[0] == 255
        state = fresh()
        program = INC * 256
        for _ in range(256):
            step(state, program)
        assert state.tape.get(0, 0) == 0

    def test_pointer_moves_are_always_legal(self):
        state = fresh()
        program = LEFT + DEC + RIGHT + RIGHT + INC
        for _ in range(5):
            step(state, program)
        assert state.tape == {-1: 255, 1: 1}


class TestComputes:
    def test_out_computes_zero(self):
        assert computes("100", "0", 10) == computes("100", "0", 10)
        res = computes("100", "0", 10)
        assert res.status is Status.COMPUTES and res.steps == 1

    def test_early_print_does_not_compute(self):
        # output "0" appeared at consumed 3 < 6
        assert computes("100111", "0", 10).status is Status.DOES_NOT_COMPUTE

    def test_inc_out_computes_one(self):
        res = computes("000100", "1", 10)
        assert res.status is Status.COMPUTES and res.steps == 2

    def test_out_does_not_compute_one(self):
        assert computes("100", "1", 10).status is Status.DOES_NOT_COMPUTE

    def test_budget_exhaustion_is_reported(self):
        # the emitting loop needs 9 steps for its third bit
        program = INC + JZ + OUT + INC + JNZ
        assert computes(program, "101", 8).status is Status.BUDGET_EXHAUSTED
        res = computes(program, "101", 9)
        assert res.status is Status.COMPUTES and res.steps == 9

    def test_budget_monotonicity(self):
        program = INC + JZ + OUT + INC + JNZ
        res = computes(program, "10", 10)
        assert res.is_computes
        for budget in range(res.steps, 40):
            again = computes(program, "10", budget)
            assert again.status is Status.COMPUTES and again.steps == res.steps

    def test_rejects_empty_target_and_zero_budget(self):
        with pytest.raises(ValueError):
            computes("100", "", 10)
        with pytest.raises(ValueError):
            computes("100", "0", 0)

    def test_determinism(self):
        program = INC + JZ + OUT + INC + JNZ + OUT
        assert run_events(program, 50) == run_events(program, 50)


def _outputs_computed(program: str, budget: int) -> set[str]:
    state = MachineState()
    outputs = set()
    while state.alive and state.steps < budget:
        try:
            bit = step(state, program)
        except NeedsMoreInput:
            break
        if bit is not None and state.consumed == len(program):
            outputs.add(state.output)
    return outputs


def test_prefix_freeness_exhaustive():
    """For no x do both p and a proper extension of p compute x.

    Exhaustive over all programs of length <= 12 (phase-12 budgets).
    """
    computed: dict[str, set[str]] = {}
    for length in (3, 6, 9, 12):
        budget = 1 << (12 - length)
        for bits in product("01", repeat=length):
            program = "".join(bits)
            outs = _outputs_computed(program, budget)
            if outs:
                computed[program] = outs
    programs = sorted(computed)
    for p in programs:
        for q in programs:
            if len(q) > len(p) and q.startswith(p):
                assert not (computed[p] & computed[q]), (p, q)


def test_chain_property(ledger_k12):
    """If p computes x in t steps, each nonempty proper prefix y of x is
    computed by some prefix of p at least as fast."""
    for rec in ledger_k12.records:
        for cut in range(1, len(rec.output)):
            y = rec.output[:cut]
            found = False
            for plen in range(3, len(rec.program) + 1, 3):
                res = computes(rec.program[:plen], y, rec.time)
                if res.is_computes and res.steps <= rec.time:
                    found = True
                    break
            assert found, (rec, y)


@given(st.integers(min_value=0, max_value=300))
@settings(max_examples=60, deadline=None)
def test_step_count_strictly_increases(n_steps):
    program = (INC + JZ + OUT + INC + JNZ) * 1  # endless emitting loop
    state = MachineState()
    last = 0
    for _ in range(n_steps % 40):
        step(state, program)
        assert state.steps > last
        last = state.steps


@given(st.text(alphabet="01", min_size=3, max_size=18))
@settings(max_examples=200, deadline=None)
def test_consumed_is_three_per_buffered_instruction(bits):
    state = MachineState()
    for _ in range(12):
        if not state.alive:
            break
        try:
            step(state, bits)
        except NeedsMoreInput:
            break
        assert state.consumed == 3 * len(state.buffer)
