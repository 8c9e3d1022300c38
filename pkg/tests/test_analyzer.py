"""Structural analysis: rejection rules, chain extraction, verdict shapes."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clocksat.analyzer import (
    NeedsSubroutine,
    Tacc,
    TriviallySat,
    Unsat,
    WitnessLengthMismatch,
    WitnessMissing,
    analyze,
    mark_undefined,
)
from clocksat.model import (
    Gate,
    Init,
    InitCopy,
    InitPair,
    Instance,
    Out,
    Prop,
    Variant,
)
from conftest import X_BLOCK, chain_instance


def _slct(num_qudits, *clauses):
    return Instance(Variant.SLCT, num_qudits, tuple(clauses))


def test_single_chain_yields_one_task():
    inst = chain_instance([(Gate.H, (0,)), (Gate.HT, (0,))])
    verdict = analyze(inst)
    assert isinstance(verdict, NeedsSubroutine)
    (task,) = verdict.tasks
    assert task.clocks == (1, 2, 3)
    assert task.steps == ((1,), (2,))
    assert task.inits == (0,)
    assert task.outs == (3,)
    assert not task.truncated
    assert task.length == 2
    assert task.q_logicals == (0,)
    assert task.p_logicals == ()
    assert task.q == 1 and task.p == 0
    assert task.clause_indices() == (0, 1, 2, 3)


def test_verdict_objects_round_to_plain_data():
    inst = chain_instance([(Gate.H, (0,))])
    obj = analyze(inst).to_obj()
    assert obj["decision"] == "needs_subroutine"
    assert obj["tasks"][0]["length"] == 1
    assert obj["tasks"][0]["q"] == 1
    assert TriviallySat().to_obj()["decision"] == "trivially_sat"
    unsat = Unsat("direction", (4,)).to_obj()
    assert unsat == {
        "decision": "unsat",
        "rule": "direction",
        "evidence": [4],
        "tasks": [],
    }


def test_lone_init_is_trivially_sat(tiny_sat):
    assert isinstance(analyze(tiny_sat), TriviallySat)


def test_init_out_dot_is_a_zero_length_task(tiny_unsat):
    verdict = analyze(tiny_unsat)
    assert isinstance(verdict, NeedsSubroutine)
    (task,) = verdict.tasks
    assert task.clocks == (1,)
    assert task.length == 0
    assert task.steps == ()


def test_out_without_init_is_ignored():
    inst = _slct(2, Out(logical=0, clock=1))
    assert isinstance(analyze(inst), TriviallySat)


def test_chain_without_out_is_ignored():
    inst = _slct(
        3,
        Init(logical=0, clock=1),
        Prop(gate=Gate.H, logicals=(0,), clock_pred=1, clock_succ=2),
    )
    assert isinstance(analyze(inst), TriviallySat)


def test_role_conflict_rejects():
    # qudit 0 serves as both logical and clock
    inst = _slct(1, Init(logical=0, clock=0))
    verdict = analyze(inst)
    assert verdict == Unsat("single-type-qudits", (0,))


def test_branching_at_init_clock():
    inst = _slct(
        4,
        Init(logical=0, clock=1),
        Prop(gate=Gate.H, logicals=(0,), clock_pred=1, clock_succ=2),
        Prop(gate=Gate.H, logicals=(0,), clock_pred=1, clock_succ=3),
        Out(logical=0, clock=2),
        Out(logical=0, clock=3),
    )
    assert analyze(inst) == Unsat("branching", (1, 2))


def test_mid_chain_clock_degree():
    inst = _slct(
        5,
        Init(logical=0, clock=1),
        Prop(gate=Gate.H, logicals=(0,), clock_pred=1, clock_succ=2),
        Prop(gate=Gate.H, logicals=(0,), clock_pred=2, clock_succ=3),
        Prop(gate=Gate.H, logicals=(0,), clock_pred=2, clock_succ=4),
        Out(logical=0, clock=3),
        Out(logical=0, clock=4),
    )
    assert analyze(inst) == Unsat("clock-degree", (2,))


def test_backward_edge_rejects():
    inst = _slct(
        4,
        Init(logical=0, clock=1),
        Prop(gate=Gate.H, logicals=(0,), clock_pred=1, clock_succ=2),
        Prop(gate=Gate.H, logicals=(0,), clock_pred=3, clock_succ=2),
        Out(logical=0, clock=3),
    )
    assert analyze(inst) == Unsat("direction", (2,))


def test_init_with_incoming_edge_rejects():
    inst = _slct(
        4,
        Init(logical=0, clock=2),
        Prop(gate=Gate.H, logicals=(0,), clock_pred=1, clock_succ=2),
        Init(logical=0, clock=1),
        Prop(gate=Gate.H, logicals=(0,), clock_pred=2, clock_succ=3),
        Out(logical=0, clock=3),
    )
    assert analyze(inst) == Unsat("misplaced-boundary", (0, 1))


def test_active_dot_with_defined_outgoing_edge_rejects():
    inst = _slct(
        3,
        Init(logical=0, clock=1),
        Out(logical=0, clock=1),
        Prop(gate=Gate.H, logicals=(0,), clock_pred=1, clock_succ=2),
        Out(logical=0, clock=2),
    )
    assert analyze(inst) == Unsat("misplaced-boundary", (2,))


def test_mark_undefined_is_instance_wide():
    # second prop touches logical 1, which no clause ever initializes
    inst = _slct(
        5,
        Init(logical=0, clock=2),
        Prop(gate=Gate.H, logicals=(0,), clock_pred=2, clock_succ=3),
        Prop(gate=Gate.H, logicals=(1,), clock_pred=3, clock_succ=4),
    )
    assert mark_undefined(inst) == {2}


def test_undefined_prop_cuts_the_chain_quietly():
    inst = _slct(
        5,
        Init(logical=0, clock=2),
        Prop(gate=Gate.H, logicals=(0,), clock_pred=2, clock_succ=3),
        Prop(gate=Gate.H, logicals=(1,), clock_pred=3, clock_succ=4),
        Out(logical=0, clock=4),
    )
    # the cut chain has no simultaneous propagation, so nothing is left
    assert isinstance(analyze(inst), TriviallySat)


def test_truncated_chain_with_simultaneous_steps_is_kept():
    inst = _slct(
        6,
        Init(logical=0, clock=2),
        Init(logical=1, clock=2),
        Prop(gate=Gate.H, logicals=(0,), clock_pred=2, clock_succ=3),
        Prop(gate=Gate.H, logicals=(1,), clock_pred=2, clock_succ=3),
        Prop(gate=Gate.H, logicals=(5,), clock_pred=3, clock_succ=4),
        Out(logical=0, clock=4),
    )
    assert mark_undefined(inst) == {4}
    verdict = analyze(inst)
    assert isinstance(verdict, NeedsSubroutine)
    (task,) = verdict.tasks
    assert task.truncated
    assert task.clocks == (2, 3)
    assert task.steps == ((2, 3),)
    assert task.outs == ()
    assert task.q_logicals == (0, 1)


def test_two_chains_two_tasks_sorted_by_first_clock():
    inst = _slct(
        6,
        Init(logical=1, clock=4),
        Prop(gate=Gate.H, logicals=(1,), clock_pred=4, clock_succ=5),
        Out(logical=1, clock=5),
        Init(logical=0, clock=2),
        Prop(gate=Gate.HT, logicals=(0,), clock_pred=2, clock_succ=3),
        Out(logical=0, clock=3),
    )
    verdict = analyze(inst)
    assert isinstance(verdict, NeedsSubroutine)
    assert [t.clocks for t in verdict.tasks] == [(2, 3), (4, 5)]
    assert [t.q_logicals for t in verdict.tasks] == [(0,), (1,)]


def test_cross_task_prop_rejects():
    inst = _slct(
        5,
        Init(logical=0, clock=1),
        Prop(gate=Gate.H, logicals=(0,), clock_pred=1, clock_succ=2),
        Out(logical=0, clock=2),
        Init(logical=0, clock=3),
        Prop(gate=Gate.H, logicals=(0,), clock_pred=3, clock_succ=4),
        Out(logical=0, clock=4),
    )
    verdict = analyze(inst)
    assert isinstance(verdict, Unsat)
    assert verdict.rule == "cross-task-prop"


def test_cross_task_boundary_rejects():
    inst = _slct(
        7,
        Init(logical=0, clock=3),
        Init(logical=1, clock=3),
        Prop(gate=Gate.H, logicals=(1,), clock_pred=3, clock_succ=4),
        Out(logical=1, clock=4),
        Init(logical=2, clock=5),
        Prop(gate=Gate.H, logicals=(2,), clock_pred=5, clock_succ=6),
        Out(logical=2, clock=6),
        Out(logical=0, clock=6),
    )
    verdict = analyze(inst)
    assert isinstance(verdict, Unsat)
    assert verdict.rule == "cross-task-boundary"
    assert verdict.evidence == (0, 7)


def test_witness_required_and_forbidden():
    winst = Instance(
        Variant.WITNESSED_SLCT,
        3,
        (InitCopy(logical=0, witness=1, clock=2),),
    )
    with pytest.raises(WitnessMissing):
        analyze(winst)
    with pytest.raises(ValueError):
        analyze(chain_instance([(Gate.H, (0,))]), wit={0: 1})


def test_witness_coverage_checked():
    winst = Instance(
        Variant.WITNESSED_SLCT,
        3,
        (InitCopy(logical=0, witness=1, clock=2),),
    )
    with pytest.raises(WitnessLengthMismatch):
        analyze(winst, wit={})
    with pytest.raises(WitnessLengthMismatch):
        analyze(winst, wit={1: 0, 2: 1})
    with pytest.raises(ValueError):
        analyze(winst, wit={1: 2})
    assert isinstance(analyze(winst, wit={1: 0}), TriviallySat)


def test_witness_state_conflict():
    inst = Instance(
        Variant.WITNESSED_SLCT,
        6,
        (
            InitCopy(logical=0, witness=1, clock=2),
            Out(logical=0, clock=2),
            InitCopy(logical=0, witness=3, clock=4),
            Out(logical=0, clock=4),
        ),
    )
    assert analyze(inst, wit={1: 0, 3: 1}) == Unsat(
        "witness-state-conflict", (0, 2)
    )
    # agreeing bits pass the witness checks
    verdict = analyze(inst, wit={1: 1, 3: 1})
    assert isinstance(verdict, Unsat)
    assert verdict.rule == "cross-task-boundary"


def test_witness_zero_conflict():
    inst = Instance(
        Variant.WITNESSED_SLCT,
        5,
        (
            Init(logical=0, clock=1),
            Out(logical=0, clock=1),
            InitCopy(logical=0, witness=3, clock=4),
            Out(logical=0, clock=4),
        ),
    )
    assert analyze(inst, wit={3: 1}) == Unsat("witness-zero-conflict", (0, 2))


def test_pair_zero_conflict():
    inst = Instance(
        Variant.CLASSICAL_SLCT,
        4,
        (
            InitPair(logical=0, aux=1, clock=2),
            Out(logical=0, clock=2),
            Init(logical=0, clock=3),
            Out(logical=0, clock=3),
        ),
    )
    assert analyze(inst) == Unsat("pair-zero-conflict", (2, 0))


def test_pair_degree_conflicts():
    by_logical = Instance(
        Variant.CLASSICAL_SLCT,
        5,
        (
            InitPair(logical=0, aux=1, clock=4),
            InitPair(logical=0, aux=2, clock=4),
            Out(logical=0, clock=4),
        ),
    )
    assert analyze(by_logical) == Unsat("pair-degree", (0, 1))
    by_aux = Instance(
        Variant.CLASSICAL_SLCT,
        5,
        (
            InitPair(logical=0, aux=2, clock=4),
            InitPair(logical=1, aux=2, clock=4),
            Out(logical=0, clock=4),
            Out(logical=1, clock=4),
        ),
    )
    assert analyze(by_aux) == Unsat("pair-degree", (0, 1))


def test_lct_endpoint_degree():
    inst = Instance(
        Variant.LCT,
        6,
        (
            Init(logical=0, clock=1, endpoint=5),
            Init(logical=2, clock=3, endpoint=5),
        ),
    )
    assert analyze(inst) == Unsat("endpoint-degree", (5,))


def test_lct_init_after_chain_start_rejects():
    inst = Instance(
        Variant.LCT,
        5,
        (
            Init(logical=0, clock=2, endpoint=4),
            Prop(gate=Gate.H, logicals=(0,), clock_pred=1, clock_succ=2),
        ),
    )
    assert analyze(inst) == Unsat("misplaced-boundary", (0,))


def test_lct_wiring_checked_even_in_dead_components():
    # no out clause anywhere, but the Bell wiring is still inconsistent
    inst = Instance(
        Variant.LCT,
        7,
        (
            Init(logical=0, clock=1, endpoint=5),
            Init(logical=2, clock=3, endpoint=5),
            Init(logical=4, clock=6, endpoint=None),
        ),
    )
    assert analyze(inst) == Unsat("endpoint-degree", (5,))


def test_lct_chain_task():
    inst = chain_instance([(Gate.H, (0,))], variant=Variant.SLCT)
    clauses = (
        Init(logical=0, clock=1, endpoint=3),
        Prop(gate=Gate.H, logicals=(0,), clock_pred=1, clock_succ=2),
        Out(logical=0, clock=2, endpoint=4),
    )
    lct = Instance(Variant.LCT, 5, clauses)
    verdict = analyze(lct)
    assert isinstance(verdict, NeedsSubroutine)
    (task,) = verdict.tasks
    assert task.clocks == (1, 2)
    assert task.steps == ((1,),)
    assert not task.truncated


def test_qubit_instances_are_rejected():
    from clocksat.qubitize import qubitize_instance

    qinst = qubitize_instance(chain_instance([(Gate.H, (0,))]))
    with pytest.raises(ValueError):
        analyze(qinst)


_TEMPLATES = (
    Init(logical=0, clock=2),
    Prop(gate=Gate.H, logicals=(0,), clock_pred=2, clock_succ=3),
    Prop(gate=Gate.H, logicals=(0,), clock_pred=3, clock_succ=4),
    Prop(gate=Gate.HT, logicals=(0,), clock_pred=3, clock_succ=4),
    Prop(gate=Gate.HHCNOT, logicals=(0, 1), clock_pred=3, clock_succ=4),
    Out(logical=0, clock=4),
)


@settings(max_examples=60, deadline=None)
@given(
    subset=st.lists(st.sampled_from(range(6)), unique=True, min_size=1),
    data=st.data(),
)
def test_verdict_class_ignores_clause_order(subset, data):
    clauses = tuple(_TEMPLATES[i] for i in sorted(subset))
    perm = data.draw(st.permutations(range(len(clauses))))
    inst = Instance(Variant.SLCT, 5, clauses)
    shuffled = Instance(
        Variant.SLCT, 5, tuple(clauses[i] for i in perm)
    )
    assert type(analyze(inst)) is type(analyze(shuffled))
