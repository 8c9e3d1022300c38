"""Randomized subroutines: simulation, comparison checks, decisions."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clocksat.clauses import gate_matrix
from clocksat.deciders import (
    Decision,
    Rng,
    TargetOutOfRange,
    decide,
    simprop_outcome_prob,
    simulate,
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
from conftest import chain_instance


def _e(n, i):
    v = np.zeros(1 << n, dtype=complex)
    v[i] = 1.0
    return v


def test_simulate_single_gate_matches_matrix():
    out = simulate([(Gate.H, (0,))], _e(1, 0))
    assert np.allclose(out, [2 ** -0.5, 2 ** -0.5])
    out = simulate([(Gate.HHCNOT, (0, 1))], _e(2, 0))
    assert np.allclose(out, gate_matrix(Gate.HHCNOT) @ _e(2, 0))


def test_simulate_qubit_zero_is_most_significant():
    out = simulate([(Gate.X, (0,))], _e(2, 0))
    assert np.allclose(out, _e(2, 2))
    out = simulate([(Gate.X, (1,))], _e(2, 0))
    assert np.allclose(out, _e(2, 1))


def test_simulate_embeds_gates_on_larger_registers():
    # gate on qubit 1 of three; explicit kron cross-check
    psi = np.arange(8, dtype=complex)
    psi /= np.linalg.norm(psi)
    out = simulate([(Gate.HT, (1,))], psi)
    dense = np.kron(np.kron(np.eye(2), gate_matrix(Gate.HT)), np.eye(2))
    assert np.allclose(out, dense @ psi)


def test_simulate_two_qubit_gate_on_swapped_targets():
    psi = np.arange(4, dtype=complex)
    psi /= np.linalg.norm(psi)
    out = simulate([(Gate.HHCNOT, (1, 0))], psi)
    swap = np.eye(4)[[0, 2, 1, 3]]
    dense = swap @ gate_matrix(Gate.HHCNOT) @ swap
    assert np.allclose(out, dense @ psi)


def test_simulate_rejects_bad_targets():
    with pytest.raises(TargetOutOfRange):
        simulate([(Gate.H, (1,))], _e(1, 0))
    with pytest.raises(TargetOutOfRange):
        simulate([(Gate.HHCNOT, (0, 0))], _e(2, 0))
    with pytest.raises(TargetOutOfRange):
        simulate([(Gate.HHCNOT, (0,))], _e(2, 0))
    with pytest.raises(ValueError):
        simulate([], np.ones(3, dtype=complex))


@settings(max_examples=40, deadline=None)
@given(
    st.lists(
        st.sampled_from(
            [
                (Gate.H, (0,)),
                (Gate.HT, (2,)),
                (Gate.X, (1,)),
                (Gate.HHCNOT, (1, 2)),
                (Gate.HHCNOT, (2, 0)),
            ]
        ),
        max_size=6,
    ),
    st.integers(0, 7),
    st.integers(0, 7),
)
def test_simulate_preserves_inner_products(gates, i, j):
    a, b = _e(3, i), _e(3, j)
    before = np.vdot(a, b)
    after = np.vdot(simulate(gates, a), simulate(gates, b))
    assert abs(before - after) < 1e-12


def test_simprop_agreeing_clauses_never_reject():
    assert simprop_outcome_prob(_e(1, 0), (Gate.H, (0,)), (Gate.H, (0,))) < 1e-12
    # H and HT coincide on |0>
    assert simprop_outcome_prob(_e(1, 0), (Gate.H, (0,)), (Gate.HT, (0,))) < 1e-12


def test_simprop_detects_disagreement():
    # H and HT differ on |1> by a T phase: p = (1 - cos pi/4) / 2
    p = simprop_outcome_prob(_e(1, 1), (Gate.H, (0,)), (Gate.HT, (0,)))
    assert abs(p - 0.5 * (1 - np.cos(np.pi / 4))) < 1e-12
    p = simprop_outcome_prob(_e(2, 0), (Gate.H, (0,)), (Gate.H, (1,)))
    assert abs(p - 0.25) < 1e-12


def test_rng_streams_are_reproducible_and_distinct():
    a = Rng(5).stream(0, 1).random(4)
    b = Rng(5).stream(0, 1).random(4)
    c = Rng(5).stream(1, 1).random(4)
    d = Rng(6).stream(0, 1).random(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_decision_to_obj():
    obj = Decision(True, ({"check": "out"},), 3).to_obj()
    assert obj == {"accept": True, "repetitions": 3, "trace": [{"check": "out"}]}


def test_decide_accepts_deterministic_one_circuit(yes_instance):
    decision = decide(yes_instance, reps=32, rng=0)
    assert decision.accept
    assert decision.repetitions == 32
    assert all(e["outcome"] == "pass" for e in decision.trace)
    assert all(e["p_reject"] < 1e-9 for e in decision.trace if e["check"] == "out")


def test_decide_rejects_identity_circuit(no_instance):
    decision = decide(no_instance, reps=4, rng=0)
    assert not decision.accept
    rejects = [e for e in decision.trace if e["outcome"] == "reject"]
    assert rejects and all(e["p_reject"] > 1 - 1e-9 for e in rejects)


def test_decide_rejects_init_out_dot(tiny_unsat):
    assert not decide(tiny_unsat, reps=2, rng=0).accept


def test_decide_trivially_sat_short_circuits(tiny_sat):
    decision = decide(tiny_sat, reps=8, rng=0)
    assert decision.accept
    assert decision.repetitions == 0
    assert decision.trace == ({"check": "structural", "outcome": "trivially-sat"},)


def test_decide_structural_reject_trace():
    inst = Instance(Variant.SLCT, 1, (Init(logical=0, clock=0),))
    decision = decide(inst, reps=8, rng=0)
    assert not decision.accept
    assert decision.repetitions == 0
    assert decision.trace == (
        {
            "check": "structural",
            "rule": "single-type-qudits",
            "evidence": [0],
            "outcome": "reject",
        },
    )


def test_decide_is_deterministic_for_a_seed(no_instance):
    a = decide(no_instance, reps=3, rng=17)
    b = decide(no_instance, reps=3, rng=17)
    assert a == b


def test_decide_rejects_bad_reps(tiny_sat):
    with pytest.raises(ValueError):
        decide(tiny_sat, reps=0)


def test_simultaneous_identical_props_pass_and_restart():
    inst = Instance(
        Variant.SLCT,
        3,
        (
            Init(logical=0, clock=1),
            Prop(gate=Gate.H, logicals=(0,), clock_pred=1, clock_succ=2),
            Prop(gate=Gate.H, logicals=(0,), clock_pred=1, clock_succ=2),
            Out(logical=0, clock=2),
        ),
    )
    decision = decide(inst, reps=1, rng=0)
    simprops = [e for e in decision.trace if e["check"] == "simprop"]
    # the duplicate clause is checked once against the designated one
    (entry,) = simprops
    assert entry["clause"] == 2 and entry["against"] == 1
    assert entry["p_reject"] < 1e-12
    assert entry["outcome"] == "pass"
    assert entry["task"] == 0 and entry["rep"] == 0


def test_simultaneous_differing_props_observe_quarter_rate():
    inst = Instance(
        Variant.SLCT,
        4,
        (
            Init(logical=0, clock=2),
            Init(logical=1, clock=2),
            Prop(gate=Gate.H, logicals=(0,), clock_pred=2, clock_succ=3),
            Prop(gate=Gate.H, logicals=(1,), clock_pred=2, clock_succ=3),
            Out(logical=0, clock=3),
        ),
    )
    decision = decide(inst, reps=1, rng=0)
    simprop = next(e for e in decision.trace if e["check"] == "simprop")
    assert abs(simprop["p_reject"] - 0.25) < 1e-12


def test_vacuous_out_passes():
    inst = Instance(
        Variant.SLCT,
        6,
        (
            Init(logical=0, clock=1),
            Prop(gate=Gate.H, logicals=(0,), clock_pred=1, clock_succ=2),
            Out(logical=5, clock=2),
        ),
    )
    decision = decide(inst, reps=4, rng=0)
    assert decision.accept
    outs = [e for e in decision.trace if e["check"] == "out"]
    assert outs and all(e["p_reject"] == 0.0 for e in outs)


def test_witness_bit_feeds_the_out_register():
    inst = Instance(
        Variant.WITNESSED_SLCT,
        3,
        (
            InitCopy(logical=0, witness=1, clock=2),
            Out(logical=0, clock=2),
        ),
    )
    assert decide(inst, wit={1: 1}, reps=8, rng=0).accept
    assert not decide(inst, wit={1: 0}, reps=2, rng=0).accept


def test_classical_x_chain_accepts():
    inst = Instance(
        Variant.CLASSICAL_SLCT,
        3,
        (
            Init(logical=0, clock=1),
            Prop(gate=Gate.X, logicals=(0,), clock_pred=1, clock_succ=2),
            Out(logical=0, clock=2),
        ),
    )
    decision = decide(inst, reps=16, rng=0)
    assert decision.accept
    assert all(e["check"] in ("outbit",) for e in decision.trace)
    assert all(e["bit"] == 1 for e in decision.trace)


def test_classical_pair_fed_toffoli_rarely_accepts():
    # out reads c1&c2 of fresh random pair bits: accept rate 1/4 per run
    inst = Instance(
        Variant.CLASSICAL_SLCT,
        8,
        (
            Init(logical=0, clock=5),
            InitPair(logical=1, aux=3, clock=5),
            InitPair(logical=2, aux=4, clock=5),
            Prop(gate=Gate.XXXTOFFOLI, logicals=(1, 2, 0), clock_pred=5, clock_succ=6),
            Prop(gate=Gate.X, logicals=(0,), clock_pred=6, clock_succ=7),
            Out(logical=0, clock=7),
        ),
    )
    assert not decide(inst, reps=8, rng=0).accept
    bits = [e["bit"] for e in decide(inst, reps=64, rng=1).trace if "bit" in e]
    rate = sum(bits) / len(bits)
    assert 0.1 < rate < 0.45


def test_classical_identical_simultaneous_props_never_differ():
    inst = Instance(
        Variant.CLASSICAL_SLCT,
        3,
        (
            Init(logical=0, clock=1),
            Prop(gate=Gate.X, logicals=(0,), clock_pred=1, clock_succ=2),
            Prop(gate=Gate.X, logicals=(0,), clock_pred=1, clock_succ=2),
            Out(logical=0, clock=2),
        ),
    )
    decision = decide(inst, reps=8, rng=0)
    assert decision.accept
    compares = [e for e in decision.trace if e["check"] == "compare"]
    assert compares and all(not e["differ"] for e in compares)


def test_quantum_gates_rejected_by_classical_variant():
    inst = Instance(
        Variant.CLASSICAL_SLCT,
        3,
        (
            Init(logical=0, clock=1),
            Prop(gate=Gate.H, logicals=(0,), clock_pred=1, clock_succ=2),
            Out(logical=0, clock=2),
        ),
    )
    with pytest.raises(ValueError):
        decide(inst, reps=1)


def test_qubit_instances_route_through_recovery():
    from clocksat.qubitize import qubitize_instance

    inst = chain_instance([(Gate.H, (0,)), (Gate.H, (0,))])
    qinst = qubitize_instance(inst)
    assert not decide(qinst, reps=4, rng=0).accept
