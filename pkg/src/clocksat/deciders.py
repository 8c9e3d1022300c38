"""Subroutines deciding the tasks the structural analysis could not.

Two families: a statevector simulation of the quantum subroutine (shared by
the plain, endpoint, and witnessed variants) and the randomized classical
subroutine for the reversible-gate variant.  Both follow the same restart
discipline: every check either rejects or removes the checked clause and
replays the whole run from the initial state, so state collapse never needs
modeling.  Check outcomes are sampled as Bernoulli draws with the exact
analytic probability, which produces the same statistics as measuring the
ancilla of the comparison circuit.

Randomness comes from the Philox counter-based generator; the stream for
task ``t``, repetition ``r`` under master seed ``s`` is seeded with the
tuple ``(s, t, r)``, so decisions are reproducible and tasks independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analyzer import (
    NeedsSubroutine,
    Tacc,
    TriviallySat,
    Unsat,
    Witness,
    analyze,
)
from .clauses import gate_matrix
from .model import Gate, InitCopy, Instance, Prop, Variant

#: Statevector norm drift tolerated after a gate sequence.
NORM_TOL = 1e-9


class TargetOutOfRange(ValueError):
    """A gate names a qubit outside the register."""


@dataclass(frozen=True)
class Rng:
    """Reproducible decision randomness (Philox streams per task and rep)."""

    seed: int = 0

    def stream(self, task_index: int, rep: int) -> np.random.Generator:
        key = np.random.SeedSequence((self.seed, task_index, rep))
        return np.random.Generator(np.random.Philox(key))


@dataclass(frozen=True)
class Decision:
    accept: bool
    trace: tuple[dict, ...]
    repetitions: int

    def to_obj(self) -> dict:
        return {
            "accept": self.accept,
            "repetitions": self.repetitions,
            "trace": [dict(entry) for entry in self.trace],
        }


def simulate(
    gates: Sequence[tuple[Gate, Sequence[int]]], init: np.ndarray
) -> np.ndarray:
    """Apply qubit gates in order to a dense statevector."""
    n = int(init.size).bit_length() - 1
    if init.size != 1 << n:
        raise ValueError("statevector length must be a power of two")
    psi = np.asarray(init, dtype=complex).reshape((2,) * n)
    for gate, targets in gates:
        targets = tuple(targets)
        if any(t < 0 or t >= n for t in targets):
            raise TargetOutOfRange(f"gate {gate.value} targets {targets} on {n} qubits")
        if len(set(targets)) != len(targets):
            raise TargetOutOfRange(f"gate {gate.value} repeats a target")
        mat = gate_matrix(gate)
        a = len(targets)
        if mat.shape[0] != 1 << a:
            raise TargetOutOfRange(
                f"gate {gate.value} needs {mat.shape[0].bit_length() - 1} targets"
            )
        op = mat.reshape((2,) * (2 * a))
        psi = np.tensordot(op, psi, axes=(tuple(range(a, 2 * a)), targets))
        psi = np.moveaxis(psi, tuple(range(a)), targets)
    out = psi.reshape(-1)
    norm = np.linalg.norm(out)
    if abs(norm - np.linalg.norm(init)) > NORM_TOL:
        raise RuntimeError("statevector norm drifted")
    return out


def simprop_outcome_prob(
    phi: np.ndarray,
    u0: tuple[Gate, Sequence[int]],
    uj: tuple[Gate, Sequence[int]],
) -> float:
    """Probability the gate-comparison circuit's ancilla reads one.

    Equals (1 - Re<phi| Uj^dag U0 |phi>) / 2: zero when the two clauses agree
    on the state, strictly positive when they disagree.
    """
    psi0 = simulate([u0], phi)
    psij = simulate([uj], phi)
    overlap = np.vdot(psij, psi0).real
    return max(0.0, 0.5 - 0.5 * overlap)


# --- register plumbing -------------------------------------------------------

def _register(task: Tacc) -> dict[int, int]:
    order = tuple(task.q_logicals) + tuple(task.p_logicals)
    return {logical: pos for pos, logical in enumerate(order)}


def _pair_bits(instance: Instance, task: Tacc, wit: Witness | None) -> list[int]:
    """Initial bits of the copy-fed registers, in p_logicals order."""
    bits = {}
    for i in task.inits:
        cl = instance.clauses[i]
        if isinstance(cl, InitCopy):
            bits[cl.logical] = 0 if wit is None else int(wit[cl.witness])
    return [bits.get(l, 0) for l in task.p_logicals]


def _gate_of(instance: Instance, index: int, register: dict[int, int]):
    cl = instance.clauses[index]
    assert isinstance(cl, Prop)
    return cl.gate, tuple(register[l] for l in cl.logicals)


def _measure_zero_prob(psi: np.ndarray, pos: int, n: int) -> float:
    slab = psi.reshape((2,) * n).take(0, axis=pos)
    return float(np.linalg.norm(slab) ** 2)


# --- quantum subroutine ------------------------------------------------------

def run_quantum_task(
    instance: Instance,
    task: Tacc,
    wit: Witness | None,
    rng: np.random.Generator,
) -> Decision:
    """One run of the quantum subroutine on one task.

    Replays the gate sequence from |0..0, bits> after every check; a
    simultaneous-propagation check compares the step's designated clause
    (lowest index) against the lowest remaining extra, an out check measures
    the out-checked register flipped.  Reject probabilities are computed
    analytically and sampled.
    """
    register = _register(task)
    n = len(register)
    bits = _pair_bits(instance, task, wit)
    start = 0
    for pos, bit in enumerate(bits):
        if bit:
            start |= 1 << (n - 1 - (task.q + pos))
    init = np.zeros(max(1 << n, 1), dtype=complex)
    init[start] = 1.0

    removed: set[int] = set()
    trace: list[dict] = []
    outs_left = [
        i
        for i in task.outs
        if instance.clauses[i].logical in register
    ]
    vacuous = [i for i in task.outs if i not in outs_left]
    for i in vacuous:
        trace.append({"check": "out", "clause": i, "p_reject": 0.0, "outcome": "pass"})

    while True:
        psi = init
        restarted = False
        for step in task.steps:
            alive = [i for i in step if i not in removed]
            if len(alive) > 1:
                designated, checked = alive[0], alive[1]
                prob = simprop_outcome_prob(
                    psi,
                    _gate_of(instance, designated, register),
                    _gate_of(instance, checked, register),
                )
                reject = bool(rng.random() < prob)
                trace.append(
                    {
                        "check": "simprop",
                        "clause": checked,
                        "against": designated,
                        "p_reject": prob,
                        "outcome": "reject" if reject else "pass",
                    }
                )
                if reject:
                    return Decision(False, tuple(trace), 1)
                removed.add(checked)
                restarted = True
                break
            psi = simulate([_gate_of(instance, alive[0], register)], psi)
        if restarted:
            continue
        if outs_left:
            i = outs_left[0]
            pos = register[instance.clauses[i].logical]
            prob = _measure_zero_prob(psi, pos, n)
            reject = bool(rng.random() < prob)
            trace.append(
                {
                    "check": "out",
                    "clause": i,
                    "p_reject": prob,
                    "outcome": "reject" if reject else "pass",
                }
            )
            if reject:
                return Decision(False, tuple(trace), 1)
            outs_left.pop(0)
            continue
        return Decision(True, tuple(trace), 1)


# --- classical subroutine ----------------------------------------------------

def _apply_classical(gate: Gate, positions: tuple[int, ...], bits: list[int]) -> None:
    if gate is Gate.X:
        (t,) = positions
        bits[t] ^= 1
        return
    if gate is Gate.XXXTOFFOLI:
        c1, c2, t = positions
        bits[t] ^= bits[c1] & bits[c2]
        bits[c1] ^= 1
        bits[c2] ^= 1
        bits[t] ^= 1
        return
    raise ValueError(f"gate {gate.value} is not classical")


def run_classical_task(
    instance: Instance, task: Tacc, rng: np.random.Generator
) -> Decision:
    """One run of the randomized classical subroutine on one task.

    Pair-fed registers start from fresh random bits on every replay; a
    simultaneous-propagation check applies both clauses to copies of the
    current bits and rejects only when they differ and a fair coin lands
    heads.  Out checks read the final bits directly, without restarts.
    """
    register = _register(task)
    removed: set[int] = set()
    trace: list[dict] = []

    while True:
        bits = [0] * task.q + [int(b) for b in rng.integers(0, 2, size=task.p)]
        restarted = False
        for step in task.steps:
            alive = [i for i in step if i not in removed]
            if len(alive) > 1:
                designated, checked = alive[0], alive[1]
                g0, p0 = _gate_of(instance, designated, register)
                gj, pj = _gate_of(instance, checked, register)
                b0, bj = list(bits), list(bits)
                _apply_classical(g0, p0, b0)
                _apply_classical(gj, pj, bj)
                heads = bool(rng.integers(0, 2))
                reject = b0 != bj and heads
                trace.append(
                    {
                        "check": "compare",
                        "clause": checked,
                        "against": designated,
                        "differ": b0 != bj,
                        "outcome": "reject" if reject else "pass",
                    }
                )
                if reject:
                    return Decision(False, tuple(trace), 1)
                removed.add(checked)
                restarted = True
                break
            gate, positions = _gate_of(instance, alive[0], register)
            _apply_classical(gate, positions, bits)
        if restarted:
            continue
        for i in task.outs:
            logical = instance.clauses[i].logical
            if logical not in register:
                trace.append({"check": "outbit", "clause": i, "outcome": "pass"})
                continue
            bit = bits[register[logical]]
            outcome = "pass" if bit else "reject"
            trace.append({"check": "outbit", "clause": i, "bit": bit, "outcome": outcome})
            if not bit:
                return Decision(False, tuple(trace), 1)
        return Decision(True, tuple(trace), 1)


# --- top-level decision ------------------------------------------------------

def decide(
    instance: Instance,
    wit: Witness | None = None,
    reps: int = 32,
    rng: Rng | int = 0,
) -> Decision:
    """Full hybrid decision: structural verdict, then amplified subroutines.

    Accepts iff every repetition of every task accepts; satisfiable
    instances accept with probability one, so unanimity only sharpens the
    rejection rate.  Qubit-variant instances are mapped back to their source
    variant first; ``wit`` is keyed by the (recovered) instance's witness
    qudits.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if isinstance(rng, int):
        rng = Rng(rng)
    if instance.variant is Variant.QUBIT:
        from .qubitize import dequbitize

        instance = dequbitize(instance)
    verdict = analyze(instance, wit)
    if isinstance(verdict, Unsat):
        entry = {
            "check": "structural",
            "rule": verdict.rule,
            "evidence": list(verdict.evidence),
            "outcome": "reject",
        }
        return Decision(False, (entry,), 0)
    if isinstance(verdict, TriviallySat):
        entry = {"check": "structural", "outcome": "trivially-sat"}
        return Decision(True, (entry,), 0)

    assert isinstance(verdict, NeedsSubroutine)
    classical = instance.variant is Variant.CLASSICAL_SLCT
    trace: list[dict] = []
    accept = True
    for task_index, task in enumerate(verdict.tasks):
        for rep in range(reps):
            stream = rng.stream(task_index, rep)
            if classical:
                run = run_classical_task(instance, task, stream)
            else:
                run = run_quantum_task(instance, task, wit, stream)
            for entry in run.trace:
                trace.append({"task": task_index, "rep": rep, **entry})
            if not run.accept:
                accept = False
    return Decision(accept, tuple(trace), reps)
