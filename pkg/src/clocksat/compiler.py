"""Circuit-to-instance reductions and their satisfying history states.

compile() maps a quantum or classical circuit to an instance of the chosen
variant: one init clause per data register on the first clock, one
propagation clause per gate along a directed clock chain, and one out
clause checking the answer register on the final clock.  history_state()
builds the state that satisfies the compiled instance of a correct
circuit: the uniform superposition of partially evolved data registers
tagged by legal clock configurations.

Qudit id layout, stable for fixtures: plainly initialized logicals
0..q-1, copy/pair-fed logicals q..q+p-1, witness or aux qudits
q+p..q+2p-1, clock qudits next (chain order), endpoint qudits last.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .model import (
    GATE_ARITY,
    GATE_SETS,
    Gate,
    Init,
    InitCopy,
    InitPair,
    Instance,
    MalformedJson,
    Out,
    Prop,
    Variant,
)
from .clauses import local_basis
from .deciders import simulate
from .oracle import SparseState


class GateSetMismatch(ValueError):
    """Circuit gates or registers do not fit the requested variant."""


_QUANTUM = frozenset((Gate.H, Gate.HT, Gate.HHCNOT))
_CLASSICAL = frozenset((Gate.X, Gate.XXXTOFFOLI))


@dataclass(frozen=True)
class Circuit:
    """A gate list over q plain and p copy/pair-fed register qubits.

    ``kind`` is "quantum" or "classical"; targets index the combined
    register 0..q+p-1 and ``ans`` names the register measured at the end.
    """

    kind: str
    gates: tuple[tuple[Gate, tuple[int, ...]], ...]
    q: int
    p: int = 0
    ans: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "gates", tuple((g, tuple(t)) for g, t in self.gates)
        )
        if self.kind not in ("quantum", "classical"):
            raise MalformedJson(f"unknown circuit kind '{self.kind}'")
        if self.q < 0 or self.p < 0 or self.q + self.p < 1:
            raise MalformedJson("circuit needs at least one register")
        if not 0 <= self.ans < self.q + self.p:
            raise MalformedJson("ans register out of range")
        allowed = _QUANTUM if self.kind == "quantum" else _CLASSICAL
        width = self.q + self.p
        for gate, targets in self.gates:
            if gate not in allowed:
                raise GateSetMismatch(
                    f"gate {gate.value} not in the {self.kind} set"
                )
            if len(targets) != GATE_ARITY[gate]:
                raise MalformedJson(
                    f"gate {gate.value} needs {GATE_ARITY[gate]} targets"
                )
            if len(set(targets)) != len(targets):
                raise MalformedJson("gate targets repeat")
            if any(t < 0 or t >= width for t in targets):
                raise MalformedJson("gate target out of range")

    @property
    def length(self) -> int:
        return len(self.gates)

    def to_obj(self) -> dict:
        return {
            "kind": self.kind,
            "q": self.q,
            "p": self.p,
            "ans": self.ans,
            "gates": [
                {"gate": g.value, "targets": list(t)} for g, t in self.gates
            ],
        }


def parse_circuit(text: str | bytes) -> Circuit:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise MalformedJson("circuit must be a JSON object")
    for key in ("kind", "q", "gates"):
        if key not in obj:
            raise MalformedJson(f"circuit: missing key '{key}'")
    gates = []
    raw_gates = obj["gates"]
    if not isinstance(raw_gates, list):
        raise MalformedJson("circuit: 'gates' must be a list")
    for k, entry in enumerate(raw_gates):
        if not isinstance(entry, dict) or "gate" not in entry or "targets" not in entry:
            raise MalformedJson(f"gate {k}: needs 'gate' and 'targets'")
        try:
            gate = Gate(entry["gate"])
        except ValueError:
            raise GateSetMismatch(f"gate {k}: unknown gate '{entry['gate']}'") from None
        targets = entry["targets"]
        if not isinstance(targets, list) or not all(
            isinstance(t, int) and not isinstance(t, bool) for t in targets
        ):
            raise MalformedJson(f"gate {k}: 'targets' must hold integers")
        gates.append((gate, tuple(targets)))
    return Circuit(
        kind=obj["kind"],
        gates=tuple(gates),
        q=obj["q"],
        p=obj.get("p", 0),
        ans=obj.get("ans", 0),
    )


@dataclass(frozen=True)
class Full:
    """The complete history over all L+1 clock configurations."""


@dataclass(frozen=True)
class Privileged:
    """History built from the designated gate of every step.

    For a single-path circuit this coincides with the full history; the
    designation matters upstream, where each step's lowest-index clause is
    the one replayed.
    """


@dataclass(frozen=True)
class Truncated:
    """History cut after step t: later clocks stay ready."""

    t: int


HistoryKind = Full | Privileged | Truncated

FULL = Full()
PRIVILEGED = Privileged()


def _layout(circuit: Circuit, target: Variant) -> dict[str, int]:
    q, p, length = circuit.q, circuit.p, circuit.length
    first_clock = q + 2 * p
    return {
        "pair_base": q,
        "partner_base": q + p,
        "first_clock": first_clock,
        "num_qudits": first_clock + length + 1 + (2 if target is Variant.LCT else 0),
        "e0": first_clock + length + 1,
        "e1": first_clock + length + 2,
    }


def compile(circuit: Circuit, target: Variant) -> Instance:
    """Reduce a circuit to an instance of the target variant.

    Gates must already belong to the target's set; no synthesis happens
    here.  Register j of the circuit is logical qudit j of the instance.
    """
    if target is Variant.QUBIT:
        raise GateSetMismatch("compile targets the qudit variants")
    for gate, _ in circuit.gates:
        if gate not in GATE_SETS[target]:
            raise GateSetMismatch(
                f"gate {gate.value} not available in variant {target.value}"
            )
    if circuit.p > 0 and target not in (
        Variant.WITNESSED_SLCT,
        Variant.CLASSICAL_SLCT,
    ):
        raise GateSetMismatch(
            f"p > 0 needs a witness or pair variant, not {target.value}"
        )

    lay = _layout(circuit, target)
    clock = lambda t: lay["first_clock"] + t
    is_lct = target is Variant.LCT
    clauses: list = []
    for j in range(circuit.q):
        clauses.append(
            Init(logical=j, clock=clock(0), endpoint=lay["e0"] if is_lct else None)
        )
    for j in range(circuit.p):
        logical = lay["pair_base"] + j
        partner = lay["partner_base"] + j
        if target is Variant.WITNESSED_SLCT:
            clauses.append(InitCopy(logical=logical, witness=partner, clock=clock(0)))
        else:
            clauses.append(InitPair(logical=logical, aux=partner, clock=clock(0)))
    for t, (gate, targets) in enumerate(circuit.gates):
        clauses.append(
            Prop(
                gate=gate,
                logicals=targets,
                clock_pred=clock(t),
                clock_succ=clock(t + 1),
            )
        )
    clauses.append(
        Out(
            logical=circuit.ans,
            clock=clock(circuit.length),
            endpoint=lay["e1"] if is_lct else None,
        )
    )
    return Instance(
        variant=target, num_qudits=lay["num_qudits"], clauses=tuple(clauses)
    )


def _data_states(
    circuit: Circuit, horizon: int, wit: Sequence[int] | None
) -> list[np.ndarray]:
    """Dense data-register states phi_0..phi_horizon (aux qubits included).

    The vector covers q+p register qubits plus, for pair-fed circuits
    without a witness, p passive aux qubits entangled as Bell pairs.
    """
    q, p = circuit.q, circuit.p
    if wit is not None:
        if len(wit) != p:
            raise ValueError(f"witness needs {p} bits")
        n = q + p
        start = np.zeros(1 << n, dtype=complex)
        index = 0
        for j, bit in enumerate(wit):
            if bit:
                index |= 1 << (n - 1 - (q + j))
        start[index] = 1.0
    else:
        n = q + 2 * p
        start = np.zeros(1 << n, dtype=complex)
        scale = 2.0 ** (-p / 2)
        for bits in range(1 << p) if p else (0,):
            index = 0
            for j in range(p):
                if (bits >> (p - 1 - j)) & 1:
                    index |= 1 << (n - 1 - (q + j))
                    index |= 1 << (n - 1 - (q + p + j))
            start[index] = scale
    states = [start]
    for gate, targets in circuit.gates[:horizon]:
        states.append(simulate([(gate, targets)], states[-1]))
    return states


def history_state(
    circuit: Circuit,
    target: Variant,
    kind: HistoryKind = FULL,
    wit: Sequence[int] | None = None,
) -> SparseState:
    """The satisfying state of compile(circuit, target), as a sparse vector.

    Data registers evolve through the gate prefix, clock qudits spell
    done..active..ready, witness qudits carry the given bits, aux qudits
    stay Bell-paired with their logicals, and the endpoint variant tensors
    the Bell chain along its clock edges.
    """
    if target is Variant.QUBIT:
        raise GateSetMismatch("history states exist for the qudit variants")
    if wit is not None and target is not Variant.WITNESSED_SLCT:
        raise ValueError("witness bits only apply to the witnessed variant")
    if wit is None and target is Variant.WITNESSED_SLCT:
        raise ValueError("the witnessed variant needs witness bits")
    length = circuit.length
    horizon = length
    if isinstance(kind, Truncated):
        if not 0 <= kind.t < length:
            raise ValueError("truncation point must lie before the last step")
        horizon = kind.t

    lb = local_basis(target)
    lay = _layout(circuit, target)
    q, p = circuit.q, circuit.p
    dims = (lb.dim,) * lay["num_qudits"]
    n_data = q + p if wit is not None else q + 2 * p
    is_lct = target is Variant.LCT

    def clock_index(symbol: int, ca: int = 0, cb: int = 0) -> int:
        if is_lct:
            return lb.lct_clock(symbol, ca, cb)
        return (lb.clock_ready, lb.clock_active, lb.clock_done)[symbol][0]

    states = _data_states(circuit, horizon, wit)
    weight = (horizon + 1) ** -0.5
    amps: dict[int, complex] = {}
    n = lay["num_qudits"]

    def place(index: int, qudit: int, local: int) -> int:
        stride = 1
        for k in range(qudit + 1, n):
            stride *= dims[k]
        return index + local * stride

    bell_edges = length + 2 if is_lct else 0
    bell_scale = 2.0 ** (-bell_edges / 2)
    for t in range(horizon + 1):
        vec = states[t]
        for flat in np.flatnonzero(np.abs(vec) > 0):
            bits = [(int(flat) >> (n_data - 1 - k)) & 1 for k in range(n_data)]
            base = 0
            for j in range(q + p):
                base = place(base, j, bits[j])
            if wit is not None:
                for j in range(p):
                    base = place(
                        base, lay["partner_base"] + j, lb.pair_bits[wit[j]]
                    )
            else:
                for j in range(p):
                    base = place(
                        base,
                        lay["partner_base"] + j,
                        lb.pair_bits[bits[q + p + j]],
                    )
            amp = weight * complex(vec[flat])
            for edges in range(1 << bell_edges) if is_lct else (0,):
                index = base
                edge_bits = [
                    (edges >> (bell_edges - 1 - k)) & 1 for k in range(bell_edges)
                ]
                for s in range(length + 1):
                    symbol = 2 if s < t else (1 if s == t else 0)
                    ca, cb = 0, 0
                    if is_lct:
                        ca, cb = edge_bits[s], edge_bits[s + 1]
                    index = place(
                        index, lay["first_clock"] + s, clock_index(symbol, ca, cb)
                    )
                if is_lct:
                    index = place(index, lay["e0"], lb.pair_bits[edge_bits[0]])
                    index = place(index, lay["e1"], lb.pair_bits[edge_bits[-1]])
                amps[index] = amps.get(index, 0.0) + amp * bell_scale
    return SparseState(dims=dims, amps=amps)
