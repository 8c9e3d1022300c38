"""Instance data model: variants, gates, clauses, roles, components, JSON I/O.

An instance is a list of clauses over ``num_qudits`` qudits whose local
dimension is fixed by the variant.  Clauses name qudits by index; the roles a
qudit plays (logical, clock, endpoint, witness, aux) are not stored but
derived from how clauses use it, and a qudit used in two different roles is a
hard error because the role subspace penalties of distinct roles are jointly
unsatisfiable.

The JSON wire format, shared by the CLI and the HTTP service::

    {"variant": "SLCT", "num_qudits": 3, "clauses": [
        {"type": "init", "logical": 0, "clock": 2},
        {"type": "prop", "gate": "H", "logicals": [0], "clock_pred": 2,
         "clock_succ": 1},
        {"type": "out", "logical": 0, "clock": 1}]}

LCT init/out clauses additionally carry an "endpoint" qudit.  WitnessedSLCT
adds {"type": "init_copy", "logical", "witness", "clock"} and ClassicalSLCT
adds {"type": "init_pair", "logical", "aux", "clock"}.  Qubit-variant
instances (produced by :mod:`clocksat.qubitize`) use the same envelope with
clause types "lifted", "t1", "t2" and "h4to2" plus explicit qubit-block
annotations, and an optional top-level "source" record naming the variant and
padding mode they were derived from.

Duplicate clauses are allowed everywhere (projector sums are idempotent in
null space).  Serialization is deterministic: key order and list order are
stable, so serialize(parse_instance(s)) is byte-identical for canonical
inputs and parse/serialize round-trips are exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping


class Variant(str, Enum):
    """Instance family. The value doubles as the JSON tag."""

    LCT = "LCT"
    SLCT = "SLCT"
    WITNESSED_SLCT = "WitnessedSLCT"
    CLASSICAL_SLCT = "ClassicalSLCT"
    QUBIT = "Qubit"


class Gate(str, Enum):
    """Propagation gates. HT and HHCNOT are single fused matrices."""

    H = "H"
    HT = "HT"
    HHCNOT = "HHCNOT"
    X = "X"
    XXXTOFFOLI = "XXXTOFFOLI"


class Role(str, Enum):
    LOGICAL = "logical"
    CLOCK = "clock"
    ENDPOINT = "endpoint"
    WITNESS = "witness"
    AUX = "aux"
    UNUSED = "unused"


#: Local dimension of one qudit, per variant.
VARIANT_DIM: dict[Variant, int] = {
    Variant.LCT: 17,
    Variant.SLCT: 6,
    Variant.WITNESSED_SLCT: 8,
    Variant.CLASSICAL_SLCT: 8,
    Variant.QUBIT: 2,
}

#: Number of logical qudits each gate acts on.
GATE_ARITY: dict[Gate, int] = {
    Gate.H: 1,
    Gate.HT: 1,
    Gate.HHCNOT: 2,
    Gate.X: 1,
    Gate.XXXTOFFOLI: 3,
}

_QUANTUM_GATES = (Gate.H, Gate.HT, Gate.HHCNOT)
_CLASSICAL_GATES = (Gate.X, Gate.XXXTOFFOLI)

#: Gates admitted by each variant's propagation clauses.
GATE_SETS: dict[Variant, tuple[Gate, ...]] = {
    Variant.LCT: _QUANTUM_GATES,
    Variant.SLCT: _QUANTUM_GATES,
    Variant.WITNESSED_SLCT: _QUANTUM_GATES,
    Variant.CLASSICAL_SLCT: _CLASSICAL_GATES,
    Variant.QUBIT: (),
}


class MalformedJson(ValueError):
    """Input is not valid instance JSON (syntax, schema, or clause shape)."""


class IndexOutOfRange(ValueError):
    """A clause names a qudit index outside [0, num_qudits)."""


class GateVariantMismatch(ValueError):
    """A propagation gate does not belong to the variant's gate set."""


class RoleConflict(ValueError):
    """A qudit is used in two different roles."""

    def __init__(self, qudit: int, roles: Iterable[Role]):
        self.qudit = qudit
        self.roles = tuple(sorted(set(roles), key=lambda r: r.value))
        names = ", ".join(r.value for r in self.roles)
        super().__init__(f"qudit {qudit} used in several roles: {names}")


@dataclass(frozen=True)
class Init:
    """Pin a logical qudit to |0> when its clock leaves the ready state."""

    logical: int
    clock: int
    endpoint: int | None = None  # LCT only


@dataclass(frozen=True)
class InitCopy:
    """Pin a logical qudit to the classical state of a witness qudit."""

    logical: int
    witness: int
    clock: int


@dataclass(frozen=True)
class InitPair:
    """Pin a logical qudit into a Bell pair with an aux qudit."""

    logical: int
    aux: int
    clock: int


@dataclass(frozen=True)
class Prop:
    """One computation step: apply `gate` while the clock pair advances."""

    gate: Gate
    logicals: tuple[int, ...]
    clock_pred: int
    clock_succ: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "logicals", tuple(self.logicals))


@dataclass(frozen=True)
class Out:
    """Require the answer qudit to be |1> once its clock is done."""

    logical: int
    clock: int
    endpoint: int | None = None  # LCT only


@dataclass(frozen=True)
class GadgetH4:
    """Qubit variant: four-qubit penalty whose kernel encodes one 4-dim qudit."""

    qubits: tuple[int, int, int, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubits", tuple(self.qubits))


@dataclass(frozen=True)
class GadgetT1:
    """Qubit variant: kill encoded data states >= dim inside one qudit block."""

    block: tuple[int, ...]
    dim: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "block", tuple(self.block))


@dataclass(frozen=True)
class GadgetT2:
    """Qubit variant: pin the block's entanglement qubits to the spread state."""

    block: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "block", tuple(self.block))


@dataclass(frozen=True)
class Lifted:
    """Qubit variant: an original qudit clause acting through qubit blocks.

    ``blocks[i]`` lists, in order, the qubits encoding the i-th qudit slot of
    the inner clause (slot order as reported by :func:`clause_qudits`).
    """

    inner: "Clause"
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", tuple(tuple(b) for b in self.blocks))


Clause = Init | InitCopy | InitPair | Prop | Out | GadgetH4 | GadgetT1 | GadgetT2 | Lifted


@dataclass(frozen=True)
class QubitSource:
    """Provenance of a Qubit-variant instance: what it encodes and how."""

    variant: Variant
    padding: str = "p1"  # "p1" tight blocks, "p2" power-of-two blocks


@dataclass(frozen=True)
class Instance:
    variant: Variant
    num_qudits: int
    clauses: tuple[Clause, ...]
    source: QubitSource | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "clauses", tuple(self.clauses))

    @property
    def dim(self) -> int:
        return VARIANT_DIM[self.variant]


@dataclass(frozen=True)
class ClockComponent:
    """A connected component of the clause-sharing graph on used qudits."""

    qudits: frozenset[int]
    clause_indices: tuple[int, ...]


RoleMap = dict[int, Role]


def clause_qudits(clause: Clause) -> tuple[int, ...]:
    """Touched qudits in canonical slot order (logicals, aux-like, clocks)."""
    if isinstance(clause, Init):
        base = (clause.logical, clause.clock)
        return base if clause.endpoint is None else base + (clause.endpoint,)
    if isinstance(clause, InitCopy):
        return (clause.logical, clause.witness, clause.clock)
    if isinstance(clause, InitPair):
        return (clause.logical, clause.aux, clause.clock)
    if isinstance(clause, Prop):
        return clause.logicals + (clause.clock_pred, clause.clock_succ)
    if isinstance(clause, Out):
        base = (clause.logical, clause.clock)
        return base if clause.endpoint is None else base + (clause.endpoint,)
    if isinstance(clause, GadgetH4):
        return clause.qubits
    if isinstance(clause, (GadgetT1, GadgetT2)):
        return clause.block
    if isinstance(clause, Lifted):
        return tuple(q for block in clause.blocks for q in block)
    raise TypeError(f"unknown clause {clause!r}")


def _clause_roles(clause: Clause) -> tuple[tuple[int, Role], ...]:
    if isinstance(clause, Init):
        out = [(clause.logical, Role.LOGICAL), (clause.clock, Role.CLOCK)]
        if clause.endpoint is not None:
            out.append((clause.endpoint, Role.ENDPOINT))
        return tuple(out)
    if isinstance(clause, InitCopy):
        return (
            (clause.logical, Role.LOGICAL),
            (clause.witness, Role.WITNESS),
            (clause.clock, Role.CLOCK),
        )
    if isinstance(clause, InitPair):
        return (
            (clause.logical, Role.LOGICAL),
            (clause.aux, Role.AUX),
            (clause.clock, Role.CLOCK),
        )
    if isinstance(clause, Prop):
        out = [(q, Role.LOGICAL) for q in clause.logicals]
        out.append((clause.clock_pred, Role.CLOCK))
        out.append((clause.clock_succ, Role.CLOCK))
        return tuple(out)
    if isinstance(clause, Out):
        out = [(clause.logical, Role.LOGICAL), (clause.clock, Role.CLOCK)]
        if clause.endpoint is not None:
            out.append((clause.endpoint, Role.ENDPOINT))
        return tuple(out)
    return ()  # Qubit-variant clauses carry no role structure


def assign_roles(instance: Instance) -> RoleMap:
    """Derive each qudit's role from clause usage.

    Raises RoleConflict at the first qudit (in clause scan order) that is
    used in two different roles.  Untouched qudits map to Role.UNUSED; all
    qubits of a Qubit-variant instance do as well.
    """
    roles: RoleMap = {q: Role.UNUSED for q in range(instance.num_qudits)}
    seen: dict[int, Role] = {}
    for clause in instance.clauses:
        for qudit, role in _clause_roles(clause):
            prior = seen.get(qudit)
            if prior is None:
                seen[qudit] = role
                roles[qudit] = role
            elif prior is not role:
                raise RoleConflict(qudit, (prior, role))
    return roles


def components(instance: Instance) -> list[ClockComponent]:
    """Connected components of the qudit graph linked by shared clauses.

    All qudits of one clause are pairwise connected; for LCT this makes
    endpoint qudits join the component of their clock.  Unused qudits form
    no components.  Components are ordered by their smallest qudit.
    """
    parent: dict[int, int] = {}

    def find(a: int) -> int:
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for clause in instance.clauses:
        qs = clause_qudits(clause)
        for q in qs:
            parent.setdefault(q, q)
        for q in qs[1:]:
            union(qs[0], q)

    groups: dict[int, set[int]] = {}
    for q in parent:
        groups.setdefault(find(q), set()).add(q)
    comps = []
    for root in sorted(groups):
        members = frozenset(groups[root])
        idxs = tuple(
            i
            for i, clause in enumerate(instance.clauses)
            if clause_qudits(clause) and clause_qudits(clause)[0] in members
        )
        comps.append(ClockComponent(qudits=members, clause_indices=idxs))
    return comps


# --- JSON parsing -----------------------------------------------------------

def _require(obj: Mapping, key: str, kind: type, where: str):
    if key not in obj:
        raise MalformedJson(f"{where}: missing key '{key}'")
    value = obj[key]
    if kind is int and (not isinstance(value, int) or isinstance(value, bool)):
        raise MalformedJson(f"{where}: '{key}' must be an integer")
    if kind is not int and not isinstance(value, kind):
        raise MalformedJson(f"{where}: '{key}' must be {kind.__name__}")
    return value


def _int_list(obj: Mapping, key: str, where: str) -> tuple[int, ...]:
    value = _require(obj, key, list, where)
    for entry in value:
        if not isinstance(entry, int) or isinstance(entry, bool):
            raise MalformedJson(f"{where}: '{key}' must hold integers")
    return tuple(value)


def _parse_gate(name: str, variant: Variant, where: str) -> Gate:
    try:
        gate = Gate(name)
    except ValueError:
        raise GateVariantMismatch(f"{where}: unknown gate '{name}'") from None
    if gate not in GATE_SETS[variant]:
        raise GateVariantMismatch(
            f"{where}: gate {gate.value} not available in variant {variant.value}"
        )
    return gate


def _parse_clause(obj, variant: Variant, index: int) -> Clause:
    where = f"clause {index}"
    if not isinstance(obj, dict):
        raise MalformedJson(f"{where}: must be an object")
    ctype = _require(obj, "type", str, where)
    is_lct = variant is Variant.LCT

    if ctype == "init":
        if variant is Variant.QUBIT:
            raise MalformedJson(f"{where}: 'init' not valid for Qubit instances")
        endpoint = None
        if is_lct:
            endpoint = _require(obj, "endpoint", int, where)
        elif "endpoint" in obj:
            raise MalformedJson(f"{where}: 'endpoint' only valid for LCT")
        return Init(
            logical=_require(obj, "logical", int, where),
            clock=_require(obj, "clock", int, where),
            endpoint=endpoint,
        )
    if ctype == "init_copy":
        if variant is not Variant.WITNESSED_SLCT:
            raise MalformedJson(f"{where}: 'init_copy' requires WitnessedSLCT")
        return InitCopy(
            logical=_require(obj, "logical", int, where),
            witness=_require(obj, "witness", int, where),
            clock=_require(obj, "clock", int, where),
        )
    if ctype == "init_pair":
        if variant is not Variant.CLASSICAL_SLCT:
            raise MalformedJson(f"{where}: 'init_pair' requires ClassicalSLCT")
        return InitPair(
            logical=_require(obj, "logical", int, where),
            aux=_require(obj, "aux", int, where),
            clock=_require(obj, "clock", int, where),
        )
    if ctype == "prop":
        if variant is Variant.QUBIT:
            raise MalformedJson(f"{where}: 'prop' not valid for Qubit instances")
        gate = _parse_gate(_require(obj, "gate", str, where), variant, where)
        logicals = _int_list(obj, "logicals", where)
        if len(logicals) != GATE_ARITY[gate]:
            raise GateVariantMismatch(
                f"{where}: gate {gate.value} needs {GATE_ARITY[gate]} logicals,"
                f" got {len(logicals)}"
            )
        if len(set(logicals)) != len(logicals):
            raise MalformedJson(f"{where}: repeated logical qudit")
        pred = _require(obj, "clock_pred", int, where)
        succ = _require(obj, "clock_succ", int, where)
        if pred == succ:
            raise MalformedJson(f"{where}: clock_pred equals clock_succ")
        return Prop(gate=gate, logicals=logicals, clock_pred=pred, clock_succ=succ)
    if ctype == "out":
        if variant is Variant.QUBIT:
            raise MalformedJson(f"{where}: 'out' not valid for Qubit instances")
        endpoint = None
        if is_lct:
            endpoint = _require(obj, "endpoint", int, where)
        elif "endpoint" in obj:
            raise MalformedJson(f"{where}: 'endpoint' only valid for LCT")
        return Out(
            logical=_require(obj, "logical", int, where),
            clock=_require(obj, "clock", int, where),
            endpoint=endpoint,
        )

    if variant is not Variant.QUBIT:
        raise MalformedJson(f"{where}: unknown clause type '{ctype}'")
    if ctype == "h4to2":
        qubits = _int_list(obj, "qubits", where)
        if len(qubits) != 4 or len(set(qubits)) != 4:
            raise MalformedJson(f"{where}: 'h4to2' needs 4 distinct qubits")
        return GadgetH4(qubits=qubits)  # type: ignore[arg-type]
    if ctype == "t1":
        block = _int_list(obj, "block", where)
        dim = _require(obj, "dim", int, where)
        if dim < 2:
            raise MalformedJson(f"{where}: 't1' dim must be >= 2")
        if len(block) % 4 or not block or len(set(block)) != len(block):
            raise MalformedJson(f"{where}: 't1' block must be 4n distinct qubits")
        return GadgetT1(block=block, dim=dim)
    if ctype == "t2":
        block = _int_list(obj, "block", where)
        if len(block) % 4 or len(block) < 8 or len(set(block)) != len(block):
            raise MalformedJson(f"{where}: 't2' block must be 4n qubits, n >= 2")
        return GadgetT2(block=block)
    if ctype == "lifted":
        inner_obj = _require(obj, "inner", dict, where)
        src = _require(obj, "inner_variant", str, where)
        try:
            inner_variant = Variant(src)
        except ValueError:
            raise MalformedJson(f"{where}: unknown inner_variant '{src}'") from None
        if inner_variant is Variant.QUBIT:
            raise MalformedJson(f"{where}: lifted clauses cannot nest Qubit")
        inner = _parse_clause(inner_obj, inner_variant, index)
        blocks_raw = _require(obj, "blocks", list, where)
        blocks = []
        for b in blocks_raw:
            if not isinstance(b, list):
                raise MalformedJson(f"{where}: 'blocks' must be lists of qubits")
            for entry in b:
                if not isinstance(entry, int) or isinstance(entry, bool):
                    raise MalformedJson(f"{where}: blocks must hold integers")
            blocks.append(tuple(b))
        if len(blocks) != len(clause_qudits(inner)):
            raise MalformedJson(
                f"{where}: need one block per inner clause qudit"
            )
        sizes = {len(b) for b in blocks}
        if len(sizes) != 1 or next(iter(sizes)) % 4 or not next(iter(sizes)):
            raise MalformedJson(f"{where}: blocks must share one 4n size")
        flat = [q for b in blocks for q in b]
        if len(set(flat)) != len(flat):
            raise MalformedJson(f"{where}: blocks overlap")
        return Lifted(inner=inner, blocks=tuple(blocks))
    raise MalformedJson(f"{where}: unknown clause type '{ctype}'")


def parse_instance(text: str | bytes) -> Instance:
    """Parse instance JSON, validating schema, indices, and gate sets."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise MalformedJson("instance must be a JSON object")
    if "op" in obj:
        raise MalformedJson(
            "combined instances must be parsed with clocksat.combinators"
        )
    vname = _require(obj, "variant", str, "instance")
    try:
        variant = Variant(vname)
    except ValueError:
        raise MalformedJson(f"unknown variant '{vname}'") from None
    num_qudits = _require(obj, "num_qudits", int, "instance")
    if num_qudits < 0:
        raise MalformedJson("num_qudits must be >= 0")
    raw_clauses = _require(obj, "clauses", list, "instance")

    clauses = tuple(
        _parse_clause(raw, variant, i) for i, raw in enumerate(raw_clauses)
    )
    source = None
    if "source" in obj:
        if variant is not Variant.QUBIT:
            raise MalformedJson("'source' only valid for Qubit instances")
        src = obj["source"]
        if not isinstance(src, dict):
            raise MalformedJson("'source' must be an object")
        try:
            sv = Variant(_require(src, "variant", str, "source"))
        except ValueError:
            raise MalformedJson("source: unknown variant") from None
        padding = _require(src, "padding", str, "source")
        if padding not in ("p1", "p2"):
            raise MalformedJson("source: padding must be 'p1' or 'p2'")
        source = QubitSource(variant=sv, padding=padding)

    instance = Instance(
        variant=variant, num_qudits=num_qudits, clauses=clauses, source=source
    )
    for i, clause in enumerate(clauses):
        for q in clause_qudits(clause):
            if not 0 <= q < num_qudits:
                raise IndexOutOfRange(
                    f"clause {i}: qudit {q} outside [0, {num_qudits})"
                )
    return instance


# --- serialization ----------------------------------------------------------

def clause_to_obj(clause: Clause) -> dict:
    if isinstance(clause, Init):
        obj: dict = {"type": "init", "logical": clause.logical, "clock": clause.clock}
        if clause.endpoint is not None:
            obj["endpoint"] = clause.endpoint
        return obj
    if isinstance(clause, InitCopy):
        return {
            "type": "init_copy",
            "logical": clause.logical,
            "witness": clause.witness,
            "clock": clause.clock,
        }
    if isinstance(clause, InitPair):
        return {
            "type": "init_pair",
            "logical": clause.logical,
            "aux": clause.aux,
            "clock": clause.clock,
        }
    if isinstance(clause, Prop):
        return {
            "type": "prop",
            "gate": clause.gate.value,
            "logicals": list(clause.logicals),
            "clock_pred": clause.clock_pred,
            "clock_succ": clause.clock_succ,
        }
    if isinstance(clause, Out):
        obj = {"type": "out", "logical": clause.logical, "clock": clause.clock}
        if clause.endpoint is not None:
            obj["endpoint"] = clause.endpoint
        return obj
    if isinstance(clause, GadgetH4):
        return {"type": "h4to2", "qubits": list(clause.qubits)}
    if isinstance(clause, GadgetT1):
        return {"type": "t1", "block": list(clause.block), "dim": clause.dim}
    if isinstance(clause, GadgetT2):
        return {"type": "t2", "block": list(clause.block)}
    if isinstance(clause, Lifted):
        inner_variant = _infer_inner_variant(clause.inner)
        return {
            "type": "lifted",
            "inner": clause_to_obj(clause.inner),
            "inner_variant": inner_variant.value,
            "blocks": [list(b) for b in clause.blocks],
        }
    raise TypeError(f"unknown clause {clause!r}")


def _infer_inner_variant(clause: Clause) -> Variant:
    # The inner clause pins the source family well enough to re-parse it.
    if isinstance(clause, InitCopy):
        return Variant.WITNESSED_SLCT
    if isinstance(clause, InitPair):
        return Variant.CLASSICAL_SLCT
    if isinstance(clause, (Init, Out)) and clause.endpoint is not None:
        return Variant.LCT
    if isinstance(clause, Prop):
        if clause.gate in _CLASSICAL_GATES:
            return Variant.CLASSICAL_SLCT
        return Variant.SLCT
    return Variant.SLCT


def instance_to_obj(instance: Instance) -> dict:
    obj: dict = {
        "variant": instance.variant.value,
        "num_qudits": instance.num_qudits,
        "clauses": [clause_to_obj(c) for c in instance.clauses],
    }
    if instance.source is not None:
        obj["source"] = {
            "variant": instance.source.variant.value,
            "padding": instance.source.padding,
        }
    return obj


def serialize(instance: Instance) -> str:
    """Instance to canonical JSON text (stable key and clause order)."""
    return json.dumps(instance_to_obj(instance), indent=2, sort_keys=False)


# --- DOT export -------------------------------------------------------------

_ROLE_COLORS = {
    Role.LOGICAL: "lightblue",
    Role.CLOCK: "orange",
    Role.ENDPOINT: "palegreen",
    Role.WITNESS: "plum",
    Role.AUX: "khaki",
    Role.UNUSED: "lightgray",
}


def export_dot(instance: Instance) -> str:
    """Graphviz DOT view: role-colored qudit nodes, directed prop edges.

    Non-prop clauses appear as dashed undirected edges from the clause's
    non-clock qudits to its clock.  Output is deterministic.
    """
    try:
        roles = assign_roles(instance)
    except RoleConflict:
        roles = {q: Role.UNUSED for q in range(instance.num_qudits)}
    lines = ["digraph instance {"]
    lines.append('  rankdir="LR";')
    for q in range(instance.num_qudits):
        color = _ROLE_COLORS[roles[q]]
        lines.append(
            f'  q{q} [label="q{q}\\n{roles[q].value}" style=filled '
            f"fillcolor={color}];"
        )
    for i, clause in enumerate(instance.clauses):
        if isinstance(clause, Prop):
            targets = ",".join(str(q) for q in clause.logicals)
            lines.append(
                f"  q{clause.clock_pred} -> q{clause.clock_succ} "
                f'[label="{clause.gate.value}({targets}) #{i}"];'
            )
            for q in clause.logicals:
                lines.append(
                    f"  q{q} -> q{clause.clock_succ} [style=dotted dir=none];"
                )
        else:
            qs = clause_qudits(clause)
            if not qs:
                continue
            label = clause_to_obj(clause)["type"]
            anchor = qs[-1]
            for q in qs[:-1]:
                lines.append(
                    f'  q{q} -> q{anchor} [style=dashed dir=none label="{label} #{i}"];'
                )
    lines.append("}")
    return "\n".join(lines) + "\n"
