"""Reduce qudit instances to qubit instances with fixed penalty gadgets.

Each qudit of local dimension d becomes a block of consecutive qubits.  The
block is organized as n = ceil(log2 d) four-state cells (one data qubit and
one entanglement qubit each), and every cell is finally encoded into four
qubits through a fixed sixteen-dimensional penalty ``h4to2`` whose kernel is
four-dimensional.  Within a block:

* the data qubits carry the qudit value in binary (cell 0 most significant);
* ``t1`` kills data patterns outside [0, d);
* ``t2`` pins the entanglement qubits to a fixed spread state
  (:func:`t2_nullstate`) that is impure across every bipartition, so blocks
  cannot be split, merged, reordered, or partially overlapped without
  frustration;
* original clause operators act on the data qubits and are carried along
  symbolically as ``lifted`` clause records naming their blocks.

Block width is 4*n qubits by default ("p1"), or 4*2^ceil(log2 n) with
power-of-two padding ("p2"); padded data bits must read zero, which ``t1``
enforces by construction.

``dequbitize`` inverts the mapping: it checks that all named blocks are
pairwise identical-or-disjoint (a purely local pairwise predicate, applied
per index pair), renames the distinct blocks compactly in order of their
first qubit, and rebuilds the original clauses from the lifted records.  An
inconsistent instance maps to a fixed unsatisfiable two-qudit instance of
the source variant (an init and an out clause fighting over one logical
qudit on one clock).
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction

import numpy as np

from .model import (
    VARIANT_DIM,
    Clause,
    GadgetH4,
    GadgetT1,
    GadgetT2,
    Init,
    InitCopy,
    InitPair,
    Instance,
    Lifted,
    Out,
    Prop,
    QubitSource,
    Variant,
    clause_qudits,
)

#: The four orthonormal kernel states of h4to2, as exact rationals scaled by
#: one half.  Rows are amplitudes over the four-qubit computational basis
#: |b0 b1 b2 b3> with b0 most significant.
_PSI_ENTRIES: tuple[dict[int, Fraction], ...] = (
    {
        0b0000: Fraction(3, 5),
        0b0001: Fraction(-4, 5),
        0b0100: Fraction(1),
        0b1010: Fraction(1),
        0b1100: Fraction(8, 17),
        0b1111: Fraction(15, 17),
    },
    {
        0b0000: Fraction(4, 5),
        0b0001: Fraction(3, 5),
        0b0110: Fraction(-1),
        0b1001: Fraction(1),
        0b1101: Fraction(20, 29),
        0b1110: Fraction(21, 29),
    },
    {
        0b0010: Fraction(5, 13),
        0b0011: Fraction(12, 13),
        0b0111: Fraction(-1),
        0b1000: Fraction(1),
        0b1101: Fraction(-21, 29),
        0b1110: Fraction(20, 29),
    },
    {
        0b0010: Fraction(-12, 13),
        0b0011: Fraction(5, 13),
        0b0101: Fraction(-1),
        0b1011: Fraction(1),
        0b1100: Fraction(-15, 17),
        0b1111: Fraction(8, 17),
    },
)


@functools.cache
def encode_isometry() -> np.ndarray:
    """16 x 4 isometry taking cell state |m> to its four-qubit kernel state.

    Cell states order the data bit before the entanglement bit: m = 2*data
    + ent.
    """
    e = np.zeros((16, 4), dtype=complex)
    for m, entries in enumerate(_PSI_ENTRIES):
        for basis, amp in entries.items():
            e[basis, m] = float(amp) / 2.0
    e.setflags(write=False)
    return e


@functools.cache
def h4to2() -> np.ndarray:
    """Sixteen-dimensional penalty on four qubits with kernel dimension 4.

    The kernel states double as the encoding of one data/entanglement cell;
    the minimum eigenvalue of two copies on seven qubits is zero only when
    both copies sit on the same four qubits in the same order.
    """
    e = encode_isometry()
    m = np.eye(16, dtype=complex) - e @ e.conj().T
    m.setflags(write=False)
    return m


def t2_nullstate(n: int) -> np.ndarray:
    """Spread state on n >= 2 entanglement qubits (impure on every cut).

    Qubit g of a GHZ pair is rotated by R_X(g * pi / (2n)); qubit 0 keeps
    the computational frame.  Index order puts qubit 0 most significant.
    """
    if n < 2:
        raise ValueError("t2_nullstate needs n >= 2")
    state = np.zeros(2 ** n, dtype=complex)
    state[0] = 1 / math.sqrt(2)
    state[-1] = 1 / math.sqrt(2)
    theta = math.pi / (2 * n)
    tensor = state.reshape((2,) * n)
    for g in range(1, n):
        half = g * theta / 2.0
        rx = np.array(
            [
                [math.cos(half), -1j * math.sin(half)],
                [-1j * math.sin(half), math.cos(half)],
            ],
            dtype=complex,
        )
        tensor = np.moveaxis(np.tensordot(rx, tensor, axes=(1, g)), 0, g)
    return tensor.reshape(2 ** n)


def t2_penalty(n: int) -> np.ndarray:
    """I minus the projector onto :func:`t2_nullstate`."""
    gamma = t2_nullstate(n)
    return np.eye(2 ** n, dtype=complex) - np.outer(gamma, gamma.conj())


def cells_per_block(variant: Variant, padding: str = "p1") -> int:
    """Number of data/entanglement cells encoding one qudit."""
    d = VARIANT_DIM[variant]
    n = max(1, math.ceil(math.log2(d)))
    if padding == "p1":
        return n
    if padding == "p2":
        return 2 ** math.ceil(math.log2(n))
    raise ValueError("padding must be 'p1' or 'p2'")


def block_width(variant: Variant, padding: str = "p1") -> int:
    """Qubits per qudit block: four per cell."""
    return 4 * cells_per_block(variant, padding)


def qubitize_instance(instance: Instance, padding: str = "p1") -> Instance:
    """Map a qudit instance to an equivalent Qubit-variant instance.

    Qudit i owns qubits [x*i, x*i + x) with x = block_width.  Per original
    clause this emits, in order: one lifted record, then per touched qudit
    one t1, one t2, and one h4to2 per cell.  Emission is deterministic and
    duplicates across clauses are intentional (penalty sums are monotone).
    """
    if instance.variant is Variant.QUBIT:
        raise ValueError("instance is already qubit-shaped")
    x = block_width(instance.variant, padding)
    n = cells_per_block(instance.variant, padding)
    d = VARIANT_DIM[instance.variant]

    def block(qudit: int) -> tuple[int, ...]:
        return tuple(range(x * qudit, x * qudit + x))

    clauses: list[Clause] = []
    for clause in instance.clauses:
        touched = clause_qudits(clause)
        clauses.append(
            Lifted(inner=clause, blocks=tuple(block(q) for q in touched))
        )
        for q in touched:
            blk = block(q)
            clauses.append(GadgetT1(block=blk, dim=d))
            clauses.append(GadgetT2(block=blk))
            for cell in range(n):
                quad = blk[4 * cell : 4 * cell + 4]
                clauses.append(GadgetH4(qubits=quad))  # type: ignore[arg-type]
    return Instance(
        variant=Variant.QUBIT,
        num_qudits=x * instance.num_qudits,
        clauses=tuple(clauses),
        source=QubitSource(variant=instance.variant, padding=padding),
    )


# --- consistency and inversion ------------------------------------------------

def _pair_consistent(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    """Blocks must be identical or fully disjoint, checked pairwise.

    For every index pair i != j the predicate requires that positions agree
    or disagree together and that no cross match a_i == b_j occurs.  This is
    exactly the local form that survives constant-depth evaluation; global
    set comparison is implied by it.
    """
    if len(a) != len(b):
        return False
    x = len(a)
    for i in range(x):
        for j in range(x):
            if i == j:
                continue
            if (a[i] == b[i]) != (a[j] == b[j]):
                return False
            if a[i] == b[j] or a[j] == b[i]:
                return False
    return True


def _self_consistent(a: tuple[int, ...]) -> bool:
    return len(set(a)) == len(a)


def _named_blocks(instance: Instance) -> list[tuple[int, ...]]:
    blocks: list[tuple[int, ...]] = []
    for clause in instance.clauses:
        if isinstance(clause, Lifted):
            blocks.extend(clause.blocks)
        elif isinstance(clause, (GadgetT1, GadgetT2)):
            blocks.append(clause.block)
    return blocks


def check_consistency(instance: Instance) -> bool:
    """True when every named block pair is identical or fully disjoint.

    Four-qubit h4to2 groups are only checked for internal duplicates; they
    are sub-blocks by construction and carry no block identity of their own.
    """
    if instance.variant is not Variant.QUBIT:
        raise ValueError("consistency applies to Qubit instances")
    blocks = _named_blocks(instance)
    for clause in instance.clauses:
        if isinstance(clause, GadgetH4) and not _self_consistent(clause.qubits):
            return False
    for blk in blocks:
        if not _self_consistent(blk):
            return False
    distinct = sorted(set(blocks))
    for i, a in enumerate(distinct):
        for b in distinct[i + 1 :]:
            if not _pair_consistent(a, b):
                return False
    return True


def _rebuild(inner: Clause, ids: tuple[int, ...]) -> Clause:
    if isinstance(inner, Init):
        endpoint = None if inner.endpoint is None else ids[2]
        return Init(logical=ids[0], clock=ids[1], endpoint=endpoint)
    if isinstance(inner, InitCopy):
        return InitCopy(logical=ids[0], witness=ids[1], clock=ids[2])
    if isinstance(inner, InitPair):
        return InitPair(logical=ids[0], aux=ids[1], clock=ids[2])
    if isinstance(inner, Prop):
        arity = len(inner.logicals)
        return Prop(
            gate=inner.gate,
            logicals=ids[:arity],
            clock_pred=ids[arity],
            clock_succ=ids[arity + 1],
        )
    if isinstance(inner, Out):
        endpoint = None if inner.endpoint is None else ids[2]
        return Out(logical=ids[0], clock=ids[1], endpoint=endpoint)
    raise ValueError(f"cannot rebuild clause {inner!r}")


def _source_variant(instance: Instance) -> Variant:
    if instance.source is not None:
        return instance.source.variant
    for clause in instance.clauses:
        if isinstance(clause, Lifted):
            from .model import _infer_inner_variant

            return _infer_inner_variant(clause.inner)
    return Variant.SLCT


def canonical_unsat(variant: Variant) -> Instance:
    """A fixed two-qudit unsatisfiable instance of the given variant."""
    if variant is Variant.LCT:
        clauses: tuple[Clause, ...] = (
            Init(logical=0, clock=1, endpoint=2),
            Out(logical=0, clock=1, endpoint=2),
        )
        return Instance(variant=variant, num_qudits=3, clauses=clauses)
    clauses = (Init(logical=0, clock=1), Out(logical=0, clock=1))
    return Instance(variant=variant, num_qudits=2, clauses=clauses)


def dequbitize(instance: Instance) -> Instance:
    """Invert :func:`qubitize_instance` up to compact qudit renaming.

    Consistent instances yield the original clauses with qudits renamed in
    order of each block's first qubit; untouched qubits vanish.  An
    inconsistent instance yields :func:`canonical_unsat` for the source
    variant, so deciding the result rejects.
    """
    if instance.variant is not Variant.QUBIT:
        raise ValueError("dequbitize applies to Qubit instances")
    variant = _source_variant(instance)
    if not check_consistency(instance):
        return canonical_unsat(variant)
    blocks = sorted(set(_named_blocks(instance)), key=lambda b: b[0])
    ids = {blk: i for i, blk in enumerate(blocks)}
    clauses = []
    for clause in instance.clauses:
        if isinstance(clause, Lifted):
            clauses.append(
                _rebuild(clause.inner, tuple(ids[b] for b in clause.blocks))
            )
    return Instance(
        variant=variant, num_qudits=len(blocks), clauses=tuple(clauses)
    )
