"""Clause operators: local bases, semidefinite forms, projectors, kernels.

Every clause maps to a positive semidefinite operator on the tensor product
of its touched qudits.  The operator is a sum of Kronecker-product terms
(role penalties, clock-transition penalties, gate work terms, Bell-pair
penalties), which this module keeps in factored form: the largest clause
spaces (17^4 for two-logical LCT propagation, 8^5 for Toffoli propagation)
are far past dense feasibility, while every factor is at most the size of a
one- or two-qudit block.

Kernels are computed exactly on the role-allowed computational block.  The
role penalties confine any null vector to an axis-aligned subspace (logical
slots to the three logical states, clock slots to the clock states, and so
on), so the operator restricted to that block is small enough for a dense
eigendecomposition regardless of the full dimension.  Eigenvalues below
``EIGEN_CUTOFF`` count as zero.

Local basis layout (index -> state):

=============  ====================================================
variant        layout
=============  ====================================================
SLCT (6)       0,1 logical; 2 undefined; 3 ready; 4 active; 5 done
Witnessed (8)  0,1 logical; 2 undefined; 3,4 witness bits; 5,6,7 clock
Classical (8)  0,1 logical; 2 undefined; 3,4 aux bits; 5,6,7 clock
LCT (17)       0,1 logical; 2 undefined; 3,4 endpoint bits;
               5 + 4*symbol + 2*ca + cb for symbol in (ready, active,
               done) and chain bits ca, cb
Qubit (2)      computational qubit
=============  ====================================================
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .model import (
    GATE_ARITY,
    GATE_SETS,
    VARIANT_DIM,
    Clause,
    Gate,
    GadgetH4,
    GadgetT1,
    GadgetT2,
    Init,
    InitCopy,
    InitPair,
    Lifted,
    Out,
    Prop,
    Role,
    Variant,
)

#: Eigenvalues below this count as exact zeros when extracting kernels.
EIGEN_CUTOFF = 1e-9

#: Largest dimension for which build_projector returns a dense array.
DENSE_PROJECTOR_DIM = 4096


class DimensionMismatch(ValueError):
    """Vector or matrix shape does not match the operator's space."""


class UnsupportedOperator(ValueError):
    """The clause has no materializable operator at feasible size."""


# --- local bases -------------------------------------------------------------

@dataclass(frozen=True)
class LocalBasis:
    """Index bookkeeping for one qudit of a given variant."""

    variant: Variant
    dim: int
    logical: tuple[int, ...]        # |0>, |1>, |?>
    defined: tuple[int, ...]        # |0>, |1>
    question: int | None
    pair_bits: tuple[int, ...]      # witness / aux / endpoint bit states
    clock_ready: tuple[int, ...]
    clock_active: tuple[int, ...]
    clock_done: tuple[int, ...]

    @property
    def clock(self) -> tuple[int, ...]:
        return self.clock_ready + self.clock_active + self.clock_done

    def lct_clock(self, symbol: int, ca: int, cb: int) -> int:
        if self.variant is not Variant.LCT:
            raise DimensionMismatch("chain bits exist only for LCT")
        return 5 + 4 * symbol + 2 * ca + cb


@functools.cache
def local_basis(variant: Variant) -> LocalBasis:
    dim = VARIANT_DIM[variant]
    if variant is Variant.SLCT:
        return LocalBasis(variant, dim, (0, 1, 2), (0, 1), 2, (), (3,), (4,), (5,))
    if variant in (Variant.WITNESSED_SLCT, Variant.CLASSICAL_SLCT):
        return LocalBasis(
            variant, dim, (0, 1, 2), (0, 1), 2, (3, 4), (5,), (6,), (7,)
        )
    if variant is Variant.LCT:
        sym = lambda s: tuple(5 + 4 * s + j for j in range(4))
        return LocalBasis(variant, dim, (0, 1, 2), (0, 1), 2, (3, 4), sym(0), sym(1), sym(2))
    if variant is Variant.QUBIT:
        return LocalBasis(variant, dim, (), (), None, (), (), (), ())
    raise DimensionMismatch(f"no local basis for {variant}")


# --- factored operators ------------------------------------------------------

@dataclass(frozen=True)
class Operator:
    """Sum of Kronecker products over a fixed slot partition.

    ``dims[i]`` is the local dimension of slot i.  ``partition`` groups
    adjacent slots; every term supplies one dense factor per group, and the
    full operator is ``sum(coeff * kron(*factors))``.  The dense form is only
    materialized on demand.
    """

    dims: tuple[int, ...]
    partition: tuple[tuple[int, ...], ...]
    terms: tuple[tuple[complex, tuple[np.ndarray, ...]], ...]

    @property
    def dim(self) -> int:
        return math.prod(self.dims)

    def group_dims(self) -> tuple[int, ...]:
        return tuple(math.prod(self.dims[s] for s in g) for g in self.partition)

    def to_dense(self, max_dim: int = 8192) -> np.ndarray:
        if self.dim > max_dim:
            raise DimensionMismatch(
                f"dense form would be {self.dim}x{self.dim} (cap {max_dim})"
            )
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for coeff, factors in self.terms:
            acc = np.array([[coeff]], dtype=complex)
            for f in factors:
                acc = np.kron(acc, f)
            out += acc
        return out

    def restricted(self, allowed: tuple[tuple[int, ...], ...]) -> np.ndarray:
        """Dense form on the product of per-slot allowed index sets."""
        if len(allowed) != len(self.dims):
            raise DimensionMismatch("one allowed index set per slot required")
        sels = []
        for group in self.partition:
            gdims = [self.dims[s] for s in group]
            combos = [0]
            for s, gd in zip(group, gdims):
                combos = [c * gd + i for c in combos for i in allowed[s]]
            sels.append(np.asarray(combos, dtype=int))
        size = math.prod(len(s) for s in sels)
        out = np.zeros((size, size), dtype=complex)
        for coeff, factors in self.terms:
            acc = np.array([[coeff]], dtype=complex)
            for f, sel in zip(factors, sels):
                acc = np.kron(acc, f[np.ix_(sel, sel)])
            out += acc
        return out

    def apply(self, vec: np.ndarray) -> np.ndarray:
        if vec.shape != (self.dim,):
            raise DimensionMismatch(f"vector must have shape ({self.dim},)")
        tensor_in = vec.reshape(self.dims)
        out = np.zeros(self.dims, dtype=complex)
        for coeff, factors in self.terms:
            work = tensor_in
            for group, f in zip(self.partition, factors):
                gdims = tuple(self.dims[s] for s in group)
                k = len(gdims)
                mat = f.reshape(gdims + gdims)
                work = np.tensordot(mat, work, axes=(tuple(range(k, 2 * k)), group))
                # tensordot left the group's output axes in front
                work = np.moveaxis(work, tuple(range(k)), group)
            out = out + coeff * work
        return out.reshape(self.dim)


def _ket(dim: int, i: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[i] = 1.0
    return v


def _proj(dim: int, indices: tuple[int, ...]) -> np.ndarray:
    m = np.zeros((dim, dim), dtype=complex)
    for i in indices:
        m[i, i] = 1.0
    return m


def _transfer(dim: int, pairs: list[tuple[int, int]]) -> np.ndarray:
    """sum over (to, from) pairs of |to><from|."""
    m = np.zeros((dim, dim), dtype=complex)
    for to, frm in pairs:
        m[to, frm] += 1.0
    return m


# --- gates -------------------------------------------------------------------

_SQ2 = math.sqrt(2.0)


@functools.cache
def gate_matrix(gate: Gate) -> np.ndarray:
    """Unitary of a propagation gate on its logical qubits (2^arity)."""
    h = np.array([[1, 1], [1, -1]], dtype=complex) / _SQ2
    if gate is Gate.H:
        m = h
    elif gate is Gate.HT:
        t = np.diag([1.0, np.exp(1j * np.pi / 4)])
        m = h @ t
    elif gate is Gate.HHCNOT:
        cnot = np.eye(4, dtype=complex)[[0, 1, 3, 2]]
        m = np.kron(h, h) @ cnot
    elif gate is Gate.X:
        m = np.array([[0, 1], [1, 0]], dtype=complex)
    elif gate is Gate.XXXTOFFOLI:
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        toffoli = np.eye(8, dtype=complex)[[0, 1, 2, 3, 4, 5, 7, 6]]
        m = np.kron(np.kron(x, x), x) @ toffoli
    else:
        raise DimensionMismatch(f"unknown gate {gate}")
    m.setflags(write=False)
    return m


# --- variant sub-blocks ------------------------------------------------------

def _symbol_proj(lb: LocalBasis, symbol: str) -> np.ndarray:
    idx = {"r": lb.clock_ready, "a": lb.clock_active, "d": lb.clock_done}[symbol]
    return _proj(lb.dim, idx)


def _symbol_transfer(lb: LocalBasis, to: str, frm: str) -> np.ndarray:
    """|to><frm| on the clock symbol, identity on LCT chain bits."""
    names = {"r": lb.clock_ready, "a": lb.clock_active, "d": lb.clock_done}
    return _transfer(lb.dim, list(zip(names[to], names[frm])))


def _chain_transfer(lb: LocalBasis, which: str, x: int, y: int) -> np.ndarray:
    """|x><y| on one LCT chain bit, identity on symbol and the other bit."""
    pairs = []
    for s in range(3):
        for other in range(2):
            if which == "ca":
                pairs.append((lb.lct_clock(s, x, other), lb.lct_clock(s, y, other)))
            else:
                pairs.append((lb.lct_clock(s, other, x), lb.lct_clock(s, other, y)))
    return _transfer(lb.dim, pairs)


def _endpoint_transfer(lb: LocalBasis, x: int, y: int) -> np.ndarray:
    return _transfer(lb.dim, [(lb.pair_bits[x], lb.pair_bits[y])])


def role_penalty(variant: Variant, role: Role) -> np.ndarray:
    """Projector onto the complement of a role's legal local states."""
    lb = local_basis(variant)
    eye = np.eye(lb.dim, dtype=complex)
    if role is Role.LOGICAL:
        return eye - _proj(lb.dim, lb.logical)
    if role is Role.CLOCK:
        return eye - _proj(lb.dim, lb.clock)
    if role in (Role.ENDPOINT, Role.WITNESS, Role.AUX):
        if not lb.pair_bits:
            raise DimensionMismatch(f"{variant.value} has no {role.value} states")
        return eye - _proj(lb.dim, lb.pair_bits)
    raise DimensionMismatch(f"no penalty for role {role}")


def allowed_indices(variant: Variant, role: Role) -> tuple[int, ...]:
    """Local indices a qudit of this role may occupy in a null vector."""
    lb = local_basis(variant)
    if role is Role.LOGICAL:
        return lb.logical
    if role is Role.CLOCK:
        return lb.clock
    if role in (Role.ENDPOINT, Role.WITNESS, Role.AUX):
        return lb.pair_bits
    if role is Role.UNUSED:
        return tuple(range(lb.dim))
    raise DimensionMismatch(f"no allowed set for role {role}")


def clock_forward(variant: Variant) -> np.ndarray:
    """Two-clock penalty admitting exactly the pairs rr, ar, da, dd.

    The predecessor must be past ready before the successor leaves ready,
    and once the predecessor is done the successor must have started.
    """
    lb = local_basis(variant)
    eye = np.eye(lb.dim, dtype=complex)
    pr = _symbol_proj(lb, "r")
    pa = _symbol_proj(lb, "a")
    pd = _symbol_proj(lb, "d")
    return (
        np.kron(pr, eye - pr) + np.kron(pa, eye - pr) + np.kron(pd, pr)
    )


def clock_frozen(variant: Variant) -> np.ndarray:
    """Two-clock penalty admitting only rr and ar: movement never passes."""
    lb = local_basis(variant)
    eye = np.eye(lb.dim, dtype=complex)
    pr = _symbol_proj(lb, "r")
    pa = _symbol_proj(lb, "a")
    pd = _symbol_proj(lb, "d")
    return np.kron(pr, eye - pr) + np.kron(pa, eye - pr) + np.kron(pd, eye)


def _defined_embed(lb: LocalBasis, arity: int, mat: np.ndarray) -> np.ndarray:
    """Embed a 2^arity matrix onto the defined-logical product block."""
    dim = lb.dim ** arity
    flat = [0]
    for _ in range(arity):
        flat = [f * lb.dim + b for f in flat for b in lb.defined]
    out = np.zeros((dim, dim), dtype=complex)
    out[np.ix_(flat, flat)] = mat
    return out


def work_penalty(variant: Variant, gate: Gate) -> np.ndarray:
    """Gate work projector on logicals (x) predecessor (x) successor clock.

    Annihilates exactly span{ phi (x) |ar> + (U phi) (x) |da> } plus
    everything outside the defined-logical block: the superpositions a
    correct half-step of the computation passes through.
    """
    lb = local_basis(variant)
    arity = GATE_ARITY[gate]
    u = gate_matrix(gate)
    pd_block = _defined_embed(lb, arity, np.eye(2 ** arity, dtype=complex))
    u_block = _defined_embed(lb, arity, u)
    pa, pr, pdn = (_symbol_proj(lb, s) for s in ("a", "r", "d"))
    t_da = _symbol_transfer(lb, "d", "a")
    t_ar = _symbol_transfer(lb, "a", "r")
    term = (
        np.kron(pd_block, np.kron(pa, pr))
        + np.kron(pd_block, np.kron(pdn, pa))
        - np.kron(u_block, np.kron(t_da, t_ar))
        - np.kron(u_block.conj().T, np.kron(t_da.conj().T, t_ar.conj().T))
    )
    return 0.5 * term


def bell_penalty(variant: Variant, kind: str) -> np.ndarray:
    """Identity minus the padded Bell projector on a two-qudit bit pair.

    kind: "start" pairs the clock's first chain bit with an endpoint bit,
    "stop" pairs the second chain bit with an endpoint bit, "chain" pairs a
    predecessor's second chain bit with a successor's first, and "pair"
    (ClassicalSLCT) pairs a logical qudit's defined states with aux bits.
    """
    lb = local_basis(variant)
    eye2 = np.eye(lb.dim ** 2, dtype=complex)
    if kind == "pair":
        if variant is not Variant.CLASSICAL_SLCT:
            raise DimensionMismatch("pair Bell requires ClassicalSLCT")
        left = lambda x, y: _transfer(lb.dim, [(lb.defined[x], lb.defined[y])])
        right = lambda x, y: _transfer(lb.dim, [(lb.pair_bits[x], lb.pair_bits[y])])
    else:
        if variant is not Variant.LCT:
            raise DimensionMismatch("chain-bit Bells require LCT")
        if kind == "start":
            left = lambda x, y: _chain_transfer(lb, "ca", x, y)
            right = lambda x, y: _endpoint_transfer(lb, x, y)
        elif kind == "stop":
            left = lambda x, y: _chain_transfer(lb, "cb", x, y)
            right = lambda x, y: _endpoint_transfer(lb, x, y)
        elif kind == "chain":
            left = lambda x, y: _chain_transfer(lb, "cb", x, y)
            right = lambda x, y: _chain_transfer(lb, "ca", x, y)
        else:
            raise DimensionMismatch(f"unknown Bell kind '{kind}'")
    bell = np.zeros_like(eye2)
    for x in range(2):
        for y in range(2):
            bell += 0.5 * np.kron(left(x, y), right(x, y))
    return eye2 - bell


def copy_penalty(variant: Variant) -> np.ndarray:
    """WitnessedSLCT logical-witness agreement penalty (identity minus the
    two classical agreement states)."""
    lb = local_basis(variant)
    if variant is not Variant.WITNESSED_SLCT:
        raise DimensionMismatch("copy penalty requires WitnessedSLCT")
    eye2 = np.eye(lb.dim ** 2, dtype=complex)
    out = eye2.copy()
    for bit in range(2):
        v = np.kron(_ket(lb.dim, lb.defined[bit]), _ket(lb.dim, lb.pair_bits[bit]))
        out -= np.outer(v, v.conj())
    return out


def subprojectors(variant: Variant) -> dict[str, np.ndarray]:
    """Reference penalty projectors of the variant, keyed by function.

    Every returned matrix is an orthogonal projector; tests verify the
    algebra and that all entries are quarter-integer combinations over
    {1, i, sqrt2, i*sqrt2}.
    """
    lb = local_basis(variant)
    if variant is Variant.QUBIT:
        return {}
    out: dict[str, np.ndarray] = {
        "role-logical": role_penalty(variant, Role.LOGICAL),
        "role-clock": role_penalty(variant, Role.CLOCK),
        "start": _symbol_proj(lb, "r"),
        "stop": _symbol_proj(lb, "d"),
        "defined": _proj(lb.dim, lb.defined),
        "clock-forward": clock_forward(variant),
        "clock-frozen": clock_frozen(variant),
    }
    for gate in GATE_SETS[variant]:
        out[f"work-{gate.value}"] = work_penalty(variant, gate)
    if variant is Variant.LCT:
        out["role-endpoint"] = role_penalty(variant, Role.ENDPOINT)
        out["bell-start"] = bell_penalty(variant, "start")
        out["bell-stop"] = bell_penalty(variant, "stop")
        out["bell-chain"] = bell_penalty(variant, "chain")
    if variant is Variant.WITNESSED_SLCT:
        out["role-witness"] = role_penalty(variant, Role.WITNESS)
        out["copy-agree"] = copy_penalty(variant)
    if variant is Variant.CLASSICAL_SLCT:
        out["role-aux"] = role_penalty(variant, Role.AUX)
        out["bell-pair"] = bell_penalty(variant, "pair")
    return out


# --- clause operators --------------------------------------------------------

def _identity_factors(dims_by_group: tuple[int, ...]) -> tuple[np.ndarray, ...]:
    return tuple(np.eye(d, dtype=complex) for d in dims_by_group)


class _Builder:
    """Accumulates Kronecker terms over a fixed partition."""

    def __init__(self, dims: tuple[int, ...], partition: tuple[tuple[int, ...], ...]):
        self.dims = dims
        self.partition = partition
        self.gdims = tuple(math.prod(dims[s] for s in g) for g in partition)
        self.terms: list[tuple[complex, tuple[np.ndarray, ...]]] = []

    def add(self, coeff: complex, factors: dict[int, np.ndarray]) -> None:
        """Add coeff * kron(factor per group), identity where omitted."""
        row = []
        for gi, gd in enumerate(self.gdims):
            f = factors.get(gi)
            row.append(np.eye(gd, dtype=complex) if f is None else np.asarray(f, dtype=complex))
        self.terms.append((coeff, tuple(row)))

    def add_matrix_on_group(self, gi: int, mat: np.ndarray, coeff: complex = 1.0) -> None:
        self.add(coeff, {gi: mat})

    def build(self) -> Operator:
        return Operator(dims=self.dims, partition=self.partition, terms=tuple(self.terms))


def _single_slot_partition(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple((i,) for i in range(n))


def build_semidefinite(clause: Clause, variant: Variant) -> Operator:
    """The clause's positive semidefinite operator in factored form.

    Slot order matches :func:`clocksat.model.clause_qudits`.  Lifted
    qubit-variant clauses have no feasible materialization and raise
    UnsupportedOperator.
    """
    lb = local_basis(variant)
    d = lb.dim
    eye = np.eye(d, dtype=complex)

    if isinstance(clause, Init):
        n = 2 if clause.endpoint is None else 3
        b = _Builder((d,) * n, _single_slot_partition(n))
        b.add(1.0, {0: role_penalty(variant, Role.LOGICAL)})
        b.add(1.0, {1: role_penalty(variant, Role.CLOCK)})
        b.add(1.0, {1: _symbol_proj(lb, "r")})
        b.add(1.0, {0: eye - _proj(d, (lb.defined[0],)), 1: _symbol_proj(lb, "a")})
        if clause.endpoint is not None:
            b.add(1.0, {2: role_penalty(variant, Role.ENDPOINT)})
            _add_two_qudit(b, bell_penalty(variant, "start"), d, 1, 2)
        return b.build()

    if isinstance(clause, Out):
        n = 2 if clause.endpoint is None else 3
        b = _Builder((d,) * n, _single_slot_partition(n))
        b.add(1.0, {0: role_penalty(variant, Role.LOGICAL)})
        b.add(1.0, {1: role_penalty(variant, Role.CLOCK)})
        b.add(1.0, {1: _symbol_proj(lb, "d")})
        b.add(1.0, {0: _proj(d, (lb.defined[0],)), 1: _symbol_proj(lb, "a")})
        if clause.endpoint is not None:
            b.add(1.0, {2: role_penalty(variant, Role.ENDPOINT)})
            _add_two_qudit(b, bell_penalty(variant, "stop"), d, 1, 2)
        return b.build()

    if isinstance(clause, InitCopy):
        # groups: (logical, witness), (clock)
        b = _Builder((d, d, d), ((0, 1), (2,)))
        b.add(1.0, {0: np.kron(role_penalty(variant, Role.LOGICAL), eye)})
        b.add(1.0, {0: np.kron(eye, role_penalty(variant, Role.WITNESS))})
        b.add(1.0, {1: role_penalty(variant, Role.CLOCK)})
        b.add(1.0, {1: _symbol_proj(lb, "r")})
        q = _proj(d, (lb.question,))
        b.add(1.0, {0: np.kron(q, eye), 1: _symbol_proj(lb, "a")})
        b.add(1.0, {0: copy_penalty(variant), 1: _symbol_proj(lb, "a")})
        return b.build()

    if isinstance(clause, InitPair):
        b = _Builder((d, d, d), ((0, 1), (2,)))
        b.add(1.0, {0: np.kron(role_penalty(variant, Role.LOGICAL), eye)})
        b.add(1.0, {0: np.kron(eye, role_penalty(variant, Role.AUX))})
        b.add(1.0, {1: role_penalty(variant, Role.CLOCK)})
        b.add(1.0, {1: _symbol_proj(lb, "r")})
        q = _proj(d, (lb.question,))
        b.add(1.0, {0: np.kron(q, eye), 1: _symbol_proj(lb, "a")})
        b.add(1.0, {0: bell_penalty(variant, "pair"), 1: _symbol_proj(lb, "a")})
        return b.build()

    if isinstance(clause, Prop):
        arity = GATE_ARITY[clause.gate]
        n = arity + 2
        dims = (d,) * n
        partition = (tuple(range(arity)), (arity,), (arity + 1,))
        b = _Builder(dims, partition)
        dim_l = d ** arity
        for i in range(arity):
            pen = [np.eye(d, dtype=complex)] * arity
            pen[i] = role_penalty(variant, Role.LOGICAL)
            b.add(1.0, {0: functools.reduce(np.kron, pen)})
        b.add(1.0, {1: role_penalty(variant, Role.CLOCK)})
        b.add(1.0, {2: role_penalty(variant, Role.CLOCK)})

        pd_block = _defined_embed(lb, arity, np.eye(2 ** arity, dtype=complex))
        u_block = _defined_embed(lb, arity, gate_matrix(clause.gate))
        pa, pr, pdn = (_symbol_proj(lb, s) for s in ("a", "r", "d"))
        t_da = _symbol_transfer(lb, "d", "a")
        t_ar = _symbol_transfer(lb, "a", "r")
        # gate work projector, supported on the defined-logical block
        b.add(0.5, {0: pd_block, 1: pa, 2: pr})
        b.add(0.5, {0: pd_block, 1: pdn, 2: pa})
        b.add(-0.5, {0: u_block, 1: t_da, 2: t_ar})
        b.add(-0.5, {0: u_block.conj().T, 1: t_da.conj().T, 2: t_ar.conj().T})
        # defined logicals: clock pair moves forward
        b.add(1.0, {0: pd_block, 1: pr, 2: eye})
        b.add(-1.0, {0: pd_block, 1: pr, 2: pr})
        b.add(1.0, {0: pd_block, 1: pa, 2: eye})
        b.add(-1.0, {0: pd_block, 1: pa, 2: pr})
        b.add(1.0, {0: pd_block, 1: pdn, 2: pr})
        # any undefined logical: clock pair frozen before the gate
        eye_l = np.eye(dim_l, dtype=complex)
        for coeff, lblock in ((1.0, eye_l), (-1.0, pd_block)):
            b.add(coeff, {0: lblock, 1: pr, 2: eye})
            b.add(-coeff, {0: lblock, 1: pr, 2: pr})
            b.add(coeff, {0: lblock, 1: pa, 2: eye})
            b.add(-coeff, {0: lblock, 1: pa, 2: pr})
            b.add(coeff, {0: lblock, 1: pdn, 2: eye})
        if variant is Variant.LCT:
            _add_two_qudit(b, bell_penalty(variant, "chain"), d, arity, arity + 1)
        return b.build()

    if isinstance(clause, GadgetH4):
        from .qubitize import h4to2

        b = _Builder((2, 2, 2, 2), ((0, 1, 2, 3),))
        b.add_matrix_on_group(0, h4to2())
        return b.build()

    if isinstance(clause, (GadgetT1, GadgetT2)):
        from .qubitize import encode_isometry, t2_nullstate

        n = len(clause.block) // 4
        groups = tuple(tuple(range(4 * g, 4 * g + 4)) for g in range(n))
        b = _Builder((2,) * (4 * n), groups)
        e4 = encode_isometry()
        enc = e4 @ e4.conj().T  # projector onto one encoded 4-qudit
        b.add(1.0, {g: enc for g in range(n)})
        if isinstance(clause, GadgetT1):
            # subtract each legal data state; 4-qudit value = 2*data + ent
            for j in range(clause.dim):
                bits = [(j >> (n - 1 - g)) & 1 for g in range(n)]
                facs = {}
                for g in range(n):
                    keep = np.zeros((4, 4), dtype=complex)
                    for ent in range(2):
                        m = 2 * bits[g] + ent
                        keep[m, m] = 1.0
                    facs[g] = e4 @ keep @ e4.conj().T
                b.add(-1.0, facs)
        else:
            gamma = t2_nullstate(n)
            for e in range(2 ** n):
                for ep in range(2 ** n):
                    coeff = -(gamma[e] * np.conj(gamma[ep]))
                    if abs(coeff) < 1e-300:
                        continue
                    facs = {}
                    for g in range(n):
                        be = (e >> (n - 1 - g)) & 1
                        bp = (ep >> (n - 1 - g)) & 1
                        m = np.zeros((4, 4), dtype=complex)
                        for data in range(2):
                            m[2 * data + be, 2 * data + bp] = 1.0
                        facs[g] = e4 @ m @ e4.conj().T
                    b.add(coeff, facs)
        return b.build()

    if isinstance(clause, Lifted):
        raise UnsupportedOperator(
            "lifted clauses are kept symbolic; their spectra are out of scope"
        )
    raise DimensionMismatch(f"no operator for clause {clause!r}")


def _add_two_qudit(
    b: _Builder,
    mat: np.ndarray,
    d: int,
    slot_a: int,
    slot_b: int,
) -> None:
    """Add a dense two-qudit matrix as d^2 x d^2 rank-one slot factors.

    The matrix is split along slot_a's index pairs so each term stays a
    Kronecker product.  Used for Bell penalties on non-adjacent groups.
    """
    # Decompose mat = sum_{i,j} |i><j|_a (x) M_ij_b.
    m = mat.reshape(d, d, d, d)  # (a_row, b_row, a_col, b_col)
    ga = _group_of(b.partition, slot_a)
    gb = _group_of(b.partition, slot_b)
    for i in range(d):
        for j in range(d):
            block = m[i, :, j, :]
            if not np.any(np.abs(block) > 1e-300):
                continue
            fa = np.zeros((d, d), dtype=complex)
            fa[i, j] = 1.0
            b.add(1.0, {ga: fa, gb: block.copy()})


def _group_of(partition: tuple[tuple[int, ...], ...], slot: int) -> int:
    for gi, group in enumerate(partition):
        if slot in group:
            if len(group) != 1:
                raise DimensionMismatch("two-qudit add needs singleton groups")
            return gi
    raise DimensionMismatch(f"slot {slot} not in partition")


# --- kernels and projectors --------------------------------------------------

def _slot_roles(clause: Clause, variant: Variant) -> tuple[Role, ...]:
    if isinstance(clause, Init) or isinstance(clause, Out):
        roles = [Role.LOGICAL, Role.CLOCK]
        endpoint = clause.endpoint
        if endpoint is not None:
            roles.append(Role.ENDPOINT)
        return tuple(roles)
    if isinstance(clause, InitCopy):
        return (Role.LOGICAL, Role.WITNESS, Role.CLOCK)
    if isinstance(clause, InitPair):
        return (Role.LOGICAL, Role.AUX, Role.CLOCK)
    if isinstance(clause, Prop):
        return (Role.LOGICAL,) * len(clause.logicals) + (Role.CLOCK, Role.CLOCK)
    raise UnsupportedOperator(f"no role-restricted kernel for {clause!r}")


def restricted_kernel(
    clause: Clause, variant: Variant
) -> tuple[np.ndarray, np.ndarray]:
    """Kernel of the clause operator as (support, block_basis).

    ``support`` holds the flat full-space indices of the role-allowed block
    (ascending) and ``block_basis`` is an orthonormal kernel basis of the
    operator restricted to that block (block dim x kernel dim).  Any null
    vector of the full operator lies in the block, so this loses nothing.
    """
    op = build_semidefinite(clause, variant)
    roles = _slot_roles(clause, variant)
    allowed = tuple(allowed_indices(variant, r) for r in roles)
    block = op.restricted(allowed)
    vals, vecs = np.linalg.eigh(block)
    if vals.size and vals[0] < -EIGEN_CUTOFF:
        raise ValueError(
            f"operator not positive semidefinite (min eigenvalue {vals[0]:.3e})"
        )
    kernel = vecs[:, vals < EIGEN_CUTOFF]
    dims = op.dims
    flat = [0]
    for slot, dim_slot in enumerate(dims):
        flat = [f * dim_slot + i for f in flat for i in allowed[slot]]
    return np.asarray(flat, dtype=np.intp), kernel


def clause_nullspace(clause: Clause, variant: Variant) -> np.ndarray:
    """Dense orthonormal null-space basis (columns) of the clause operator."""
    support, block = restricted_kernel(clause, variant)
    op_dim = math.prod(build_semidefinite(clause, variant).dims)
    out = np.zeros((op_dim, block.shape[1]), dtype=complex)
    out[support, :] = block
    return out


@dataclass(frozen=True)
class KernelProjector:
    """Projector I - K K^dagger with K supported on an embedded block.

    Stands in for dense projectors past DENSE_PROJECTOR_DIM.  ``support``
    are the flat indices carrying the kernel block basis ``basis``.
    """

    dim: int
    support: np.ndarray
    basis: np.ndarray

    def apply(self, vec: np.ndarray) -> np.ndarray:
        if vec.shape != (self.dim,):
            raise DimensionMismatch(f"vector must have shape ({self.dim},)")
        out = np.array(vec, dtype=complex)
        coeffs = self.basis.conj().T @ out[self.support]
        out[self.support] -= self.basis @ coeffs
        return out

    @property
    def kernel_dim(self) -> int:
        return int(self.basis.shape[1])


def build_projector(clause: Clause, variant: Variant) -> np.ndarray | KernelProjector:
    """Projector with the same null space as the clause operator.

    Dense ndarray when the clause space is at most DENSE_PROJECTOR_DIM,
    otherwise a KernelProjector.
    """
    op = build_semidefinite(clause, variant)
    support, block = restricted_kernel(clause, variant)
    if op.dim <= DENSE_PROJECTOR_DIM:
        k = np.zeros((op.dim, block.shape[1]), dtype=complex)
        k[support, :] = block
        return np.eye(op.dim, dtype=complex) - k @ k.conj().T
    return KernelProjector(dim=op.dim, support=support, basis=block)
