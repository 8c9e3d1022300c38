"""Direct products and direct sums of instances.

Both constructions act qudit-by-qudit.  The product gives every qudit the
local space C^{d1} (x) C^{d2} and lifts a clause operator H to H (x) I; a
combined state satisfies the product iff its halves satisfy both sides.
The sum gives every qudit C^{d1} (+) C^{d2}; a lifted clause acts as H on
its own block, vanishes when all its qudits sit in the other block, and
penalizes any mix, so a connected component must commit to one side and
satisfy that side's constraints there.

Combined instances stay symbolic: clauses are stored as (side, clause)
pairs and only materialize into matrices when the oracle asks.  Deciding
a combo never materializes anything; it projects and runs the per-side
decision procedure.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import (
    Instance,
    MalformedJson,
    clause_qudits,
    instance_to_obj,
    parse_instance,
)
from . import clauses as _cl
from .deciders import Decision, Rng, decide
from .oracle import DimensionBudgetExceeded, _LocalTerm, _operator_norm_bound


class ComboOp(Enum):
    PRODUCT = "product"
    SUM = "sum"


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"


class NotAProduct(ValueError):
    """Projection asked of a sum."""


@dataclass(frozen=True)
class ComboInstance:
    """A direct product or direct sum of two instances.

    Qudit counts are padded to a common width; ids are shared, so qudit j
    of the combo carries qudit j of each side (or nothing, when a side is
    narrower).
    """

    op: ComboOp
    left: Instance
    right: Instance

    @property
    def num_qudits(self) -> int:
        return max(self.left.num_qudits, self.right.num_qudits)

    @property
    def dim(self) -> int:
        if self.op is ComboOp.PRODUCT:
            return self.left.dim * self.right.dim
        return self.left.dim + self.right.dim

    def local_dims(self) -> tuple[int, ...]:
        return (self.dim,) * self.num_qudits

    def lifted_clauses(self) -> tuple[tuple[Side, object], ...]:
        return tuple(
            [(Side.LEFT, c) for c in self.left.clauses]
            + [(Side.RIGHT, c) for c in self.right.clauses]
        )

    def local_terms(self) -> list[_LocalTerm]:
        terms = []
        for side, clause in self.lifted_clauses():
            own = self.left if side is Side.LEFT else self.right
            other_dim = (
                self.right.dim if side is Side.LEFT else self.left.dim
            )
            terms.append(
                _lift_term(
                    clause, own.variant, other_dim, self.dim, self.op, side
                )
            )
        return terms

    def to_obj(self) -> dict:
        return {
            "op": self.op.value,
            "left": instance_to_obj(self.left),
            "right": instance_to_obj(self.right),
        }


def direct_product(a: Instance, b: Instance) -> ComboInstance:
    return ComboInstance(op=ComboOp.PRODUCT, left=a, right=b)


def direct_sum(a: Instance, b: Instance) -> ComboInstance:
    return ComboInstance(op=ComboOp.SUM, left=a, right=b)


def project(combo: ComboInstance, side: Side) -> Instance:
    """Recover one factor of a product, padded to the combo's width."""
    if combo.op is not ComboOp.PRODUCT:
        raise NotAProduct("only products project onto their sides")
    inst = combo.left if side is Side.LEFT else combo.right
    return Instance(
        variant=inst.variant,
        num_qudits=combo.num_qudits,
        clauses=inst.clauses,
    )


# --- clause lifting ------------------------------------------------------------

_LIFT_CAP = 4096


def _digits(flat: np.ndarray, base: int, k: int) -> np.ndarray:
    """Base-``base`` digit matrix of shape (len(flat), k), most significant first."""
    out = np.empty((len(flat), k), dtype=np.int64)
    rest = flat.astype(np.int64).copy()
    for i in reversed(range(k)):
        out[:, i] = rest % base
        rest //= base
    return out


def _flats(digits: np.ndarray, base: int) -> np.ndarray:
    k = digits.shape[1]
    weights = base ** np.arange(k - 1, -1, -1, dtype=np.int64)
    return digits @ weights


def _lift_term(
    clause, variant, other_dim: int, combined_dim: int, op: ComboOp, side: Side
) -> _LocalTerm:
    positions = clause_qudits(clause)
    k = len(positions)
    lifted_dim = combined_dim ** k
    if lifted_dim > _LIFT_CAP:
        raise DimensionBudgetExceeded(
            f"lifted clause spans dimension {lifted_dim} (cap {_LIFT_CAP}); "
            "combined instances support the oracle only at small scale"
        )
    own_op = _cl.build_semidefinite(clause, variant)
    own_dim = own_op.dim
    d_own = own_op.dims[0]
    support, basis = _cl.restricted_kernel(clause, variant)
    own_dense = own_op.to_dense(_LIFT_CAP)

    if op is ComboOp.PRODUCT:
        dense, support_l, basis_l = _lift_product(
            own_dense, support, basis, k, d_own, other_dim, side
        )
    else:
        dense, support_l, basis_l = _lift_sum(
            own_dense, support, basis, k, d_own, other_dim, side
        )
    bound = _operator_norm_bound(own_op)
    if op is ComboOp.SUM:
        bound = max(bound, 1.0)  # mixed sectors carry an identity penalty
    return _LocalTerm(
        positions=positions,
        local_dim=lifted_dim,
        kernel_support=support_l,
        kernel_basis=basis_l,
        dense=dense,
        operator=None,
        norm_bound=bound,
    )


def _lift_product(own_dense, support, basis, k, d_own, d_other, side):
    """H (x) I per qudit; kernel = ker(H) (x) (C^{d_other})^{(x)k}."""
    d_comb = d_own * d_other
    m = d_other ** k
    own_digits = _digits(np.asarray(support, dtype=np.int64), d_own, k)
    other_digits = _digits(np.arange(m, dtype=np.int64), d_other, k)
    # per-qudit combined digit: left side owns the high factor
    if side is Side.LEFT:
        combine = lambda x, y: x * d_other + y
    else:
        combine = lambda x, y: y * d_own + x
    pair = combine(own_digits[:, None, :], other_digits[None, :, :])
    support_l = _flats(pair.reshape(-1, k), d_comb)
    basis_l = np.kron(basis, np.eye(m))

    full_own = _digits(np.arange(d_own ** k, dtype=np.int64), d_own, k)
    perm = _flats(
        combine(full_own[:, None, :], other_digits[None, :, :]).reshape(-1, k),
        d_comb,
    )
    grouped = np.kron(own_dense, np.eye(m))
    dense = np.zeros_like(grouped)
    dense[np.ix_(perm, perm)] = grouped
    return dense, support_l, basis_l


def _lift_sum(own_dense, support, basis, k, d_own, d_other, side):
    """Null space ker(H) (+) (other block)^(x)k; mixed sectors violate.

    A state escapes a lifted clause only by putting every one of the
    clause's qudits in the other side's block; straddling the blocks is
    penalized, which is what confines each connected component to a
    single side.
    """
    d_comb = d_own + d_other
    offset = 0 if side is Side.LEFT else d_other
    own_digits = _digits(np.asarray(support, dtype=np.int64), d_own, k)
    own_flats = _flats(own_digits + offset, d_comb)

    all_digits = _digits(np.arange(d_comb ** k, dtype=np.int64), d_comb, k)
    in_own = (all_digits >= offset) & (all_digits < offset + d_own)
    other_rows = np.flatnonzero(np.all(~in_own, axis=1))
    mixed_rows = np.flatnonzero(np.any(in_own, axis=1) & ~np.all(in_own, axis=1))

    support_l = np.concatenate([own_flats, other_rows])
    kdim = basis.shape[1]
    basis_l = np.zeros((len(support_l), kdim + len(other_rows)), dtype=complex)
    basis_l[: len(own_flats), :kdim] = basis
    basis_l[len(own_flats):, kdim:] = np.eye(len(other_rows))

    block_flats = _flats(
        _digits(np.arange(d_own ** k, dtype=np.int64), d_own, k) + offset,
        d_comb,
    )
    dense = np.zeros((d_comb ** k, d_comb ** k), dtype=complex)
    dense[np.ix_(block_flats, block_flats)] = own_dense
    dense[mixed_rows, mixed_rows] = 1.0
    return dense, support_l, basis_l


# --- decision ------------------------------------------------------------------

def _child_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence((seed,) + key).generate_state(1)[0])


def _components(combo: ComboInstance) -> list[tuple[int, ...]]:
    """Connected components of the combined constraint graph, by min qudit."""
    parent = list(range(combo.num_qudits))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    touched = set()
    for inst in (combo.left, combo.right):
        for clause in inst.clauses:
            qs = clause_qudits(clause)
            touched.update(qs)
            for q in qs[1:]:
                ra, rb = find(qs[0]), find(q)
                if ra != rb:
                    parent[rb] = ra
    groups: dict[int, list[int]] = {}
    for q in sorted(touched):
        groups.setdefault(find(q), []).append(q)
    return [tuple(g) for _, g in sorted((g[0], g) for g in groups.values())]


def _restrict(inst: Instance, width: int, keep: frozenset[int]) -> Instance:
    clauses = tuple(
        c for c in inst.clauses if set(clause_qudits(c)) <= keep
    )
    return Instance(variant=inst.variant, num_qudits=width, clauses=clauses)


def decide_combo(
    combo: ComboInstance, reps: int = 32, rng: Rng | int = 0
) -> Decision:
    """Decide a combined instance by deciding its parts.

    Products accept iff both sides accept.  Sums accept iff every
    connected component of the combined graph is satisfied by at least
    one side's restriction to it.  Qudits outside every clause are free
    and never reject.
    """
    seed = rng.seed if isinstance(rng, Rng) else int(rng)
    trace: list[dict] = []
    if combo.op is ComboOp.PRODUCT:
        accept = True
        for j, (side, inst) in enumerate(
            ((Side.LEFT, combo.left), (Side.RIGHT, combo.right))
        ):
            dec = decide(inst, reps=reps, rng=Rng(_child_seed(seed, 0, j)))
            trace.extend({"side": side.value, **e} for e in dec.trace)
            accept = accept and dec.accept
        return Decision(accept=accept, trace=tuple(trace), repetitions=reps)

    accept = True
    width = combo.num_qudits
    for ci, comp in enumerate(_components(combo)):
        keep = frozenset(comp)
        comp_ok = False
        for j, (side, inst) in enumerate(
            ((Side.LEFT, combo.left), (Side.RIGHT, combo.right))
        ):
            sub = _restrict(inst, width, keep)
            dec = decide(sub, reps=reps, rng=Rng(_child_seed(seed, 1 + ci, j)))
            trace.extend(
                {"component": ci, "side": side.value, **e} for e in dec.trace
            )
            if dec.accept:
                comp_ok = True
                break
        accept = accept and comp_ok
    return Decision(accept=accept, trace=tuple(trace), repetitions=reps)


# --- JSON ----------------------------------------------------------------------

def parse_combo(text: str | bytes) -> ComboInstance:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise MalformedJson("combined instance must be a JSON object")
    for key in ("op", "left", "right"):
        if key not in obj:
            raise MalformedJson(f"combined instance: missing key '{key}'")
    try:
        op = ComboOp(obj["op"])
    except ValueError:
        raise MalformedJson(f"unknown combinator op '{obj['op']}'") from None
    sides = {}
    for key in ("left", "right"):
        raw = obj[key]
        if not isinstance(raw, dict):
            raise MalformedJson(f"'{key}' must be an instance object")
        if "op" in raw:
            raise MalformedJson("combined instances do not nest")
        sides[key] = parse_instance(json.dumps(raw))
    return ComboInstance(op=op, left=sides["left"], right=sides["right"])


def serialize_combo(combo: ComboInstance) -> str:
    return json.dumps(combo.to_obj(), indent=2, sort_keys=False)
