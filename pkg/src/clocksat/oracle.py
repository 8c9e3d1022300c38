"""Brute-force spectral oracle: Hamiltonians, kernels, residuals, gaps.

Everything here is deliberately independent of the structural analyzer so
the two can cross-check each other.  The oracle works with exact clause
operators and makes no use of chain structure.

Null-space dimension is computed by clause-by-clause kernel intersection:
start with the first clause's local kernel tensored with identity and
intersect with each further clause's kernel, deciding membership with an
SVD at threshold 1e-8.  The intersection runs inside the role-allowed
computational block (every null vector is confined there by the role
penalties), which changes nothing mathematically and keeps the bases small.

Minimum eigenvalues come from a dense eigendecomposition up to
``Budgets.dense`` total dimension and from a shifted power method (on
``sigma - H`` with sigma an upper spectral bound) up to ``Budgets.matvec``;
convergence is declared when successive eigenvalue estimates move less than
``POWER_TOL``.

Residuals are evaluated through each clause's kernel: for a normalized
state, <psi| Pi_i |psi> = 1 - ||K_i^dagger psi||^2 with K_i the clause's
orthonormal kernel basis, which works equally well for dense vectors and
for the sparse states the compiler produces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import clauses as _cl
from .model import (
    Clause,
    Instance,
    Role,
    RoleConflict,
    Variant,
    assign_roles,
    clause_qudits,
)

#: SVD singular values below this count as lying in the kernel intersection.
SVD_CUTOFF = 1e-8

#: Convergence tolerance of the shifted power method.
POWER_TOL = 1e-7


class DimensionBudgetExceeded(ValueError):
    """The requested computation does not fit the configured budgets."""


class NoConvergence(RuntimeError):
    """The iterative eigenvalue solver ran out of iterations."""

    def __init__(self, iterations: int, estimate: float):
        self.iterations = iterations
        self.estimate = estimate
        super().__init__(
            f"no convergence after {iterations} iterations (estimate {estimate:.3e})"
        )


@dataclass(frozen=True)
class Budgets:
    """Size limits: dense eigensolves and dense matrices up to ``dense``
    total dimension, matrix-free iteration up to ``matvec``."""

    dense: int = 4096
    matvec: int = 2 ** 14


DEFAULT_BUDGETS = Budgets()


@dataclass(frozen=True)
class SpectralReport:
    total_dimension: int
    nullspace_dim: int
    min_eigenvalue: float
    method: str  # "dense" or "iterative"

    def to_obj(self) -> dict:
        return {
            "total_dimension": self.total_dimension,
            "nullspace_dim": self.nullspace_dim,
            "min_eigenvalue": self.min_eigenvalue,
            "method": self.method,
        }


# --- states -------------------------------------------------------------------

@dataclass
class SparseState:
    """State over a qudit register stored as flat-index -> amplitude.

    Flat indices order qudit 0 most significant, matching Kronecker layout.
    """

    dims: tuple[int, ...]
    amps: dict[int, complex] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return math.prod(self.dims)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amps.values()))

    def normalized(self) -> "SparseState":
        n = self.norm()
        if n == 0:
            raise ValueError("cannot normalize the zero state")
        return SparseState(self.dims, {k: v / n for k, v in self.amps.items()})

    def to_dense(self, max_dim: int = 2 ** 22) -> np.ndarray:
        if self.dim > max_dim:
            raise DimensionBudgetExceeded(
                f"dense state of dimension {self.dim} exceeds {max_dim}"
            )
        out = np.zeros(self.dim, dtype=complex)
        for k, v in self.amps.items():
            out[k] = v
        return out

    @staticmethod
    def from_dense(dims: tuple[int, ...], vec: np.ndarray, cutoff: float = 0.0) -> "SparseState":
        amps = {
            int(i): complex(vec[i])
            for i in np.nonzero(np.abs(vec) > cutoff)[0]
        }
        return SparseState(tuple(dims), amps)

    def digits(self, flat: int) -> tuple[int, ...]:
        out = []
        for d in reversed(self.dims):
            flat, r = divmod(flat, d)
            out.append(r)
        return tuple(reversed(out))


# --- generic clause-term view ---------------------------------------------------

@dataclass
class _LocalTerm:
    """One clause operator, localized: positions, kernel, apply machinery."""

    positions: tuple[int, ...]
    local_dim: int
    kernel_support: np.ndarray  # flat local indices carrying the kernel
    kernel_basis: np.ndarray    # (len(support), kernel_dim)
    dense: np.ndarray | None    # local dense operator when affordable
    operator: _cl.Operator | None
    norm_bound: float


def _operator_norm_bound(op: _cl.Operator) -> float:
    total = 0.0
    for coeff, factors in op.terms:
        prod = abs(coeff)
        for f in factors:
            prod *= float(np.linalg.norm(f, 2))
        total += prod
    return total


def _terms_for_instance(instance: Instance, dense_cap: int) -> list[_LocalTerm]:
    terms = []
    for clause in instance.clauses:
        op = _cl.build_semidefinite(clause, instance.variant)
        support, basis = _cl.restricted_kernel(clause, instance.variant)
        dense = op.to_dense(dense_cap) if op.dim <= dense_cap else None
        terms.append(
            _LocalTerm(
                positions=clause_qudits(clause),
                local_dim=op.dim,
                kernel_support=support,
                kernel_basis=basis,
                dense=dense,
                operator=op,
                norm_bound=_operator_norm_bound(op),
            )
        )
    return terms


def _dims_for(instance: Instance) -> tuple[int, ...]:
    return (instance.dim,) * instance.num_qudits


def _coerce(target) -> tuple[tuple[int, ...], list[_LocalTerm]]:
    """Accept an Instance or a ComboInstance and yield (dims, local terms)."""
    if isinstance(target, Instance):
        return _dims_for(target), _terms_for_instance(target, dense_cap=4096)
    from .combinators import ComboInstance

    if isinstance(target, ComboInstance):
        return target.local_dims(), target.local_terms()
    raise TypeError(f"oracle cannot analyze {type(target).__name__}")


# --- Hamiltonian --------------------------------------------------------------

def _embed_dense(
    local: np.ndarray, positions: tuple[int, ...], dims: tuple[int, ...]
) -> np.ndarray:
    """Embed a local dense operator into the full product space."""
    total = math.prod(dims)
    rest = [i for i in range(len(dims)) if i not in positions]
    rest_dim = math.prod(dims[i] for i in rest) if rest else 1
    big = np.kron(local, np.eye(rest_dim, dtype=complex))
    tdims = [dims[p] for p in positions] + [dims[i] for i in rest]
    big = big.reshape(tdims + tdims)
    order = list(positions) + rest
    inv = np.argsort(order)
    big = np.transpose(big, list(inv) + [len(dims) + i for i in inv])
    return big.reshape(total, total)


class MatrixFreeHamiltonian:
    """Apply-to-vector form of the clause-sum Hamiltonian."""

    def __init__(self, dims: tuple[int, ...], terms: list[_LocalTerm]):
        self.dims = dims
        self.terms = terms
        self.dim = math.prod(dims)
        self.norm_bound = sum(t.norm_bound for t in terms) or 1.0

    def apply(self, vec: np.ndarray) -> np.ndarray:
        out = np.zeros_like(vec, dtype=complex)
        n = len(self.dims)
        for t in self.terms:
            tensor = vec.reshape(self.dims)
            moved = np.moveaxis(tensor, t.positions, range(len(t.positions)))
            mat = moved.reshape(t.local_dim, -1)
            if t.dense is not None:
                res = t.dense @ mat
            elif t.operator is not None:
                res = np.stack(
                    [t.operator.apply(mat[:, j]) for j in range(mat.shape[1])],
                    axis=1,
                )
            else:
                raise DimensionBudgetExceeded(
                    "clause operator has no materializable apply"
                )
            res = res.reshape(moved.shape)
            res = np.moveaxis(res, range(len(t.positions)), t.positions)
            out += res.reshape(vec.shape)
        return out


def full_hamiltonian(
    target, budgets: Budgets = DEFAULT_BUDGETS
) -> np.ndarray | MatrixFreeHamiltonian:
    """Dense Hamiltonian up to ``budgets.dense``; apply-to-vector beyond.

    Past ``budgets.matvec`` raises DimensionBudgetExceeded.
    """
    dims, terms = _coerce(target)
    total = math.prod(dims) if dims else 1
    if total <= budgets.dense:
        h = np.zeros((total, total), dtype=complex)
        for t in terms:
            if t.dense is None:
                raise DimensionBudgetExceeded(
                    "clause operator too large for the dense budget"
                )
            h += _embed_dense(t.dense, t.positions, dims)
        return h
    if total <= budgets.matvec:
        return MatrixFreeHamiltonian(dims, terms)
    raise DimensionBudgetExceeded(
        f"total dimension {total} exceeds matvec budget {budgets.matvec}"
    )


# --- null space ----------------------------------------------------------------

def _role_block(instance: Instance) -> list[tuple[int, ...]]:
    """Per-qudit allowed local indices, as forced by the derived roles.

    Role conflicts leave the block unrestricted: the kernel (empty or not)
    is then found in the full space, keeping this module independent of the
    structural rules.
    """
    try:
        roles = assign_roles(instance)
    except RoleConflict:
        return _block_of_dims((instance.dim,) * instance.num_qudits)
    return [
        _cl.allowed_indices(instance.variant, roles[q])
        for q in range(instance.num_qudits)
    ]


def _block_of_dims(dims: tuple[int, ...]) -> list[tuple[int, ...]]:
    return [tuple(range(d)) for d in dims]


def nullspace_dim(target, budgets: Budgets = DEFAULT_BUDGETS) -> int:
    """Dimension of the common null space of all clause operators.

    Clause-by-clause kernel intersection starting from the first clause's
    local kernel tensored with identity; membership decided by SVD with
    singular-value threshold 1e-8.  Runs inside the role-allowed block.
    """
    dims, terms = _coerce(target)
    if isinstance(target, Instance) and target.variant is not Variant.QUBIT:
        allowed = _role_block(target)
    else:
        allowed = _block_of_dims(dims)
    block_dims = tuple(len(a) for a in allowed)
    block_total = math.prod(block_dims) if block_dims else 1
    if block_total > budgets.matvec:
        raise DimensionBudgetExceeded(
            f"role block dimension {block_total} exceeds budget {budgets.matvec}"
        )
    if not terms:
        return math.prod(dims)

    def kernel_in_block(t: _LocalTerm) -> np.ndarray:
        """Clause kernel re-indexed to the block coordinates of its qudits."""
        tdims = [dims[p] for p in t.positions]
        tballow = [allowed[p] for p in t.positions]
        tbdims = [len(a) for a in tballow]
        support_rows = {int(s): r for r, s in enumerate(t.kernel_support)}
        block_size = math.prod(tbdims)
        lift = np.zeros((block_size, t.kernel_basis.shape[1]), dtype=complex)
        for bflat in range(block_size):
            rem = bflat
            local = 0
            for axis, (d_full, a) in enumerate(zip(tdims, tballow)):
                step = math.prod(tbdims[axis + 1:]) if axis + 1 < len(tbdims) else 1
                digit = (rem // step) % tbdims[axis]
                local = local * d_full + a[digit]
            r = support_rows.get(local)
            if r is not None:
                lift[bflat, :] = t.kernel_basis[r, :]
        return lift

    # Basis of the running intersection, as a dense (block_total x r) array.
    first = terms[0]
    k0 = kernel_in_block(first)
    rest_positions = [
        q for q in range(len(dims)) if q not in first.positions
    ]
    rest_block = math.prod(len(allowed[q]) for q in rest_positions) if rest_positions else 1
    r0 = k0.shape[1] * rest_block
    if r0 == 0:
        return 0
    touched_block = k0.shape[0]
    basis = np.zeros((touched_block, rest_block, k0.shape[1], rest_block), dtype=complex)
    for u in range(rest_block):
        basis[:, u, :, u] = k0
    basis = basis.reshape(touched_block * rest_block, r0)
    # Reorder axes from (touched..., rest...) to ascending qudit order.
    per_axis = [len(allowed[p]) for p in first.positions] + [
        len(allowed[q]) for q in rest_positions
    ]
    order = list(first.positions) + rest_positions
    inv = np.argsort(order)
    basis = basis.reshape(per_axis + [r0])
    basis = np.transpose(basis, list(inv) + [len(order)])
    basis = basis.reshape(block_total, r0)

    for t in terms[1:]:
        if basis.shape[1] == 0:
            return 0
        kb = kernel_in_block(t)
        # Project the running basis onto the clause kernel and keep the
        # combinations that are fixed by the projection.
        tensor = basis.reshape(block_dims + (basis.shape[1],))
        moved = np.moveaxis(tensor, t.positions, range(len(t.positions)))
        tb = math.prod(moved.shape[: len(t.positions)])
        mat = moved.reshape(tb, -1)
        reduced = mat - kb @ (kb.conj().T @ mat)
        m = reduced.reshape(tb, -1, basis.shape[1]).reshape(-1, basis.shape[1])
        if m.shape[0] < m.shape[1]:
            # Pad with zero rows so the SVD exposes every null direction.
            m = np.vstack([m, np.zeros((m.shape[1] - m.shape[0], m.shape[1]))])
        # Columns of `basis` whose residual vanishes span the intersection.
        _, svals, vh = np.linalg.svd(m, full_matrices=False)
        rank = int(np.sum(svals > SVD_CUTOFF))
        keep = vh.conj().T[:, rank:]
        if keep.shape[1] == 0:
            return 0
        basis = basis @ keep
        # Re-orthonormalize to keep the SVD well conditioned.
        basis, _ = np.linalg.qr(basis)
    return basis.shape[1]


# --- residual -------------------------------------------------------------------

def residual(target, state: np.ndarray | SparseState) -> float:
    """Sum over clauses of <psi| Pi |psi>, psi normalized first."""
    dims, terms = _coerce(target)
    total = math.prod(dims)
    if isinstance(state, np.ndarray):
        if state.shape != (total,):
            raise DimensionBudgetExceeded(
                f"state has shape {state.shape}, expected ({total},)"
            )
        sparse = SparseState.from_dense(dims, state)
    else:
        if tuple(state.dims) != tuple(dims):
            raise ValueError("state dims do not match the instance")
        sparse = state
    sparse = sparse.normalized()

    n = len(dims)
    strides = [0] * n
    acc = 1
    for q in reversed(range(n)):
        strides[q] = acc
        acc *= dims[q]

    total_res = 0.0
    for t in terms:
        support_rows = {int(s): r for r, s in enumerate(t.kernel_support)}
        kdim = t.kernel_basis.shape[1]
        groups: dict[int, np.ndarray] = {}
        for flat, amp in sparse.amps.items():
            local = 0
            rest = flat
            # local flat index over the clause's qudits, slot order
            for p in t.positions:
                digit = (flat // strides[p]) % dims[p]
                local = local * dims[p] + digit
                rest -= digit * strides[p]
            row = support_rows.get(local)
            if row is None:
                continue
            vec = groups.get(rest)
            if vec is None:
                vec = np.zeros(kdim, dtype=complex)
                groups[rest] = vec
            vec += np.conj(t.kernel_basis[row, :]) * amp
        kept = sum(float(np.vdot(v, v).real) for v in groups.values())
        total_res += max(0.0, 1.0 - kept)
    return total_res


# --- minimum eigenvalue ----------------------------------------------------------

def min_eigenvalue(
    target,
    budgets: Budgets = DEFAULT_BUDGETS,
    max_iterations: int = 200_000,
    seed: int = 7,
) -> tuple[float, str]:
    """Smallest eigenvalue of the clause-sum Hamiltonian and the method used.

    Dense up to ``budgets.dense``; otherwise a shifted power method on
    sigma - H up to ``budgets.matvec``, starting from a seeded random vector
    and stopping when the eigenvalue estimate moves less than POWER_TOL.
    """
    dims, terms = _coerce(target)
    total = math.prod(dims) if dims else 1
    if not terms:
        return 0.0, "dense"
    if total <= budgets.dense:
        h = full_hamiltonian(target, budgets)
        vals = np.linalg.eigvalsh(h)
        return float(vals[0]), "dense"
    if total > budgets.matvec:
        raise DimensionBudgetExceeded(
            f"total dimension {total} exceeds matvec budget {budgets.matvec}"
        )
    hop = MatrixFreeHamiltonian(dims, terms)
    sigma = hop.norm_bound * 1.01
    rng = np.random.default_rng(seed)
    vec = rng.standard_normal(total) + 1j * rng.standard_normal(total)
    vec /= np.linalg.norm(vec)
    last = None
    for it in range(1, max_iterations + 1):
        hv = hop.apply(vec)
        est = float(np.vdot(vec, hv).real)
        nxt = sigma * vec - hv
        norm = np.linalg.norm(nxt)
        if norm == 0:
            # vec is an exact eigenvector of H with eigenvalue sigma
            return est, "iterative"
        vec = nxt / norm
        if last is not None and abs(est - last) < POWER_TOL:
            return est, "iterative"
        last = est
    raise NoConvergence(max_iterations, last if last is not None else float("nan"))


def spectral_report(
    target,
    budgets: Budgets = DEFAULT_BUDGETS,
    max_iterations: int = 200_000,
) -> SpectralReport:
    dims, _ = _coerce(target)
    total = math.prod(dims) if dims else 1
    nulldim = nullspace_dim(target, budgets)
    eig, method = min_eigenvalue(target, budgets, max_iterations)
    return SpectralReport(
        total_dimension=total,
        nullspace_dim=nulldim,
        min_eigenvalue=eig,
        method=method,
    )
