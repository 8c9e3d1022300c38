"""Spectral checks: null spaces, residuals, minimum eigenvalues, budgets."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

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
from clocksat.oracle import (
    DEFAULT_BUDGETS,
    Budgets,
    DimensionBudgetExceeded,
    NoConvergence,
    SparseState,
    full_hamiltonian,
    min_eigenvalue,
    nullspace_dim,
    residual,
    spectral_report,
)
from conftest import chain_instance


def test_default_budgets():
    assert DEFAULT_BUDGETS == Budgets(dense=4096, matvec=2 ** 14)


def test_sparse_state_norms_and_density():
    st_ = SparseState(dims=(2, 3), amps={0: 3.0, 5: 4.0})
    assert abs(st_.norm() - 5.0) < 1e-12
    unit = st_.normalized()
    assert abs(unit.norm() - 1.0) < 1e-12
    dense = unit.to_dense()
    assert dense.shape == (6,)
    assert abs(dense[0] - 0.6) < 1e-12 and abs(dense[5] - 0.8) < 1e-12
    back = SparseState.from_dense((2, 3), dense)
    assert back.amps.keys() == unit.amps.keys()
    with pytest.raises(ValueError):
        SparseState(dims=(2,), amps={}).normalized()
    with pytest.raises(DimensionBudgetExceeded):
        SparseState(dims=(64, 64, 64, 64), amps={}).to_dense(max_dim=100)


def test_sparse_state_digits_put_qudit_zero_first():
    st_ = SparseState(dims=(2, 3, 5))
    assert st_.digits(0) == (0, 0, 0)
    assert st_.digits(29) == (1, 2, 4)
    assert st_.digits(5) == (0, 1, 0)


def test_nullspace_frozen_values(tiny_sat, tiny_unsat):
    assert nullspace_dim(tiny_sat) == 4
    assert nullspace_dim(tiny_unsat) == 0
    assert nullspace_dim(Instance(Variant.SLCT, 2, ())) == 36


_SMALL_CASES = [
    Instance(Variant.SLCT, 2, (Init(logical=0, clock=1),)),
    Instance(Variant.SLCT, 2, (Init(logical=0, clock=1), Out(logical=0, clock=1))),
    chain_instance([(Gate.H, (0,))]),
    Instance(
        Variant.SLCT,
        3,
        (
            Init(logical=0, clock=1),
            Prop(gate=Gate.H, logicals=(0,), clock_pred=1, clock_succ=2),
        ),
    ),
    Instance(
        Variant.WITNESSED_SLCT,
        3,
        (InitCopy(logical=0, witness=1, clock=2), Out(logical=0, clock=2)),
    ),
    Instance(
        Variant.CLASSICAL_SLCT,
        3,
        (InitPair(logical=0, aux=1, clock=2), Out(logical=0, clock=2)),
    ),
]


@pytest.mark.parametrize("inst", _SMALL_CASES)
def test_nullspace_matches_dense_eigencount(inst):
    # independent route: count near-zero eigenvalues of the dense clause sum
    h = full_hamiltonian(inst)
    assert isinstance(h, np.ndarray)
    vals = np.linalg.eigvalsh(h)
    assert nullspace_dim(inst) == int(np.sum(vals < 1e-8))


@pytest.mark.parametrize("inst", _SMALL_CASES)
def test_min_eigenvalue_matches_dense_route(inst):
    val, method = min_eigenvalue(inst)
    assert method == "dense"
    h = full_hamiltonian(inst)
    assert abs(val - np.linalg.eigvalsh(h)[0]) < 1e-9


def test_nullspace_respects_role_block_budget(yes_instance):
    with pytest.raises(DimensionBudgetExceeded):
        nullspace_dim(yes_instance)
    # a raised budget admits the same computation
    assert nullspace_dim(
        chain_instance([(Gate.H, (0,)), (Gate.HT, (0,))])
    ) == 0


def test_residual_of_kernel_state_vanishes(tiny_sat):
    st_ = SparseState(dims=(6, 6), amps={0 * 6 + 5: 1.0})
    assert residual(tiny_sat, st_) < 1e-12
    assert residual(tiny_sat, st_.to_dense()) < 1e-12


def test_residual_normalizes_input(tiny_sat):
    st_ = SparseState(dims=(6, 6), amps={0 * 6 + 5: 7.5})
    assert residual(tiny_sat, st_) < 1e-12
    bad = SparseState(dims=(6, 6), amps={1 * 6 + 0: 2.0})
    scaled = SparseState(dims=(6, 6), amps={1 * 6 + 0: 0.1})
    assert abs(residual(tiny_sat, bad) - residual(tiny_sat, scaled)) < 1e-12


def test_residual_counts_each_violated_clause(tiny_unsat):
    # |0, ready> satisfies the init but fails the out completely
    st_ = SparseState(dims=(6, 6), amps={0 * 6 + 3: 1.0})
    r = residual(tiny_unsat, st_)
    assert abs(r - 1.0) < 1e-9


def test_residual_rejects_wrong_shapes(tiny_sat):
    with pytest.raises(ValueError):
        residual(tiny_sat, np.ones(7, dtype=complex))
    with pytest.raises(ValueError):
        residual(tiny_sat, SparseState(dims=(6,), amps={0: 1.0}))


def test_min_eigenvalue_iterative_path():
    inst = chain_instance([(Gate.H, (0,))] * 3)
    assert inst.num_qudits == 5  # 6^5 = 7776 sits between the budgets
    val, method = min_eigenvalue(inst)
    assert method == "iterative"
    assert val > -1e-9
    # the identity-ish chain is frustrated: H^3 never maps |0> to |1>
    assert val > 1e-6


def test_min_eigenvalue_over_budget():
    inst = chain_instance([(Gate.H, (0,))] * 6)
    with pytest.raises(DimensionBudgetExceeded):
        min_eigenvalue(inst)


def test_min_eigenvalue_no_convergence():
    inst = chain_instance([(Gate.H, (0,))] * 3)
    with pytest.raises(NoConvergence):
        min_eigenvalue(inst, max_iterations=2)


def test_spectral_report_round_trips(tiny_unsat):
    rep = spectral_report(tiny_unsat)
    assert rep.total_dimension == 36
    assert rep.nullspace_dim == 0
    assert rep.min_eigenvalue > 1e-6
    assert rep.method == "dense"
    obj = rep.to_obj()
    assert set(obj) == {
        "total_dimension",
        "nullspace_dim",
        "min_eigenvalue",
        "method",
    }


def test_empty_instance_report():
    rep = spectral_report(Instance(Variant.SLCT, 1, ()))
    assert rep.total_dimension == 6
    assert rep.nullspace_dim == 6
    assert rep.min_eigenvalue == 0.0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 35), st.integers(0, 35), st.integers(1, 5))
def test_residual_bounded_by_clause_count(i, j, scale):
    inst = Instance(
        Variant.SLCT, 2, (Init(logical=0, clock=1), Out(logical=0, clock=1))
    )
    amps = {i: float(scale)}
    if j != i:
        amps[j] = 1.0
    st_ = SparseState(dims=(6, 6), amps=amps)
    r = residual(inst, st_)
    assert -1e-12 <= r <= len(inst.clauses) + 1e-12
