"""Frustration-freeness of clock-constraint satisfaction instances.

The package decides whether families of local clock-chain projectors
admit a common null state.  model holds the instance schema, clauses the
operator algebra, analyzer the structural decision, deciders the
randomized task runner, compiler the circuit reductions, combinators the
direct products/sums, qubitize the qubit encoding, oracle the exact
numerics, and service/cli the two front ends.
"""

from .model import (
    GateVariantMismatch,
    Gate,
    IndexOutOfRange,
    Init,
    InitCopy,
    InitPair,
    Instance,
    MalformedJson,
    Out,
    Prop,
    Role,
    RoleConflict,
    Variant,
    assign_roles,
    export_dot,
    instance_to_obj,
    parse_instance,
    serialize,
)
from .analyzer import (
    NeedsSubroutine,
    Tacc,
    TriviallySat,
    Unsat,
    analyze,
    mark_undefined,
)
from .deciders import Decision, Rng, decide, simulate, simprop_outcome_prob
from .compiler import (
    FULL,
    PRIVILEGED,
    Circuit,
    GateSetMismatch,
    Truncated,
    compile,
    history_state,
    parse_circuit,
)
from .combinators import (
    ComboInstance,
    ComboOp,
    NotAProduct,
    Side,
    decide_combo,
    direct_product,
    direct_sum,
    parse_combo,
    project,
    serialize_combo,
)
from .qubitize import canonical_unsat, dequbitize, qubitize_instance
from .oracle import (
    Budgets,
    DimensionBudgetExceeded,
    NoConvergence,
    SparseState,
    SpectralReport,
    min_eigenvalue,
    nullspace_dim,
    residual,
    spectral_report,
)

__version__ = "0.1.0"
