import pytest

from clocksat.model import Gate, Init, Instance, Out, Prop, Variant

X_BLOCK = (
    Gate.H, Gate.HT, Gate.H, Gate.HT, Gate.H,
    Gate.HT, Gate.H, Gate.HT, Gate.H, Gate.H,
)


def chain_instance(gates, variant=Variant.SLCT, logicals=1, ans=0):
    """Init'd logicals, a prop chain over fresh clocks, one out on ans."""
    first_clock = logicals
    clauses = [Init(logical=j, clock=first_clock) for j in range(logicals)]
    for t, (gate, targets) in enumerate(gates):
        clauses.append(
            Prop(
                gate=gate,
                logicals=tuple(targets),
                clock_pred=first_clock + t,
                clock_succ=first_clock + t + 1,
            )
        )
    clauses.append(Out(logical=ans, clock=first_clock + len(gates)))
    return Instance(
        variant=variant,
        num_qudits=logicals + len(gates) + 1,
        clauses=tuple(clauses),
    )


@pytest.fixture
def tiny_sat():
    return Instance(Variant.SLCT, 2, (Init(logical=0, clock=1),))


@pytest.fixture
def tiny_unsat():
    return Instance(
        Variant.SLCT, 2, (Init(logical=0, clock=1), Out(logical=0, clock=1))
    )


@pytest.fixture
def yes_instance():
    return chain_instance([(g, (0,)) for g in X_BLOCK])


@pytest.fixture
def no_instance():
    return chain_instance([(Gate.H, (0,)), (Gate.H, (0,))])
