"""Structural analysis: rejection rules, trivial cases, and task extraction.

The classical half of the decision procedure.  It never touches amplitudes:
every verdict here follows from the clause graph alone.  The flow, shared by
all four qudit variants:

1. derive qudit roles (a role conflict is already unsatisfiable);
2. drop clock components that lack an init or lack an out clause (such a
   component is satisfiable by freezing all its clocks done resp. ready,
   which leaves its logical qudits unconstrained);
3. variant-specific boundary checks (witness-bit consistency, Bell-pair
   fan-out limits, endpoint wiring);
4. mark propagation clauses whose logical qudits are never initialized as
   undefined; such a clause is satisfied by the question state and freezes
   the chain behind it;
5. walk each surviving component from its init clocks, rejecting shapes
   (forks, backward edges, boundary clauses off the chain ends) that make
   two clauses jointly unsatisfiable, and cutting the chain at the first
   clock that feeds an undefined propagation;
6. reject tasks whose logical qudits are shared in conflicting ways;
7. anything truncated and free of simultaneous propagation is satisfiable;
   whatever remains needs the quantum or randomized subroutine.

Unsat verdicts carry the first violated rule in the fixed scan order below
and a small deterministic evidence tuple (clause indices, or qudit indices
for degree/role violations).

Rule identifiers, in scan order:

==========================  =================================================
single-type-qudits          a qudit is used in two different roles
clock-degree                a clock is wired to more than two distinct
                            clock/endpoint qudits
branching                   a clock has two distinct successors or two
                            distinct predecessors (one of them well defined)
direction                   a propagation clause points backward along a walk
endpoint-degree             an endpoint serves two clocks, or one clock as
                            both init and out
misplaced-boundary          an init/out/stop clock carries propagation
                            clauses that place it off the end of its chain
witness-state-conflict      one logical copies two witness qudits whose bits
                            differ
witness-zero-conflict       a logical is pinned to zero and copies a witness
                            bit set to one
pair-zero-conflict          a logical is pinned to zero and Bell-paired
pair-degree                 a logical is Bell-paired with several aux qudits,
                            or an aux qudit with several logicals
cross-task-prop             a logical appears in a propagation clause of one
                            task and in any clause of another
cross-task-boundary         a logical is initialized in one task and
                            out-checked in another
==========================  =================================================
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import AbstractSet, Mapping

from .model import (
    Clause,
    ClockComponent,
    Init,
    InitCopy,
    InitPair,
    Instance,
    Out,
    Prop,
    Role,
    RoleConflict,
    RoleMap,
    Variant,
    assign_roles,
    clause_qudits,
)

RULE_ORDER = (
    "single-type-qudits",
    "clock-degree",
    "branching",
    "direction",
    "endpoint-degree",
    "misplaced-boundary",
    "witness-state-conflict",
    "witness-zero-conflict",
    "pair-zero-conflict",
    "pair-degree",
    "cross-task-prop",
    "cross-task-boundary",
)

#: Witness assignment: witness-qudit index -> classical bit.
Witness = Mapping[int, int]


class WitnessMissing(ValueError):
    """The variant requires a witness assignment and none was given."""


class WitnessLengthMismatch(ValueError):
    """The witness assignment does not cover exactly the witness qudits."""


@dataclass(frozen=True)
class Tacc:
    """One truly active clock chain: the unit handed to a subroutine.

    ``clocks`` lists the chain's clock qudits in walk order.  ``steps[t]``
    holds the indices of the well-defined propagation clauses advancing
    clock ``t`` to ``t+1`` (simultaneous propagation means several).
    ``inits`` and ``outs`` hold boundary-clause indices at the first and
    last clock.  ``truncated`` marks a chain cut before a real out clause
    by an undefined propagation.  ``q_logicals`` are the plainly
    initialized logical qudits, ``p_logicals`` the copy- or pair-fed ones;
    together they form the subroutine's register, in that order, each
    ascending.
    """

    clocks: tuple[int, ...]
    steps: tuple[tuple[int, ...], ...]
    inits: tuple[int, ...]
    outs: tuple[int, ...]
    truncated: bool
    q_logicals: tuple[int, ...] = ()
    p_logicals: tuple[int, ...] = ()

    @property
    def length(self) -> int:
        return len(self.clocks) - 1

    @property
    def q(self) -> int:
        return len(self.q_logicals)

    @property
    def p(self) -> int:
        return len(self.p_logicals)

    def clause_indices(self) -> tuple[int, ...]:
        flat = list(self.inits) + list(self.outs)
        for step in self.steps:
            flat.extend(step)
        return tuple(sorted(flat))

    def to_obj(self) -> dict:
        return {
            "clocks": list(self.clocks),
            "steps": [list(step) for step in self.steps],
            "inits": list(self.inits),
            "outs": list(self.outs),
            "truncated": self.truncated,
            "length": self.length,
            "q": self.q,
            "p": self.p,
        }


@dataclass(frozen=True)
class Unsat:
    rule: str
    evidence: tuple[int, ...] = ()

    def to_obj(self) -> dict:
        return {
            "decision": "unsat",
            "rule": self.rule,
            "evidence": list(self.evidence),
            "tasks": [],
        }


@dataclass(frozen=True)
class TriviallySat:
    def to_obj(self) -> dict:
        return {
            "decision": "trivially_sat",
            "rule": None,
            "evidence": [],
            "tasks": [],
        }


@dataclass(frozen=True)
class NeedsSubroutine:
    tasks: tuple[Tacc, ...]

    def to_obj(self) -> dict:
        return {
            "decision": "needs_subroutine",
            "rule": None,
            "evidence": [],
            "tasks": [task.to_obj() for task in self.tasks],
        }


StructuralVerdict = Unsat | TriviallySat | NeedsSubroutine


def mark_undefined(instance: Instance) -> set[int]:
    """Indices of Prop clauses with a never-initialized logical qudit.

    Marking is instance-wide: an init clause anywhere defines the logical,
    even across clock components.
    """
    initialized = {
        cl.logical
        for cl in instance.clauses
        if isinstance(cl, (Init, InitCopy, InitPair))
    }
    return {
        i
        for i, cl in enumerate(instance.clauses)
        if isinstance(cl, Prop) and any(l not in initialized for l in cl.logicals)
    }


def _chain_components(instance: Instance) -> list[ClockComponent]:
    """Clock components: clauses linked through shared clock or endpoint qudits.

    Logical (and witness/aux) qudits do not join components; a logical shared
    between two chains leaves them separate tasks, checked against each other
    only by the cross-task rules.
    """
    link_qudits: list[tuple[int, ...]] = []
    for cl in instance.clauses:
        if isinstance(cl, (Init, Out)):
            links = (cl.clock,) if cl.endpoint is None else (cl.clock, cl.endpoint)
        elif isinstance(cl, (InitCopy, InitPair)):
            links = (cl.clock,)
        elif isinstance(cl, Prop):
            links = (cl.clock_pred, cl.clock_succ)
        else:
            links = ()
        link_qudits.append(links)

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

    for links in link_qudits:
        for q in links:
            parent.setdefault(q, q)
        for q in links[1:]:
            union(links[0], q)

    members: dict[int, set[int]] = {}
    clause_groups: dict[int, list[int]] = {}
    for q in parent:
        members.setdefault(find(q), set()).add(q)
    for i, links in enumerate(link_qudits):
        if links:
            root = find(links[0])
            clause_groups.setdefault(root, []).append(i)
            members[root].update(clause_qudits(instance.clauses[i]))

    return [
        ClockComponent(
            qudits=frozenset(members[root]),
            clause_indices=tuple(clause_groups.get(root, ())),
        )
        for root in sorted(clause_groups)
    ]


def _is_boundary(cl: Clause) -> bool:
    return isinstance(cl, (Init, InitCopy, InitPair))


@dataclass
class _ChainMaps:
    """Per-component clause lookups used by the chain walks."""

    inits_at: dict[int, list[int]] = field(default_factory=dict)
    outs_at: dict[int, list[int]] = field(default_factory=dict)
    props_out: dict[int, list[int]] = field(default_factory=dict)
    props_in: dict[int, list[int]] = field(default_factory=dict)

    def neighbors(self, clock: int, instance: Instance) -> set[int]:
        other = set()
        for i in self.props_out.get(clock, ()):
            other.add(instance.clauses[i].clock_succ)
        for i in self.props_in.get(clock, ()):
            other.add(instance.clauses[i].clock_pred)
        return other


def _chain_maps(instance: Instance, clause_indices: AbstractSet[int]) -> _ChainMaps:
    maps = _ChainMaps()
    for i in sorted(clause_indices):
        cl = instance.clauses[i]
        if _is_boundary(cl):
            maps.inits_at.setdefault(cl.clock, []).append(i)
        elif isinstance(cl, Out):
            maps.outs_at.setdefault(cl.clock, []).append(i)
        elif isinstance(cl, Prop):
            maps.props_out.setdefault(cl.clock_pred, []).append(i)
            maps.props_in.setdefault(cl.clock_succ, []).append(i)
    return maps


def _registers(
    instance: Instance, init_indices: tuple[int, ...]
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    plain, fed = set(), set()
    for i in init_indices:
        cl = instance.clauses[i]
        if isinstance(cl, Init):
            plain.add(cl.logical)
        else:
            fed.add(cl.logical)
    return tuple(sorted(plain - fed)), tuple(sorted(fed))


def _make_tacc(
    instance: Instance,
    clocks: list[int],
    steps: list[tuple[int, ...]],
    inits: list[int],
    outs: list[int],
) -> Tacc:
    q_logicals, p_logicals = _registers(instance, tuple(inits))
    return Tacc(
        clocks=tuple(clocks),
        steps=tuple(steps),
        inits=tuple(inits),
        outs=tuple(outs),
        truncated=not outs,
        q_logicals=q_logicals,
        p_logicals=p_logicals,
    )


def _walk_chains(
    instance: Instance,
    clause_indices: AbstractSet[int],
    undefined: AbstractSet[int],
) -> Unsat | list[Tacc]:
    """Walk one live component from each init clock; reject or cut chains.

    A clock "stops" a chain if it carries an out clause or feeds an
    undefined propagation (the chain beyond that point can freeze in the
    ready state).  Rejections cover every shape where a boundary clause
    sits off the end of a chain or the chain is not a forward-directed
    line.
    """
    maps = _chain_maps(instance, clause_indices)

    def stop(clock: int) -> bool:
        if maps.outs_at.get(clock):
            return True
        return any(i in undefined for i in maps.props_out.get(clock, ()))

    init_clocks = sorted(maps.inits_at)

    # Init clocks off a stop: no incoming edges, a single successor once
    # any propagation there is well defined.
    for c in init_clocks:
        if stop(c):
            continue
        incoming = maps.props_in.get(c, ())
        if incoming:
            return Unsat(
                "misplaced-boundary", (min(maps.inits_at[c]), min(incoming))
            )
        outgoing = maps.props_out.get(c, ())
        partners = {instance.clauses[i].clock_succ for i in outgoing}
        if len(partners) > 1 and any(i not in undefined for i in outgoing):
            return Unsat("branching", tuple(sorted(outgoing)))

    taccs: list[Tacc] = []

    # Chain walks from init clocks with a well-defined outgoing edge.
    for c in init_clocks:
        if stop(c) or not maps.props_out.get(c):
            continue
        clocks = [c]
        steps: list[tuple[int, ...]] = []
        prev, cur = c, instance.clauses[maps.props_out[c][0]].clock_succ
        steps.append(tuple(maps.props_out[c]))
        visited = {c}
        while True:
            between = set(maps.props_out.get(prev, ())) & set(
                maps.props_in.get(cur, ())
            )
            if stop(cur):
                extras = [
                    i
                    for i in maps.props_in.get(cur, []) + maps.props_out.get(cur, [])
                    if i not in between
                ]
                bad = [
                    i
                    for i in extras
                    if instance.clauses[i].clock_succ == cur or i not in undefined
                ]
                if bad:
                    return Unsat("misplaced-boundary", tuple(sorted(set(bad))))
                clocks.append(cur)
                taccs.append(
                    _make_tacc(
                        instance,
                        clocks,
                        steps,
                        maps.inits_at[c],
                        maps.outs_at.get(cur, []),
                    )
                )
                break
            others = maps.neighbors(cur, instance) - {prev}
            if len(others) > 1:
                return Unsat("clock-degree", (cur,))
            if not others:
                # Bare chain end without an out clause: unreachable in a
                # live component, kept as a defensive cut.
                clocks.append(cur)
                taccs.append(
                    _make_tacc(instance, clocks, steps, maps.inits_at[c], [])
                )
                break
            nxt = others.pop()
            touching = [
                i
                for i in maps.props_out.get(cur, []) + maps.props_in.get(cur, [])
                if i not in between
            ]
            backward = [
                i for i in touching if instance.clauses[i].clock_succ == cur
            ]
            if backward:
                return Unsat("direction", tuple(sorted(backward)))
            if nxt in visited:
                raise RuntimeError("chain walk revisited a clock qudit")
            clocks.append(cur)
            visited.add(cur)
            steps.append(tuple(i for i in maps.props_out[cur]))
            prev, cur = cur, nxt

    # Active dots: init and stop on one clock.  Only undefined outgoing
    # propagation may touch it.
    for c in init_clocks:
        if not stop(c):
            continue
        incoming = maps.props_in.get(c, ())
        defined = [i for i in maps.props_out.get(c, ()) if i not in undefined]
        if incoming or defined:
            bad = sorted(set(incoming) | set(defined))
            return Unsat("misplaced-boundary", tuple(bad))
        taccs.append(
            _make_tacc(instance, [c], [], maps.inits_at[c], maps.outs_at.get(c, []))
        )

    return taccs


def _lct_structure(instance: Instance) -> Unsat | None:
    """Endpoint-variant wiring rules, applied before anything is ignored.

    The Bell-pair terms of these clauses are unconditional, so a wiring
    violation is unsatisfiable even inside an otherwise ignorable
    component.
    """
    neighbors: dict[int, set[int]] = {}
    succs: dict[int, set[int]] = {}
    preds: dict[int, set[int]] = {}
    endpoint_links: dict[int, set[tuple[int, str]]] = {}
    for cl in instance.clauses:
        if isinstance(cl, Prop):
            neighbors.setdefault(cl.clock_pred, set()).add(cl.clock_succ)
            neighbors.setdefault(cl.clock_succ, set()).add(cl.clock_pred)
            succs.setdefault(cl.clock_pred, set()).add(cl.clock_succ)
            preds.setdefault(cl.clock_succ, set()).add(cl.clock_pred)
        elif isinstance(cl, (Init, Out)) and cl.endpoint is not None:
            neighbors.setdefault(cl.clock, set()).add(cl.endpoint)
            kind = "init" if isinstance(cl, Init) else "out"
            endpoint_links.setdefault(cl.endpoint, set()).add((cl.clock, kind))

    for clock in sorted(neighbors):
        if len(neighbors[clock]) > 2:
            return Unsat("clock-degree", (clock,))
    for clock in sorted(set(succs) | set(preds)):
        if len(succs.get(clock, ())) > 1 or len(preds.get(clock, ())) > 1:
            return Unsat("branching", (clock,))
    for endpoint in sorted(endpoint_links):
        links = endpoint_links[endpoint]
        if len({clock for clock, _ in links}) > 1 or len(links) > 1:
            return Unsat("endpoint-degree", (endpoint,))

    # Init clauses belong on chain beginnings, out clauses on chain ends.
    for i, cl in enumerate(instance.clauses):
        if isinstance(cl, Init) and cl.endpoint is not None:
            if preds.get(cl.clock):
                return Unsat("misplaced-boundary", (i,))
        elif isinstance(cl, Out) and cl.endpoint is not None:
            if succs.get(cl.clock):
                return Unsat("misplaced-boundary", (i,))
    return None


def _walk_lct_chain(
    instance: Instance,
    clause_indices: AbstractSet[int],
    undefined: AbstractSet[int],
) -> list[Tacc]:
    """Extract the single chain of a live endpoint-variant component."""
    maps = _chain_maps(instance, clause_indices)
    clocks_here = set(maps.inits_at) | set(maps.outs_at)
    clocks_here.update(maps.props_out)
    clocks_here.update(maps.props_in)
    beginnings = sorted(c for c in clocks_here if not maps.props_in.get(c))
    taccs: list[Tacc] = []
    for b in beginnings:
        if not maps.inits_at.get(b):
            continue
        clocks = [b]
        steps: list[tuple[int, ...]] = []
        cur = b
        for _ in range(len(clause_indices) + 1):
            outgoing = maps.props_out.get(cur, ())
            if any(i in undefined for i in outgoing):
                taccs.append(
                    _make_tacc(instance, clocks, steps, maps.inits_at[b], [])
                )
                break
            if not outgoing:
                taccs.append(
                    _make_tacc(
                        instance,
                        clocks,
                        steps,
                        maps.inits_at[b],
                        maps.outs_at.get(cur, []),
                    )
                )
                break
            steps.append(tuple(outgoing))
            cur = instance.clauses[outgoing[0]].clock_succ
            clocks.append(cur)
        else:
            raise RuntimeError("chain walk revisited a clock qudit")
    return taccs


def extract_tacc(
    instance: Instance,
    component: ClockComponent,
    undefined: AbstractSet[int],
) -> list[Tacc]:
    """Cut one vetted component into its truly active clock chains.

    The component must already have passed the rejection rules (analyze
    runs them); a live component then decomposes into chains from each
    init clock to an out clause (``truncated=False``) or to the clock
    feeding the first undefined propagation (``truncated=True``).  Active
    dots come out as length-0 chains.
    """
    indices = set(component.clause_indices)
    if instance.variant is Variant.LCT:
        return _walk_lct_chain(instance, indices, undefined)
    result = _walk_chains(instance, indices, undefined)
    if isinstance(result, Unsat):
        raise ValueError(
            f"component violates structural rule {result.rule}; "
            "run analyze first"
        )
    return result


def _witness_checks(
    instance: Instance, live: AbstractSet[int], wit: Witness
) -> Unsat | None:
    copies: dict[int, list[int]] = {}
    plain: dict[int, list[int]] = {}
    for i in sorted(live):
        cl = instance.clauses[i]
        if isinstance(cl, InitCopy):
            copies.setdefault(cl.logical, []).append(i)
        elif isinstance(cl, Init):
            plain.setdefault(cl.logical, []).append(i)
    for logical in sorted(copies):
        idxs = copies[logical]
        bits = {wit[instance.clauses[i].witness] for i in idxs}
        if len(bits) > 1:
            return Unsat("witness-state-conflict", tuple(idxs))
    for logical in sorted(copies):
        if logical not in plain:
            continue
        ones = [
            i for i in copies[logical] if wit[instance.clauses[i].witness] == 1
        ]
        if ones:
            return Unsat(
                "witness-zero-conflict", (min(plain[logical]), *ones)
            )
    return None


def _pair_checks(instance: Instance, live: AbstractSet[int]) -> Unsat | None:
    pairs: dict[int, list[int]] = {}
    by_aux: dict[int, list[int]] = {}
    plain: dict[int, list[int]] = {}
    for i in sorted(live):
        cl = instance.clauses[i]
        if isinstance(cl, InitPair):
            pairs.setdefault(cl.logical, []).append(i)
            by_aux.setdefault(cl.aux, []).append(i)
        elif isinstance(cl, Init):
            plain.setdefault(cl.logical, []).append(i)
    for logical in sorted(pairs):
        if logical in plain:
            return Unsat(
                "pair-zero-conflict",
                (min(plain[logical]), min(pairs[logical])),
            )
    for logical in sorted(pairs):
        auxes = {instance.clauses[i].aux for i in pairs[logical]}
        if len(auxes) > 1:
            return Unsat("pair-degree", tuple(pairs[logical]))
    for aux in sorted(by_aux):
        logicals = {instance.clauses[i].logical for i in by_aux[aux]}
        if len(logicals) > 1:
            return Unsat("pair-degree", tuple(by_aux[aux]))
    return None


def _cross_task_checks(instance: Instance, tasks: list[Tacc]) -> Unsat | None:
    prop_use: dict[int, list[tuple[int, int]]] = {}
    any_use: dict[int, list[tuple[int, int]]] = {}
    init_use: dict[int, list[tuple[int, int]]] = {}
    out_use: dict[int, list[tuple[int, int]]] = {}
    for t, task in enumerate(tasks):
        for step in task.steps:
            for i in step:
                for logical in instance.clauses[i].logicals:
                    prop_use.setdefault(logical, []).append((t, i))
                    any_use.setdefault(logical, []).append((t, i))
        for i in task.inits:
            logical = instance.clauses[i].logical
            init_use.setdefault(logical, []).append((t, i))
            any_use.setdefault(logical, []).append((t, i))
        for i in task.outs:
            logical = instance.clauses[i].logical
            out_use.setdefault(logical, []).append((t, i))
            any_use.setdefault(logical, []).append((t, i))

    for logical in sorted(prop_use):
        for t_other, idx_other in any_use[logical]:
            foreign = [idx for tp, idx in prop_use[logical] if tp != t_other]
            if foreign:
                return Unsat(
                    "cross-task-prop", tuple(sorted((min(foreign), idx_other)))
                )
    for logical in sorted(init_use):
        if logical not in out_use:
            continue
        for t_i, i in init_use[logical]:
            for t_o, o in out_use[logical]:
                if t_i != t_o:
                    return Unsat(
                        "cross-task-boundary", tuple(sorted((i, o)))
                    )
    return None


def analyze(instance: Instance, wit: Witness | None = None) -> StructuralVerdict:
    """Decide an instance structurally or emit the tasks a subroutine needs.

    ``wit`` must be present exactly for the witnessed variant and must
    assign a bit to every witness qudit.
    """
    if instance.variant is Variant.QUBIT:
        raise ValueError("qubit instances are decided via qubitize.dequbitize")
    if instance.variant is Variant.WITNESSED_SLCT:
        if wit is None:
            raise WitnessMissing("WitnessedSLCT requires a witness assignment")
    elif wit is not None:
        raise ValueError(f"variant {instance.variant.value} takes no witness")

    try:
        roles: RoleMap = assign_roles(instance)
    except RoleConflict as exc:
        return Unsat("single-type-qudits", (exc.qudit,))

    if wit is not None:
        witness_qudits = {q for q, r in roles.items() if r is Role.WITNESS}
        if set(wit) != witness_qudits:
            raise WitnessLengthMismatch(
                f"witness covers {sorted(wit)}, expected {sorted(witness_qudits)}"
            )
        if any(b not in (0, 1) for b in wit.values()):
            raise ValueError("witness bits must be 0 or 1")

    if instance.variant is Variant.LCT:
        verdict = _lct_structure(instance)
        if verdict is not None:
            return verdict

    comps = _chain_components(instance)
    live_comps = []
    for comp in comps:
        kinds = {type(instance.clauses[i]) for i in comp.clause_indices}
        has_init = bool(kinds & {Init, InitCopy, InitPair})
        has_out = Out in kinds
        if has_init and has_out:
            live_comps.append(comp)
    live = {i for comp in live_comps for i in comp.clause_indices}

    if instance.variant is Variant.WITNESSED_SLCT:
        verdict = _witness_checks(instance, live, wit)
        if verdict is not None:
            return verdict
    if instance.variant is Variant.CLASSICAL_SLCT:
        verdict = _pair_checks(instance, live)
        if verdict is not None:
            return verdict

    # Undefined marking over the live clauses: an init clause that was
    # ignored above no longer defines anything (its component satisfies
    # itself with the logical left free).
    initialized = {
        instance.clauses[i].logical
        for i in live
        if _is_boundary(instance.clauses[i])
    }
    undefined = {
        i
        for i in live
        if isinstance(instance.clauses[i], Prop)
        and any(l not in initialized for l in instance.clauses[i].logicals)
    }

    tasks: list[Tacc] = []
    for comp in live_comps:
        indices = set(comp.clause_indices)
        if instance.variant is Variant.LCT:
            tasks.extend(_walk_lct_chain(instance, indices, undefined))
        else:
            result = _walk_chains(instance, indices, undefined)
            if isinstance(result, Unsat):
                return result
            tasks.extend(result)

    verdict = _cross_task_checks(instance, tasks)
    if verdict is not None:
        return verdict

    # A truncated chain without simultaneous propagation is satisfied by
    # its own partial history state.
    kept = [
        task
        for task in tasks
        if not (task.truncated and all(len(step) == 1 for step in task.steps))
    ]
    kept.sort(key=lambda task: task.clocks[0])
    if kept:
        return NeedsSubroutine(tuple(kept))
    return TriviallySat()
