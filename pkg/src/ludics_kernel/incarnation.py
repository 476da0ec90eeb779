"""Incarnation: material designs of the dual and of the generated behaviour.

The dual's incarnation is read off the maximal cliques of dualized
visitable paths whose primal sets are finite-stable and saturated; running
that construction twice yields the incarnation of the behaviour itself.
A bounded brute-force enumerator provides the independent oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .core import (
    DAIMON,
    Action,
    Chronicle,
    Design,
    Locus,
    LudicsError,
    Net,
    NetBase,
    Sequent,
    design_from_tuples,
    validate_design,
    validate_net,
)
from .interaction import interact
from .paths import (
    Path,
    PathSet,
    dual,
    net_from_clique,
    paths_coherent,
    paths_of_net,
    prefix_views,
)
from .visitability import (
    RamificationUniverse,
    VisitableSet,
    member_paths,
    visitable_set,
)


class IncarnationError(LudicsError):
    pass


class CliqueCapExceeded(LudicsError):
    def __init__(self, cap: int):
        super().__init__("CliqueCapExceeded", f"more than {cap} maximal cliques")
        self.cap = cap


class BoundExceeded(LudicsError):
    def __init__(self, cap: int):
        super().__init__("BoundExceeded", f"enumeration exceeds {cap} designs")
        self.cap = cap


DUAL_OF_E = "DualOfE"
BEHAVIOUR_OF_E = "BehaviourOfE"


@dataclass(frozen=True)
class CliqueCandidate:
    """One maximal clique of dual visitable paths, with its primal set."""

    primal: tuple[Path, ...]
    dualized: tuple[Path, ...]
    finite_stable: bool
    saturated: bool
    accepted: bool


@dataclass(frozen=True)
class IncarnationResult:
    nets: frozenset[Net]
    source: str
    step_log: Mapping[str, object] = field(default_factory=dict)

    def sorted(self) -> list[Net]:
        return sorted(self.nets, key=Net.sort_key)


def bron_kerbosch(
    vertices: Sequence[int], neighbors: Mapping[int, frozenset[int]], cap: Optional[int] = None
) -> Iterator[frozenset[int]]:
    """Maximal cliques with pivoting, in a deterministic order."""
    count = 0

    def rec(r: set[int], p: set[int], x: set[int]) -> Iterator[frozenset[int]]:
        nonlocal count
        if not p and not x:
            count += 1
            if cap is not None and count > cap:
                raise CliqueCapExceeded(cap)
            yield frozenset(r)
            return
        pivot = max(sorted(p | x), key=lambda v: len(p & neighbors[v]))
        for v in sorted(p - neighbors[pivot]):
            yield from rec(r | {v}, p & neighbors[v], x & neighbors[v])
            p.remove(v)
            x.add(v)

    yield from rec(set(), set(vertices), set())


def is_finite_stable(paths: Iterable[Path], members: Sequence[Net]) -> bool:
    """Every strictly increasing chain whose views fit inside one member is
    finite.  The prefix order on a finite set is well-founded, so the
    literal check walks every maximal chain to its end; a chain that could
    not be walked to completion would witness instability."""
    ordered = sorted(set(paths), key=Path.sort_key)
    n = len(ordered)

    def extends(i: int, j: int) -> bool:
        a, b = ordered[i].actions, ordered[j].actions
        return len(b) > len(a) and b[: len(a)] == a

    covers: dict[int, list[int]] = {}
    for i in range(n):
        above = [j for j in range(n) if extends(i, j)]
        covers[i] = [
            j for j in above if not any(k != j and extends(k, j) for k in above)
        ]
    member_chrons = [m.chronicle_tuples() for m in members]
    roots = [i for i in range(n) if not any(extends(j, i) for j in range(n))]
    stack: list[tuple[int, tuple[int, ...]]] = [(r, (r,)) for r in roots]
    while stack:
        i, chain = stack.pop()
        if covers[i]:
            stack.extend((j, chain + (j,)) for j in covers[i])
            continue
        views: set[tuple[Action, ...]] = set()
        for idx in chain:
            p = ordered[idx]
            pv = prefix_views(p)
            views.update(pv[m] for m in range(1, len(p.actions) + 1))
        if any(views <= chron for chron in member_chrons):
            # the chain is materialized inside one member and the walk
            # reached its top element, hence it is finite
            continue
    return True


def is_saturated(paths: Iterable[Path], visitable: VisitableSet) -> bool:
    """Every visitable proper positive extension of an explored prefix is
    itself explored."""
    prefixes: set[tuple[Action, ...]] = set()
    for p in paths:
        for n in range(len(p.actions) + 1):
            prefixes.add(p.actions[:n])
    for v in visitable.paths:
        acts = v.actions
        if not acts:
            continue
        last = acts[-1]
        if not last.is_positive or last.is_daimon:
            continue
        if acts[:-1] in prefixes and acts not in prefixes:
            return False
    return True


def incarnation_of_dual(
    members: Sequence[Net],
    visitable: Optional[VisitableSet] = None,
    clique_cap: Optional[int] = None,
) -> IncarnationResult:
    """Material counter-nets, from maximal cliques of dual visitable paths."""
    if visitable is None:
        visitable = visitable_set(members)
    primal = visitable.sorted()
    dualized = [dual(p) for p in primal]
    idx = list(range(len(dualized)))
    neighbors = {
        i: frozenset(
            j for j in idx if j != i and paths_coherent(dualized[i], dualized[j])
        )
        for i in idx
    }
    nets: set[Net] = set()
    log: list[CliqueCandidate] = []
    for clique in bron_kerbosch(idx, neighbors, clique_cap):
        cl = sorted(clique)
        c_primal = tuple(primal[i] for i in cl)
        c_dual = tuple(dualized[i] for i in cl)
        fs = is_finite_stable(c_primal, members)
        sat = is_saturated(c_primal, visitable)
        accepted = fs and sat
        log.append(CliqueCandidate(c_primal, c_dual, fs, sat, accepted))
        if accepted:
            nets.add(net_from_clique(c_dual))
    return IncarnationResult(
        frozenset(nets), DUAL_OF_E, {"visitable": visitable, "cliques": tuple(log)}
    )


def incarnation_of_behaviour(
    designs: Sequence[Design], clique_cap: Optional[int] = None
) -> IncarnationResult:
    """The two-round construction: visitable paths, dual incarnation,
    visitable paths of that, dual incarnation again."""
    members = [validate_net([d]) for d in designs]
    pathsets = member_paths(members)
    from .visitability import candidate_paths

    cands = candidate_paths(members, pathsets)
    v_e = visitable_set(members, pathsets)
    inc_dual = incarnation_of_dual(members, v_e, clique_cap)
    dual_members = inc_dual.sorted()
    v_dual = visitable_set(dual_members)
    final = incarnation_of_dual(dual_members, v_dual, clique_cap)
    return IncarnationResult(
        final.nets,
        BEHAVIOUR_OF_E,
        {
            "candidates": tuple(cands),
            "visitable": v_e,
            "incarnation_of_dual": inc_dual,
            "visitable_of_dual": v_dual,
            "final": final,
        },
    )


def incarnation_of_design(design: Design, designs: Sequence[Design]) -> Design:
    """The part of one member actually visited by counter-nets of the set."""
    if design not in designs:
        raise IncarnationError("DesignNotInE", f"{design.base}: design not a member")
    members = [validate_net([d]) for d in designs]
    pathsets = member_paths(members)
    v_e = visitable_set(members, pathsets)
    own = pathsets[list(designs).index(design)].tuples()
    used = [p for p in v_e.sorted() if p.actions in own]
    net = net_from_clique(
        used if used else [Path((), members[0].base)]
    )
    return net.component(design.base)


def daimon_closure(design: Design) -> frozenset[Design]:
    """All designs obtained by giving up at chosen negative prefixes.

    On a positive base the empty prefix is a cut point too: replacing the
    whole tree by the daimon yields the always-material design Dai+.
    """
    cut_points: list[tuple[Action, ...]] = [
        c.actions for c in design.chronicles if c.actions[-1].is_negative
    ]
    if design.base.is_positive:
        cut_points.append(())
    cut_points.sort(key=lambda t: (len(t), tuple(a.sort_key() for a in t)))
    out: set[Design] = set()
    for r in range(len(cut_points) + 1):
        for cuts in itertools.combinations(cut_points, r):
            minimal = [
                t for t in cuts if not any(o != t and t[: len(o)] == o for o in cuts)
            ]
            kept = [
                c.actions
                for c in design.chronicles
                if not any(c.actions[: len(t)] == t for t in minimal)
            ]
            kept.extend(t + (DAIMON,) for t in minimal)
            out.add(design_from_tuples(design.base, kept))
    return frozenset(out)


def daimon_closure_set(designs: Iterable[Design]) -> frozenset[Design]:
    out: set[Design] = set()
    for d in designs:
        out |= daimon_closure(d)
    return frozenset(out)


def enumerate_bounded_designs(
    base: Sequent,
    loci: Iterable[Locus],
    universe: RamificationUniverse,
    depth: int,
    cap: int = 10**6,
) -> frozenset[Design]:
    """All designs over the given action alphabet with chronicles of
    bounded length.  Counts against a hard cap."""
    allowed = frozenset(loci)
    counter = itertools.count(1)

    def budget() -> None:
        if next(counter) > cap:
            raise BoundExceeded(cap)

    def positive_options(avail: frozenset[Locus], used: frozenset[Locus], length: int):
        """Subtrees rooted at a positive action, as sets of chronicle tuples.

        avail holds the loci a positive action may focus: the base right
        part plus children of the negatives along the branch.
        """
        budget()
        if length + 1 > depth:
            return []
        options: list[frozenset[tuple[Action, ...]]] = [frozenset([(DAIMON,)])]
        for focus in sorted(avail - used):
            if focus not in allowed:
                continue
            for ram in sorted(universe.ramifications(focus)):
                head = Action("+", focus, ram)
                child_focuses = frozenset(
                    focus.child(i) for i in ram if focus.child(i) in allowed
                )
                for sub in negative_options(
                    avail, child_focuses, used | {focus}, length + 1
                ):
                    options.append(
                        frozenset([(head,)] + [(head,) + t for t in sub])
                    )
        return options

    def negative_options(
        avail: frozenset[Locus],
        opened: frozenset[Locus],
        used: frozenset[Locus],
        length: int,
    ):
        """Forests of negative branches directly under one positive action."""
        budget()
        if length + 2 > depth:
            return [frozenset()]
        branches: list[tuple[Action, frozenset[tuple[Action, ...]]]] = []
        for focus in sorted(opened):
            for ram in sorted(universe.ramifications(focus)):
                head = Action("-", focus, ram)
                grand = frozenset(
                    focus.child(i) for i in ram if focus.child(i) in allowed
                )
                for sub in positive_options(avail | grand, used | {focus}, length + 1):
                    branches.append(
                        (head, frozenset([(head,)] + [(head,) + t for t in sub]))
                    )
        forests: list[frozenset[tuple[Action, ...]]] = []
        for r in range(len(branches) + 1):
            for combo in itertools.combinations(branches, r):
                heads = [h for h, _ in combo]
                if len(set(heads)) != len(heads):
                    continue
                if not _propagation_ok(combo):
                    continue
                budget()
                merged: frozenset[tuple[Action, ...]] = frozenset()
                for _, body in combo:
                    merged |= body
                forests.append(merged)
        return forests

    def _propagation_ok(combo) -> bool:
        for (h1, b1), (h2, b2) in itertools.combinations(combo, 2):
            if h1.focus == h2.focus:
                continue
            f1 = {a.focus for t in b1 for a in t[1:] if a.is_proper}
            f2 = {a.focus for t in b2 for a in t[1:] if a.is_proper}
            if f1 & f2:
                return False
        return True

    designs: set[Design] = set()
    if base.is_positive:
        roots: list[frozenset[tuple[Action, ...]]] = (
            [frozenset([(DAIMON,)])] if depth >= 1 else []
        )
        if depth >= 1:
            for focus in sorted(base.right):
                if focus not in allowed:
                    continue
                for ram in sorted(universe.ramifications(focus)):
                    head = Action("+", focus, ram)
                    child_focuses = frozenset(
                        focus.child(i) for i in ram if focus.child(i) in allowed
                    )
                    for sub in negative_options(
                        frozenset(base.right), child_focuses, frozenset([focus]), 1
                    ):
                        roots.append(
                            frozenset([(head,)] + [(head,) + t for t in sub])
                        )
        for body in roots:
            designs.add(design_from_tuples(base, body))
    else:
        root = base.left
        branches: list[tuple[Action, frozenset[tuple[Action, ...]]]] = []
        if depth >= 2:
            for ram in sorted(universe.ramifications(root)):
                head = Action("-", root, ram)
                child_focuses = frozenset(
                    root.child(i) for i in ram if root.child(i) in allowed
                )
                for sub in positive_options(
                    frozenset(base.right) | child_focuses, frozenset([root]), 1
                ):
                    branches.append(
                        (head, frozenset([(head,)] + [(head,) + t for t in sub]))
                    )
        for r in range(len(branches) + 1):
            for combo in itertools.combinations(branches, r):
                heads = [h for h, _ in combo]
                if len(set(heads)) != len(heads):
                    continue
                if not _propagation_ok(combo):
                    continue
                budget()
                merged: frozenset[tuple[Action, ...]] = frozenset()
                for _, body in combo:
                    merged |= body
                designs.add(design_from_tuples(base, merged))
    return frozenset(designs)


def _subdesigns(design: Design) -> Iterator[Design]:
    """All valid designs included in the given one (small inputs only)."""
    chronicles = sorted(design.chronicles, key=Chronicle.sort_key)
    for r in range(len(chronicles) + 1):
        for combo in itertools.combinations(chronicles, r):
            try:
                yield validate_design(design.base, combo)
            except LudicsError:
                continue


def net_included(a: Net, b: Net) -> bool:
    """Componentwise chronicle inclusion over the shared base."""
    if a.base != b.base:
        return False
    return all(
        a.component(d.base).chronicles <= d.chronicles for d in b.designs
    )


def oracle_minimal_orthogonal(
    members: Sequence[Net],
    depth: Optional[int] = None,
    cap: int = 10**6,
) -> frozenset[Net]:
    """Brute-force reference for the dual's incarnation: enumerate bounded
    counter-nets, keep those orthogonal to every member, take the
    inclusion-minimal ones."""
    from .paths import dual_base

    base = members[0].base
    counter_base = dual_base(base)
    universe = RamificationUniverse.of(members)
    loci = {a.focus for m in members for a in m.actions() if a.is_proper}
    for m in members:
        for s in m.base.sequents:
            loci |= s.loci()
    if depth is None:
        depth = max(
            (len(t) for m in members for t in m.chronicle_tuples()), default=0
        ) + 1
    per_component = []
    for seq in sorted(counter_base.sequents, key=Sequent.sort_key):
        per_component.append(
            sorted(
                enumerate_bounded_designs(seq, loci, universe, depth, cap),
                key=Design.sort_key,
            )
        )
    total = 1
    for comp in per_component:
        total *= len(comp)
        if total > cap:
            raise BoundExceeded(cap)
    ortho: list[Net] = []
    for combo in itertools.product(*per_component):
        net = validate_net(combo)
        if all(interact(m, net).converges for m in members):
            ortho.append(net)
    minimal = [
        net
        for net in ortho
        if not any(other != net and net_included(other, net) for other in ortho)
    ]
    return frozenset(minimal)
