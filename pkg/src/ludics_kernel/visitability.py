"""Visitable paths: which paths of a design set are realized by interaction.

The test for one path builds a witness counter-net from the dual path's
views, completes every missing negative branch with a daimon answer, and
checks the witness against every member of the set.  Only negative actions
dual to positive actions occurring somewhere in the set can ever be
interrogated, so the completion ranges over that finite universe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .core import (
    DAIMON,
    Action,
    Chronicle,
    Design,
    Locus,
    LudicsError,
    Net,
    NetBase,
    validate_design,
    validate_net,
)
from .interaction import interact, restrictive_negative_jump_ok
from .paths import Path, PathSet, dual, net_from_clique, paths_of_net


class VisitabilityError(LudicsError):
    pass


@dataclass(frozen=True)
class RamificationUniverse:
    """Per-focus ramifications observed in a design set."""

    table: Mapping[Locus, frozenset[tuple[int, ...]]]

    @staticmethod
    def of(nets: Iterable[Net]) -> RamificationUniverse:
        out: dict[Locus, set[tuple[int, ...]]] = {}
        for net in nets:
            for a in net.actions():
                if a.is_proper:
                    out.setdefault(a.focus, set()).add(a.ramification)
        return RamificationUniverse({k: frozenset(v) for k, v in out.items()})

    def ramifications(self, focus: Locus) -> frozenset[tuple[int, ...]]:
        return self.table.get(focus, frozenset())

    def __contains__(self, item: tuple[Locus, tuple[int, ...]]) -> bool:
        focus, ram = item
        return ram in self.table.get(focus, frozenset())


def complete(design: Design, universe: RamificationUniverse) -> Design:
    """Extend every missing negative branch with a daimon answer.

    Positive-ended chronicles get one extension per (child locus,
    ramification) pair of the universe; a negative-base design also gets
    the missing initial branches, so an unreached component still answers.
    """
    tuples = set(design.chronicle_tuples())
    added: set[tuple[Action, ...]] = set()
    for t in sorted(tuples, key=len):
        last = t[-1]
        if not last.is_positive or last.is_daimon:
            continue
        for i in last.ramification:
            child = last.focus.child(i)
            for ram in universe.ramifications(child):
                ext = t + (Action("-", child, ram),)
                if ext not in tuples:
                    added.add(ext + (DAIMON,))
    if not design.base.is_positive:
        root = design.base.left
        firsts = {t[0] for t in tuples}
        for ram in universe.ramifications(root):
            opener = Action("-", root, ram)
            if opener not in firsts:
                added.add((opener, DAIMON))
    if not added:
        return design
    closed = set(tuples)
    for t in added:
        for n in range(1, len(t) + 1):
            closed.add(t[:n])
    return validate_design(
        design.base, (Chronicle(t, design.base) for t in closed)
    )


def complete_net(net: Net, universe: RamificationUniverse) -> Net:
    return validate_net([complete(d, universe) for d in net.designs])


def witness_net(path: Path, universe: RamificationUniverse) -> Net:
    """The completed counter-net built from the dual path's views."""
    return complete_net(net_from_clique([dual(path)]), universe)


def member_paths(members: Sequence[Net]) -> list[PathSet]:
    return [paths_of_net(m) for m in members]


def _shared_base(members: Sequence[Net]) -> NetBase:
    if not members:
        raise VisitabilityError("EmptyDesignSet", "no designs given")
    base = members[0].base
    for m in members[1:]:
        if m.base != base:
            raise VisitabilityError("BaseMismatch", "members on different bases")
    return base


def candidate_paths(
    members: Sequence[Net], pathsets: Optional[Sequence[PathSet]] = None
) -> list[Path]:
    """Positive-ended paths passing the two necessary conditions: the dual
    is itself a path, and negative extensions are stable across members."""
    _shared_base(members)
    if pathsets is None:
        pathsets = member_paths(members)
    tuple_sets = [ps.tuples() for ps in pathsets]
    pool: dict[tuple[Action, ...], Path] = {}
    for ps in pathsets:
        for p in ps.paths:
            if p.is_empty or p.ends_positive:
                pool.setdefault(p.actions, p)
    out = []
    for acts in sorted(pool, key=lambda t: (len(t), tuple(a.sort_key() for a in t))):
        p = pool[acts]
        if not restrictive_negative_jump_ok(p):
            continue
        stable = True
        for k, a in enumerate(acts):
            if not a.is_negative:
                continue
            w, wk = acts[:k], acts[: k + 1]
            for ts in tuple_sets:
                if w in ts and wk not in ts:
                    stable = False
                    break
            if not stable:
                break
        if stable:
            out.append(p)
    return out


@dataclass(frozen=True)
class VisitableSet:
    """The visitable paths of a design set, with witnessing members."""

    base: NetBase
    paths: frozenset[Path]
    provenance: Mapping[Path, tuple[int, ...]] = field(default_factory=dict)

    def sorted(self) -> list[Path]:
        return sorted(self.paths, key=Path.sort_key)

    def tuples(self) -> frozenset[tuple[Action, ...]]:
        return frozenset(p.actions for p in self.paths)

    def __len__(self) -> int:
        return len(self.paths)

    def __contains__(self, path: Path) -> bool:
        return path in self.paths


def is_visitable(
    path: Path,
    members: Sequence[Net],
    universe: Optional[RamificationUniverse] = None,
    pathsets: Optional[Sequence[PathSet]] = None,
) -> bool:
    """Decide visitability: the completed dual skeleton must be orthogonal
    to every member of the set."""
    _shared_base(members)
    if pathsets is None:
        pathsets = member_paths(members)
    if not any(path.actions in ps.tuples() for ps in pathsets):
        raise VisitabilityError("NotAPathOfE", f"{path} is a path of no member")
    if not path.is_empty and not path.ends_positive:
        return False
    if not restrictive_negative_jump_ok(path):
        return False
    if universe is None:
        universe = RamificationUniverse.of(members)
    witness = witness_net(path, universe)
    return all(interact(m, witness).converges for m in members)


def visitable_set(
    members: Sequence[Net],
    pathsets: Optional[Sequence[PathSet]] = None,
) -> VisitableSet:
    """V of a design set: the candidate paths that pass the witness test."""
    base = _shared_base(members)
    if pathsets is None:
        pathsets = member_paths(members)
    universe = RamificationUniverse.of(members)
    visitable: dict[Path, tuple[int, ...]] = {}
    for p in candidate_paths(members, pathsets):
        if is_visitable(p, members, universe, pathsets):
            prov = tuple(
                i for i, ps in enumerate(pathsets) if p.actions in ps.tuples()
            )
            visitable[p] = prov
    return VisitableSet(base, frozenset(visitable), dict(visitable))


def visitable_set_of_designs(designs: Sequence[Design]) -> VisitableSet:
    return visitable_set([validate_net([d]) for d in designs])
