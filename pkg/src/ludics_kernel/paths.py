"""Paths on net bases: views, validation, coherence, duality, reconstruction.

A path is an alternating justified sequence of actions that a normalization
could in principle follow on one side of a cut.  The view operator recovers
the chronicle a prefix is exploring; cliques of paths rebuild nets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional

from .core import (
    DAIMON,
    Action,
    Design,
    Locus,
    LudicsError,
    Net,
    NetBase,
    Sequent,
    actions_str,
    design_from_tuples,
    validate_net,
    _justifier_index,
)


class PathError(LudicsError):
    def __init__(self, kind: str, index: int, message: str):
        super().__init__(kind, f"at index {index}: {message}")
        self.index = index


@dataclass(frozen=True)
class Path:
    """A sequence of actions on a net base; certified by validate_path."""

    actions: tuple[Action, ...]
    base: NetBase

    def __len__(self) -> int:
        return len(self.actions)

    def prefix(self, n: int) -> Path:
        return Path(self.actions[:n], self.base)

    @property
    def is_empty(self) -> bool:
        return not self.actions

    @property
    def ends_positive(self) -> bool:
        return bool(self.actions) and self.actions[-1].is_positive

    @property
    def ends_daimon(self) -> bool:
        return bool(self.actions) and self.actions[-1].is_daimon

    def sort_key(self):
        return (len(self.actions), tuple(a.sort_key() for a in self.actions))

    def __str__(self) -> str:
        return actions_str(self.actions) if self.actions else "<empty>"


@dataclass(frozen=True)
class PathSet:
    """A set of paths on one base, closed as its producer declares."""

    base: NetBase
    paths: frozenset[Path]

    def tuples(self) -> frozenset[tuple[Action, ...]]:
        return frozenset(p.actions for p in self.paths)

    def sorted(self) -> list[Path]:
        return sorted(self.paths, key=Path.sort_key)

    def __len__(self) -> int:
        return len(self.paths)

    def __contains__(self, path: Path) -> bool:
        return path in self.paths


def _is_initial(action: Action, base: NetBase) -> bool:
    if action.is_daimon:
        return False
    return any(action.focus in s.loci() for s in base.sequents)


def view(seq: Iterable[Action], base: NetBase) -> tuple[Action, ...]:
    """The view of a sequence based on ``base``.

    Positive actions keep the view of what precedes them; a negative action
    restarts it from its justifier (or from nothing when initial).
    """
    acts = tuple(seq)
    memo: list[tuple[Action, ...]] = [()] * (len(acts) + 1)
    for i in range(1, len(acts) + 1):
        a = acts[i - 1]
        if a.is_positive:
            memo[i] = memo[i - 1] + (a,)
            continue
        if _is_initial(a, base):
            memo[i] = (a,)
            continue
        j = _justifier_index(acts, i - 1)
        if j is None:
            raise PathError(
                "UnjustifiedAction", i - 1, f"{a} is neither initial nor justified"
            )
        memo[i] = memo[j + 1] + (a,)
    return memo[len(acts)]


@lru_cache(maxsize=None)
def prefix_views(path: Path) -> tuple[tuple[Action, ...], ...]:
    """Views of every prefix of the path, index n giving view(path[:n])."""
    acts = path.actions
    memo: list[tuple[Action, ...]] = [()] * (len(acts) + 1)
    for i in range(1, len(acts) + 1):
        a = acts[i - 1]
        if a.is_positive:
            memo[i] = memo[i - 1] + (a,)
        elif _is_initial(a, path.base):
            memo[i] = (a,)
        else:
            j = _justifier_index(acts, i - 1)
            if j is None:
                raise PathError("UnjustifiedAction", i - 1, f"{a} unjustified")
            memo[i] = memo[j + 1] + (a,)
    return tuple(memo)


def _positive_jump_ok(acts: tuple[Action, ...], k: int, target: int) -> bool:
    """Justifier chain for the positive action acts[k] justified at ``target``.

    Walks backwards: the action right before each positive must be negative,
    and its own justifier restarts the walk, until the target is reached.
    """
    i = k
    while True:
        if i == 0:
            return False
        prev = i - 1
        if not acts[prev].is_negative:
            return False
        if prev == target:
            return True
        j = _justifier_index(acts, prev)
        if j is None:
            return False
        i = j


def validate_path(seq: Iterable[Action], base: NetBase) -> Path:
    """Check the six path conditions and return the certified Path."""
    acts = tuple(seq)
    pos = base.positive_sequent
    if pos is not None:
        if not acts:
            raise PathError("Totality", 0, "a path on a positive base is nonempty")
        first = acts[0]
        if not (first.is_daimon or (first.is_positive and first.focus in pos.right)):
            raise PathError(
                "Totality", 0, "a path on a positive base opens on the positive sequent"
            )
    for i, a in enumerate(acts):
        if i > 0 and acts[i - 1].polarity == a.polarity:
            raise PathError("Alternation", i, "polarities must alternate")
        if a.is_daimon:
            if i != len(acts) - 1:
                raise PathError("DaimonPlacement", i, "the daimon must be last")
            if i == 0 and pos is None:
                raise PathError(
                    "DaimonPlacement", 0, "an opening daimon needs a positive sequent"
                )
            continue
        for j in range(i):
            if acts[j].is_proper and acts[j].focus == a.focus:
                raise PathError("Linearity", i, f"focus {a.focus} reused")
        just = _justifier_index(acts, i)
        if a.is_negative:
            if just is None and not any(
                a.focus == s.left for s in base.sequents if s.left is not None
            ):
                raise PathError(
                    "Justification", i, f"{a} is neither justified nor initial"
                )
        else:
            if just is not None:
                if not _positive_jump_ok(acts, i, just):
                    raise PathError(
                        "NegativeJump", i, f"justifier of {a} escapes the view"
                    )
            else:
                home = None
                for s in base.sequents:
                    if a.focus in s.right:
                        home = s
                        break
                if home is None:
                    raise PathError(
                        "Justification", i, f"{a} is neither justified nor initial"
                    )
                if i == 0:
                    if not home.is_positive:
                        raise PathError(
                            "NegativeJump", 0, f"opening {a} on a negative sequent"
                        )
                else:
                    prev = acts[i - 1]
                    if not prev.is_negative:
                        raise PathError("Alternation", i, "polarities must alternate")
                    root = base.root_of(prev.focus)
                    if root not in home.loci():
                        raise PathError(
                            "NegativeJump",
                            i,
                            f"initial {a} not anchored in its own sequent",
                        )
    return Path(acts, base)


def is_path(seq: Iterable[Action], base: NetBase) -> bool:
    try:
        validate_path(seq, base)
        return True
    except LudicsError:
        return False


def flip_actions(actions: Iterable[Action]) -> tuple[Action, ...]:
    return tuple(a.flip() for a in actions)


def dual_base(base: NetBase) -> NetBase:
    """The base of the counter-net: one sequent against its flat spread."""
    seqs = sorted(base.sequents, key=Sequent.sort_key)
    if len(seqs) == 1:
        s = seqs[0]
        out: set[Sequent] = {Sequent(l, frozenset()) for l in s.right}
        if s.left is not None:
            out.add(Sequent(None, frozenset([s.left])))
        if not out:
            raise LudicsError("BadBase", f"{s} has no dual")
        return NetBase(frozenset(out))
    left: Optional[Locus] = None
    right: set = set()
    for s in seqs:
        if s.is_positive:
            if len(s.right) != 1:
                raise LudicsError("BadBase", f"no dual for net base {base}")
            left = next(iter(s.right))
        else:
            if s.right:
                raise LudicsError("BadBase", f"no dual for net base {base}")
            right.add(s.left)
    return NetBase(frozenset([Sequent(left, frozenset(right))]))


def dual(path: Path) -> Path:
    """Polarity-flipped path with the daimon toggled at the end.

    The result is built unvalidated: it is a path exactly when the input
    satisfies the restrictive negative jump condition.
    """
    if path.actions and path.actions[-1].is_negative:
        raise PathError("NegativeEndedInput", len(path) - 1, "dual of a negative-ended path")
    db = dual_base(path.base)
    if path.ends_daimon:
        return Path(flip_actions(path.actions[:-1]), db)
    return Path(flip_actions(path.actions) + (DAIMON,), db)


def paths_coherent(p1: Path, p2: Path) -> bool:
    """Coherence on paths: shared views agree on the next positive action,
    and divergent negatives spread over disjoint loci."""
    a1, a2 = p1.actions, p2.actions
    if a1 and a2:
        f1, f2 = a1[0], a2[0]
        if f1.polarity != f2.polarity:
            return False
        if f1.is_positive and f1 != f2:
            return False
    v1, v2 = prefix_views(p1), prefix_views(p2)
    pos1 = [i for i, a in enumerate(a1) if a.is_positive]
    pos2 = [i for i, a in enumerate(a2) if a.is_positive]
    for i in pos1:
        for j in pos2:
            if v1[i] == v2[j] and a1[i] != a2[j]:
                return False
    neg1 = [i for i, a in enumerate(a1) if a.is_negative]
    neg2 = [i for i, a in enumerate(a2) if a.is_negative]
    for i in neg1:
        ji = _justifier_index(a1, i)
        wi = v1[0 if ji is None else ji + 1]
        for j in neg2:
            if a1[i].focus == a2[j].focus:
                continue
            jj = _justifier_index(a2, j)
            wj = v2[0 if jj is None else jj + 1]
            if wi != wj:
                continue
            succ1 = {
                a1[m].focus
                for m in range(i + 1, len(a1))
                if a1[m].is_proper and a1[i] in v1[m + 1]
            }
            succ2 = {
                a2[m].focus
                for m in range(j + 1, len(a2))
                if a2[m].is_proper and a2[j] in v2[m + 1]
            }
            if succ1 & succ2:
                return False
    return True


def _extension_candidates(p1: Path, p2: Path):
    """All split points of p2 whose tail legally extends p1.

    Yields (bullet_progress, split_index); a successful split yields
    (6, j).  Progress records how many bullets passed, for error reporting.
    """
    a1, a2 = p1.actions, p2.actions
    if not a1 or not a1[-1].is_positive or a1[-1].is_daimon:
        yield (1, -1)
        return
    k1p = a1[-1]
    v1 = prefix_views(p1)
    v2 = prefix_views(p2)
    neg1 = [i for i, a in enumerate(a1) if a.is_negative]
    if not neg1:
        yield (4, -1)
        return
    for j, k2 in enumerate(a2):
        if not k2.is_negative:
            continue
        progress = 2
        tail = a2[j:]
        glued = view(a2[: j + 1], p2.base) + a2[j + 1 :]
        if not is_path(glued, p2.base):
            yield (progress, j)
            continue
        progress = 3
        focuses1 = {a.focus for a in a1 if a.is_proper}
        if any(a.is_proper and a.focus in focuses1 for a in tail):
            yield (progress, j)
            continue
        progress = 4
        j2 = _justifier_index(a2, j)
        matched = False
        for i in neg1:
            j1 = _justifier_index(a1, i)
            if j1 is None and j2 is None:
                pass
            elif j1 is not None and j2 is not None and a1[j1] == a2[j2]:
                pass
            elif (
                j1 == 0
                and j2 is None
                and len(a1) > 1
                and a1[0].is_positive
                and a2[:1] == a1[:1]
                and i == 1
                and j == 1
            ):
                pass
            else:
                continue
            progress = max(progress, 5)
            vi, vj = v1[i + 1], v2[j + 1]
            if (len(vi) == len(vj) and vi[:-1] == vj[:-1]) or (
                len(vi) == 2
                and vi[0].is_positive
                and vi[1] == a1[i]
                and vj == (a2[j],)
            ):
                matched = True
                break
        if matched:
            yield (6, j)
        else:
            yield (progress, j)


def extend_path(p1: Path, p2: Path) -> Path:
    """Graft a negative-headed suffix of p2 onto the positive end of p1."""
    best = 0
    for progress, j in _extension_candidates(p1, p2):
        if progress == 6:
            return Path(p1.actions + p2.actions[j:], p1.base)
        best = max(best, progress)
    raise PathError("ConditionViolated", best, f"extension bullet {best} fails")


def path_extensions(p1: Path, p2: Path) -> list[Path]:
    """Every path obtained by grafting some suffix of p2 onto p1."""
    out = []
    for progress, j in _extension_candidates(p1, p2):
        if progress == 6:
            out.append(Path(p1.actions + p2.actions[j:], p1.base))
    return out


def net_from_clique(paths: Iterable[Path]) -> Net:
    """Rebuild the net explored by a clique of paths.

    Views of all prefixes are bucketed per base sequent; untouched negative
    sequents get the empty design.
    """
    members = sorted(set(paths), key=Path.sort_key)
    if not members:
        raise LudicsError("IncoherentInput", "no paths given")
    base = members[0].base
    for p in members:
        if p.base != base:
            raise LudicsError("IncoherentInput", "paths on different bases")
    for i, p in enumerate(members):
        for q in members[i + 1 :]:
            if not paths_coherent(p, q):
                raise LudicsError("IncoherentInput", f"{p} vs {q}")
    tuples = {p.actions for p in members}
    for p in members:
        if p.is_empty:
            continue
        maximal = not any(
            len(t) > len(p.actions) and t[: len(p.actions)] == p.actions for t in tuples
        )
        if maximal and p.actions[-1].is_negative:
            raise LudicsError("NegativeMaximalPath", f"{p} ends negative")
    buckets: dict[Sequent, set[tuple[Action, ...]]] = {s: set() for s in base.sequents}
    for p in members:
        views = prefix_views(p)
        for n in range(1, len(p.actions) + 1):
            v = views[n]
            first = v[0]
            home = (
                base.positive_sequent if first.is_daimon else base.sequent_of(first.focus)
            )
            buckets[home].add(v)
    designs = []
    for sequent, vs in buckets.items():
        if not vs and sequent.is_positive:
            raise LudicsError(
                "IncoherentInput", f"positive sequent {sequent} left uncovered"
            )
        designs.append(design_from_tuples(sequent, vs))
    return validate_net(designs)


def _path_like_prefix(acts: tuple[Action, ...], base: NetBase) -> bool:
    """Prefix-monotone path conditions (everything except Totality)."""
    for i, a in enumerate(acts):
        if i > 0 and acts[i - 1].polarity == a.polarity:
            return False
        if a.is_daimon:
            if i != len(acts) - 1:
                return False
            if i == 0 and base.positive_sequent is None:
                return False
            continue
        for j in range(i):
            if acts[j].is_proper and acts[j].focus == a.focus:
                return False
        just = _justifier_index(acts, i)
        if a.is_negative:
            if just is None and not any(
                a.focus == s.left for s in base.sequents if s.left is not None
            ):
                return False
        else:
            if just is not None:
                if not _positive_jump_ok(acts, i, just):
                    return False
            else:
                home = None
                for s in base.sequents:
                    if a.focus in s.right:
                        home = s
                        break
                if home is None:
                    return False
                if i == 0:
                    if not home.is_positive:
                        return False
                else:
                    prev = acts[i - 1]
                    root = base.root_of(prev.focus)
                    if root not in home.loci():
                        return False
    return True


def paths_of_net_bruteforce(net: Net, max_len: Optional[int] = None) -> PathSet:
    """Oracle enumeration of the paths of a net.

    Grows sequences one action at a time; a sequence survives iff every
    prefix looks like a path and every prefix view is a chronicle of the
    net.  Agrees with paths_of_net once max_len covers the whole net.
    """
    base = net.base
    alphabet = sorted(net.actions(), key=Action.sort_key)
    limit = len(alphabet) if max_len is None else max_len
    chron = net.chronicle_tuples()
    found: set[tuple[Action, ...]] = set()

    def grow(acts: tuple[Action, ...]) -> None:
        if is_path(acts, base):
            found.add(acts)
        if len(acts) >= limit:
            return
        for a in alphabet:
            nxt = acts + (a,)
            if not _path_like_prefix(nxt, base):
                continue
            if view(nxt, base) not in chron:
                continue
            grow(nxt)

    grow(())
    return PathSet(base, frozenset(Path(t, base) for t in found))


def paths_of_net(net: Net) -> PathSet:
    """The paths of a net, by seeding and suffix grafting.

    Seeds are the chronicles (opened by the first positive action when the
    base has a positive sequent).  The pool is then closed by grafting a
    negative-headed suffix of one member onto the positive end of another;
    a graft survives iff it is a path whose prefix views all are chronicles
    of the net.  Every path arises this way: chop it at its last negative
    action, the head is a shorter path, and the tail is a suffix of the
    (possibly opener-prefixed) view, which is a seed.
    """
    base = net.base
    pos = base.positive_sequent
    chron = net.chronicle_tuples()
    seeds: set[tuple[Action, ...]] = set()
    if pos is None:
        seeds.add(())
        for t in chron:
            seeds.add(t)
    else:
        opener_design = net.component(pos)
        firsts = {c.actions[0] for c in opener_design.chronicles}
        kplus = next(iter(firsts)) if firsts else None
        for t in opener_design.chronicle_tuples():
            seeds.add(t)
        if kplus is not None and not kplus.is_daimon:
            for d in net.designs:
                if d is opener_design:
                    continue
                for t in d.chronicle_tuples():
                    seeds.add((kplus,) + t)

    def admissible(t: tuple[Action, ...]) -> bool:
        if not is_path(t, base):
            return False
        return all(view(t[: n + 1], base) in chron for n in range(len(t)))

    def order(ts):
        return sorted(ts, key=lambda t: (len(t), tuple(a.sort_key() for a in t)))

    def graftable(t):
        return t and t[-1].is_positive and not t[-1].is_daimon

    pool: set[tuple[Action, ...]] = set()
    for t in seeds:
        for n in range(0 if pos is None else 1, len(t) + 1):
            if t[:n] not in pool and (not t[:n] or admissible(t[:n])):
                pool.add(t[:n])
    new = set(pool)
    while new:
        fresh: set[tuple[Action, ...]] = set()
        olds = order(pool)
        news = order(new)
        pairs = [(t1, t2) for t1 in news for t2 in olds if graftable(t1) and t2] + [
            (t1, t2)
            for t1 in olds
            for t2 in news
            if graftable(t1) and t2 and t1 not in new
        ]
        for t1, t2 in pairs:
            focuses1 = {a.focus for a in t1 if a.is_proper}
            for j, k2 in enumerate(t2):
                if not k2.is_negative:
                    continue
                tail = t2[j:]
                if any(a.is_proper and a.focus in focuses1 for a in tail):
                    continue
                cand = t1 + tail
                if cand in pool or cand in fresh or not admissible(cand):
                    continue
                for n in range(1, len(cand) + 1):
                    pre = cand[:n]
                    if pre not in pool and pre not in fresh:
                        fresh.add(pre)
        pool |= fresh
        new = fresh
    return PathSet(base, frozenset(Path(t, base) for t in pool))


def design_paths(design: Design) -> PathSet:
    """Paths of a single design, seen as a one-component net."""
    return paths_of_net(validate_net([design]))
