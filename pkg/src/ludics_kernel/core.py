"""Loci, actions, chronicles, designs and nets.

Everything here is an immutable value; the ``validate_*`` functions are the
only constructors that certify the structural invariants.  All operations are
pure, so shared values may be used concurrently without locking.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Optional


class LudicsError(Exception):
    """Base class for every validation or engine error."""

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


class ChronicleError(LudicsError):
    def __init__(self, kind: str, index: int, message: str):
        super().__init__(kind, f"at index {index}: {message}")
        self.index = index


class DesignError(LudicsError):
    pass


class NetError(LudicsError):
    pass


_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

POS = "+"
NEG = "-"


def _opposite(polarity: str) -> str:
    return NEG if polarity == POS else POS


@dataclass(frozen=True, order=True)
class Locus:
    """An address: a named root extended by a sequence of naturals."""

    root: str
    suffix: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not _IDENT_RE.match(self.root):
            raise LudicsError("BadLocus", f"invalid root {self.root!r}")
        if any(i < 0 for i in self.suffix):
            raise LudicsError("BadLocus", f"negative index in {self.suffix}")

    def child(self, i: int) -> Locus:
        return Locus(self.root, self.suffix + (i,))

    @property
    def parent(self) -> Optional[Locus]:
        if not self.suffix:
            return None
        return Locus(self.root, self.suffix[:-1])

    def is_sublocus(self, other: Locus) -> bool:
        """True iff self lies strictly below other (other is a proper prefix)."""
        return (
            self.root == other.root
            and len(self.suffix) > len(other.suffix)
            and self.suffix[: len(other.suffix)] == other.suffix
        )

    def comparable(self, other: Locus) -> bool:
        return self == other or self.is_sublocus(other) or other.is_sublocus(self)

    @staticmethod
    def parse(text: str) -> Locus:
        parts = text.split(".")
        if not parts or not _IDENT_RE.match(parts[0]):
            raise LudicsError("BadLocus", f"cannot parse locus {text!r}")
        try:
            suffix = tuple(int(p) for p in parts[1:])
        except ValueError:
            raise LudicsError("BadLocus", f"cannot parse locus {text!r}") from None
        return Locus(parts[0], suffix)

    def __str__(self) -> str:
        return ".".join([self.root] + [str(i) for i in self.suffix])


@dataclass(frozen=True)
class Action:
    """The daimon, or a polarized proper action (polarity, focus, ramification)."""

    polarity: str
    focus: Optional[Locus] = None
    ramification: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if self.focus is None:
            if self.polarity != POS or self.ramification is not None:
                raise LudicsError("BadAction", "the daimon is positive and bare")
        else:
            if self.polarity not in (POS, NEG):
                raise LudicsError("BadAction", f"bad polarity {self.polarity!r}")
            if self.ramification is None:
                raise LudicsError("BadAction", "proper action needs a ramification")
            ram = tuple(sorted(set(self.ramification)))
            if any(i < 0 for i in ram):
                raise LudicsError("BadAction", f"negative index in {ram}")
            object.__setattr__(self, "ramification", ram)

    @property
    def is_daimon(self) -> bool:
        return self.focus is None

    @property
    def is_positive(self) -> bool:
        return self.polarity == POS

    @property
    def is_negative(self) -> bool:
        return self.polarity == NEG

    @property
    def is_proper(self) -> bool:
        return self.focus is not None

    def flip(self) -> Action:
        """The same proper action seen from the other side of a cut."""
        if self.is_daimon:
            raise LudicsError("BadAction", "the daimon has no dual action")
        return Action(_opposite(self.polarity), self.focus, self.ramification)

    def justifies(self, other: Action) -> bool:
        """True iff other focuses a child locus opened by self's ramification."""
        if self.is_daimon or other.is_daimon:
            return False
        if self.polarity == other.polarity:
            return False
        parent = other.focus.parent
        return parent == self.focus and other.focus.suffix[-1] in self.ramification

    def sort_key(self):
        if self.is_daimon:
            return (0, "", (), (), "")
        return (1, self.focus.root, self.focus.suffix, self.ramification, self.polarity)

    def __str__(self) -> str:
        if self.is_daimon:
            return "daimon"
        ram = ",".join(str(i) for i in self.ramification)
        return f"({self.polarity} {self.focus} {{{ram}}})"


DAIMON = Action(POS)


def actions_str(actions: Iterable[Action]) -> str:
    return " ".join(str(a) for a in actions)


@dataclass(frozen=True)
class Sequent:
    """A base sequent: at most one locus on the left, a finite set on the right."""

    left: Optional[Locus]
    right: frozenset[Locus]

    def __post_init__(self) -> None:
        object.__setattr__(self, "right", frozenset(self.right))
        loci = sorted(self.loci())
        if not loci:
            raise LudicsError("EmptyBase", "a base sequent needs at least one locus")
        for i, a in enumerate(loci):
            for b in loci[i + 1 :]:
                if a.comparable(b):
                    raise LudicsError(
                        "OverlappingLoci", f"{a} and {b} are not disjoint"
                    )

    @property
    def is_positive(self) -> bool:
        return self.left is None

    def loci(self) -> frozenset[Locus]:
        out = set(self.right)
        if self.left is not None:
            out.add(self.left)
        return frozenset(out)

    def sort_key(self):
        lk = ("", ()) if self.left is None else (self.left.root, self.left.suffix)
        return (lk, tuple(sorted((l.root, l.suffix) for l in self.right)))

    def __str__(self) -> str:
        rhs = ", ".join(str(l) for l in sorted(self.right))
        lhs = "" if self.left is None else f"{self.left} "
        return f"{lhs}|-{' ' + rhs if rhs else ''}"


def positive_base(*right: Locus) -> Sequent:
    return Sequent(None, frozenset(right))


def negative_base(left: Locus, *right: Locus) -> Sequent:
    return Sequent(left, frozenset(right))


@dataclass(frozen=True)
class NetBase:
    """A nonempty set of base sequents with pairwise disjoint loci."""

    sequents: frozenset[Sequent]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sequents", frozenset(self.sequents))
        if not self.sequents:
            raise LudicsError("EmptyBase", "a net base needs at least one sequent")
        if sum(1 for s in self.sequents if s.is_positive) > 1:
            raise LudicsError("MultiplePositiveBases", "at most one positive sequent")
        loci = sorted(l for s in self.sequents for l in s.loci())
        for i, a in enumerate(loci):
            for b in loci[i + 1 :]:
                if a.comparable(b):
                    raise LudicsError(
                        "OverlappingLoci", f"{a} and {b} are not disjoint"
                    )

    @property
    def positive_sequent(self) -> Optional[Sequent]:
        for s in self.sequents:
            if s.is_positive:
                return s
        return None

    def sequent_of(self, locus: Locus) -> Sequent:
        """The sequent whose loci lie above the given (hereditary) focus."""
        for s in self.sequents:
            for l in s.loci():
                if locus == l or locus.is_sublocus(l):
                    return s
        raise LudicsError("UnknownLocus", f"{locus} is not rooted in this base")

    def root_of(self, locus: Locus) -> Locus:
        for s in self.sequents:
            for l in s.loci():
                if locus == l or locus.is_sublocus(l):
                    return l
        raise LudicsError("UnknownLocus", f"{locus} is not rooted in this base")

    def sort_key(self):
        return tuple(sorted(s.sort_key() for s in self.sequents))

    def __str__(self) -> str:
        return "; ".join(str(s) for s in sorted(self.sequents, key=Sequent.sort_key))


@dataclass(frozen=True)
class Chronicle:
    """An alternating, justified, linear sequence of actions on a sequent."""

    actions: tuple[Action, ...]
    base: Sequent

    def __len__(self) -> int:
        return len(self.actions)

    def prefix(self, n: int) -> Chronicle:
        return Chronicle(self.actions[:n], self.base)

    def sort_key(self):
        return tuple(a.sort_key() for a in self.actions)

    def __str__(self) -> str:
        return actions_str(self.actions)


@dataclass(frozen=True)
class Design:
    """A prefix-closed clique of chronicles on a shared base."""

    base: Sequent
    chronicles: frozenset[Chronicle]

    def chronicle_tuples(self) -> frozenset[tuple[Action, ...]]:
        return _chronicle_tuples(self)

    def actions(self) -> frozenset[Action]:
        return _design_actions(self)

    def sort_key(self):
        return (self.base.sort_key(), tuple(sorted(c.sort_key() for c in self.chronicles)))

    @property
    def is_empty(self) -> bool:
        return not self.chronicles

    def __str__(self) -> str:
        body = "; ".join(
            str(c) for c in sorted(self.chronicles, key=Chronicle.sort_key)
        )
        return f"design on {self.base}: {{{body}}}"


@lru_cache(maxsize=None)
def _chronicle_tuples(design: Design) -> frozenset[tuple[Action, ...]]:
    return frozenset(c.actions for c in design.chronicles)


@lru_cache(maxsize=None)
def _design_actions(design: Design) -> frozenset[Action]:
    return frozenset(a for c in design.chronicles for a in c.actions)


@lru_cache(maxsize=None)
def children_map(design: Design) -> dict[tuple[Action, ...], frozenset[Action]]:
    """Next actions of every chronicle prefix, keyed by the prefix tuple."""
    out: dict[tuple[Action, ...], set[Action]] = {}
    for c in design.chronicles:
        out.setdefault(c.actions[:-1], set()).add(c.actions[-1])
        out.setdefault(c.actions, set())
    return {k: frozenset(v) for k, v in out.items()}


def positive_extension(design: Design, prefix: tuple[Action, ...]) -> Optional[Action]:
    """The unique positive action extending the given chronicle prefix, if any."""
    nxt = [a for a in children_map(design).get(prefix, frozenset()) if a.is_positive]
    if not nxt:
        return None
    if len(nxt) > 1:
        raise DesignError("IncoherentPair", f"two positive extensions after {prefix}")
    return nxt[0]


@dataclass(frozen=True)
class Net:
    """A finite set of designs on pairwise disjoint bases."""

    designs: frozenset[Design]

    @property
    def base(self) -> NetBase:
        return NetBase(frozenset(d.base for d in self.designs))

    def chronicle_tuples(self) -> frozenset[tuple[Action, ...]]:
        return _net_chronicle_tuples(self)

    def actions(self) -> frozenset[Action]:
        return frozenset(a for d in self.designs for a in d.actions())

    def component(self, sequent: Sequent) -> Design:
        for d in self.designs:
            if d.base == sequent:
                return d
        raise NetError("UnknownComponent", f"no design based on {sequent}")

    def sort_key(self):
        return tuple(sorted(d.sort_key() for d in self.designs))

    def __str__(self) -> str:
        return "\n".join(
            str(d) for d in sorted(self.designs, key=Design.sort_key)
        )


@lru_cache(maxsize=None)
def _net_chronicle_tuples(net: Net) -> frozenset[tuple[Action, ...]]:
    return frozenset(t for d in net.designs for t in d.chronicle_tuples())


@lru_cache(maxsize=None)
def net_children_map(net: Net) -> dict[tuple[Action, ...], frozenset[Action]]:
    """Merged children map of all components; the empty prefix is excluded.

    Components live on disjoint loci, so nonempty prefixes never collide.
    """
    out: dict[tuple[Action, ...], frozenset[Action]] = {}
    for d in net.designs:
        for k, v in children_map(d).items():
            if k:
                out[k] = v
    return out


def _justifier_index(actions: tuple[Action, ...], i: int) -> Optional[int]:
    """Index of the action justifying actions[i], scanning earlier actions."""
    a = actions[i]
    if a.is_daimon:
        return None
    for j in range(i - 1, -1, -1):
        if actions[j].justifies(a):
            return j
    return None


def validate_chronicle(actions: Iterable[Action], base: Sequent) -> Chronicle:
    """Check the chronicle conditions and return the certified Chronicle."""
    acts = tuple(actions)
    if not acts:
        raise ChronicleError("Empty", 0, "a chronicle is nonempty")
    for i, a in enumerate(acts):
        if i > 0 and acts[i - 1].polarity == a.polarity:
            raise ChronicleError("Alternation", i, "polarities must alternate")
        if a.is_daimon:
            if i != len(acts) - 1:
                raise ChronicleError("DaimonPlacement", i, "the daimon must be last")
            if i == 0 and not base.is_positive:
                raise ChronicleError(
                    "BaseMismatch", 0, "a daimon chronicle needs a positive base"
                )
            continue
        if a.is_negative:
            if i == 0:
                if a.focus != base.left:
                    raise ChronicleError(
                        "BaseMismatch", 0, f"initial negative focus {a.focus} is not {base.left}"
                    )
            elif not acts[i - 1].justifies(a):
                raise ChronicleError(
                    "Justification", i, "a negative action follows its justifier"
                )
        else:
            just = _justifier_index(acts, i)
            if just is None:
                if a.focus not in base.right:
                    raise ChronicleError(
                        "Justification", i, f"initial positive focus {a.focus} not in the base"
                    )
            if i == 0 and not base.is_positive:
                raise ChronicleError(
                    "BaseMismatch", 0, "a chronicle on a negative base starts negative"
                )
        for j in range(i):
            if acts[j].is_proper and acts[j].focus == a.focus:
                raise ChronicleError("Linearity", i, f"focus {a.focus} reused")
    return Chronicle(acts, base)


def chronicles_coherent(c1: Chronicle, c2: Chronicle) -> bool:
    """Comparability and propagation between two chronicles."""
    a1, a2 = c1.actions, c2.actions
    d = 0
    while d < len(a1) and d < len(a2) and a1[d] == a2[d]:
        d += 1
    if d == len(a1) or d == len(a2):
        return True
    k1, k2 = a1[d], a2[d]
    if not (k1.is_negative and k2.is_negative):
        return False
    if k1.focus == k2.focus:
        return True
    tail1 = [a.focus for a in a1[d + 1 :] if a.is_proper]
    tail2 = {a.focus for a in a2[d + 1 :] if a.is_proper}
    return not any(f in tail2 for f in tail1)


def validate_design(base: Sequent, chronicles: Iterable[Chronicle]) -> Design:
    """Check Forest, Coherence, Positivity and Totality."""
    members = frozenset(chronicles)
    for c in members:
        if c.base != base:
            raise DesignError("BaseMismatch", f"chronicle {c} is not on {base}")
        validate_chronicle(c.actions, base)
    tuples = {c.actions for c in members}
    for c in members:
        for n in range(1, len(c)):
            if c.actions[:n] not in tuples:
                raise DesignError(
                    "NotPrefixClosed", f"missing prefix {actions_str(c.actions[:n])}"
                )
    ordered = sorted(members, key=Chronicle.sort_key)
    for i, c in enumerate(ordered):
        for other in ordered[i + 1 :]:
            if not chronicles_coherent(c, other):
                raise DesignError("IncoherentPair", f"{c} vs {other}")
    for c in members:
        extended = any(
            len(o) > len(c) and o.actions[: len(c)] == c.actions for o in members
        )
        if not extended and c.actions[-1].is_negative:
            raise DesignError("NegativeLeaf", f"maximal chronicle {c} ends negative")
    if base.is_positive:
        if not members:
            raise DesignError("TotalityViolation", "a positive-base design is nonempty")
        firsts = {c.actions[0] for c in members}
        if len(firsts) != 1:
            raise DesignError(
                "TotalityViolation", "all chronicles share one first positive action"
            )
    return Design(base, members)


def design_from_tuples(base: Sequent, tuples: Iterable[tuple[Action, ...]]) -> Design:
    """Prefix-close the given action tuples and validate the result."""
    closed: set[tuple[Action, ...]] = set()
    for t in tuples:
        for n in range(1, len(t) + 1):
            closed.add(t[:n])
    return validate_design(base, (Chronicle(t, base) for t in closed))


def is_slice(design: Design) -> bool:
    """True iff no chronicle prefix branches on one focus with two ramifications."""
    seen: dict[tuple[tuple[Action, ...], Locus], tuple[int, ...]] = {}
    for c in design.chronicles:
        last = c.actions[-1]
        if not last.is_negative:
            continue
        key = (c.actions[:-1], last.focus)
        if key in seen and seen[key] != last.ramification:
            return False
        seen[key] = last.ramification
    return True


def slices_of(design: Design) -> Iterator[Design]:
    """All slices, obtained by fixing one ramification per branching negative."""
    branch_points: dict[tuple[tuple[Action, ...], Locus], list[Action]] = {}
    for c in design.chronicles:
        last = c.actions[-1]
        if last.is_negative:
            branch_points.setdefault((c.actions[:-1], last.focus), []).append(last)
    keys = sorted(branch_points, key=lambda k: (k[0] and tuple(a.sort_key() for a in k[0]), k[1]))
    for key in keys:
        branch_points[key].sort(key=Action.sort_key)

    def compatible(c: Chronicle, choice: dict) -> bool:
        for n, a in enumerate(c.actions):
            if a.is_negative and choice[(c.actions[:n], a.focus)] != a:
                return False
        return True

    def rec(i: int, choice: dict) -> Iterator[Design]:
        if i == len(keys):
            kept = [c for c in design.chronicles if compatible(c, choice)]
            if kept or not design.base.is_positive:
                yield validate_design(design.base, kept)
            return
        for a in branch_points[keys[i]]:
            choice[keys[i]] = a
            yield from rec(i + 1, choice)
            del choice[keys[i]]

    seen: set[Design] = set()
    for s in rec(0, {}):
        if s not in seen:
            seen.add(s)
            yield s


def validate_net(designs: Iterable[Design]) -> Net:
    """Check disjoint bases and the single-positive-base condition."""
    members = frozenset(designs)
    loci = [(l, d) for d in members for l in d.base.loci()]
    for i, (a, da) in enumerate(loci):
        for b, db in loci[i + 1 :]:
            if da is not db and a.comparable(b):
                raise NetError("OverlappingBases", f"{a} and {b} are not disjoint")
    if sum(1 for d in members if d.base.is_positive) > 1:
        raise NetError("MultiplePositiveBases", "at most one design on a positive base")
    return Net(members)


def dai_plus(*right: Locus) -> Design:
    """The positive design reduced to the daimon."""
    base = positive_base(*right)
    return validate_design(base, [Chronicle((DAIMON,), base)])


def skunk(left: Locus, *right: Locus) -> Design:
    """The empty design on a negative base."""
    return validate_design(negative_base(left, *right), [])
