"""Closed cut-nets and the step-by-step normalization machine.

Normalization is token passing: the side holding the positive sequent plays
the unique positive action extending its current view; the other side must
own the matching negative action at the spot its own view designates, else
the interaction diverges.  Convergence means someone played the daimon.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .core import (
    Action,
    Design,
    Locus,
    LudicsError,
    Net,
    NetBase,
    Sequent,
    net_children_map,
    validate_net,
)
from .paths import (
    Path,
    dual_base,
    flip_actions,
    view,
    _justifier_index,
)


class CutNetError(LudicsError):
    pass


CONVERGES = "converges"
DIVERGES = "diverges"


@dataclass(frozen=True)
class RamificationMissing:
    focus: Locus
    ramification: tuple[int, ...]

    def __str__(self) -> str:
        ram = ",".join(str(i) for i in self.ramification)
        return f"no negative action (- {self.focus} {{{ram}}}) available"


@dataclass(frozen=True)
class StepBudgetExhausted:
    budget: int

    def __str__(self) -> str:
        return f"step budget {self.budget} exhausted"


@dataclass(frozen=True)
class NormalizationResult:
    outcome: str
    trace_on_main: Path
    trace_on_counter: Path
    steps: int
    divergence_reason: Optional[Union[RamificationMissing, StepBudgetExhausted]] = None

    @property
    def converges(self) -> bool:
        return self.outcome == CONVERGES


@dataclass(frozen=True)
class CutNet:
    """A distinguished design against a counter-net on the dual base."""

    main: Design
    rest: Net
    cuts: frozenset[Locus]

    def total_actions(self) -> int:
        return len(self.main.actions()) + len(self.rest.actions())


def validate_cutnet(design: Design, counter: Net) -> CutNet:
    """Check closedness, acyclicity and connectedness of the cut graph,
    then the flat shape: the counter-net sits exactly on the dual base."""
    parts: list[tuple[Sequent, object]] = [(design.base, design)]
    for d in sorted(counter.designs, key=Design.sort_key):
        parts.append((d.base, d))
    lefts: dict[Locus, int] = {}
    rights: dict[Locus, int] = {}
    for idx, (seq, _) in enumerate(parts):
        if seq.left is not None:
            if seq.left in lefts:
                raise CutNetError("NotClosed", f"{seq.left} on two left sides")
            lefts[seq.left] = idx
        for l in seq.right:
            if l in rights:
                raise CutNetError("NotClosed", f"{l} on two right sides")
            rights[l] = idx
    if set(lefts) != set(rights):
        missing = sorted(set(lefts) ^ set(rights))
        raise CutNetError("NotClosed", f"uncut loci: {', '.join(map(str, missing))}")
    edges = [(lefts[l], rights[l]) for l in sorted(lefts)]
    if len(edges) != len(parts) - 1:
        raise CutNetError("Cyclic", "the graph of cuts has a cycle")
    adj: dict[int, set[int]] = {i: set() for i in range(len(parts))}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen = {0}
    stack = [0]
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    if len(seen) != len(parts):
        raise CutNetError("Disconnected", "the graph of cuts is not connected")
    try:
        expected = dual_base(NetBase(frozenset([design.base])))
    except LudicsError:
        raise CutNetError("NotClosed", f"{design.base} admits no flat dual") from None
    if counter.base != expected:
        raise CutNetError(
            "NotClosed",
            f"counter-net base {counter.base} is not the dual of {design.base}",
        )
    return CutNet(design, counter, frozenset(design.base.loci()))


def _net_opener(net: Net) -> Optional[Action]:
    """First positive action of the positive-base component, if any."""
    pos = net.base.positive_sequent
    if pos is None:
        return None
    comp = net.component(pos)
    firsts = {c.actions[0] for c in comp.chronicles}
    return next(iter(firsts))


def _next_positive(net: Net, children, cur: tuple[Action, ...]) -> Action:
    """The unique positive action a net plays after the current view."""
    if not cur:
        opener = _net_opener(net)
        if opener is None:
            raise CutNetError("NotClosed", "no positive component to open with")
        return opener
    options = [a for a in children.get(cur, frozenset()) if a.is_positive]
    if len(options) != 1:
        raise CutNetError(
            "NotClosed", f"expected one positive extension after {cur}, got {len(options)}"
        )
    return options[0]


def interact(main_net: Net, counter_net: Net, step_budget: Optional[int] = None) -> NormalizationResult:
    """Run normalization between two nets on mutually dual bases.

    The trace is recorded from main_net's side; the counter trace is its
    pointwise dual.  Divergence is a value, not an error.
    """
    main_base = main_net.base
    counter_base = counter_net.base
    main_starts = main_base.positive_sequent is not None
    if main_starts == (counter_base.positive_sequent is not None):
        raise CutNetError("NotClosed", "exactly one side holds the positive sequent")
    budget = step_budget
    if budget is None:
        budget = len(main_net.actions()) + len(counter_net.actions()) + 1
    main_chrons = main_net.chronicle_tuples()
    counter_chrons = counter_net.chronicle_tuples()
    main_children = net_children_map(main_net)
    counter_children = net_children_map(counter_net)

    trace: list[Action] = []  # matched actions, from main_net's side
    turn_main = main_starts
    steps = 0

    def done(outcome, main_acts, counter_acts, reason=None):
        return NormalizationResult(
            outcome,
            Path(tuple(main_acts), main_base),
            Path(tuple(counter_acts), counter_base),
            steps,
            reason,
        )

    while True:
        if steps >= budget:
            return done(
                DIVERGES, trace, flip_actions(trace), StepBudgetExhausted(budget)
            )
        steps += 1
        if turn_main:
            cur = view(tuple(trace), main_base)
            played = _next_positive(main_net, main_children, cur)
            if played.is_daimon:
                return done(CONVERGES, trace + [played], flip_actions(trace))
            v = view(flip_actions(trace) + (played.flip(),), counter_base)
            if v not in counter_chrons:
                return done(
                    DIVERGES,
                    trace + [played],
                    flip_actions(trace),
                    RamificationMissing(played.focus, played.ramification),
                )
            trace.append(played)
        else:
            cur = view(flip_actions(trace), counter_base)
            played = _next_positive(counter_net, counter_children, cur)
            if played.is_daimon:
                return done(
                    CONVERGES, trace, flip_actions(trace) + (played,)
                )
            v = view(tuple(trace) + (played.flip(),), main_base)
            if v not in main_chrons:
                return done(
                    DIVERGES,
                    trace,
                    flip_actions(trace) + (played,),
                    RamificationMissing(played.focus, played.ramification),
                )
            trace.append(played.flip())
        turn_main = not turn_main


def normalize(cut: CutNet, step_budget: Optional[int] = None) -> NormalizationResult:
    """Normalize a closed cut-net, tracing the distinguished design."""
    return interact(validate_net([cut.main]), cut.rest, step_budget)


def orthogonal(design: Design, counter: Net, step_budget: Optional[int] = None) -> bool:
    """True iff the interaction with the counter-net converges."""
    cut = validate_cutnet(design, counter)
    return normalize(cut, step_budget).converges


def nets_orthogonal(a: Net, b: Net, step_budget: Optional[int] = None) -> bool:
    return interact(a, b, step_budget).converges


def restrictive_negative_jump_ok(path: Path) -> bool:
    """Dual-side visibility: every justified negative action reaches its
    justifier through the chain of immediately-preceding positives."""
    acts = path.actions
    for k, a in enumerate(acts):
        if not a.is_negative:
            continue
        target = _justifier_index(acts, k)
        if target is None:
            continue
        i = k
        ok = False
        while True:
            if i == 0:
                break
            prev = i - 1
            if not acts[prev].is_positive or acts[prev].is_daimon:
                break
            if prev == target:
                ok = True
                break
            j = _justifier_index(acts, prev)
            if j is None:
                break
            i = j
        if not ok:
            return False
    return True
