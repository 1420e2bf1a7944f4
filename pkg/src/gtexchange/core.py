"""Value model for give-and-take segment exchange.

A group of nodes each holds a subset of a fixed universe of data segments.
Two nodes may run a *full exchange* only when each offers at least one
segment the other lacks (the give-and-take criterion); afterwards both hold
the union of their two sets.  This module provides the substrate everything
else runs on: segment sets as bit masks, problem instances, system states,
links, activation, schedule replay, and the parity-aware upper bound on the
aggregate cardinality.

All values are immutable after construction and safe to share across
threads; every operation is a pure function of its inputs.  Activation
returns a fresh state, so search code can branch without copying.

Node and segment indices are 0-based throughout the library; file formats
and CLI output use 1-based ids (see the harness module).
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass
from typing import Iterable, Iterator

MAX_SEGMENTS = 4096  # fixed mask width; larger universes are rejected at load


class InvalidActivationError(ValueError):
    """A link activation was attempted where the exchange criterion fails."""


def gt_masks(a: int, b: int) -> bool:
    """Give-and-take criterion on raw bit masks: each side offers something new."""
    return (a & ~b) != 0 and (b & ~a) != 0


@dataclass(frozen=True)
class SegmentSet:
    """An immutable set of segment indices backed by a single bit mask."""

    mask: int = 0

    @classmethod
    def from_iterable(cls, indices: Iterable[int]) -> "SegmentSet":
        mask = 0
        for idx in indices:
            if idx < 0:
                raise ValueError(f"segment index must be non-negative, got {idx}")
            mask |= 1 << idx
        return cls(mask)

    def __contains__(self, idx: int) -> bool:
        return idx >= 0 and (self.mask >> idx) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        mask = self.mask
        idx = 0
        while mask:
            if mask & 1:
                yield idx
            mask >>= 1
            idx += 1

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        return self.mask != 0

    def __or__(self, other: "SegmentSet") -> "SegmentSet":
        return SegmentSet(self.mask | other.mask)

    def __and__(self, other: "SegmentSet") -> "SegmentSet":
        return SegmentSet(self.mask & other.mask)

    def __sub__(self, other: "SegmentSet") -> "SegmentSet":
        return SegmentSet(self.mask & ~other.mask)

    def issubset(self, other: "SegmentSet") -> bool:
        return self.mask & ~other.mask == 0

    def to_list(self) -> list[int]:
        return list(self)

    def __repr__(self) -> str:
        return f"SegmentSet({self.to_list()})"


@dataclass(frozen=True)
class Instance:
    """A problem instance: ``m`` nodes over an ``n``-segment universe.

    With ``strict=True`` (the default) every node must start with a
    non-empty proper subset of the universe; relaxing the check keeps all
    operations well-defined (a node holding everything simply never links).
    """

    m: int
    n: int
    initial_sets: tuple[SegmentSet, ...]
    strict: InitVar[bool] = True

    def __post_init__(self, strict: bool) -> None:
        object.__setattr__(self, "initial_sets", tuple(self.initial_sets))
        if self.m < 2:
            raise ValueError(f"need at least two nodes, got m={self.m}")
        if self.n < 1:
            raise ValueError(f"universe needs at least one segment, got n={self.n}")
        if self.n > MAX_SEGMENTS:
            raise ValueError(
                f"universe size {self.n} exceeds the {MAX_SEGMENTS}-segment cap"
            )
        if len(self.initial_sets) != self.m:
            raise ValueError(
                f"expected {self.m} initial sets, got {len(self.initial_sets)}"
            )
        full = (1 << self.n) - 1
        for i, s in enumerate(self.initial_sets):
            if s.mask & ~full:
                raise ValueError(
                    f"node {i} holds segments outside the {self.n}-segment universe"
                )
            if strict and s.mask == 0:
                raise ValueError(f"node {i} starts empty (relax validation to allow)")
            if strict and s.mask == full:
                raise ValueError(
                    f"node {i} already holds the whole universe "
                    f"(relax validation to allow)"
                )

    @property
    def realized_universe(self) -> SegmentSet:
        """Union of all initial sets: the coverage actually present in the group."""
        mask = 0
        for s in self.initial_sets:
            mask |= s.mask
        return SegmentSet(mask)

    @property
    def equal_cardinality(self) -> int | None:
        """Common initial set size when all nodes start equal-sized, else None."""
        sizes = {len(s) for s in self.initial_sets}
        return sizes.pop() if len(sizes) == 1 else None


@dataclass(frozen=True, order=True)
class Link:
    """An unordered node pair, stored canonically with ``i < j``."""

    i: int
    j: int

    def __post_init__(self) -> None:
        if self.i == self.j:
            raise ValueError(f"a link needs two distinct nodes, got ({self.i},{self.j})")
        if self.i < 0 or self.j < 0:
            raise ValueError(f"node indices must be non-negative, got ({self.i},{self.j})")
        if self.i > self.j:
            lo, hi = self.j, self.i
            object.__setattr__(self, "i", lo)
            object.__setattr__(self, "j", hi)

    def __repr__(self) -> str:
        return f"Link({self.i}, {self.j})"


@dataclass(frozen=True)
class SystemState:
    """Current segment set of every node after ``step`` activations."""

    sets: tuple[SegmentSet, ...]
    step: int = 0

    def masks(self) -> tuple[int, ...]:
        return tuple(s.mask for s in self.sets)


@dataclass(frozen=True)
class ScheduleStep:
    """One activation together with what each endpoint gained from it."""

    link: Link
    gained_i: SegmentSet
    gained_j: SegmentSet


@dataclass(frozen=True)
class Schedule:
    """An ordered activation trace; nonempty gains certify every step was legal."""

    steps: tuple[ScheduleStep, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def link_list(self) -> list[Link]:
        return [step.link for step in self.steps]


def initial_state(instance: Instance) -> SystemState:
    return SystemState(sets=instance.initial_sets, step=0)


def _check_node(state: SystemState, idx: int) -> None:
    if not 0 <= idx < len(state.sets):
        raise ValueError(f"node index {idx} out of range for {len(state.sets)} nodes")


def gt_satisfied(state: SystemState, i: int, j: int) -> bool:
    """True iff nodes ``i`` and ``j`` may exchange: each holds a segment the other lacks."""
    _check_node(state, i)
    _check_node(state, j)
    if i == j:
        raise ValueError(f"a link needs two distinct nodes, got ({i},{j})")
    return gt_masks(state.sets[i].mask, state.sets[j].mask)


def links(state: SystemState) -> set[Link]:
    """All currently available links, as canonical (i < j) pairs."""
    masks = state.masks()
    m = len(masks)
    return {
        Link(i, j)
        for i in range(m - 1)
        for j in range(i + 1, m)
        if gt_masks(masks[i], masks[j])
    }


def is_maximal(state: SystemState) -> bool:
    """True iff no further activation is possible anywhere in the group."""
    masks = state.masks()
    m = len(masks)
    return not any(
        gt_masks(masks[i], masks[j]) for i in range(m - 1) for j in range(i + 1, m)
    )


def activate_traced(state: SystemState, link: Link) -> tuple[SystemState, ScheduleStep]:
    """Activate ``link`` and return the new state plus the traced step."""
    _check_node(state, link.i)
    _check_node(state, link.j)
    a = state.sets[link.i]
    b = state.sets[link.j]
    gained_i = b - a
    gained_j = a - b
    if not gained_i or not gained_j:
        raise InvalidActivationError(
            f"invalid activation: link ({link.i},{link.j}) does not satisfy "
            f"the give-and-take criterion"
        )
    union = a | b
    new_sets = list(state.sets)
    new_sets[link.i] = union
    new_sets[link.j] = union
    new_state = SystemState(sets=tuple(new_sets), step=state.step + 1)
    return new_state, ScheduleStep(link=link, gained_i=gained_i, gained_j=gained_j)


def activate(state: SystemState, link: Link) -> SystemState:
    """Full exchange across ``link``: both endpoints end up with the union."""
    new_state, _ = activate_traced(state, link)
    return new_state


def aggregate_cardinality(state: SystemState) -> int:
    """Sum of per-node set sizes: the social objective."""
    return sum(s.mask.bit_count() for s in state.sets)


def apply_schedule(
    instance: Instance, schedule: Iterable[Link]
) -> tuple[SystemState, Schedule]:
    """Replay ``schedule`` from the instance's initial state.

    Returns the final state and the enriched trace with per-step gains.
    Raises :class:`InvalidActivationError` naming the first step whose link
    was not available at its activation time.
    """
    state = initial_state(instance)
    steps: list[ScheduleStep] = []
    for idx, link in enumerate(schedule):
        try:
            state, step = activate_traced(state, link)
        except InvalidActivationError:
            raise InvalidActivationError(
                f"invalid activation at step {idx + 1}: link ({link.i},{link.j})"
            ) from None
        steps.append(step)
    return state, Schedule(steps=tuple(steps))


def upper_bound(instance: Instance) -> int:
    """Parity-aware cap on the aggregate cardinality.

    With ``u`` the realized-universe size: ``m*u`` for even ``m`` and
    ``m*u - 1`` for odd ``m`` (nodes reaching full coverage appear in pairs,
    so with an odd node count one node always falls short).
    """
    u = len(instance.realized_universe)
    return instance.m * u if instance.m % 2 == 0 else instance.m * u - 1
