"""Scheduling heuristics that drive a group of nodes to a maximal state.

Five strategies, all consuming an :class:`~gtexchange.core.Instance` and
emitting a maximal schedule plus the final state:

* ``rand``  -- randomized phase pairing,
* ``glink`` -- greedy on the number of links the activation leaves alive,
* ``poly``  -- round-robin pairing over the nodes that hold unique segments,
* ``ginc``  -- greedy on the immediate aggregate-cardinality gain,
* ``rare``  -- rarest-first availability balancing.

Each run is a pure function of (instance, seed / tie rule); distinct runs
may execute concurrently with no shared state.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Sequence

from .core import (
    Instance,
    Link,
    Schedule,
    ScheduleStep,
    SystemState,
    activate_traced,
    aggregate_cardinality,
    gt_masks,
    gt_satisfied,
    initial_state,
    links,
)

TIE_LOWEST = "lowest"
TIE_RANDOM = "random"

ALGORITHM_IDS = ("rand", "glink", "poly", "ginc", "rare")

ALGORITHM_LABELS = {
    "rand": "Randomized",
    "glink": "Greedy-Links",
    "poly": "Polygon",
    "ginc": "Greedy-Incremental",
    "rare": "Rarest-First",
}


@dataclass(frozen=True)
class TieRule:
    """How argmax ties between candidate links are resolved.

    ``lowest`` picks the canonically smallest (i, j) pair, giving fully
    deterministic runs; ``random`` picks uniformly with its own seed.
    """

    mode: str = TIE_LOWEST
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.mode not in (TIE_LOWEST, TIE_RANDOM):
            raise ValueError(f"unknown tie rule {self.mode!r}")

    def picker(self) -> Callable[[Sequence[tuple[int, int]]], tuple[int, int]]:
        """Return a function choosing one pair from a sorted candidate list."""
        if self.mode == TIE_LOWEST:
            return lambda candidates: candidates[0]
        rng = random.Random(self.seed)
        return rng.choice


@dataclass(frozen=True)
class AlgorithmRun:
    """Outcome of one algorithm execution on one instance."""

    algorithm: str
    schedule: Schedule
    final_state: SystemState
    alpha: int
    rounds: int | None = None
    post_sweep_steps: int = 0


def _finish(
    algorithm: str,
    state: SystemState,
    steps: list[ScheduleStep],
    rounds: int | None = None,
    post_sweep_steps: int = 0,
) -> AlgorithmRun:
    return AlgorithmRun(
        algorithm=algorithm,
        schedule=Schedule(steps=tuple(steps)),
        final_state=state,
        alpha=aggregate_cardinality(state),
        rounds=rounds,
        post_sweep_steps=post_sweep_steps,
    )


def _available_pairs(masks: Sequence[int]) -> list[tuple[int, int]]:
    m = len(masks)
    return [
        (i, j)
        for i in range(m - 1)
        for j in range(i + 1, m)
        if gt_masks(masks[i], masks[j])
    ]


def run_randomized(instance: Instance, seed: int) -> AlgorithmRun:
    """Random phase pairing: every phase pairs all nodes up uniformly at random.

    A phase draws one random permutation of the nodes and consumes it two at
    a time; a pair exchanges when it currently has a link and is set aside
    either way (with an odd node count the leftover node sits the phase out).
    Phases repeat while any link remains.
    """
    rng = random.Random(seed)
    state = initial_state(instance)
    steps: list[ScheduleStep] = []
    phases = 0
    order = list(range(instance.m))
    while links(state):
        phases += 1
        rng.shuffle(order)
        for at in range(0, instance.m - 1, 2):
            i, j = order[at], order[at + 1]
            if gt_satisfied(state, i, j):
                state, step = activate_traced(state, Link(i, j))
                steps.append(step)
    return _finish("rand", state, steps, rounds=phases)


def run_greedy_links(instance: Instance, tie: TieRule = TieRule()) -> AlgorithmRun:
    """Activate the link that leaves the most links alive afterwards.

    The resulting link count is evaluated incrementally: pairs not touching
    the activated endpoints keep their status, while both endpoints end up
    with the same union set, so their links to every third node coincide.
    """
    pick = tie.picker()
    state = initial_state(instance)
    steps: list[ScheduleStep] = []
    m = instance.m
    while True:
        masks = state.masks()
        degree = [0] * m
        available: list[tuple[int, int]] = []
        for i in range(m - 1):
            for j in range(i + 1, m):
                if gt_masks(masks[i], masks[j]):
                    available.append((i, j))
                    degree[i] += 1
                    degree[j] += 1
        if not available:
            break
        total = len(available)
        best_weight = -1
        candidates: list[tuple[int, int]] = []
        for i, j in available:
            union = masks[i] | masks[j]
            untouched = total - degree[i] - degree[j] + 1
            third = sum(
                1
                for t in range(m)
                if t != i and t != j and gt_masks(union, masks[t])
            )
            weight = untouched + 2 * third
            if weight > best_weight:
                best_weight = weight
                candidates = [(i, j)]
            elif weight == best_weight:
                candidates.append((i, j))
        i, j = pick(candidates)
        state, step = activate_traced(state, Link(i, j))
        steps.append(step)
    return _finish("glink", state, steps)


def run_greedy_incremental(instance: Instance, tie: TieRule = TieRule()) -> AlgorithmRun:
    """Activate the link with the largest immediate aggregate-cardinality gain.

    The gain of pairing i and j is ``2*|union| - |set_i| - |set_j|``: what
    both endpoints add in total.
    """
    pick = tie.picker()
    state = initial_state(instance)
    steps: list[ScheduleStep] = []
    while True:
        masks = state.masks()
        available = _available_pairs(masks)
        if not available:
            break
        best_weight = -1
        candidates: list[tuple[int, int]] = []
        for i, j in available:
            union = masks[i] | masks[j]
            weight = 2 * union.bit_count() - masks[i].bit_count() - masks[j].bit_count()
            if weight > best_weight:
                best_weight = weight
                candidates = [(i, j)]
            elif weight == best_weight:
                candidates.append((i, j))
        i, j = pick(candidates)
        state, step = activate_traced(state, Link(i, j))
        steps.append(step)
    return _finish("ginc", state, steps)


def rarest_first_rows(state: SystemState, n: int) -> dict[Link, tuple[int, ...]]:
    """Preference row for every available link, as compared by rarest-first.

    Row layout: first an indicator that the activation would *not* hand the
    full ``n``-segment universe to the pair, then, for each holder count
    p = 1..m, how many segments currently held by exactly p nodes are held
    by exactly one endpoint (their availability would grow).  Rows compare
    lexicographically, larger is preferred.
    """
    masks = state.masks()
    m = len(masks)
    full = (1 << n) - 1
    partition = [0] * (m + 1)
    for e in range(n):
        bit = 1 << e
        holders = sum(1 for mask in masks if mask & bit)
        if holders:
            partition[holders] |= bit
    rows: dict[Link, tuple[int, ...]] = {}
    for i, j in _available_pairs(masks):
        union = masks[i] | masks[j]
        sym = masks[i] ^ masks[j]
        row = (1 if union != full else 0,) + tuple(
            (sym & partition[p]).bit_count() for p in range(1, m + 1)
        )
        rows[Link(i, j)] = row
    return rows


def run_rarest_first(instance: Instance, tie: TieRule = TieRule()) -> AlgorithmRun:
    """Grow the availability of the rarest segments first.

    Each step ranks the available links by their preference rows (see
    :func:`rarest_first_rows`): avoid creating universe holders, then favor
    links that lift segments held by only one node, then by two, and so on.
    """
    pick = tie.picker()
    state = initial_state(instance)
    steps: list[ScheduleStep] = []
    while True:
        rows = rarest_first_rows(state, instance.n)
        if not rows:
            break
        best_row = max(rows.values())
        candidates = sorted(
            (link.i, link.j) for link, row in rows.items() if row == best_row
        )
        i, j = pick(candidates)
        state, step = activate_traced(state, Link(i, j))
        steps.append(step)
    return _finish("rare", state, steps)


def find_unique_set(state: SystemState) -> list[int]:
    """Greedy pass admitting nodes that keep at least one unique segment.

    Scanning nodes in ascending index order, node i joins when it holds a
    segment outside the union of the members so far *and* every member so
    far still holds a segment outside node i's set.  Any two admitted nodes
    therefore satisfy the give-and-take criterion with each other.
    """
    chosen: list[int] = []
    union_mask = 0
    for i, segment_set in enumerate(state.sets):
        mask = segment_set.mask
        if mask & ~union_mask == 0:
            continue
        if any(state.sets[j].mask & ~mask == 0 for j in chosen):
            continue
        chosen.append(i)
        union_mask |= mask
    return chosen


def _polygon_order(state: SystemState, members: list[int]) -> list[int]:
    """Starting permutation: descending count of unique segments, so the node
    with the fewest lands rightmost; ties break by ascending node index."""
    counts = {}
    for i in members:
        others = 0
        for j in members:
            if j != i:
                others |= state.sets[j].mask
        counts[i] = (state.sets[i].mask & ~others).bit_count()
    return sorted(members, key=lambda i: (-counts[i], i))


def run_polygon(instance: Instance) -> AlgorithmRun:
    """Round-robin pairing over the unique-segment holders.

    While at least two nodes hold unique segments: order them with the
    fewest-unique node rightmost, then repeatedly pair adjacent positions
    (1-2, 3-4, ...) and left-circular-shift the order between rounds, for
    floor((size-1)/2)+1 rounds.  Pairs whose link has meanwhile vanished are
    skipped.  The unique-holder set is then recomputed and the loop repeats;
    a final deterministic sweep (lowest pair first) activates any leftover
    links so the run always ends maximal.
    """
    state = initial_state(instance)
    steps: list[ScheduleStep] = []
    rounds = 0
    while True:
        members = find_unique_set(state)
        if len(members) < 2:
            break
        order = _polygon_order(state, members)
        for _ in range((len(members) - 1) // 2 + 1):
            for at in range(0, len(order) - 1, 2):
                i, j = order[at], order[at + 1]
                if gt_satisfied(state, i, j):
                    state, step = activate_traced(state, Link(i, j))
                    steps.append(step)
            order = order[1:] + order[:1]
            rounds += 1
    post_sweep = 0
    while True:
        available = links(state)
        if not available:
            break
        state, step = activate_traced(state, min(available))
        steps.append(step)
        post_sweep += 1
    return _finish("poly", state, steps, rounds=rounds, post_sweep_steps=post_sweep)


def run_algorithm(
    algorithm: str,
    instance: Instance,
    *,
    seed: int = 0,
    tie: TieRule = TieRule(),
) -> AlgorithmRun:
    """Dispatch by algorithm id (one of ``rand glink poly ginc rare``)."""
    if algorithm == "rand":
        return run_randomized(instance, seed)
    if algorithm == "glink":
        return run_greedy_links(instance, tie)
    if algorithm == "poly":
        return run_polygon(instance)
    if algorithm == "ginc":
        return run_greedy_incremental(instance, tie)
    if algorithm == "rare":
        return run_rarest_first(instance, tie)
    raise ValueError(f"unknown algorithm id {algorithm!r}")
