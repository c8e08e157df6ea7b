"""Growing permutation-model graphs in continuous time, with event tagging.

A tower of permutations grows one element at a time: the new element sits
down left of a uniformly chosen existing element, or opens a new table, in
each of the d permutations independently; this keeps every level uniform and
makes deleting the newest element recover the previous level exactly.

Poissonization inserts vertex m+1 after an Exp(m+1) holding time, so the
vertex count grows like e^t.  Every new cycle passes through the newly
inserted vertex; a birth is "grown" when the entering and leaving edges at
the new vertex carry the same permutation label (the word acquires a doubled
letter), and "spontaneous" otherwise.  An insertion that lands on two or
more edges of one existing cycle splits it, and the resulting births are
spontaneous.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import walks, words
from .errors import InvalidInputError, ResourceLimitError
from .graphs import CycleSpec, PermGraph
from .words import WordClass, letter_index, letter_is_inverted


class PermTower:
    """d permutations of {0..n-1} supporting O(1) insertion of element n.

    ``succ[l][x]`` is the image of x under permutation l; ``pred`` holds the
    inverses.  Deleting the newest element always recovers the previous
    state (each insertion only splices the new element into one cycle).
    """

    def __init__(self, d: int, n: int = 0):
        if d < 1 or n < 0:
            raise InvalidInputError("need d >= 1 and n >= 0")
        self.d = d
        self.n = n
        self.succ = [list(range(n)) for _ in range(d)]
        self.pred = [list(range(n)) for _ in range(d)]

    def extend(self, rng: np.random.Generator, choices=None) -> list[int]:
        """Insert element n; returns the seat choice per permutation.

        Choice j < n seats the new element left of j (new -> j in the cycle);
        choice j = n opens a new table (fixed point).
        """
        new = self.n
        if choices is None:
            choices = [int(rng.integers(new + 1)) for _ in range(self.d)]
        for l, j in enumerate(choices):
            succ, pred = self.succ[l], self.pred[l]
            if not 0 <= j <= new:
                raise InvalidInputError(f"seat choice {j} out of range 0..{new}")
            if j == new:
                succ.append(new)
                pred.append(new)
            else:
                p = pred[j]
                succ.append(j)
                pred.append(p)
                succ[p] = new
                pred[j] = new
        self.n = new + 1
        return list(choices)

    def delete_last(self) -> None:
        """Remove the newest element, restoring the previous tower level."""
        if self.n < 1:
            raise InvalidInputError("cannot delete from an empty tower")
        last = self.n - 1
        for l in range(self.d):
            succ, pred = self.succ[l], self.pred[l]
            j = succ.pop()
            p = pred.pop()
            if j != last:
                succ[p] = j
                pred[j] = p
        self.n = last

    def copy(self) -> "PermTower":
        out = PermTower(self.d, 0)
        out.n = self.n
        out.succ = [list(s) for s in self.succ]
        out.pred = [list(p) for p in self.pred]
        return out

    def perms(self) -> np.ndarray:
        return np.array(self.succ, dtype=np.int64)

    def graph(self) -> PermGraph:
        return PermGraph(self.perms())


def crp_extend(tower: PermTower, rng: np.random.Generator) -> PermTower:
    """Seat a new element uniformly in every permutation; returns a new tower."""
    out = tower.copy()
    out.extend(rng)
    return out


def poissonized_times(
    horizon: float, n0: int, rng: np.random.Generator, max_events: int = 10**7
) -> np.ndarray:
    """Jump times of the growth clock up to ``horizon``, starting at size n0.

    The holding time after reaching size m is Exp(m + 1), so the i-th entry
    is the arrival time of vertex n0 + i.  Runs start from the empty graph
    (n0 = 0), whose vertex count therefore grows like e^t.
    """
    if horizon < 0:
        raise InvalidInputError(f"need horizon >= 0, got {horizon}")
    if n0 < 0:
        raise InvalidInputError(f"need n0 >= 0, got {n0}")
    out: list[float] = []
    t = 0.0
    m = n0
    block = 1024
    while True:
        rates = np.arange(m + 1, m + 1 + block, dtype=float)
        holds = rng.exponential(1.0, block) / rates
        times = t + np.cumsum(holds)
        over = np.searchsorted(times, horizon, side="right")
        out.extend(times[:over].tolist())
        if over < block:
            return np.asarray(out)
        t = float(times[-1])
        m += block
        if len(out) > max_events:
            raise ResourceLimitError(f"more than {max_events} insertions before horizon")


# ---------------------------------------------------------------------------
# event bookkeeping


@dataclass(frozen=True)
class GrowthEvent:
    """One cycle birth or split caused by a vertex insertion."""

    time: float
    kind: str  # "grown" | "spontaneous" | "split"
    cycle: CycleSpec
    word: WordClass
    parent: Optional[WordClass] = None


def _cycles_through_vertex(g: PermGraph, v0: int, r: int) -> list[CycleSpec]:
    """All cycles of length <= r passing through v0."""
    perms, inv, d = g.perms, g.inv, g.d
    seen: dict[frozenset, CycleSpec] = {}

    def moves(x: int):
        for l in range(d):
            yield int(perms[l, x]), (l, x), 2 * l
            y = int(inv[l, x])
            yield y, (l, y), 2 * l + 1

    def dfs(path, used, word):
        x = path[-1]
        for y, edge, letter in moves(x):
            if edge in used:
                continue
            if y == v0:
                key = frozenset(used | {edge})
                if key not in seen:
                    seen[key] = CycleSpec(tuple(path), tuple(word + [letter]))
                continue
            if y in path or len(path) >= r:
                continue
            dfs(path + [y], used | {edge}, word + [letter])

    dfs([v0], set(), [])
    return list(seen.values())


def classify_event(cycle: CycleSpec, new_vertex: int) -> tuple[str, Optional[WordClass]]:
    """Classify a cycle born at a vertex insertion; returns (kind, parent).

    Grown births enter and leave the new vertex along the same permutation
    label, so the word of the parent cycle (one vertex shorter) reappears
    with one letter doubled; anything else is spontaneous.
    """
    if new_vertex not in cycle.vertices:
        raise InvalidInputError("new vertex must lie on the born cycle")
    k = cycle.length
    if k == 1:
        return "spontaneous", None
    i = cycle.vertices.index(new_vertex)
    incoming = cycle.word[(i - 1) % k]
    outgoing = cycle.word[i]
    if incoming == outgoing:
        parent = words.canonicalize(cycle.word[:i] + cycle.word[i + 1 :])
        return "grown", parent
    return "spontaneous", None


def insertion_events(
    g_before: PermGraph, g_after: PermGraph, new_vertex: int, r: int, time: float = 0.0
) -> list[GrowthEvent]:
    """Events caused by inserting ``new_vertex``: births and splits.

    All new cycles pass through the inserted vertex; destroyed cycles pass
    through one of the edges the insertion landed on.
    """
    if g_after.n != g_before.n + 1 or new_vertex != g_before.n:
        raise InvalidInputError("expected g_after = g_before plus one new last vertex")
    out: list[GrowthEvent] = []
    for cyc in _cycles_through_vertex(g_after, new_vertex, r):
        kind, parent = classify_event(cyc, new_vertex)
        out.append(
            GrowthEvent(
                time=time,
                kind=kind,
                cycle=cyc,
                word=words.canonicalize(cyc.word),
                parent=parent,
            )
        )
    # splits: an existing cycle hit by the insertion in >= 2 of its edges
    hit_edges = set()
    for l in range(g_before.d):
        j = int(g_after.perms[l, new_vertex])
        if j != new_vertex:
            p = int(g_after.inv[l, new_vertex])
            hit_edges.add((l, p, j))  # edge of g_before: pi_l(p) = j
    for cyc in walks.enumerate_cycles(g_before, r).cycles:
        hits = sum(1 for e in cyc.directed_labeled_edges() if e in hit_edges)
        if hits >= 2:
            out.append(
                GrowthEvent(
                    time=time,
                    kind="split",
                    cycle=cyc,
                    word=words.canonicalize(cyc.word),
                )
            )
    return out


# ---------------------------------------------------------------------------
# trajectories


@dataclass
class Trajectory:
    """Grid censuses (by word class) of one growing-graph run."""

    grid: tuple[float, ...]
    classes: tuple[WordClass, ...]
    counts: np.ndarray  # (len(grid), n_classes)
    n_vertices: np.ndarray  # (len(grid),)
    events: list[GrowthEvent] = field(default_factory=list)

    def by_length(self, r: int) -> np.ndarray:
        return walks.counts_by_length(self.counts, self.classes, r)


def simulate_growth(
    d: int,
    s: float,
    T: float,
    grid,
    r: int,
    rng: np.random.Generator,
    track_events: bool = False,
    max_vertices: int = 10**6,
) -> Trajectory:
    """Grow the graph to time s, then census it at s + grid up to s + T.

    The run always starts from the one-vertex graph (warm-up convention);
    ``grid`` holds offsets in [0, T].  With ``track_events`` every insertion
    after time s is classified into grown/spontaneous/split events.
    """
    grid = np.asarray(grid, dtype=float)
    if r < 1:
        raise InvalidInputError(f"need r >= 1, got {r}")
    if s < 0 or T < 0:
        raise InvalidInputError("need s >= 0 and T >= 0")
    if grid.ndim != 1 or (grid.size and (grid.min() < 0 or grid.max() > T)):
        raise InvalidInputError("grid must lie within [0, T]")
    jumps = poissonized_times(s + T, 0, rng, max_events=max_vertices)
    tower = PermTower(d, 0)
    classes, _ = walks.class_table(d, r)
    abs_grid = s + np.sort(grid)
    counts = np.zeros((abs_grid.size, len(classes)), dtype=np.int64)
    n_vertices = np.zeros(abs_grid.size, dtype=np.int64)
    events: list[GrowthEvent] = []
    gi = 0

    def record_until(time_now: float) -> None:
        nonlocal gi
        while gi < abs_grid.size and abs_grid[gi] < time_now:
            cc, _ = walks.batch_class_counts(tower.perms()[None], r)
            counts[gi] = cc[0]
            n_vertices[gi] = tower.n
            gi += 1

    for jt in jumps:
        record_until(jt)
        if track_events and jt > s and tower.n > 0:
            before = tower.graph()
            tower.extend(rng)
            events.extend(insertion_events(before, tower.graph(), before.n, r, time=jt))
        elif track_events and jt > s:
            # first vertex of the run: its births are the d fresh loops
            tower.extend(rng)
            for cyc in _cycles_through_vertex(tower.graph(), 0, r):
                kind, parent = classify_event(cyc, 0)
                events.append(
                    GrowthEvent(
                        time=jt,
                        kind=kind,
                        cycle=cyc,
                        word=words.canonicalize(cyc.word),
                        parent=parent,
                    )
                )
        else:
            tower.extend(rng)
    record_until(np.inf)
    return Trajectory(
        grid=tuple(float(t) for t in abs_grid),
        classes=classes,
        counts=counts,
        n_vertices=n_vertices,
        events=events,
    )


def growth_count_samples(
    d: int,
    s: float,
    lags,
    r: int,
    replicas: int,
    seed: int,
) -> np.ndarray:
    """Per-length cycle counts of independent runs at times s and s + lag.

    Returns an array of shape (replicas, 1 + len(lags), r); replica b uses
    the RNG stream keyed (seed, b), so results are independent of scheduling.
    """
    lags = np.asarray(lags, dtype=float)
    if replicas < 1:
        raise InvalidInputError("need replicas >= 1")
    if lags.size and lags.min() <= 0:
        raise InvalidInputError("lags must be positive")
    grid = np.concatenate([[0.0], lags])
    T = float(grid.max())
    out = np.zeros((replicas, grid.size, r), dtype=np.int64)
    for b in range(replicas):
        rng = np.random.default_rng([seed, b])
        traj = simulate_growth(d, s, T, grid, r, rng)
        out[b] = traj.by_length(r)
    return out
