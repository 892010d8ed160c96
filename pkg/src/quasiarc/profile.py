"""Hypothesis estimators: linear-connectivity paths and doubling covers.

The space is assumed linearly connected and doubling; a finite sample can
only exhibit constants, not certify them.  linear_path reports the turning
ratio it achieved, and the estimators take the max over an exhaustive or
seeded sample.  Downstream constructions consume the measured constants.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .arcs import DiscreteArc
from .errors import HypothesisFailure
from .space import diameter


@dataclass(frozen=True)
class SpaceProfile:
    """Measured stand-ins for the space's connectivity and doubling constants."""

    l_hat: float
    n_hat: int
    sample_count: int
    exact: bool

    def __post_init__(self):
        if self.l_hat < 1.0 or self.n_hat < 1:
            raise ValueError("profile constants must be >= 1")


@dataclass(frozen=True)
class PairSample:
    """Pair sampling plan for the connectivity estimator.

    Uniform pairs probe global scales; per-anchor detour selection probes
    pairs that are metrically close but far in the step graph, which is
    where the worst turning ratios live.
    """

    pair_count: int = 300
    anchor_count: int = 150
    near_k: int = 4
    seed: int = 0


@dataclass(frozen=True)
class BallSample:
    """Ball sampling plan for the doubling estimator."""

    center_count: int = 200
    seed: int = 0


def _bfs_tree(space, source):
    """Hop counts and parents of the min-hop tree from source."""
    n = space.n
    hops = np.full(n, -1, dtype=int)
    parent = np.full(n, -1, dtype=int)
    hops[source] = 0
    queue = deque([source])
    adj = _sorted_adjacency(space)
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if hops[v] < 0:
                hops[v] = hops[u] + 1
                parent[v] = u
                queue.append(v)
    return hops, parent


def _sorted_adjacency(space):
    cached = getattr(space, "_sorted_adj", None)
    if cached is None:
        cached = [sorted(s) for s in space.step_adjacency]
        space._sorted_adj = cached
    return cached


def _path_from_parents(parent, source, target):
    path = [target]
    while path[-1] != source:
        p = int(parent[path[-1]])
        if p < 0:
            return None
        path.append(p)
    return path[::-1]


def min_hop_path(space, x, y):
    """Shortest step-graph path from x to y as a point list, or None.

    Early-exits at the target, so the search only explores the hop ball
    around x of the target's radius.
    """
    if x == y:
        return [x]
    adj = _sorted_adjacency(space)
    parent = {x: -1}
    queue = deque([x])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v in parent:
                continue
            parent[v] = u
            if v == y:
                path = [y]
                while parent[path[-1]] != -1:
                    path.append(parent[path[-1]])
                return path[::-1]
            queue.append(v)
    return None


def linear_path(space, x, y):
    """Join x to y by a minimum-hop step path; report the turning ratio.

    Returns (arc, ratio) where ratio = diam(path) / d(x, y), the constant
    this particular pair exhibits (1.0 for the degenerate x == y case).
    Raises HypothesisFailure when no step path exists: the space is not
    connected at the working resolution, which is an input defect.
    """
    path = min_hop_path(space, x, y)
    if path is None:
        raise HypothesisFailure(
            f"no step path between {x} and {y}; space is not step-connected",
            witness=(x, y))
    if x == y:
        return DiscreteArc((x,)), 1.0
    ratio = diameter(space, path) / space.dist(x, y)
    return DiscreteArc(tuple(path)), ratio


def _pair_ratio(space, parent, source, target):
    path = _path_from_parents(parent, source, target)
    if path is None:
        raise HypothesisFailure(
            f"no step path between {source} and {target}; "
            "space is not step-connected", witness=(source, target))
    return diameter(space, path) / space.dist(source, target)


def estimate_linear_connectivity(space, sample: PairSample | None = None,
                                 *, exhaustive=False):
    """Max achieved turning ratio over sampled (or all) point pairs.

    Exhaustive mode walks every pair via one min-hop tree per source.
    Sampled mode takes uniform pairs plus, per anchor, the targets with the
    largest detour factor hops * h / d, an effective selector for
    metrically-close-but-graph-far pairs.
    """
    if space.n < 2:
        return 1.0, 0, True
    sample = sample or PairSample()
    best = 1.0
    count = 0
    if exhaustive or space.n <= 150:
        for i in range(space.n):
            hops, parent = _bfs_tree(space, i)
            for j in range(i + 1, space.n):
                if hops[j] < 0:
                    raise HypothesisFailure(
                        f"no step path between {i} and {j}; "
                        "space is not step-connected", witness=(i, j))
                best = max(best, _pair_ratio(space, parent, i, j))
                count += 1
        return best, count, True

    rng = np.random.default_rng(sample.seed)
    anchors = sorted(int(a) for a in rng.choice(
        space.n, size=min(sample.anchor_count, space.n), replace=False))
    uniform = set()
    while len(uniform) < sample.pair_count:
        i, j = (int(v) for v in rng.integers(0, space.n, size=2))
        if i != j:
            uniform.add((min(i, j), max(i, j)))
    by_source: dict[int, set[int]] = {}
    for i, j in sorted(uniform):
        by_source.setdefault(i, set()).add(j)
    for a in anchors:
        by_source.setdefault(a, set())

    for source in sorted(by_source):
        hops, parent = _bfs_tree(space, source)
        targets = set(by_source[source])
        if source in set(anchors):
            row = space.row(source)
            with np.errstate(divide="ignore", invalid="ignore"):
                detour = np.where(
                    (hops > 0) & (row > 0), hops * space.h / row, 0.0)
            order = np.argsort(detour)[::-1][: sample.near_k]
            targets.update(int(t) for t in order if detour[t] > 0)
        for t in sorted(targets):
            if hops[t] < 0:
                raise HypothesisFailure(
                    f"no step path between {source} and {t}; "
                    "space is not step-connected", witness=(source, t))
            best = max(best, _pair_ratio(space, parent, source, t))
            count += 1
    return best, count, False


def greedy_half_cover(space, ball_pts, radius):
    """Cover a ball's point set greedily by half-radius balls at member points."""
    remaining = np.asarray(sorted(ball_pts), dtype=int)
    count = 0
    while remaining.size:
        c = int(remaining[0])
        d = space.dist_many([c], remaining)[0]
        remaining = remaining[d > radius / 2.0]
        count += 1
    return count


def radius_ladder(space):
    """Doubling radii h, 2h, 4h, ... up to the first radius >= diam."""
    if space.n < 2:
        return [1.0]
    top = diameter(space, range(space.n))
    ladder = [space.h]
    while ladder[-1] < top:
        ladder.append(ladder[-1] * 2.0)
    return ladder


def estimate_doubling(space, sample: BallSample | None = None,
                      *, exhaustive=False):
    """Max greedy half-cover count over sampled (center, radius) balls."""
    if space.n == 1:
        return 1, 1, True
    sample = sample or BallSample()
    ladder = radius_ladder(space)
    if exhaustive or space.n <= 150:
        centers = list(range(space.n))
        exact = True
    else:
        rng = np.random.default_rng(sample.seed)
        centers = sorted(int(c) for c in rng.choice(
            space.n, size=min(sample.center_count, space.n), replace=False))
        exact = False
    n_hat = 1
    count = 0
    for c in centers:
        row = space.row(c)
        for rad in ladder:
            ball = np.nonzero(row <= rad)[0]
            n_hat = max(n_hat, greedy_half_cover(space, ball, rad))
            count += 1
    return n_hat, count, exact


def profile_space(space, *, exhaustive=None, seed=0,
                  pair_sample: PairSample | None = None,
                  ball_sample: BallSample | None = None):
    """Estimate both constants and bundle them as a SpaceProfile."""
    if exhaustive is None:
        exhaustive = space.n <= 150
    if pair_sample is None:
        pair_sample = PairSample(seed=seed)
    if ball_sample is None:
        ball_sample = BallSample(seed=seed)
    l_hat, l_count, l_exact = estimate_linear_connectivity(
        space, pair_sample, exhaustive=exhaustive)
    n_hat, n_count, n_exact = estimate_doubling(
        space, ball_sample, exhaustive=exhaustive)
    return SpaceProfile(
        l_hat=max(1.0, l_hat),
        n_hat=max(1, n_hat),
        sample_count=l_count + n_count,
        exact=l_exact and n_exact,
    )
