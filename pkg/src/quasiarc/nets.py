"""Maximal separated nets and greedy separation colorings."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisFailure, VerificationError


@dataclass(frozen=True)
class Net:
    """Maximal r-separated subset: members pairwise >= r apart, every point
    of the space strictly within r of some member."""

    members: tuple[int, ...]
    radius: float
    seeds: tuple[int, ...]
    member_set: frozenset[int] = field(repr=False, default=frozenset())

    def __post_init__(self):
        object.__setattr__(self, "member_set", frozenset(self.members))

    def __len__(self):
        return len(self.members)


def build_net(space, r, seeds=(), priority=()):
    """Greedy sweep, seeds admitted first, then priority points in their
    given order, then every point in ascending index order.

    The sweep adds any point at distance >= r from all current members, so
    separation and maximality hold exactly by construction; both are
    re-checked before returning.  Passing an arc as priority aligns the
    net with the arc's own geometry, which keeps covering balls of nearby
    members overlapping along the arc at radii close to the resolution.
    """
    if r <= 0:
        raise ValueError("net radius must be positive")
    seeds = tuple(int(s) for s in seeds)
    for k, s in enumerate(seeds):
        for t in seeds[k + 1 :]:
            if s != t and space.dist(s, t) < r:
                raise HypothesisFailure(
                    f"seeds {s} and {t} are closer than the net radius",
                    witness=(s, t))
    members = list(dict.fromkeys(seeds))
    taken = set(members)
    order = [int(p) for p in priority] + list(range(space.n))
    for p in order:
        if p in taken:
            continue
        if members:
            d = space.dist_many([p], members)[0]
            if float(d.min()) < r:
                taken.add(p)
                continue
        members.append(p)
        taken.add(p)
    net = Net(members=tuple(members), radius=float(r), seeds=seeds)
    _check_net(space, net)
    return net


def _check_net(space, net):
    members = np.asarray(net.members, dtype=int)
    if members.size > 1:
        for lo in range(0, members.size, 256):
            block = space.dist_many(members[lo : lo + 256], members)
            block[np.arange(lo, min(lo + 256, members.size)) - lo,
                  np.arange(lo, min(lo + 256, members.size))] = np.inf
            if float(block.min()) < net.radius:
                i, j = np.unravel_index(np.argmin(block), block.shape)
                raise VerificationError(
                    "net separation violated",
                    witness=(int(members[lo + i]), int(members[j])))
    for lo in range(0, space.n, 256):
        pts = np.arange(lo, min(lo + 256, space.n))
        d = space.dist_many(pts, members).min(axis=1)
        uncovered = pts[d >= net.radius]
        uncovered = [int(p) for p in uncovered if p not in net.member_set]
        if uncovered:
            raise VerificationError("net not maximal", witness=uncovered[0])


def plan_arc_cover(space, arc, r, seeds, *, retry_budget=800):
    """Choose arc-side net members so every consecutive arc pair shares a
    ball of radius r.

    The covering walk fails exactly when some pair of consecutive arc
    points fits no member ball, which the plain greedy sweep can cause at
    radii within a couple of steps of the resolution (member parity along
    the arc collides with the seeded endpoints).  Any maximal separated
    net is acceptable, so the arc-side members are planned directly: walk
    the arc, and whenever the pending pair is uncovered place the eligible
    candidate closest to the pair's far end (laziest progress); when no
    candidate is eligible, backtrack chronologically and advance the most
    recent placement to its next candidate.  Returns the planned members
    in placement order; raises HypothesisFailure when the budget is
    exhausted or the constraints are genuinely unsatisfiable.
    """
    idx = arc.indices
    m = len(idx)
    members = list(dict.fromkeys(int(s) for s in seeds))
    member_set = set(members)
    balls: dict[int, np.ndarray] = {}

    def ball(p):
        got = balls.get(p)
        if got is None:
            got = space.within(p, r, strict=True)
            balls[p] = got
        return got

    def covered(u, v):
        for c in ball(u):
            if int(c) in member_set and space.dist(int(c), v) < r:
                return True
        return False

    def candidates_for(u, v):
        both = [int(c) for c in ball(u) if space.dist(int(c), v) < r]
        both.sort(key=lambda c: (space.dist(c, v), c))
        return both

    def eligible(c):
        return all(int(p) not in member_set or int(p) == c
                   for p in ball(c))

    frames = []  # (pair_index, candidate list, next pointer, placed member)
    retries = 0
    t = 0
    while t < m - 1:
        u, v = idx[t], idx[t + 1]
        if covered(u, v):
            t += 1
            continue
        cands = candidates_for(u, v)
        ptr = 0
        placed = False
        while ptr < len(cands):
            if eligible(cands[ptr]):
                c = cands[ptr]
                frames.append((t, cands, ptr + 1, c))
                members.append(c)
                member_set.add(c)
                placed = True
                t += 1
                break
            ptr += 1
        if placed:
            continue
        # chronological backtrack
        while True:
            if not frames or retries >= retry_budget:
                raise HypothesisFailure(
                    "no separated net can hold two consecutive arc points "
                    f"in one covering ball near arc position {t}; the "
                    "scale is too close to the resolution",
                    witness=(t, u, v))
            pair_t, clist, ptr, old = frames.pop()
            members.remove(old)
            member_set.discard(old)
            retries += 1
            while ptr < len(clist) and not eligible(clist[ptr]):
                ptr += 1
            if ptr < len(clist):
                c = clist[ptr]
                frames.append((pair_t, clist, ptr + 1, c))
                members.append(c)
                member_set.add(c)
                t = pair_t + 1
                break
    seed_set = set(int(s) for s in seeds)
    return tuple(p for p in members if p not in seed_set)


@dataclass(frozen=True)
class Coloring:
    """Labels 1..M on net members; equal labels are >= separation apart."""

    labels: dict[int, int]
    m: int
    separation_target: float

    def classes(self):
        """Members grouped by label, ascending label then index."""
        out: dict[int, list[int]] = {}
        for member in sorted(self.labels):
            out.setdefault(self.labels[member], []).append(member)
        return out


def color_net(space, net, separation_target):
    """Greedy smallest-available-label sweep in ascending member index.

    Two members conflict when their distance is strictly below the target,
    so same-label pairs end up >= target apart, exactly.
    """
    ordered = sorted(net.members)
    labels: dict[int, int] = {}
    placed: list[int] = []
    placed_labels = np.zeros(len(ordered), dtype=int)
    for k, x in enumerate(ordered):
        label = 1
        if placed:
            d = space.dist_many([x], placed)[0]
            used = np.unique(placed_labels[:k][d < separation_target])
            # smallest positive integer outside the sorted used array
            for candidate in range(1, used.size + 2):
                pos = candidate - 1
                if pos >= used.size or used[pos] != candidate:
                    label = candidate
                    break
        labels[x] = label
        placed.append(x)
        placed_labels[k] = label
    m = int(placed_labels.max()) if len(ordered) else 0
    coloring = Coloring(labels=labels, m=m,
                        separation_target=float(separation_target))
    _check_coloring(space, net, coloring)
    return coloring


def _check_coloring(space, net, coloring):
    classes = coloring.classes()
    for label, members in classes.items():
        arr = np.asarray(members, dtype=int)
        if arr.size < 2:
            continue
        block = space.dist_many(arr, arr)
        np.fill_diagonal(block, np.inf)
        if float(block.min()) < coloring.separation_target:
            i, j = np.unravel_index(np.argmin(block), block.shape)
            raise VerificationError(
                "same-label members too close",
                witness=(int(arr[i]), int(arr[j]), label))
    # greedy bound: a label above 1 + max conflict degree is impossible
    max_deg = 0
    arr = np.asarray(sorted(net.members), dtype=int)
    for lo in range(0, arr.size, 256):
        block = space.dist_many(arr[lo : lo + 256], arr)
        deg = (block < coloring.separation_target).sum(axis=1) - 1
        if deg.size:
            max_deg = max(max_deg, int(deg.max()))
    if coloring.m > max_deg + 1:
        raise VerificationError(
            "label count exceeds the greedy bound",
            witness=(coloring.m, max_deg + 1))
