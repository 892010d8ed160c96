"""Blob families: connected arc unions around net members.

For each net member x, V_x is a connected union of step paths joining x to
every member within 2r, grown stage by stage across the separation color
classes, with short bridging arcs added whenever an earlier-class blob
comes too close without touching.  The family satisfies:

  (1) d(x, y) <= 2r implies y in V_x,
  (2) diam(V_x) <= 5 * L * r,
  (3') disjoint blobs are more than delta * r apart,

where delta is measured on the finished family (the theoretical value
(1/2) * (5L)^(-M) underflows for realistic M and is reported in log form).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import VerificationError
from .profile import linear_path
from .space import diameter, set_distance


@dataclass(frozen=True)
class BridgeEvent:
    """One bridging arc added at a stage of a blob's construction."""

    stage: int
    target_owner: int
    bridge: tuple[int, ...]
    diameter: float
    budget: float
    within_budget: bool
    anomaly: str | None = None


@dataclass(frozen=True)
class Blob:
    """Connected union of arcs owned by a net member."""

    owner: int
    points: frozenset[int]
    adjacency: dict[int, frozenset[int]]
    diameter: float
    construction_log: tuple[BridgeEvent, ...] = ()

    def sorted_points(self):
        return np.asarray(sorted(self.points), dtype=int)

    def is_connected(self):
        seen = {self.owner}
        stack = [self.owner]
        while stack:
            u = stack.pop()
            for v in self.adjacency.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen == set(self.points)


@dataclass(frozen=True)
class BlobFamily:
    blobs: dict[int, Blob]
    radius: float
    l_hat: float
    m: int
    gap_delta_effective: float
    gap_delta_theoretical_log10: float
    budget_violations: int = 0
    anomalies: int = 0

    @property
    def gap_delta_theoretical(self):
        """(1/2)(5L)^(-M); 0.0 when it underflows (see the log10 field)."""
        return 10.0 ** self.gap_delta_theoretical_log10 \
            if self.gap_delta_theoretical_log10 > -300 else 0.0

    def star_threshold(self):
        """Distance below which two points must share or touch blobs."""
        if math.isinf(self.gap_delta_effective):
            return math.inf
        return self.gap_delta_effective * self.radius


class _MemberIndex:
    """Radius queries over net members."""

    def __init__(self, space, members):
        self.space = space
        self.members = np.asarray(members, dtype=int)
        if space.metric in ("euclidean", "snowflake"):
            self.tree = cKDTree(space.coords[self.members])
        else:
            self.tree = None

    def within(self, point, radius):
        """Members at distance <= radius of the given point, sorted."""
        if self.tree is not None:
            eu = radius if self.space.metric == "euclidean" \
                else radius ** (1.0 / self.space.alpha)
            cand = self.tree.query_ball_point(
                self.space.coords[point], eu * (1 + 1e-12))
            cand = self.members[np.asarray(sorted(cand), dtype=int)] \
                if cand else np.empty(0, dtype=int)
        else:
            cand = self.members
        if cand.size == 0:
            return cand
        d = self.space.dist_many([point], cand)[0]
        return np.sort(cand[d <= radius * (1 + 1e-12)])


def build_blobs(space, net, coloring, l_hat):
    """Grow every blob, color class by color class.

    Members of one class are far apart (the coloring separation), so their
    constructions are independent; classes are processed in label order and
    ascending member index inside a class, which makes the family
    deterministic.  Bridging at stage i fires only when a disjoint earlier
    blob sits strictly within (1/2)(5L)^(-i) r; stages whose threshold
    falls below the resolution cannot fire, because disjoint sets of a
    finite space are at least h apart, and are skipped.
    """
    r = net.radius
    index = _MemberIndex(space, sorted(net.members))
    classes = coloring.classes()
    blobs: dict[int, Blob] = {}
    budget_violations = 0
    anomalies = 0
    five_l = 5.0 * l_hat

    for label in sorted(classes):
        for x in classes[label]:
            points = {x}
            adjacency: dict[int, set[int]] = {x: set()}
            for y in index.within(x, 2.0 * r):
                if int(y) == x:
                    continue
                arc, _ = linear_path(space, x, int(y))
                _absorb(points, adjacency, arc.indices)
            log: list[BridgeEvent] = []
            for i in range(1, label):
                threshold = 0.5 * five_l ** (-i) * r
                if threshold < space.h:
                    break  # no disjoint pair can be this close
                blob_pts = frozenset(points)
                own_diam = _diam(space, points)
                close = []
                for y in classes[i]:
                    other = blobs[y]
                    lower = space.dist(x, y) - own_diam - other.diameter
                    if lower >= threshold:
                        continue
                    if not blob_pts.isdisjoint(other.points):
                        continue
                    gap = set_distance(space, blob_pts, other.points)
                    if 0.0 < gap < threshold:
                        close.append((gap, y))
                if not close:
                    continue
                close.sort()
                anomaly = None
                if len(close) > 1:
                    anomalies += 1
                    anomaly = (f"{len(close)} class-{i} blobs within the "
                               "bridging threshold; bridged the closest")
                gap, y = close[0]
                bridge, bridge_diam = _bridge(space, points, blobs[y].points)
                budget = l_hat * five_l ** (-i) * r
                within = bridge_diam <= budget * (1 + 1e-9)
                if not within:
                    budget_violations += 1
                log.append(BridgeEvent(
                    stage=i, target_owner=y, bridge=tuple(bridge),
                    diameter=bridge_diam, budget=budget,
                    within_budget=within, anomaly=anomaly))
                _absorb(points, adjacency, bridge)
            blob = Blob(
                owner=x,
                points=frozenset(points),
                adjacency={k: frozenset(v) for k, v in adjacency.items()},
                diameter=_diam(space, points),
                construction_log=tuple(log),
            )
            if not blob.is_connected():
                raise VerificationError("blob not connected", witness=x)
            blobs[x] = blob

    gap_eff = _min_disjoint_gap(space, blobs, r)
    m = coloring.m
    theo_log10 = math.log10(0.5) - m * math.log10(five_l) if five_l > 1 \
        else math.log10(0.5)
    if not math.isinf(gap_eff):
        gap_eff = max(gap_eff / r, 10.0 ** theo_log10 if theo_log10 > -300 else 0.0)
    return BlobFamily(
        blobs=blobs, radius=r, l_hat=l_hat, m=m,
        gap_delta_effective=gap_eff,
        gap_delta_theoretical_log10=theo_log10,
        budget_violations=budget_violations,
        anomalies=anomalies,
    )


def _absorb(points, adjacency, arc_indices):
    for k, p in enumerate(arc_indices):
        points.add(p)
        adjacency.setdefault(p, set())
        if k:
            q = arc_indices[k - 1]
            adjacency[p].add(q)
            adjacency[q].add(p)


def _diam(space, points):
    return diameter(space, points)


def _bridge(space, from_points, to_points):
    """Shortest-available arc between the closest pair of two blobs."""
    a = np.asarray(sorted(from_points), dtype=int)
    b = np.asarray(sorted(to_points), dtype=int)
    block = space.dist_many(a, b)
    i, j = np.unravel_index(np.argmin(block), block.shape)
    arc, _ = linear_path(space, int(a[i]), int(b[j]))
    return arc.indices, diameter(space, arc.indices)


def _min_disjoint_gap(space, blobs, r):
    """Measured min set distance over disjoint blob pairs, inf if none.

    Pairs whose owners are farther apart than the sum of their diameters
    plus the current search bound cannot beat it (triangle inequality), so
    only nearby pairs need exact set distances.
    """
    owners = sorted(blobs)
    if len(owners) < 2:
        return math.inf
    diams = np.array([blobs[o].diameter for o in owners])
    arr = np.asarray(owners, dtype=int)
    bound = 4.0 * r
    while True:
        best = math.inf
        for k, o in enumerate(owners):
            d_row = space.dist_many([o], arr)[0]
            cutoff = diams[k] + diams + min(bound, best)
            for t in np.nonzero(d_row <= cutoff)[0]:
                if t <= k:
                    continue
                p, q = blobs[o], blobs[owners[t]]
                if not p.points.isdisjoint(q.points):
                    continue
                gap = set_distance(space, p.points, q.points)
                best = min(best, gap)
        if not math.isinf(best) and best <= bound:
            return best
        top = diameter(space, arr) + 2 * float(diams.max())
        if bound > top:
            return best
        bound *= 4.0


@dataclass(frozen=True)
class PropertyReport:
    passed: bool
    witnesses: tuple
    checked: int
    certified: int = 0
    bound: float = 0.0


@dataclass(frozen=True)
class BlobReport:
    property_1: PropertyReport
    property_2: PropertyReport
    property_3: PropertyReport

    @property
    def passed(self):
        return (self.property_1.passed and self.property_2.passed
                and self.property_3.passed)


def verify_blob_properties(space, family, net, l_hat=None, slack=1e-9):
    """Exhaustively check (1), (2) and (3') on a finished family.

    Failures are reported with witnesses, never raised.  (3') covers all
    member pairs: nearby pairs by exact set distance, the rest certified
    far by the triangle inequality (owner distance minus both diameters).
    """
    l_hat = family.l_hat if l_hat is None else l_hat
    r = family.radius
    owners = sorted(family.blobs)
    index = _MemberIndex(space, owners)

    wit1 = []
    checked1 = 0
    for x in owners:
        pts = family.blobs[x].points
        for y in index.within(x, 2.0 * r):
            checked1 += 1
            if int(y) not in pts:
                wit1.append((x, int(y)))
    p1 = PropertyReport(passed=not wit1, witnesses=tuple(wit1[:5]),
                        checked=checked1, bound=2.0 * r)

    bound2 = 5.0 * l_hat * r
    wit2 = [(x, family.blobs[x].diameter) for x in owners
            if family.blobs[x].diameter > bound2 * (1 + slack)]
    p2 = PropertyReport(passed=not wit2, witnesses=tuple(wit2[:5]),
                        checked=len(owners), bound=bound2)

    threshold = family.star_threshold()
    wit3 = []
    checked3 = 0
    certified = 0
    if math.isinf(threshold):
        for k, x in enumerate(owners):
            for y in owners[k + 1 :]:
                checked3 += 1
                if family.blobs[x].points.isdisjoint(family.blobs[y].points):
                    wit3.append((x, y, "disjoint pair under infinite delta"))
    else:
        arr = np.asarray(owners, dtype=int)
        diams = np.array([family.blobs[o].diameter for o in owners])
        floor = threshold * (1 - slack)
        for k, x in enumerate(owners):
            d_row = space.dist_many([x], arr)[0]
            cutoff = diams[k] + diams + threshold * (1 + slack)
            for t in range(k + 1, len(owners)):
                checked3 += 1
                if d_row[t] > cutoff[t]:
                    certified += 1  # gap >= owner distance - diameters > threshold
                    continue
                p, q = family.blobs[x], family.blobs[owners[t]]
                if not p.points.isdisjoint(q.points):
                    continue
                gap = set_distance(space, p.points, q.points)
                if gap < floor:
                    wit3.append((x, owners[t], gap))
    p3 = PropertyReport(passed=not wit3, witnesses=tuple(wit3[:5]),
                        checked=checked3, certified=certified,
                        bound=threshold)
    return BlobReport(property_1=p1, property_2=p2, property_3=p3)
