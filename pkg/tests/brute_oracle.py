"""Independent brute-force checkers for micro-scale spaces.

Everything here evaluates definitions by literal exhaustive enumeration,
with plain Python loops.  Nothing below imports the pipeline's verifiers,
so these functions serve as an independent second route for every verdict
the pipeline produces.  They are only meant for small inputs (n <= 40 or
so); complexity is whatever the definition says, typically cubic.
"""

from __future__ import annotations

import math


def dist(space, i, j):
    return float(space.dist(i, j))


def set_distance(space, u_set, v_set):
    return min(dist(space, u, v) for u in u_set for v in v_set)


def diameter(space, pts):
    pts = list(pts)
    if len(pts) <= 1:
        return 0.0
    return max(dist(space, a, b) for a in pts for b in pts)


def hausdorff(space, u_set, v_set):
    d_uv = max(min(dist(space, u, v) for v in v_set) for u in u_set)
    d_vu = max(min(dist(space, u, v) for u in u_set) for v in v_set)
    return max(d_uv, d_vu)


def net_is_separated(space, members, r):
    members = list(members)
    for a in range(len(members)):
        for b in range(a + 1, len(members)):
            if dist(space, members[a], members[b]) < r:
                return False
    return True


def net_is_maximal(space, members, r):
    member_set = set(members)
    for p in range(space.n):
        if p in member_set:
            continue
        if all(dist(space, p, m) >= r for m in members):
            return False
    return True


def coloring_is_separated(space, labels, target):
    items = sorted(labels.items())
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            (x, lx), (y, ly) = items[i], items[j]
            if lx == ly and dist(space, x, y) < target:
                return False
    return True


def blob_property_1(space, blobs, members, r):
    for x in members:
        for y in members:
            if dist(space, x, y) <= 2.0 * r and y not in blobs[x]:
                return False
    return True


def blob_property_2(space, blobs, l_hat, r, slack=1e-9):
    bound = 5.0 * l_hat * r
    for x, pts in blobs.items():
        if diameter(space, pts) > bound * (1.0 + slack):
            return False
    return True


def blob_property_3(space, blobs, delta_eff, r, slack=1e-9):
    """Every disjoint pair of blobs is at least delta_eff * r apart."""
    if math.isinf(delta_eff):
        return all(
            set(blobs[x]) & set(blobs[y])
            for x in blobs
            for y in blobs
            if x != y
        )
    owners = sorted(blobs)
    for i in range(len(owners)):
        for j in range(i + 1, len(owners)):
            a, b = set(blobs[owners[i]]), set(blobs[owners[j]])
            if a & b:
                continue
            if set_distance(space, a, b) < delta_eff * r * (1.0 - slack):
                return False
    return True


def min_disjoint_gap(space, blobs):
    """Measured min set distance over disjoint blob pairs, inf if none."""
    owners = sorted(blobs)
    best = math.inf
    for i in range(len(owners)):
        for j in range(i + 1, len(owners)):
            a, b = set(blobs[owners[i]]), set(blobs[owners[j]])
            if a & b:
                continue
            best = min(best, set_distance(space, a, b))
    return best


def subarc(indices, p, q):
    lo, hi = min(p, q), max(p, q)
    return indices[lo : hi + 1]


def star_condition(space, indices, s_iota, big_s_iota, slack=1e-9):
    """d(x,y) < s*iota implies diam(subarc) < S*iota, all position pairs."""
    m = len(indices)
    for p in range(m):
        for q in range(p + 1, m):
            d = dist(space, indices[p], indices[q])
            if d < s_iota:
                if diameter(space, subarc(indices, p, q)) > big_s_iota * (1.0 + slack):
                    return False
    return True


def follows(space, b_indices, a_indices, assignment, epsilon, slack=1e-9):
    """Literal triple loop over position pairs of B and points of B[x,y].

    Checks endpoints-to-endpoints, then that every point of every subarc
    B[x,y] lies within epsilon of A[p(x), p(y)].
    """
    mb, ma = len(b_indices), len(a_indices)
    if assignment[0] != 0 or assignment[mb - 1] != ma - 1:
        return False
    tol = epsilon * (1.0 + slack)
    for x in range(mb):
        for y in range(x, mb):
            lo, hi = sorted((assignment[x], assignment[y]))
            window = a_indices[lo : hi + 1]
            for z in range(x, y + 1):
                if min(dist(space, b_indices[z], w) for w in window) > tol:
                    return False
    return True


def arc_is_valid(space, indices, rho):
    if len(set(indices)) != len(indices):
        return False
    for k in range(len(indices) - 1):
        if space.step_adjacency is not None:
            if indices[k + 1] not in space.step_adjacency[indices[k]]:
                return False
        elif dist(space, indices[k], indices[k + 1]) > rho * (1.0 + 1e-12):
            return False
    return True


def local_quasiarc_ratio(space, indices, lo, hi):
    """Max diam(subarc)/d over position pairs with d in [lo, hi]; 1.0 if none."""
    best = None
    m = len(indices)
    for p in range(m):
        for q in range(p + 1, m):
            d = dist(space, indices[p], indices[q])
            if lo <= d <= hi:
                ratio = diameter(space, subarc(indices, p, q)) / d
                best = ratio if best is None else max(best, ratio)
    return (1.0, True) if best is None else (best, False)


def greedy_half_cover_count(space, ball_pts, radius):
    """Greedy count of half-radius balls (member centers) covering a ball."""
    uncovered = sorted(ball_pts)
    count = 0
    while uncovered:
        c = uncovered[0]
        uncovered = [p for p in uncovered if dist(space, c, p) > radius / 2.0]
        count += 1
    return count
