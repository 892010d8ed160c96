"""Discrete arcs: injective step-paths with bounded consecutive gaps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FormatError


@dataclass(frozen=True)
class DiscreteArc:
    """Ordered injective point sequence; consecutive points step-adjacent."""

    indices: tuple[int, ...]

    def __post_init__(self):
        if not self.indices:
            raise FormatError("empty arc")
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))

    @property
    def a(self):
        return self.indices[0]

    @property
    def b(self):
        return self.indices[-1]

    def __len__(self):
        return len(self.indices)

    def position_of(self, point):
        return self.indices.index(point)

    def subarc_by_pos(self, p, q):
        """Contiguous slice between positions p and q, order-agnostic."""
        lo, hi = (p, q) if p <= q else (q, p)
        return self.indices[lo : hi + 1]

    def subarc(self, x, y):
        """Slice between points x and y (paper-style A[x,y])."""
        return self.subarc_by_pos(self.position_of(x), self.position_of(y))


def validate_arc(space, arc, *, slack=1e-12):
    """Raise FormatError unless arc is injective with step-sized gaps."""
    idx = arc.indices
    if len(set(idx)) != len(idx):
        raise FormatError("arc repeats a point")
    if len(idx) == 1:
        return
    if space.metric == "graph":
        adj = space.step_adjacency
        for k in range(len(idx) - 1):
            if idx[k + 1] not in adj[idx[k]]:
                raise FormatError(f"arc gap at position {k}: no edge")
    else:
        rho = space.step_radius
        gaps = consecutive_gaps(space, idx)
        bad = np.nonzero(gaps > rho * (1 + slack))[0]
        if bad.size:
            k = int(bad[0])
            raise FormatError(
                f"arc gap at position {k}: {gaps[k]:.6g} > step radius {rho:.6g}")


def consecutive_gaps(space, indices):
    """d(indices[k], indices[k+1]) for all k, as an array."""
    idx = np.asarray(indices, dtype=int)
    if idx.size < 2:
        return np.zeros(0)
    if space.metric in ("euclidean", "snowflake"):
        eu = np.linalg.norm(space.coords[idx[1:]] - space.coords[idx[:-1]], axis=1)
        return eu ** space.alpha if space.metric == "snowflake" else eu
    return np.array([space.dist(int(idx[k]), int(idx[k + 1]))
                     for k in range(idx.size - 1)])


def loop_erase(points, tags=None):
    """Erase cycles from a walk, keeping the first visit of each point.

    Returns (points, tags, excised_count).  The output is a subsequence of
    the input, so tag order and consecutive adjacency are preserved.
    """
    out_pts = []
    out_tags = []
    pos = {}
    excised = 0
    for k, p in enumerate(points):
        if p in pos:
            cut = pos[p] + 1
            excised += len(out_pts) - cut
            for q in out_pts[cut:]:
                del pos[q]
            del out_pts[cut:]
            if tags is not None:
                del out_tags[cut:]
        else:
            pos[p] = len(out_pts)
            out_pts.append(p)
            if tags is not None:
                out_tags.append(tags[k])
    return out_pts, (out_tags if tags is not None else None), excised


def subarc_diameter_scan(space, indices):
    """Stream (q, dist_row, diam_col) over end positions q = 1..m-1.

    dist_row[p] = d(points[p], points[q]) for p < q, and diam_col[p] is the
    diameter of the subarc spanning positions p..q.  O(m^2) time, O(m) space.
    """
    idx = list(indices)
    m = len(idx)
    diam = np.zeros(m, dtype=float)
    for q in range(1, m):
        row = space.dist_many([idx[q]], idx[:q])[0]
        # suffix running max of d(., q) gives diam additions ending at q
        suffix = np.maximum.accumulate(row[::-1])[::-1]
        np.maximum(diam[:q], suffix, out=diam[:q])
        yield q, row, diam[:q]


def subarc_diameter_triangle_ok(space, arc, p, z, q, slack=1e-9):
    """diam(A[p,z]) <= diam(A[p,q]) + diam(A[z,q]) for z between p and q."""
    from .space import diameter

    d_pz = diameter(space, arc.subarc_by_pos(p, z))
    d_pq = diameter(space, arc.subarc_by_pos(p, q))
    d_zq = diameter(space, arc.subarc_by_pos(z, q))
    return d_pz <= d_pq + d_zq + slack * max(d_pq + d_zq, 1.0)
