"""Finite metric spaces with a step-connectivity structure.

A space is a set of dense point indices 0..n-1 with one of four metrics:
euclidean or snowflake (coordinate-backed), an explicit distance matrix,
or shortest-path distances over a weighted graph.  Two points are
step-adjacent when their distance is at most the step radius rho
(coordinate and matrix kinds) or when they share an edge (graph kind).
The resolution h is the minimum positive pairwise distance.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import FormatError

DEFAULT_STEP_FACTOR = 1.5  # rho = 1.5 * h unless the caller picks one

_KINDS = ("euclidean", "snowflake", "matrix", "graph")


class MetricSpace:
    """Immutable finite metric space.  Use the factory classmethods."""

    def __init__(self, *, metric, coords=None, alpha=None, matrix=None,
                 edges=None, step_radius=None):
        if metric not in _KINDS:
            raise FormatError(f"unknown metric kind {metric!r}")
        self.metric = metric
        self.alpha = alpha
        self.coords = None if coords is None else np.asarray(coords, dtype=float)
        self.matrix = None if matrix is None else np.asarray(matrix, dtype=float)
        self.edges = None if edges is None else [
            (int(i), int(j), float(w)) for (i, j, w) in edges
        ]
        self._rows: dict[int, np.ndarray] = {}
        self._adjacency = None
        self._tree = None
        self._graph_csr = None

        if metric in ("euclidean", "snowflake"):
            if self.coords is None or self.coords.ndim != 2:
                raise FormatError("coordinate-backed space needs a 2d coords array")
            if metric == "snowflake":
                if alpha is None or not (0.0 < alpha <= 1.0):
                    raise FormatError("snowflake exponent must lie in (0, 1]")
            self.n = len(self.coords)
        elif metric == "matrix":
            m = self.matrix
            if m is None or m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise FormatError("matrix space needs a square distance matrix")
            self.n = m.shape[0]
            _validate_matrix(m)
        else:
            if self.edges is None:
                raise FormatError("graph space needs an edge list")
            self.n = 1 + max((max(i, j) for i, j, _ in self.edges), default=0)
            for i, j, w in self.edges:
                if i == j or w <= 0:
                    raise FormatError(f"bad edge ({i},{j},{w})")
            rows = [i for i, j, _ in self.edges] + [j for i, j, _ in self.edges]
            cols = [j for i, j, _ in self.edges] + [i for i, j, _ in self.edges]
            vals = [w for _, _, w in self.edges] * 2
            self._graph_csr = csr_matrix((vals, (rows, cols)), shape=(self.n, self.n))

        if self.n == 0:
            raise FormatError("empty space")

        self.h = self._resolution()
        if self.metric == "graph":
            self.step_radius = None
        else:
            self.step_radius = float(step_radius) if step_radius is not None \
                else (DEFAULT_STEP_FACTOR * self.h if self.n > 1 else 1.0)

    # -- factories ---------------------------------------------------------

    @classmethod
    def euclidean(cls, coords, step_radius=None):
        return cls(metric="euclidean", coords=coords, step_radius=step_radius)

    @classmethod
    def snowflake(cls, coords, alpha, step_radius=None):
        return cls(metric="snowflake", coords=coords, alpha=alpha,
                   step_radius=step_radius)

    @classmethod
    def from_matrix(cls, matrix, step_radius=None):
        return cls(metric="matrix", matrix=matrix, step_radius=step_radius)

    @classmethod
    def from_graph(cls, edges):
        return cls(metric="graph", edges=edges)

    # -- distances ---------------------------------------------------------

    def _resolution(self):
        if self.n < 2:
            return 0.0
        if self.metric in ("euclidean", "snowflake"):
            tree = self._kdtree()
            d, _ = tree.query(self.coords, k=2)
            nearest = float(d[:, 1].min())
            if nearest == 0.0:
                dup = int(np.argmin(d[:, 1]))
                raise FormatError(f"duplicate point at index {dup}")
            return nearest ** self.alpha if self.metric == "snowflake" else nearest
        if self.metric == "matrix":
            off = self.matrix[~np.eye(self.n, dtype=bool)]
            return float(off.min())
        # shortest-path distance between the min-weight edge's endpoints
        # equals that weight, and no positive distance can be smaller
        return min(w for _, _, w in self.edges)

    def _kdtree(self):
        if self._tree is None:
            self._tree = cKDTree(self.coords)
        return self._tree

    def row(self, i):
        """Distances from point i to every point, cached for slow kinds."""
        if self.metric == "euclidean":
            return np.linalg.norm(self.coords - self.coords[i], axis=1)
        if self.metric == "snowflake":
            eu = np.linalg.norm(self.coords - self.coords[i], axis=1)
            return eu ** self.alpha
        if self.metric == "matrix":
            return self.matrix[i]
        got = self._rows.get(i)
        if got is None:
            got = dijkstra(self._graph_csr, indices=i)
            self._rows[i] = got
        return got

    def dist(self, i, j):
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexError(f"point index out of range: {i}, {j}")
        if i == j:
            return 0.0
        if self.metric in ("euclidean", "snowflake"):
            d = float(np.linalg.norm(self.coords[i] - self.coords[j]))
            return d ** self.alpha if self.metric == "snowflake" else d
        return float(self.row(i)[j])

    def dist_many(self, idx_a, idx_b):
        """Distance matrix between two index sequences, shape (|a|, |b|)."""
        a = np.asarray(idx_a, dtype=int)
        b = np.asarray(idx_b, dtype=int)
        if self.metric == "euclidean":
            return cdist(self.coords[a], self.coords[b])
        if self.metric == "snowflake":
            return cdist(self.coords[a], self.coords[b]) ** self.alpha
        if self.metric == "matrix":
            return self.matrix[np.ix_(a, b)]
        return np.stack([self.row(int(i))[b] for i in a])

    def within(self, i, radius, *, strict=False):
        """Indices at distance <= radius (or < radius) from i, i included."""
        if self.metric in ("euclidean", "snowflake"):
            eu_rad = radius if self.metric == "euclidean" \
                else radius ** (1.0 / self.alpha)
            cand = self._kdtree().query_ball_point(
                self.coords[i], eu_rad * (1 + 1e-12))
            cand = np.asarray(sorted(cand), dtype=int)
        else:
            cand = np.arange(self.n)
        d = self.row(i)[cand] if self.metric in ("matrix", "graph") \
            else self.dist_many([i], cand)[0]
        keep = d < radius if strict else d <= radius
        return cand[keep]

    # -- step structure ----------------------------------------------------

    @property
    def step_adjacency(self):
        """List of neighbor sets under the step structure."""
        if self._adjacency is None:
            adj = [set() for _ in range(self.n)]
            if self.metric == "graph":
                for i, j, _ in self.edges:
                    adj[i].add(j)
                    adj[j].add(i)
            else:
                rho = self.step_radius
                if self.metric in ("euclidean", "snowflake"):
                    eu_rad = rho if self.metric == "euclidean" \
                        else rho ** (1.0 / self.alpha)
                    pairs = self._kdtree().query_pairs(eu_rad * (1 + 1e-12))
                    for i, j in pairs:
                        if self.dist(i, j) <= rho * (1 + 1e-12):
                            adj[i].add(j)
                            adj[j].add(i)
                else:
                    for i in range(self.n):
                        close = np.nonzero(self.matrix[i] <= rho * (1 + 1e-12))[0]
                        for j in close:
                            if j != i:
                                adj[i].add(int(j))
            self._adjacency = adj
        return self._adjacency

    def neighbors(self, i):
        return sorted(self.step_adjacency[i])

    def step_components(self):
        """Connected components of the step graph, in discovery order."""
        seen = np.zeros(self.n, dtype=bool)
        comps = []
        for start in range(self.n):
            if seen[start]:
                continue
            stack = [start]
            seen[start] = True
            comp = []
            while stack:
                u = stack.pop()
                comp.append(u)
                for v in self.step_adjacency[u]:
                    if not seen[v]:
                        seen[v] = True
                        stack.append(v)
            comps.append(sorted(comp))
        return comps

    def is_step_connected(self):
        return len(self.step_components()) == 1

    def summary(self):
        return {
            "n": self.n,
            "metric": self.metric,
            "alpha": self.alpha,
            "resolution": self.h,
            "step_radius": self.step_radius,
        }


def _validate_matrix(m, tol_factor=1e-9):
    scale = float(np.abs(m).max()) or 1.0
    tol = tol_factor * scale
    if np.abs(np.diag(m)).max() > tol:
        bad = int(np.argmax(np.abs(np.diag(m))))
        raise FormatError(f"nonzero self-distance at index {bad}")
    asym = np.abs(m - m.T)
    if asym.max() > tol:
        i, j = np.unravel_index(np.argmax(asym), m.shape)
        raise FormatError(f"asymmetric matrix at ({int(i)},{int(j)})")
    n = m.shape[0]
    off = m[~np.eye(n, dtype=bool)]
    if off.size and off.min() <= 0:
        raise FormatError("non-positive off-diagonal distance")
    # triangle inequality, exhaustive for small n, sampled above
    if n <= 200:
        viol = (m[:, :, None] + m[None, :, :] - m[:, None, :] < -tol)
        if viol.any():
            i, k, j = np.unravel_index(np.argmax(viol), viol.shape)
            raise FormatError(
                f"triangle violation: d({int(i)},{int(j)}) > "
                f"d({int(i)},{int(k)}) + d({int(k)},{int(j)})")
    else:
        rng = np.random.default_rng(0)
        for _ in range(2000):
            i, j, k = rng.integers(0, n, size=3)
            if m[i, j] > m[i, k] + m[k, j] + tol:
                raise FormatError(
                    f"triangle violation: d({int(i)},{int(j)}) > "
                    f"d({int(i)},{int(k)}) + d({int(k)},{int(j)})")


# -- set utilities ---------------------------------------------------------

def set_distance(space, u_set, v_set):
    """Min distance over pairs u in U, v in V."""
    u = np.asarray(list(u_set), dtype=int)
    v = np.asarray(list(v_set), dtype=int)
    if u.size == 0 or v.size == 0:
        raise ValueError("set_distance needs non-empty sets")
    best = np.inf
    for lo in range(0, u.size, 256):
        block = space.dist_many(u[lo:lo + 256], v)
        best = min(best, float(block.min()))
    return best


def hausdorff_distance(space, u_set, v_set):
    """Max of the two directed sup-min distances."""
    u = np.asarray(list(u_set), dtype=int)
    v = np.asarray(list(v_set), dtype=int)
    if u.size == 0 or v.size == 0:
        raise ValueError("hausdorff_distance needs non-empty sets")
    d_uv = 0.0
    for lo in range(0, u.size, 256):
        block = space.dist_many(u[lo:lo + 256], v)
        d_uv = max(d_uv, float(block.min(axis=1).max()))
    d_vu = 0.0
    for lo in range(0, v.size, 256):
        block = space.dist_many(v[lo:lo + 256], u)
        d_vu = max(d_vu, float(block.min(axis=1).max()))
    return max(d_uv, d_vu)


def diameter(space, pts):
    """Max pairwise distance; 0 for singletons."""
    p = np.asarray(list(pts), dtype=int)
    if p.size == 0:
        raise ValueError("diameter needs a non-empty set")
    if p.size == 1:
        return 0.0
    best = 0.0
    for lo in range(0, p.size, 256):
        block = space.dist_many(p[lo:lo + 256], p)
        best = max(best, float(block.max()))
    return best


def check_metric_axioms(space, *, seed=0, samples=2000):
    """Symmetry, identity, triangle inequality; exhaustive for n <= 200.

    Returns None on success, raises VerificationError-style ValueError with
    the witness triple otherwise.  Meant for tests and the loader.
    """
    n = space.n
    if n <= 200:
        m = space.dist_many(range(n), range(n))
        if np.abs(np.diag(m)).max() > 0:
            raise ValueError("nonzero self-distance")
        if np.abs(m - m.T).max() > 1e-9 * (m.max() or 1.0):
            raise ValueError("asymmetry")
        off = m[~np.eye(n, dtype=bool)]
        if off.size and off.min() <= 0:
            raise ValueError("zero or negative distance between distinct points")
        tol = 1e-9 * (m.max() or 1.0)
        viol = m[:, :, None] + m[None, :, :] - m[:, None, :] < -tol
        if viol.any():
            i, k, j = map(int, np.unravel_index(np.argmax(viol), viol.shape))
            raise ValueError(f"triangle violation at ({i},{k},{j})")
        return
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        i, j, k = (int(x) for x in rng.integers(0, n, size=3))
        dij, dik, dkj = space.dist(i, j), space.dist(i, k), space.dist(k, j)
        if abs(dij - space.dist(j, i)) > 1e-9 * max(dij, 1.0):
            raise ValueError(f"asymmetry at ({i},{j})")
        if dij > dik + dkj + 1e-9 * max(dij, 1.0):
            raise ValueError(f"triangle violation at ({i},{k},{j})")
