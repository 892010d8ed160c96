"""Test-space generators and space/arc file ingestion.

Generator specs are addressable by CLI strings:

    grid2d:32x32       unit grid, 4-connected steps
    koch:3:8           fractal polyline, level 3, 8 samples per edge
    sierpinski:4       gasket graph, unit edge weights, level 4
    comb:5:40:3        teeth drawn as thin hairpin loops over a spine
    snowline:100:0.5   integer line under the snowflake metric |x-y|^alpha

Every generator is a pure function of its spec; arcs come back as a named
dict with a designated default.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .arcs import DiscreteArc, validate_arc
from .errors import FormatError
from .space import MetricSpace

MAX_POINTS = 20000


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    params: tuple
    seed: int = 0


@dataclass(frozen=True)
class CorpusInstance:
    space: MetricSpace
    arcs: dict[str, DiscreteArc]
    default_arc: str | None

    def arc(self, name=None):
        if not self.arcs:
            raise FormatError("this space has no default arcs")
        key = name or self.default_arc
        if key not in self.arcs:
            raise FormatError(
                f"unknown arc {key!r}; available: {sorted(self.arcs)}")
        return self.arcs[key]


def parse_genspec(text):
    parts = text.split(":")
    kind = parts[0]
    if kind == "grid2d":
        if len(parts) != 2 or "x" not in parts[1]:
            raise FormatError("grid2d spec looks like grid2d:WxH")
        w, h = parts[1].split("x")
        return GeneratorSpec("grid2d", (int(w), int(h)))
    if kind == "koch":
        if len(parts) != 3:
            raise FormatError("koch spec looks like koch:LEVEL:SAMPLES")
        return GeneratorSpec("koch", (int(parts[1]), int(parts[2])))
    if kind == "sierpinski":
        if len(parts) != 2:
            raise FormatError("sierpinski spec looks like sierpinski:LEVEL")
        return GeneratorSpec("sierpinski", (int(parts[1]),))
    if kind == "comb":
        if len(parts) != 4:
            raise FormatError("comb spec looks like comb:TEETH:LEN:SPACING")
        return GeneratorSpec("comb", (int(parts[1]), float(parts[2]),
                                      float(parts[3])))
    if kind == "snowline":
        if len(parts) != 3:
            raise FormatError("snowline spec looks like snowline:N:ALPHA")
        return GeneratorSpec("snowline", (int(parts[1]), float(parts[2])))
    raise FormatError(f"unknown generator kind {kind!r}")


def generate(spec):
    """Build the space and its default arcs for a generator spec."""
    builder = {
        "grid2d": _gen_grid,
        "koch": _gen_koch,
        "sierpinski": _gen_sierpinski,
        "comb": _gen_comb,
        "snowline": _gen_snowline,
    }.get(spec.kind)
    if builder is None:
        raise FormatError(f"unknown generator kind {spec.kind!r}")
    instance = builder(*spec.params)
    if instance.space.n > MAX_POINTS:
        raise FormatError(
            f"generated space has {instance.space.n} points "
            f"(limit {MAX_POINTS})")
    for arc in instance.arcs.values():
        validate_arc(instance.space, arc)
    return instance


def generate_from_string(text):
    return generate(parse_genspec(text))


def _gen_grid(w, h):
    if w < 1 or h < 1:
        raise FormatError("grid needs positive dimensions")
    if w * h > MAX_POINTS:
        raise FormatError("grid too large")
    coords = [(float(i), float(j)) for j in range(h) for i in range(w)]
    # 1.25 keeps diagonals out of the step graph: 4-connected
    space = MetricSpace.euclidean(coords, step_radius=1.25 if w * h > 1 else None)
    arcs = {}
    if w >= 2:
        arcs["row"] = DiscreteArc(tuple(range(w)))
    if w >= 2 and h >= 2:
        serp = []
        for j in range(h):
            cols = range(w) if j % 2 == 0 else range(w - 1, -1, -1)
            serp.extend(j * w + i for i in cols)
        arcs["serpentine"] = DiscreteArc(tuple(serp))
        diag = [0]
        i = j = 0
        while (i, j) != (w - 1, h - 1):
            if i < w - 1:
                i += 1
                diag.append(j * w + i)
            if j < h - 1:
                j += 1
                diag.append(j * w + i)
        arcs["diagonal"] = DiscreteArc(tuple(diag))
    default = "diagonal" if "diagonal" in arcs else (
        "row" if "row" in arcs else None)
    return CorpusInstance(space=space, arcs=arcs, default_arc=default)


def _koch_segments(level):
    segs = [(complex(0.0, 0.0), complex(1.0, 0.0))]
    rot = complex(math.cos(math.pi / 3.0), math.sin(math.pi / 3.0))
    for _ in range(level):
        nxt = []
        for p, q in segs:
            third = (q - p) / 3.0
            s1 = p + third
            s2 = p + 2.0 * third
            tip = s1 + third * rot
            nxt += [(p, s1), (s1, tip), (tip, s2), (s2, q)]
        segs = nxt
    return segs


def _gen_koch(level, samples_per_edge):
    if level < 0 or samples_per_edge < 1:
        raise FormatError("koch needs level >= 0 and samples >= 1")
    segs = _koch_segments(level)
    if len(segs) * samples_per_edge + 1 > MAX_POINTS:
        raise FormatError("koch polyline too large")
    pts = []
    for p, q in segs:
        for k in range(samples_per_edge):
            z = p + (q - p) * (k / samples_per_edge)
            pts.append((z.real, z.imag))
    last = segs[-1][1]
    pts.append((last.real, last.imag))
    space = MetricSpace.euclidean(pts)
    arcs = {"traversal": DiscreteArc(tuple(range(len(pts))))}
    return CorpusInstance(space=space, arcs=arcs, default_arc="traversal")


def _gen_sierpinski(level):
    if level < 0:
        raise FormatError("sierpinski needs level >= 0")
    side = 2 ** level
    cells = [((0, 0), (side, 0), (0, side))]
    for _ in range(level):
        nxt = []
        for pa, pb, pc in cells:
            mab = ((pa[0] + pb[0]) // 2, (pa[1] + pb[1]) // 2)
            mac = ((pa[0] + pc[0]) // 2, (pa[1] + pc[1]) // 2)
            mbc = ((pb[0] + pc[0]) // 2, (pb[1] + pc[1]) // 2)
            nxt += [(pa, mab, mac), (mab, pb, mbc), (mac, mbc, pc)]
        cells = nxt
    verts = sorted({v for cell in cells for v in cell},
                   key=lambda v: (v[1], v[0]))
    if len(verts) > MAX_POINTS:
        raise FormatError("sierpinski graph too large")
    vid = {v: k for k, v in enumerate(verts)}
    edges = set()
    for pa, pb, pc in cells:
        for u, v in ((pa, pb), (pb, pc), (pa, pc)):
            edges.add((min(vid[u], vid[v]), max(vid[u], vid[v])))
    space = MetricSpace.from_graph([(i, j, 1.0) for i, j in sorted(edges)])
    bottom = [vid[(a, 0)] for a in range(side + 1)]
    arcs = {"bottom": DiscreteArc(tuple(bottom))}
    return CorpusInstance(space=space, arcs=arcs, default_arc="bottom")


def _gen_comb(teeth, tooth_len, spacing):
    """Spine along y = 0 with thin hairpin teeth at every spacing.

    The two sides of a tooth sit one sampling step apart, so they are
    step-adjacent and the turning constant stays near
    sqrt(spacing^2 + tooth_len^2) / spacing instead of blowing up with
    the sampling density.  The single default arc traverses everything:
    straightening it at a scale above the tooth width cuts the teeth off.
    """
    if teeth < 1 or tooth_len <= 0 or spacing <= 0:
        raise FormatError("comb needs positive parameters")
    # Density pins where the straightening radii land relative to the
    # step: diam/2-scale covering radii stay near 3 steps (roomy), the
    # diam/4 scale lands above sqrt(2) steps (diagonal candidates keep the
    # cover threadable), and diam/8 falls below one step (floor-filtered).
    # Odd divisor keeps the spine step count even, which helps parity.
    step = spacing / 115.0
    width = step
    v_steps = max(1, round(tooth_len / step))
    v_step = tooth_len / v_steps
    gap = spacing - width
    g_steps = max(1, round(gap / step))
    g_step = gap / g_steps

    pts: list[tuple[float, float]] = []

    def add(x, y):
        pts.append((x, y))

    for t in range(teeth):
        x0 = t * spacing
        if t == 0:
            add(x0, 0.0)
        for k in range(1, v_steps + 1):  # up the left side
            add(x0, k * v_step)
        for k in range(v_steps, -1, -1):  # across the tip, down the right side
            add(x0 + width, k * v_step)
        if t < teeth - 1:
            for k in range(1, g_steps + 1):  # spine to the next tooth
                add(x0 + width + k * g_step, 0.0)
    if len(pts) > MAX_POINTS:
        raise FormatError("comb too large")
    space = MetricSpace.euclidean(pts)
    arcs = {"hairpin": DiscreteArc(tuple(range(len(pts))))}
    return CorpusInstance(space=space, arcs=arcs, default_arc="hairpin")


def _gen_snowline(n, alpha):
    if n < 1:
        raise FormatError("snowline needs n >= 1")
    if n > MAX_POINTS:
        raise FormatError("snowline too large")
    coords = [(float(i),) for i in range(n)]
    space = MetricSpace.snowflake(coords, alpha=alpha) if alpha < 1.0 \
        else MetricSpace.euclidean(coords)
    arcs = {"line": DiscreteArc(tuple(range(n)))} if n >= 2 else {}
    return CorpusInstance(space=space, arcs=arcs,
                          default_arc="line" if arcs else None)


# -- file ingestion ----------------------------------------------------------


def save_space(space, path):
    doc = {"metric": space.metric}
    if space.metric in ("euclidean", "snowflake"):
        doc["points"] = [list(map(float, c)) for c in space.coords]
        if space.metric == "snowflake":
            doc["alpha"] = space.alpha
    elif space.metric == "matrix":
        doc["matrix"] = [list(map(float, row)) for row in space.matrix]
    else:
        doc["edges"] = [[i, j, w] for i, j, w in space.edges]
    if space.step_radius is not None:
        doc["step_radius"] = space.step_radius
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=1))


def load_space(path):
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return _load_csv(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON in {path}: {exc}") from exc
    metric = doc.get("metric")
    step_radius = doc.get("step_radius")
    if metric == "euclidean":
        return MetricSpace.euclidean(doc["points"], step_radius=step_radius)
    if metric == "snowflake":
        return MetricSpace.snowflake(doc["points"], alpha=doc.get("alpha"),
                                     step_radius=step_radius)
    if metric == "matrix":
        return MetricSpace.from_matrix(doc["matrix"], step_radius=step_radius)
    if metric == "graph":
        return MetricSpace.from_graph(doc["edges"])
    raise FormatError(f"unknown metric kind {metric!r} in {path}")


def _load_csv(path):
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                rows.append([float(cell) for cell in row])
            except ValueError as exc:
                raise FormatError(f"non-numeric CSV cell in {path}") from exc
    if not rows:
        raise FormatError(f"no points in {path}")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise FormatError(f"ragged CSV rows in {path}")
    return MetricSpace.euclidean(rows)


def save_arc(arc, path):
    Path(path).write_text(json.dumps({"indices": list(arc.indices)}))


def load_arc(path, space=None):
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON in {path}: {exc}") from exc
    indices = doc["indices"] if isinstance(doc, dict) else doc
    arc = DiscreteArc(tuple(int(i) for i in indices))
    if space is not None:
        validate_arc(space, arc)
    return arc
