"""Comparison measures: position error, sampled Hausdorff and RMS distances.

Mesh-to-mesh distances follow the Metro approach: one surface is discretised
into sample points (every vertex plus area-proportional interior samples) and
each sample's exact distance to the other triangle mesh is computed.

The triangle sample sequences are nested: raising the density only appends
points, so a sampled Hausdorff distance can only grow with density.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .mesh import IndexedMesh, triangle_areas
from .volume import FieldSpec, analytic_area, analytic_volume, object_distance

__all__ = [
    "DistanceResult",
    "MetricsReport",
    "SamplingSpec",
    "TriangleIndex",
    "UndefinedMetricError",
    "brute_force_nearest",
    "closest_points_on_triangles",
    "hausdorff",
    "p_err",
    "relative_errors",
    "rms_distance",
    "surface_sample",
]

REPORT_SCHEMA_VERSION = 1


class UndefinedMetricError(ValueError):
    """The requested measure has no value for this input (e.g. an empty mesh)."""


def _dot(u, v):
    # written out so every (point, triangle) pair sees identical arithmetic
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] + u[..., 2] * v[..., 2]


def _closest_on_segments(p, a, b):
    ab = b - a
    denom = _dot(ab, ab)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(denom > 0, _dot(p - a, ab) / denom, 0.0)
    t = np.clip(t, 0.0, 1.0)
    return a + t[..., None] * ab


def closest_points_on_triangles(p, a, b, c):
    """Closest point on triangle ``abc`` to ``p``, elementwise over leading axes.

    Voronoi-region walk over the three vertices, three edges and the face.
    Zero-area triangles fall back to their closest edge.
    """
    p, a, b, c = (np.asarray(x, dtype=np.float64) for x in (p, a, b, c))
    ab = b - a
    ac = c - a
    ap = p - a
    d1 = _dot(ab, ap)
    d2 = _dot(ac, ap)
    bp = p - b
    d3 = _dot(ab, bp)
    d4 = _dot(ac, bp)
    cp = p - c
    d5 = _dot(ab, cp)
    d6 = _dot(ac, cp)
    vc = d1 * d4 - d3 * d2
    vb = d5 * d2 - d1 * d6
    va = d3 * d6 - d5 * d4

    with np.errstate(divide="ignore", invalid="ignore"):
        denom = va + vb + vc
        v_face = vb / denom
        w_face = vc / denom
        out = a + v_face[..., None] * ab + w_face[..., None] * ac
        e_bc = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        out = np.where(((va <= 0) & (d4 - d3 >= 0) & (d5 - d6 >= 0))[..., None],
                       b + e_bc[..., None] * (c - b), out)
        e_ac = d2 / (d2 - d6)
        out = np.where(((vb <= 0) & (d2 >= 0) & (d6 <= 0))[..., None], a + e_ac[..., None] * ac, out)
        out = np.where(((d6 >= 0) & (d5 <= d6))[..., None], c, out)
        e_ab = d1 / (d1 - d3)
        out = np.where(((vc <= 0) & (d1 >= 0) & (d3 <= 0))[..., None], a + e_ab[..., None] * ab, out)
        out = np.where(((d3 >= 0) & (d4 <= d3))[..., None], b, out)
        out = np.where(((d1 <= 0) & (d2 <= 0))[..., None], a, out)

    bad = ~np.all(np.isfinite(out), axis=-1) | (_dot(np.cross(ab, ac), np.cross(ab, ac)) == 0)
    if np.any(bad):
        pb, ab_, bb, cb = p[bad], a[bad], b[bad], c[bad]
        cands = np.stack([_closest_on_segments(pb, ab_, bb), _closest_on_segments(pb, bb, cb),
                          _closest_on_segments(pb, cb, ab_)])
        dist = _dot(cands - pb, cands - pb)
        out[bad] = np.take_along_axis(cands, np.argmin(dist, axis=0)[None, :, None], axis=0)[0]
    return out


def _pair_distances(points, corners):
    q = closest_points_on_triangles(points, corners[:, 0], corners[:, 1], corners[:, 2])
    d = q - points
    return np.sqrt(_dot(d, d)), q


def brute_force_nearest(points, mesh: IndexedMesh, chunk: int = 1 << 20):
    """Distance and nearest-triangle index by scanning every triangle."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if mesh.is_empty():
        raise UndefinedMetricError("distance to an empty mesh is undefined")
    tri = mesh.corners()
    nf = len(tri)
    dist = np.full(len(points), np.inf)
    best = np.zeros(len(points), dtype=np.int64)
    step = max(1, chunk // nf)
    for s in range(0, len(points), step):
        p = points[s:s + step]
        pp = np.repeat(p, nf, axis=0)
        tt = np.tile(tri, (len(p), 1, 1))
        d, _ = _pair_distances(pp, tt)
        d = d.reshape(len(p), nf)
        best[s:s + step] = np.argmin(d, axis=1)
        dist[s:s + step] = d[np.arange(len(p)), best[s:s + step]]
    return dist, best


class TriangleIndex:
    """Exact nearest-triangle queries against one mesh.

    A k-d tree over triangle centroids supplies candidates.  The exact
    distance to the nearest few gives an upper bound ``u``; a triangle can
    only be closer than ``u`` if its centroid lies within ``u + r_t`` of the
    query, ``r_t`` being its centroid-to-corner radius.  The neighbour count
    doubles until the farthest fetched centroid is beyond ``u + max r_t``,
    so the result equals a full scan.
    """

    def __init__(self, mesh: IndexedMesh, k: int = 8):
        if mesh.is_empty():
            raise UndefinedMetricError("cannot index an empty mesh")
        self.corners = mesh.corners()
        self.centroids = self.corners.mean(axis=1)
        spread = self.corners - self.centroids[:, None, :]
        self.radius = np.sqrt(_dot(spread, spread)).max(axis=1)
        self.max_radius = float(self.radius.max())
        self.tree = cKDTree(self.centroids)
        self.k = min(k, len(self.centroids))

    def query(self, points, chunk: int = 65536):
        """Return ``(distance, triangle index, closest point)`` per query point."""
        points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        n = len(points)
        dist = np.empty(n)
        tri = np.empty(n, dtype=np.int64)
        closest = np.empty((n, 3))
        for s in range(0, n, chunk):
            sl = slice(s, s + chunk)
            dist[sl], tri[sl], closest[sl] = self._query(points[sl])
        return dist, tri, closest

    def _query(self, p):
        n_tri = len(self.centroids)
        _, near = self.tree.query(p, k=self.k, workers=-1)
        near = near.reshape(len(p), -1)
        d, _ = _pair_distances(np.repeat(p, near.shape[1], axis=0), self.corners[near.ravel()])
        bound = d.reshape(near.shape).min(axis=1)
        fuzz = 1e-9 * (1.0 + bound)

        rows, cols = [], []
        pending = np.arange(len(p))
        k = min(4 * self.k, n_tri)
        while len(pending):
            dc, nb = self.tree.query(p[pending], k=k, workers=-1)
            dc = dc.reshape(len(pending), -1)
            nb = nb.reshape(len(pending), -1)
            done = (dc[:, -1] > bound[pending] + self.max_radius + fuzz[pending]) | (k >= n_tri)
            sel = np.flatnonzero(done)
            keep = dc[sel] <= (bound + fuzz)[pending[sel], None] + self.radius[nb[sel]]
            r, c = np.nonzero(keep)
            rows.append(pending[sel][r])
            cols.append(nb[sel][r, c])
            pending = pending[~done]
            k = min(2 * k, n_tri)
        owner = np.concatenate(rows)
        cand = np.concatenate(cols)
        dist, q = _pair_distances(p[owner], self.corners[cand])
        # nearest distance per point, ties broken by the smaller triangle id
        order = np.lexsort((cand, dist, owner))
        first = order[np.r_[0, np.flatnonzero(np.diff(owner[order])) + 1]]
        return dist[first], cand[first], q[first]


@dataclass(frozen=True)
class SamplingSpec:
    """Surface discretisation: ``density`` interior samples per unit area."""

    density: float = 4.0
    include_vertices: bool = True
    include_edges: bool = False
    seed: int = 0

    def __post_init__(self):
        if not self.density > 0:
            raise ValueError("sampling density must be > 0")


_R2 = 1.32471795724474602596  # plastic number, generator of the R2 sequence
_ALPHA = np.array([1 / _R2, 1 / _R2 ** 2])


def _van_der_corput(k):
    k = np.asarray(k, dtype=np.int64).copy()
    out = np.zeros(k.shape)
    base = 0.5
    while np.any(k):
        out += (k & 1) * base
        k >>= 1
        base /= 2
    return out


def _group_ranks(counts):
    starts = np.cumsum(counts) - counts
    return np.arange(counts.sum()) - np.repeat(starts, counts)


def surface_sample(mesh: IndexedMesh, sampling: SamplingSpec = SamplingSpec()) -> np.ndarray:
    """Sample points on ``mesh``.

    Every referenced vertex is included (when requested), followed by
    ``floor(area * density + u)`` points per triangle from a randomly shifted
    R2 low-discrepancy sequence, where ``u`` and the shift are fixed per
    triangle by ``seed``.  Optional edge samples use a van der Corput sequence
    along each unique edge.
    """
    parts = []
    if sampling.include_vertices and not mesh.is_empty():
        parts.append(mesh.vertices[np.unique(mesh.triangles)])
    if not mesh.is_empty():
        rng = np.random.default_rng(sampling.seed)
        nf = mesh.n_triangles
        jitter = rng.random(nf)
        shift = rng.random((nf, 2))
        counts = np.floor(triangle_areas(mesh) * sampling.density + jitter).astype(np.int64)
        owner = np.repeat(np.arange(nf), counts)
        k = _group_ranks(counts) + 1
        uv = np.mod(shift[owner] + k[:, None] * _ALPHA, 1.0)
        flip = uv.sum(axis=1) > 1
        uv[flip] = 1 - uv[flip]
        t = mesh.corners()[owner]
        parts.append(t[:, 0] + uv[:, :1] * (t[:, 1] - t[:, 0]) + uv[:, 1:] * (t[:, 2] - t[:, 0]))
        if sampling.include_edges:
            e = np.sort(np.concatenate([mesh.triangles[:, [0, 1]], mesh.triangles[:, [1, 2]],
                                        mesh.triangles[:, [2, 0]]]), axis=1)
            e = np.unique(e, axis=0)
            p0, p1 = mesh.vertices[e[:, 0]], mesh.vertices[e[:, 1]]
            length = np.linalg.norm(p1 - p0, axis=1)
            ecounts = np.floor(length * math.sqrt(sampling.density) + rng.random(len(e))).astype(np.int64)
            eown = np.repeat(np.arange(len(e)), ecounts)
            s = _van_der_corput(_group_ranks(ecounts) + 1)[:, None]
            parts.append(p0[eown] + s * (p1[eown] - p0[eown]))
    if not parts:
        return np.empty((0, 3))
    return np.concatenate(parts)


@dataclass(frozen=True)
class DistanceResult:
    forward: float
    backward: float
    symmetric: float
    rms_forward: float
    sample_count: int
    max_location: tuple[float, float, float]


def _directed(points, target: IndexedMesh, index: TriangleIndex | None = None):
    if len(points) == 0:
        raise UndefinedMetricError("no sample points on the source mesh")
    index = index or TriangleIndex(target)
    dist, _, _ = index.query(points)
    return dist


def _same_geometry(a: IndexedMesh, b: IndexedMesh) -> bool:
    return (a is b) or (np.array_equal(a.triangles, b.triangles) and np.array_equal(a.vertices, b.vertices))


def _rms(dist, paper_formula: bool) -> float:
    sq = math.fsum((dist * dist).tolist())
    if paper_formula:
        return math.sqrt(sq) / len(dist)
    return math.sqrt(sq / len(dist))


def hausdorff(mesh_a: IndexedMesh, mesh_b: IndexedMesh, sampling: SamplingSpec = SamplingSpec(),
              paper_rms: bool = False) -> DistanceResult:
    """Sampled one-sided and symmetric Hausdorff distances between two meshes.

    ``forward`` is ``max d(p, B)`` over samples ``p`` of A and ``backward``
    the same from B to A.  ``rms_forward`` is the RMS of the forward sample
    distances (see :func:`rms_distance`).
    """
    if mesh_a.is_empty() or mesh_b.is_empty():
        raise UndefinedMetricError("Hausdorff distance needs two non-empty meshes")
    pa = surface_sample(mesh_a, sampling)
    if len(pa) == 0:
        raise UndefinedMetricError("no sample points on the source mesh")
    if _same_geometry(mesh_a, mesh_b):
        # every sample lies on the target; avoid rounding residue in the projection
        fwd = bwd = np.zeros(len(pa))
    else:
        fwd = _directed(pa, mesh_b)
        bwd = _directed(surface_sample(mesh_b, sampling), mesh_a)
    i = int(np.argmax(fwd))
    return DistanceResult(
        forward=float(fwd[i]),
        backward=float(bwd.max()),
        symmetric=float(max(fwd[i], bwd.max())),
        rms_forward=_rms(fwd, paper_rms),
        sample_count=len(pa),
        max_location=tuple(float(x) for x in pa[i]),
    )


def rms_distance(mesh_a: IndexedMesh, mesh_b: IndexedMesh, sampling: SamplingSpec = SamplingSpec(),
                 paper_formula: bool = False) -> float:
    """Root mean square of distances from samples of ``mesh_a`` to ``mesh_b``.

    ``paper_formula=True`` returns ``sqrt(sum x_i^2) / n`` instead of
    ``sqrt(sum x_i^2 / n)``.
    """
    if mesh_a.is_empty() or mesh_b.is_empty():
        raise UndefinedMetricError("RMS distance needs two non-empty meshes")
    if _same_geometry(mesh_a, mesh_b):
        return 0.0
    return _rms(_directed(surface_sample(mesh_a, sampling), mesh_b), paper_formula)


def p_err(mesh: IndexedMesh, spec: FieldSpec) -> float:
    """Mean absolute distance from triangle centroids to the analytic surface."""
    if mesh.is_empty():
        raise UndefinedMetricError("position error of an empty mesh is undefined")
    d = np.abs(object_distance(spec, mesh.centroids()))
    return math.fsum(d.tolist()) / mesh.n_triangles


def relative_errors(measured_area: float | None, measured_volume: float | None, spec: FieldSpec):
    """Signed ``(measured - analytic) / analytic`` for area and volume; None where undefined."""
    area = analytic_area(spec)
    vol = analytic_volume(spec)
    area_rel = None if area is None or measured_area is None else (measured_area - area) / area
    vol_rel = None if vol is None or measured_volume is None else (measured_volume - vol) / vol
    return area_rel, vol_rel


@dataclass
class MetricsReport:
    """One row of a comparison run; None marks a value that does not apply."""

    object: str
    method: str
    threshold: float
    triangle_count: int
    vertex_count: int
    area: float
    area_analytic: float | None = None
    area_rel_error: float | None = None
    volume: float | None = None
    volume_analytic: float | None = None
    volume_rel_error: float | None = None
    p_err: float | None = None
    hausdorff_forward: float | None = None
    hausdorff_backward: float | None = None
    hausdorff_symmetric: float | None = None
    rms: float | None = None
    sample_count: int | None = None
    watertight: bool | None = None
    euler_characteristic: int | None = None


REPORT_COLUMNS = ["schema_version", "config_hash"] + [f.name for f in fields(MetricsReport)]
NA = "N/A"


def config_hash(config) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _cell(v):
    if v is None:
        return NA
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def reports_to_csv(rows, cfg_hash: str, columns=None) -> str:
    """Serialise report records (dataclasses or dicts) to CSV text with a fixed column order."""
    dicts = [asdict(r) if not isinstance(r, dict) else r for r in rows]
    if columns is None:
        columns = REPORT_COLUMNS
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for d in dicts:
        d = {"schema_version": REPORT_SCHEMA_VERSION, "config_hash": cfg_hash, **d}
        w.writerow([_cell(d.get(c)) for c in columns])
    return buf.getvalue()


def reports_to_json(rows, cfg_hash: str, config=None) -> str:
    dicts = [asdict(r) if not isinstance(r, dict) else r for r in rows]
    doc = {"schema_version": REPORT_SCHEMA_VERSION, "config_hash": cfg_hash, "config": config, "rows": dicts}
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def write_reports(rows, stem, cfg_hash: str, config=None, columns=None) -> tuple[Path, Path]:
    stem = Path(stem)
    csv_path = stem.with_suffix(".csv")
    json_path = stem.with_suffix(".json")
    csv_path.write_text(reports_to_csv(rows, cfg_hash, columns))
    json_path.write_text(reports_to_json(rows, cfg_hash, config))
    return csv_path, json_path
