"""Iso-surface extraction: marching cubes and three tetrahedral decompositions.

All four methods share one vectorised polygoniser.  A method turns the
active part of the grid into *elements* (cubes for MC, tetrahedra for the
others) whose vertices are global point ids:

* ids ``0 .. N-1`` are grid samples in x-fastest order,
* ids ``N .. N+C-1`` are cell centres (CCL only), also x-fastest.

Each triangle vertex lies on an element edge and is named by its
:data:`EdgeKey`, the unordered pair ``(lo, hi)`` of the edge's point ids.
Vertices are deduplicated by key, and the crossing is always interpolated
from ``lo`` toward ``hi``, so a crossing shared by many elements is computed
once and bit-identically.

The tetrahedral methods also accumulate the volume of the region below the
threshold (the inside of a signed-distance field) while extracting.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from . import tables
from .mesh import IndexedMesh
from .volume import ScalarGrid

__all__ = [
    "Decomposition",
    "EdgeClass",
    "ExtractionMethod",
    "cell_index",
    "classify_edge_keys",
    "decompose",
    "extract",
    "grid_gradient",
    "interpolate_crossing",
    "tetra_index",
    "vertex_normal",
]


class ExtractionMethod(str, enum.Enum):
    MC = "mc"
    MT5 = "mt5"
    MT6 = "mt6"
    CCL = "ccl"

    @classmethod
    def parse(cls, name) -> "ExtractionMethod":
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise ValueError(f"unknown extraction method {name!r}; expected one of "
                             f"{[m.value for m in cls]}") from None

    @property
    def is_tetrahedral(self) -> bool:
        return self is not ExtractionMethod.MC


def cell_index(values, threshold: float) -> int:
    """8-bit case index of a cube; ``values`` in A..H order, A is the MSB."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (8,):
        raise ValueError("need 8 corner values")
    return int(sum(1 << (7 - i) for i in range(8) if values[i] >= threshold))


def tetra_index(values, threshold: float) -> int:
    """4-bit case index of a tetrahedron; vertex 0 is the MSB."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (4,):
        raise ValueError("need 4 vertex values")
    return int(sum(1 << (3 - i) for i in range(4) if values[i] >= threshold))


def interpolate_crossing(v0: float, v1: float, threshold: float) -> float:
    """Parameter ``t`` in [0, 1] where the linear interpolant crosses ``threshold``.

    Both endpoints exactly at the threshold gives ``t = 0.5``.
    """
    d0 = v0 - threshold
    d1 = v1 - threshold
    if (d0 > 0 and d1 > 0) or (d0 < 0 and d1 < 0):
        raise ValueError(f"edge ({v0}, {v1}) does not cross threshold {threshold}")
    if v1 == v0:
        return 0.5
    return min(1.0, max(0.0, (threshold - v0) / (v1 - v0)))


def grid_gradient(grid: ScalarGrid) -> np.ndarray:
    """Gradient estimate at every sample, shape ``(nx, ny, nz, 3)``.

    Central differences inside, one-sided differences on boundary samples.
    """
    return np.stack(np.gradient(grid.data, edge_order=1), axis=-1)


def vertex_normal(grid: ScalarGrid, i: int, j: int, k: int) -> np.ndarray:
    """Unnormalised gradient estimate at one sample.

    Points toward increasing field values, i.e. outward for a signed
    distance field.  A zero vector marks a degenerate normal.
    """
    d = grid.data
    idx = [i, j, k]
    for axis, n in enumerate(d.shape):
        if not 0 <= idx[axis] < n:
            raise IndexError(f"sample index {tuple(idx)} outside grid {d.shape}")
    out = np.empty(3)
    for axis, n in enumerate(d.shape):
        lo = list(idx)
        hi = list(idx)
        if idx[axis] == 0:
            hi[axis] += 1
            span = 1.0
        elif idx[axis] == n - 1:
            lo[axis] -= 1
            span = 1.0
        else:
            lo[axis] -= 1
            hi[axis] += 1
            span = 2.0
        out[axis] = (d[tuple(hi)] - d[tuple(lo)]) / span
    return out


class Decomposition:
    """Tetrahedra of one cell as local vertex references.

    ``points`` holds the local coordinates of every reference (cube corners
    first) and ``tetrahedra`` indexes into it, shape ``(n, 4)``.
    """

    def __init__(self, method: ExtractionMethod, tetrahedra: np.ndarray, points: np.ndarray):
        self.method = method
        self.tetrahedra = tetrahedra
        self.points = points

    def __len__(self):
        return len(self.tetrahedra)

    def volumes(self) -> np.ndarray:
        p = self.points[self.tetrahedra]
        return tables.signed_volume(p[:, 0], p[:, 1], p[:, 2], p[:, 3])


def decompose(method: ExtractionMethod, parity: int = 0) -> Decomposition:
    """Tetrahedral split of a unit cell for the tetrahedral methods.

    ``parity`` is ``(i + j + k) % 2`` of the cell origin and only matters for
    MT5.  The CCL result lists all 24 tetrahedra touching the cell; points
    9-14 are the neighbour centres across the -x, +x, -y, +y, -z, +z faces.
    """
    method = ExtractionMethod.parse(method)
    corners = tables.CORNERS.astype(np.float64)
    if method is ExtractionMethod.MT5:
        return Decomposition(method, tables.MT5_TETS[parity % 2], corners)
    if method is ExtractionMethod.MT6:
        return Decomposition(method, tables.MT6_TETS, corners)
    if method is ExtractionMethod.CCL:
        return Decomposition(method, tables.CCL_TETS, tables.CCL_POINTS)
    raise ValueError("marching cubes does not decompose cells into tetrahedra")


class EdgeClass(enum.IntEnum):
    GRID_EDGE = 1
    FACE_DIAGONAL = 2
    INTERIOR_DIAGONAL = 3
    CORNER_CENTER = 4
    CENTER_CENTER = 5


PERMITTED_EDGE_CLASSES = {
    ExtractionMethod.MC: {EdgeClass.GRID_EDGE},
    ExtractionMethod.MT5: {EdgeClass.GRID_EDGE, EdgeClass.FACE_DIAGONAL},
    ExtractionMethod.MT6: {EdgeClass.GRID_EDGE, EdgeClass.FACE_DIAGONAL, EdgeClass.INTERIOR_DIAGONAL},
    ExtractionMethod.CCL: {EdgeClass.GRID_EDGE, EdgeClass.CORNER_CENTER, EdgeClass.CENTER_CENTER},
}


def classify_edge_keys(keys: np.ndarray, shape: tuple[int, int, int]) -> np.ndarray:
    """Kind of lattice edge each ``(lo, hi)`` key names, as :class:`EdgeClass` values."""
    keys = np.asarray(keys, dtype=np.int64).reshape(-1, 2)
    n = int(np.prod(shape))
    lo, hi = keys[:, 0], keys[:, 1]
    out = np.zeros(len(keys), dtype=np.int64)
    both_grid = hi < n
    span = np.abs(_sample_coords(lo, shape) - _sample_coords(np.minimum(hi, n - 1), shape))
    out[both_grid] = np.count_nonzero(span[both_grid], axis=1)
    out[(lo < n) & (hi >= n)] = EdgeClass.CORNER_CENTER
    out[lo >= n] = EdgeClass.CENTER_CENTER
    return out


def _sample_coords(ids, shape):
    nx, ny, _ = shape
    ids = np.asarray(ids, dtype=np.int64)
    return np.stack([ids % nx, (ids // nx) % ny, ids // (nx * ny)], axis=-1)


def _center_coords(ids, cells):
    cx, cy, _ = cells
    return np.stack([ids % cx, (ids // cx) % cy, ids // (cx * cy)], axis=-1) + 0.5


class _PointSet:
    """Values, gradients and positions addressed by global point id."""

    def __init__(self, grid: ScalarGrid, with_centers: bool):
        self.shape = grid.dims.shape
        self.cells = grid.dims.cells
        self.n_samples = grid.dims.size
        grad = grid_gradient(grid)
        values = [grid.samples]
        grads = [grad.reshape(-1, 3, order="F")]
        if with_centers:
            cv, cg = _cell_means(grid.data, grad)
            values.append(cv.ravel(order="F"))
            grads.append(cg.reshape(-1, 3, order="F"))
        self.values = np.concatenate(values)
        self.grads = np.concatenate(grads)
        self.size = len(self.values)

    def positions(self, ids: np.ndarray) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.int64)
        out = np.empty(ids.shape + (3,))
        grid_ids = ids < self.n_samples
        out[grid_ids] = _sample_coords(ids[grid_ids], self.shape)
        out[~grid_ids] = _center_coords(ids[~grid_ids] - self.n_samples, self.cells)
        return out


def _corner_views(a):
    """The eight corner arrays of every cell, A..H order."""
    views = []
    for dx, dy, dz in tables.CORNERS:
        views.append(a[dx:a.shape[0] - 1 + dx, dy:a.shape[1] - 1 + dy, dz:a.shape[2] - 1 + dz])
    return views


def _cell_means(data, grad):
    vs = _corner_views(data)
    gs = _corner_views(grad)
    v = vs[0].copy()
    g = gs[0].copy()
    for i in range(1, 8):
        v += vs[i]
        g += gs[i]
    return v / 8.0, g / 8.0


def _cell_cases(data, threshold):
    above = data >= threshold
    idx = np.zeros(tuple(n - 1 for n in data.shape), dtype=np.int64)
    for bit, view in enumerate(_corner_views(above)):
        idx |= view.astype(np.int64) << (7 - bit)
    return idx



class _Soup:
    """Triangles emitted by a set of elements before vertex welding."""

    def __init__(self, elements, cases, pairs, ntri, tags):
        counts = ntri[cases]
        self.elem = np.repeat(np.arange(len(elements)), counts)
        starts = np.cumsum(counts) - counts
        slot = np.arange(len(self.elem)) - np.repeat(starts, counts)
        local = pairs[cases[self.elem], slot]                          # (T, 3, 2)
        gids = elements[self.elem[:, None, None], local]               # (T, 3, 2)
        self.lo = gids.min(axis=-1)
        self.hi = gids.max(axis=-1)
        self.tags = tags[self.elem]


def _crossings(points: _PointSet, lo, hi, threshold):
    """Interpolated position and normal on edges ``lo -> hi``."""
    v0 = points.values[lo]
    v1 = points.values[hi]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(v1 == v0, 0.5, (threshold - v0) / (v1 - v0))
    t = np.clip(t, 0.0, 1.0)[..., None]
    p0 = points.positions(lo)
    p1 = points.positions(hi)
    pos = p0 + t * (p1 - p0)
    g0 = points.grads[lo]
    nrm = g0 + t * (points.grads[hi] - g0)
    return pos, nrm


def _weld(points: _PointSet, soup: _Soup, threshold, method, extra=None) -> IndexedMesh:
    keys = soup.lo * points.size + soup.hi
    uniq, inverse = np.unique(keys.ravel(), return_inverse=True)
    lo = uniq // points.size
    hi = uniq % points.size
    pos, nrm = _crossings(points, lo, hi, threshold)
    length = np.linalg.norm(nrm, axis=1, keepdims=True)
    nrm = np.divide(nrm, length, out=np.zeros_like(nrm), where=length > 0)
    return IndexedMesh(
        vertices=pos,
        normals=nrm,
        triangles=inverse.reshape(-1, 3),
        edge_keys=np.stack([lo, hi], axis=1),
        provenance=soup.tags,
        method=method.value,
        threshold=float(threshold),
        **(extra or {}),
    )


def _cone(ref, a, b, c):
    """Signed volume of the cone from ``ref`` over triangle ``abc`` (positive when abc faces away)."""
    return np.einsum("...i,...i->...", a - ref, np.cross(b - a, c - a)) / 6.0


def _tet_inside_volumes(points: _PointSet, elements, cases, soup: _Soup, threshold):
    """Volume of the below-threshold part of every tetrahedron.

    Whole tetrahedra count fully or not at all.  A cut tetrahedron's inside
    part is measured as the cone from one of its own vertices over the faces
    that do not contain that vertex: the emitted triangle(s) plus, when two
    vertices are inside, the cut-off part of the opposite tetrahedron face.
    With three vertices inside the reference is the single outside vertex and
    the small tetrahedron it cuts off is subtracted from the whole.
    """
    pos = points.positions(elements)
    full = tables.signed_volume(pos[:, 0], pos[:, 1], pos[:, 2], pos[:, 3])
    above = (cases[:, None] >> np.arange(3, -1, -1)) & 1
    n_below = 4 - above.sum(axis=1)
    vol = np.where(n_below == 4, full, 0.0)

    # reference vertex: first inside vertex, or the lone outside one when three are inside
    ref_local = np.where(n_below == 3, np.argmax(above, axis=1), np.argmin(above, axis=1))
    ref = pos[np.arange(len(elements)), ref_local]

    if len(soup.elem):
        tri_pos, _ = _crossings(points, soup.lo, soup.hi, threshold)
        cones = _cone(ref[soup.elem], tri_pos[:, 0], tri_pos[:, 1], tri_pos[:, 2])
        vol += np.bincount(soup.elem, weights=cones, minlength=len(elements))
    vol = np.where(n_below == 3, full + vol, vol)

    two = np.flatnonzero(n_below == 2)
    if len(two):
        ab = above[two]
        order = np.argsort(ab, axis=1, kind="stable")               # below first, then above
        ids = np.take_along_axis(elements[two], order, axis=1)
        c, d, a, b = ids.T
        pd = pos[two[:, None], order][:, 1]
        p_ad, _ = _crossings(points, np.minimum(a, d), np.maximum(a, d), threshold)
        p_bd, _ = _crossings(points, np.minimum(b, d), np.maximum(b, d), threshold)
        pc = ref[two]
        vol[two] += np.abs(tables.signed_volume(pc, pd, p_ad, p_bd))
    return vol


def _flat_cells(cases):
    return cases.ravel(order="F")


def _cell_origins(cell_ids, shape):
    nx, ny, _ = shape
    cx, cy = nx - 1, ny - 1
    i = cell_ids % cx
    j = (cell_ids // cx) % cy
    k = cell_ids // (cx * cy)
    return i + nx * (j + ny * k), (i + j + k) % 2


def _corner_offsets(shape):
    nx, ny, _ = shape
    return tables.CORNERS @ np.array([1, nx, nx * ny], dtype=np.int64)


def extract(grid: ScalarGrid, threshold: float, method) -> IndexedMesh:
    """Extract the ``threshold`` iso-surface of ``grid`` with ``method``.

    Returns an :class:`IndexedMesh` whose triangles face toward larger field
    values.  Tetrahedral methods set ``tetra_volume`` to the volume of the
    below-threshold region they cover; it is ``None`` for MC.
    """
    method = ExtractionMethod.parse(method)
    threshold = float(threshold)
    if not math.isfinite(threshold):
        raise ValueError("threshold must be finite")
    shape = grid.dims.shape
    cases = _flat_cells(_cell_cases(grid.data, threshold))
    active = np.flatnonzero((cases != 0) & (cases != 255))
    n_inside_cells = int(np.count_nonzero(cases == 0))

    if method is ExtractionMethod.CCL:
        return _extract_ccl(grid, threshold, cases)

    points = _PointSet(grid, with_centers=False)
    origins, parity = _cell_origins(active, shape)
    offsets = _corner_offsets(shape)

    if method is ExtractionMethod.MC:
        elements = origins[:, None] + offsets[None, :]
        soup = _Soup(elements, cases[active], tables.MC_PAIRS, tables.MC_NTRI, active)
        return _weld(points, soup, threshold, method)

    if method is ExtractionMethod.MT5:
        local = tables.MT5_TETS[parity]                               # (E, 5, 4)
    else:
        local = np.broadcast_to(tables.MT6_TETS, (len(active),) + tables.MT6_TETS.shape)
    per_cell = local.shape[1]
    elements = (origins[:, None, None] + offsets[local]).reshape(-1, 4)
    tags = np.repeat(active, per_cell)
    return _finish_tetra(grid, points, elements, tags, threshold, method, base_volume=float(n_inside_cells))


def _finish_tetra(grid, points, elements, tags, threshold, method, base_volume):
    above = points.values[elements] >= threshold
    tcases = (above.astype(np.int64) << np.arange(3, -1, -1)).sum(axis=1)
    soup = _Soup(elements, tcases, tables.TET_PAIRS, tables.TET_NTRI, tags)
    vols = _tet_inside_volumes(points, elements, tcases, soup, threshold)
    volume = math.fsum([base_volume, math.fsum(vols)])
    return _weld(points, soup, threshold, method, extra={"tetra_volume": volume})


def _extract_ccl(grid: ScalarGrid, threshold: float, cases: np.ndarray) -> IndexedMesh:
    shape = grid.dims.shape
    cells = grid.dims.cells
    points = _PointSet(grid, with_centers=True)
    offsets = _corner_offsets(shape)
    cx, cy, _ = cells
    cell_step = np.array([1, cx, cx * cy], dtype=np.int64)
    case_grid = cases.reshape(cells, order="F")
    active = (case_grid != 0) & (case_grid != 255)
    inside = case_grid == 0

    chunks, tag_chunks = [], []
    inside_faces = 0
    for axis in range(3):
        lo_sl = [slice(None)] * 3
        hi_sl = [slice(None)] * 3
        lo_sl[axis] = slice(0, cells[axis] - 1)
        hi_sl[axis] = slice(1, cells[axis])
        lo_sl, hi_sl = tuple(lo_sl), tuple(hi_sl)
        busy = active[lo_sl] | active[hi_sl]
        inside_faces += int(np.count_nonzero(inside[lo_sl] & inside[hi_sl]))
        # cell ids (in the full cell lattice) of the lower cell of each busy face
        sub = np.zeros(cells, dtype=bool)
        sub[lo_sl] = busy
        face_cells = np.flatnonzero(sub.ravel(order="F"))
        origins, _ = _cell_origins(face_cells, shape)
        refs = tables.CCL_FACE_TETS[axis]                            # (4, 4) refs 0..9
        lut = np.empty((len(face_cells), 10), dtype=np.int64)
        lut[:, :8] = origins[:, None] + offsets[None, :]
        lut[:, 8] = points.n_samples + face_cells
        lut[:, 9] = points.n_samples + face_cells + cell_step[axis]
        chunks.append(lut[:, refs].reshape(-1, 4))
        tag_chunks.append(np.repeat(face_cells, 4))
    elements = np.concatenate(chunks)
    tags = np.concatenate(tag_chunks)
    # each fully inside interior face owns four tetrahedra of volume 1/12
    return _finish_tetra(grid, points, elements, tags, threshold, ExtractionMethod.CCL,
                         base_volume=inside_faces / 3.0)
