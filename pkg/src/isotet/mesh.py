"""Indexed triangle meshes: area, enclosed volume, topology checks and OBJ/PLY I/O."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "IndexedMesh",
    "MeshStats",
    "OpenMeshError",
    "enclosed_volume_divergence",
    "enclosed_volume_tetra",
    "export_obj",
    "export_ply",
    "import_obj",
    "import_ply",
    "mesh_area",
    "triangle_areas",
    "validate_topology",
]


class OpenMeshError(ValueError):
    def __init__(self, boundary_edges: int, non_manifold_edges: int = 0):
        self.boundary_edges = boundary_edges
        self.non_manifold_edges = non_manifold_edges
        super().__init__(f"mesh is not closed: {boundary_edges} boundary edges, "
                         f"{non_manifold_edges} non-manifold edges")


@dataclass(eq=False)
class IndexedMesh:
    """Triangles over shared vertices.

    ``edge_keys`` (one ``(lo, hi)`` point-id pair per vertex) and
    ``provenance`` (source cell per triangle) are filled in by extraction;
    ``tetra_volume`` is the enclosed volume accumulated by the tetrahedral
    methods.
    """

    vertices: np.ndarray
    normals: np.ndarray
    triangles: np.ndarray
    edge_keys: np.ndarray | None = None
    provenance: np.ndarray | None = None
    method: str | None = None
    threshold: float | None = None
    tetra_volume: float | None = None

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.normals = np.asarray(self.normals, dtype=np.float64).reshape(-1, 3)
        self.triangles = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if len(self.normals) != len(self.vertices):
            raise ValueError(f"{len(self.normals)} normals for {len(self.vertices)} vertices")
        if self.triangles.size and (self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices)):
            raise ValueError("triangle index out of range")

    @classmethod
    def from_arrays(cls, vertices, triangles, normals=None) -> "IndexedMesh":
        vertices = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
        if normals is None:
            normals = np.zeros_like(vertices)
        return cls(vertices, normals, triangles)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def corners(self) -> np.ndarray:
        """Triangle corner positions, shape ``(F, 3, 3)``."""
        return self.vertices[self.triangles]

    def centroids(self) -> np.ndarray:
        return self.corners().mean(axis=1)

    def translated(self, offset) -> "IndexedMesh":
        return IndexedMesh(self.vertices + np.asarray(offset, dtype=np.float64), self.normals, self.triangles)

    def is_empty(self) -> bool:
        return self.n_triangles == 0


@dataclass(frozen=True)
class MeshStats:
    triangle_count: int
    vertex_count: int
    degenerate_triangle_count: int
    boundary_edge_count: int
    non_manifold_edge_count: int
    euler_characteristic: int
    inconsistent_edge_count: int = 0
    degenerate_normal_count: int = 0

    @property
    def watertight(self) -> bool:
        return self.boundary_edge_count == 0 and self.non_manifold_edge_count == 0

    def as_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["watertight"] = self.watertight
        return d


def triangle_areas(mesh: IndexedMesh) -> np.ndarray:
    p = mesh.corners()
    return 0.5 * np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)


def mesh_area(mesh: IndexedMesh) -> float:
    return math.fsum(triangle_areas(mesh))


def _edges(mesh: IndexedMesh):
    t = mesh.triangles
    directed = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    undirected = np.sort(directed, axis=1)
    uniq, inverse, counts = np.unique(undirected, axis=0, return_inverse=True, return_counts=True)
    forward = (directed[:, 0] < directed[:, 1]).astype(np.int64)
    fwd_counts = np.bincount(inverse.ravel(), weights=forward, minlength=len(uniq))
    return uniq, counts, fwd_counts


def validate_topology(mesh: IndexedMesh) -> MeshStats:
    """Edge-pairing statistics.

    Vertices are welded by index only (extraction already merged every
    crossing by its edge key), so coincident but distinct vertices count as
    distinct.  Euler characteristic is ``V - E + F`` over referenced vertices.
    """
    areas = triangle_areas(mesh)
    n_deg_normals = int(np.count_nonzero(~np.any(mesh.normals != 0, axis=1)))
    if mesh.is_empty():
        return MeshStats(0, 0, 0, 0, 0, 0, 0, n_deg_normals)
    uniq, counts, fwd = _edges(mesh)
    used = np.unique(mesh.triangles).size
    pairs = counts == 2
    inconsistent = int(np.count_nonzero(pairs & (fwd != 1)))
    return MeshStats(
        triangle_count=mesh.n_triangles,
        vertex_count=used,
        degenerate_triangle_count=int(np.count_nonzero(areas == 0.0)),
        boundary_edge_count=int(np.count_nonzero(counts == 1)),
        non_manifold_edge_count=int(np.count_nonzero(counts > 2)),
        euler_characteristic=int(used - len(uniq) + mesh.n_triangles),
        inconsistent_edge_count=inconsistent,
        degenerate_normal_count=n_deg_normals,
    )


def enclosed_volume_tetra(mesh: IndexedMesh) -> float:
    """Volume accumulated tetrahedron by tetrahedron during extraction."""
    if mesh.tetra_volume is None:
        raise ValueError(
            f"no tetrahedral volume for method {mesh.method!r}; only MT5, MT6 and CCL accumulate one"
        )
    return mesh.tetra_volume


def enclosed_volume_divergence(mesh: IndexedMesh) -> float:
    """Absolute sum of signed cone volumes; the mesh must be closed."""
    stats = validate_topology(mesh)
    if not stats.watertight:
        raise OpenMeshError(stats.boundary_edge_count, stats.non_manifold_edge_count)
    if mesh.is_empty():
        return 0.0
    p = mesh.corners()
    ref = mesh.vertices.mean(axis=0)
    a, b, c = p[:, 0] - ref, p[:, 1] - ref, p[:, 2] - ref
    return abs(math.fsum(np.einsum("ij,ij->i", a, np.cross(b, c)) / 6.0))


def export_obj(mesh: IndexedMesh, path) -> Path:
    """ASCII OBJ with ``v``/``vn``/``f`` records, 1-based, round-trip precision."""
    path = Path(path)
    lines = [f"# vertices {mesh.n_vertices} triangles {mesh.n_triangles}"]
    lines += [f"v {x!r} {y!r} {z!r}" for x, y, z in mesh.vertices.tolist()]
    lines += [f"vn {x!r} {y!r} {z!r}" for x, y, z in mesh.normals.tolist()]
    lines += [f"f {a}//{a} {b}//{b} {c}//{c}" for a, b, c in (mesh.triangles + 1).tolist()]
    path.write_text("\n".join(lines) + "\n")
    return path


def import_obj(path) -> IndexedMesh:
    verts, norms, faces = [], [], []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "vn":
            norms.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            idx = [int(tok.split("/")[0]) for tok in parts[1:]]
            # fan-triangulate polygons
            faces.extend([idx[0] - 1, idx[i] - 1, idx[i + 1] - 1] for i in range(1, len(idx) - 1))
    if not norms:
        norms = np.zeros((len(verts), 3))
    return IndexedMesh(np.array(verts).reshape(-1, 3), np.array(norms).reshape(-1, 3),
                       np.array(faces, dtype=np.int64).reshape(-1, 3))


_PLY_HEADER = """ply
format binary_little_endian 1.0
comment isotet mesh
element vertex {nv}
property double x
property double y
property double z
property double nx
property double ny
property double nz
element face {nf}
property list uchar int vertex_indices
end_header
"""


def export_ply(mesh: IndexedMesh, path) -> Path:
    """Binary little-endian PLY with positions, normals and triangle lists."""
    path = Path(path)
    vrec = np.empty(mesh.n_vertices, dtype=[("p", "<f8", 3), ("n", "<f8", 3)])
    vrec["p"] = mesh.vertices
    vrec["n"] = mesh.normals
    frec = np.empty(mesh.n_triangles, dtype=[("k", "u1"), ("i", "<i4", 3)])
    frec["k"] = 3
    frec["i"] = mesh.triangles
    with open(path, "wb") as fh:
        fh.write(_PLY_HEADER.format(nv=mesh.n_vertices, nf=mesh.n_triangles).encode("ascii"))
        fh.write(vrec.tobytes())
        fh.write(frec.tobytes())
    return path


def import_ply(path) -> IndexedMesh:
    """Read the PLY layout written by :func:`export_ply`."""
    raw = Path(path).read_bytes()
    end = raw.index(b"end_header\n") + len(b"end_header\n")
    header = raw[:end].decode("ascii").splitlines()
    if "format binary_little_endian 1.0" not in header:
        raise ValueError("only binary_little_endian PLY is supported")
    counts = {ln.split()[1]: int(ln.split()[2]) for ln in header if ln.startswith("element")}
    nv, nf = counts.get("vertex", 0), counts.get("face", 0)
    vrec = np.frombuffer(raw, dtype=[("p", "<f8", 3), ("n", "<f8", 3)], count=nv, offset=end)
    frec = np.frombuffer(raw, dtype=[("k", "u1"), ("i", "<i4", 3)], count=nf, offset=end + vrec.nbytes)
    if np.any(frec["k"] != 3):
        raise ValueError("only triangle faces are supported")
    tris = frec["i"].astype(np.int64)
    return IndexedMesh(vrec["p"].copy(), vrec["n"].copy(), tris)
