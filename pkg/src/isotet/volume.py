"""Regular scalar grids, analytic test fields and raw volume I/O.

Grid coordinates are sample indices: the sample ``data[i, j, k]`` sits at
world position ``(i, j, k)`` and every cell edge has length 1.

Field sign convention: samples inside an object are negative, samples on
its surface are zero and samples outside are positive.

Cube-minus-sphere (``csph``) is built as the CSG difference
``max(d_cube, -d_sphere)``: the cube field is generated first and every
sample that lies closer to the sphere surface than to the cube surface
takes the (negated) sphere distance instead.  By default the sphere is
centred on the cube's minimum corner, which carves a spherical bite out of
one corner and keeps the solid genus 0.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

__all__ = [
    "FieldFitError",
    "FieldKind",
    "FieldSpec",
    "GridDims",
    "NoiseSpec",
    "ScalarGrid",
    "SizeMismatchError",
    "UndefinedDistanceError",
    "UnknownDtypeError",
    "VolumeFormatError",
    "add_noise",
    "generate_field",
    "load_raw",
    "object_distance",
    "save_raw",
]

#: Minimum number of cells between an object's bounding box and the grid boundary.
FIT_MARGIN = 2.0


class FieldFitError(ValueError):
    """The object does not fit inside the grid with the required margin."""


class UndefinedDistanceError(ArithmeticError):
    """Point distance is undefined because the field gradient vanishes."""


class VolumeFormatError(ValueError):
    """Malformed raw volume or descriptor."""


class SizeMismatchError(VolumeFormatError):
    pass


class UnknownDtypeError(VolumeFormatError):
    pass


@dataclass(frozen=True)
class GridDims:
    nx: int
    ny: int
    nz: int

    def __post_init__(self):
        for name in ("nx", "ny", "nz"):
            n = getattr(self, name)
            if int(n) != n or n < 2:
                raise ValueError(f"{name}={n!r}: need an integer >= 2")

    @classmethod
    def cube(cls, n: int) -> "GridDims":
        return cls(n, n, n)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    @property
    def cells(self) -> tuple[int, int, int]:
        return (self.nx - 1, self.ny - 1, self.nz - 1)

    @property
    def size(self) -> int:
        return self.nx * self.ny * self.nz

    @property
    def center(self) -> tuple[float, float, float]:
        return ((self.nx - 1) / 2, (self.ny - 1) / 2, (self.nz - 1) / 2)


@dataclass(frozen=True, eq=False)
class ScalarGrid:
    """Dense samples on a unit-spaced lattice, indexed ``data[i, j, k]``.

    The array is copied to float64 and marked read-only; the flat sample
    order used for ids and raw files is x-fastest (``order="F"``).
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64, copy=True)
        if arr.ndim != 3:
            raise ValueError(f"expected a 3D array, got shape {arr.shape}")
        GridDims(*arr.shape)
        if not np.all(np.isfinite(arr)):
            raise ValueError("grid samples must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_flat(cls, samples, dims: GridDims) -> "ScalarGrid":
        samples = np.asarray(samples)
        if samples.size != dims.size:
            raise SizeMismatchError(f"{samples.size} samples for dims {dims.shape}")
        return cls(samples.reshape(dims.shape, order="F"))

    @property
    def dims(self) -> GridDims:
        return GridDims(*self.data.shape)

    @property
    def samples(self) -> np.ndarray:
        """Flat x-fastest view of the samples."""
        return self.data.ravel(order="F")

    def __eq__(self, other):
        if not isinstance(other, ScalarGrid):
            return NotImplemented
        return self.data.shape == other.data.shape and np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((self.data.shape, self.data.tobytes()))


class FieldKind(str, enum.Enum):
    SPHERE = "sphere"
    CUBE = "cube"
    CUBE_MINUS_SPHERE = "csph"
    TORUS = "torus"
    SOMBRERO = "sombrero"


_REQUIRED = {
    FieldKind.SPHERE: ("r",),
    FieldKind.CUBE: ("a", "b", "c"),
    FieldKind.CUBE_MINUS_SPHERE: ("a", "b", "c", "r"),
    FieldKind.TORUS: ("c", "a"),
    FieldKind.SOMBRERO: ("a", "b", "c"),
}
_OPTIONAL = {
    FieldKind.CUBE_MINUS_SPHERE: ("sx", "sy", "sz"),
}


@dataclass(frozen=True)
class FieldSpec:
    """Analytic object: kind, centre and kind-specific size parameters.

    Parameters per kind:

    * ``sphere``: ``r``
    * ``cube``: edge lengths ``a, b, c``
    * ``csph``: cube ``a, b, c``, sphere radius ``r`` and the sphere centre
      offset ``sx, sy, sz`` from the cube centre (default: the cube's
      minimum corner)
    * ``torus``: main radius ``c``, tube radius ``a``; axis along z
    * ``sombrero``: shape constants ``a, b, c``; height axis along y
    """

    kind: FieldKind
    center: tuple[float, float, float]
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        kind = FieldKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "center", tuple(float(x) for x in self.center))
        params = {k: float(v) for k, v in dict(self.params).items()}
        allowed = _REQUIRED[kind] + _OPTIONAL.get(kind, ())
        missing = [k for k in _REQUIRED[kind] if k not in params]
        unknown = [k for k in params if k not in allowed]
        if missing or unknown:
            raise ValueError(f"{kind.value}: missing {missing}, unknown {unknown}")
        if kind is FieldKind.CUBE_MINUS_SPHERE:
            for key, edge in (("sx", "a"), ("sy", "b"), ("sz", "c")):
                params.setdefault(key, -params[edge] / 2)
        for k in _REQUIRED[kind]:
            if not params[k] > 0:
                raise ValueError(f"{kind.value}: parameter {k} must be > 0")
        object.__setattr__(self, "params", params)

    @classmethod
    def sphere(cls, r: float, center) -> "FieldSpec":
        return cls(FieldKind.SPHERE, center, {"r": r})

    @classmethod
    def cube(cls, a: float, center, b: float | None = None, c: float | None = None) -> "FieldSpec":
        return cls(FieldKind.CUBE, center, {"a": a, "b": a if b is None else b, "c": a if c is None else c})

    @classmethod
    def torus(cls, c: float, a: float, center) -> "FieldSpec":
        return cls(FieldKind.TORUS, center, {"c": c, "a": a})

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "center": list(self.center), "params": dict(self.params)}

    @classmethod
    def from_dict(cls, d: Mapping) -> "FieldSpec":
        return cls(FieldKind(d["kind"]), tuple(d["center"]), d.get("params", {}))

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray] | None:
        """Axis-aligned box enclosing the object, or None for open surfaces."""
        c = np.asarray(self.center)
        p = self.params
        if self.kind is FieldKind.SPHERE:
            h = np.full(3, p["r"])
        elif self.kind in (FieldKind.CUBE, FieldKind.CUBE_MINUS_SPHERE):
            h = np.array([p["a"], p["b"], p["c"]]) / 2
        elif self.kind is FieldKind.TORUS:
            h = np.array([p["c"] + p["a"], p["c"] + p["a"], p["a"]])
        else:
            return None
        return c - h, c + h

    def check_fit(self, dims: GridDims, margin: float = FIT_MARGIN) -> None:
        box = self.bounding_box()
        hi = np.array(dims.shape, dtype=float) - 1
        if box is None:
            c = np.asarray(self.center)
            if np.any(c < 0) or np.any(c > hi):
                raise FieldFitError(f"{self.kind.value} centre {self.center} lies outside grid {dims.shape}")
            return
        lo_box, hi_box = box
        if np.any(lo_box < margin) or np.any(hi_box > hi - margin):
            raise FieldFitError(
                f"{self.kind.value} with params {dict(self.params)} spans "
                f"{lo_box.round(3).tolist()}..{hi_box.round(3).tolist()}, which does not fit in grid "
                f"{dims.shape} with a {margin:g}-cell margin"
            )


def _sphere(q, r):
    return np.sqrt(np.sum(q * q, axis=-1)) - r


def _box(q, half):
    d = np.abs(q) - half
    outside = np.sqrt(np.sum(np.maximum(d, 0.0) ** 2, axis=-1))
    inside = np.minimum(np.max(d, axis=-1), 0.0)
    return outside + inside


def _torus(q, c, a):
    rho = np.sqrt(q[..., 0] ** 2 + q[..., 1] ** 2)
    return np.sqrt((c - rho) ** 2 + q[..., 2] ** 2) - a


def _sombrero(q, a, b, c):
    x, y, z = q[..., 0], q[..., 1], q[..., 2]
    rho = x * x + z * z
    return y - a * np.cos(b * rho) / (c + rho)


def _sombrero_gradient(q, a, b, c):
    x, z = q[..., 0], q[..., 2]
    rho = x * x + z * z
    dg = (-b * np.sin(b * rho) * (c + rho) - np.cos(b * rho)) / (c + rho) ** 2
    return np.stack([-2 * a * x * dg, np.ones_like(x), -2 * a * z * dg], axis=-1)


def _evaluate(spec: FieldSpec, points: np.ndarray) -> np.ndarray:
    q = np.asarray(points, dtype=np.float64) - np.asarray(spec.center)
    p = spec.params
    if spec.kind is FieldKind.SPHERE:
        return _sphere(q, p["r"])
    if spec.kind is FieldKind.CUBE:
        return _box(q, np.array([p["a"], p["b"], p["c"]]) / 2)
    if spec.kind is FieldKind.CUBE_MINUS_SPHERE:
        d_cube = _box(q, np.array([p["a"], p["b"], p["c"]]) / 2)
        d_sphere = _sphere(q - np.array([p["sx"], p["sy"], p["sz"]]), p["r"])
        return np.maximum(d_cube, -d_sphere)
    if spec.kind is FieldKind.TORUS:
        return _torus(q, p["c"], p["a"])
    return _sombrero(q, p["a"], p["b"], p["c"])


def object_distance(spec: FieldSpec, p) -> np.ndarray | float:
    """Signed distance from point(s) ``p`` (shape ``(..., 3)``) to the object surface.

    Sphere, cube and torus use the exact Euclidean form; csph uses the same
    CSG expression as :func:`generate_field` (exact on the surface).  The
    sombrero has no closed form, so ``F / |grad F|`` is returned, which is
    exact to first order near the surface.
    """
    pts = np.asarray(p, dtype=np.float64)
    if spec.kind is FieldKind.SOMBRERO:
        q = pts - np.asarray(spec.center)
        f = _sombrero(q, spec.params["a"], spec.params["b"], spec.params["c"])
        g = np.linalg.norm(_sombrero_gradient(q, spec.params["a"], spec.params["b"], spec.params["c"]), axis=-1)
        if np.any(g == 0):
            raise UndefinedDistanceError("sombrero gradient vanishes at query point")
        out = f / g
    else:
        out = _evaluate(spec, pts)
    return float(out) if np.ndim(out) == 0 else out


def grid_points(dims: GridDims) -> np.ndarray:
    """World positions of every sample, shape ``(nx, ny, nz, 3)``."""
    axes = [np.arange(n, dtype=np.float64) for n in dims.shape]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


def generate_field(spec: FieldSpec, dims: GridDims) -> ScalarGrid:
    """Sample the object's field at every grid vertex.

    Raises :class:`FieldFitError` when a closed object does not fit the grid
    with a two-cell margin.  The sombrero field is its implicit function, not
    a true distance.
    """
    spec.check_fit(dims)
    pts = grid_points(dims)
    # z-slabs keep the temporaries small on large grids
    out = np.empty(dims.shape)
    for k in range(dims.nz):
        out[:, :, k] = _evaluate(spec, pts[:, :, k])
    return ScalarGrid(out)


@dataclass(frozen=True)
class NoiseSpec:
    amplitude_percent: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.amplitude_percent >= 0:
            raise ValueError("amplitude_percent must be >= 0")


def add_noise(grid: ScalarGrid, spec: NoiseSpec, reference_length: float) -> ScalarGrid:
    """Add uniform noise in ``±amplitude_percent/100 * reference_length`` to every sample.

    The perturbation of sample ``n`` (x-fastest order) is the ``n``-th draw of
    a PCG64 stream seeded with ``spec.seed``, so the result depends only on
    the arguments.
    """
    if not reference_length > 0:
        raise ValueError("reference_length must be > 0")
    amp = spec.amplitude_percent / 100.0 * reference_length
    if amp == 0:
        return ScalarGrid(grid.data)
    rng = np.random.default_rng(spec.seed)
    noise = rng.uniform(-amp, amp, size=grid.dims.size)
    return ScalarGrid.from_flat(grid.samples + noise, grid.dims)


_DTYPES = {"u8": "u1", "u16": "u2", "f32": "f4", "f64": "f8"}
_ENDIAN = {"le": "<", "be": ">"}


def _payload_path(descriptor: Path, meta: Mapping) -> Path:
    name = meta.get("file")
    return descriptor.parent / name if name else descriptor.with_suffix(".raw")


def load_raw(descriptor) -> ScalarGrid:
    """Read a headerless volume described by a JSON sidecar.

    The descriptor holds ``nx, ny, nz``, ``dtype`` (``u8``, ``u16``,
    ``f32``; ``f64`` is accepted as well), ``endian`` (``le``/``be``) and an
    optional ``file`` naming the payload (default: descriptor with a
    ``.raw`` suffix).
    """
    descriptor = Path(descriptor)
    try:
        meta = json.loads(descriptor.read_text())
    except OSError as exc:
        raise VolumeFormatError(f"cannot read descriptor {descriptor}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise VolumeFormatError(f"descriptor {descriptor} is not valid JSON: {exc}") from exc
    try:
        dims = GridDims(int(meta["nx"]), int(meta["ny"]), int(meta["nz"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise VolumeFormatError(f"descriptor {descriptor}: bad dims ({exc})") from exc
    dtype = meta.get("dtype")
    if dtype not in _DTYPES:
        raise UnknownDtypeError(f"unknown sample type {dtype!r}; expected one of {sorted(_DTYPES)}")
    endian = meta.get("endian", "le")
    if endian not in _ENDIAN:
        raise VolumeFormatError(f"unknown endianness {endian!r}")
    np_dtype = np.dtype(_ENDIAN[endian] + _DTYPES[dtype])
    payload = _payload_path(descriptor, meta)
    try:
        raw = payload.read_bytes()
    except OSError as exc:
        raise VolumeFormatError(f"cannot read payload {payload}: {exc}") from exc
    expected = dims.size * np_dtype.itemsize
    if len(raw) != expected:
        raise SizeMismatchError(
            f"payload {payload} has {len(raw)} bytes, descriptor implies {expected} "
            f"({dims.shape} x {np_dtype.itemsize})"
        )
    samples = np.frombuffer(raw, dtype=np_dtype).astype(np.float64)
    return ScalarGrid.from_flat(samples, dims)


def save_raw(grid: ScalarGrid, path, dtype: str = "f32", endian: str = "le") -> Path:
    """Write ``grid`` as ``<stem>.raw`` plus a ``<stem>.json`` descriptor; returns the descriptor path."""
    if dtype not in _DTYPES:
        raise UnknownDtypeError(f"unknown sample type {dtype!r}")
    if endian not in _ENDIAN:
        raise VolumeFormatError(f"unknown endianness {endian!r}")
    path = Path(path)
    payload = path.with_suffix(".raw")
    descriptor = path.with_suffix(".json")
    np_dtype = np.dtype(_ENDIAN[endian] + _DTYPES[dtype])
    samples = grid.samples
    if np_dtype.kind == "u":
        info = np.iinfo(np_dtype)
        if samples.min() < info.min or samples.max() > info.max or np.any(samples != np.round(samples)):
            raise VolumeFormatError(f"samples not representable as {dtype}")
    payload.write_bytes(samples.astype(np_dtype).tobytes())
    meta = {"nx": grid.dims.nx, "ny": grid.dims.ny, "nz": grid.dims.nz,
            "dtype": dtype, "endian": endian, "file": payload.name}
    descriptor.write_text(json.dumps(meta, indent=2) + "\n")
    return descriptor


def analytic_area(spec: FieldSpec) -> float | None:
    """Closed-form surface area, or None where none applies."""
    p = spec.params
    if spec.kind is FieldKind.SPHERE:
        return 4 * math.pi * p["r"] ** 2
    if spec.kind is FieldKind.CUBE:
        return 2 * (p["a"] * p["b"] + p["b"] * p["c"] + p["c"] * p["a"])
    if spec.kind is FieldKind.TORUS:
        return 4 * math.pi ** 2 * p["c"] * p["a"] if p["a"] < p["c"] else None
    if spec.kind is FieldKind.CUBE_MINUS_SPHERE and _csph_corner_octant(spec):
        return 2 * (p["a"] * p["b"] + p["b"] * p["c"] + p["c"] * p["a"]) - math.pi * p["r"] ** 2 / 4
    return None


def analytic_volume(spec: FieldSpec) -> float | None:
    """Closed-form enclosed volume, or None where none applies."""
    p = spec.params
    if spec.kind is FieldKind.SPHERE:
        return 4 / 3 * math.pi * p["r"] ** 3
    if spec.kind is FieldKind.CUBE:
        return p["a"] * p["b"] * p["c"]
    if spec.kind is FieldKind.TORUS:
        return 2 * math.pi ** 2 * p["c"] * p["a"] ** 2 if p["a"] < p["c"] else None
    if spec.kind is FieldKind.CUBE_MINUS_SPHERE and _csph_corner_octant(spec):
        return p["a"] * p["b"] * p["c"] - math.pi * p["r"] ** 3 / 6
    return None


def _csph_corner_octant(spec: FieldSpec) -> bool:
    # closed forms hold when the sphere sits on a cube corner and only one octant bites in
    p = spec.params
    half = np.array([p["a"], p["b"], p["c"]]) / 2
    off = np.array([p["sx"], p["sy"], p["sz"]])
    return bool(np.allclose(np.abs(off), half) and p["r"] <= 2 * half.min())
