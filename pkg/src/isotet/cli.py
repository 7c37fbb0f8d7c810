"""Command-line front end: ``gen``, ``extract``, ``compare`` and ``sweep``.

Every command reads an optional JSON config (see :class:`RunConfig`), applies
flag overrides on top and writes its outputs under ``--out``.  Outputs depend
only on the config and input files; ``--threads`` changes wall time only.

Exit codes: 0 success, 1 usage or config error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .extract import ExtractionMethod, extract
from .mesh import IndexedMesh, export_obj, export_ply, mesh_area, validate_topology
from .metrics import (
    REPORT_SCHEMA_VERSION,
    MetricsReport,
    SamplingSpec,
    config_hash,
    hausdorff,
    p_err,
    relative_errors,
    write_reports,
)
from .objects import COMPARE_OBJECTS, TestObject, make_object
from .volume import (
    FieldFitError,
    FieldSpec,
    GridDims,
    ScalarGrid,
    UndefinedDistanceError,
    VolumeFormatError,
    analytic_area,
    analytic_volume,
    load_raw,
    save_raw,
)

log = logging.getLogger("isotet")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

SWEEP_COLUMNS = ["schema_version", "config_hash", "radius", "grid_n", "method", "triangle_count",
                 "area", "area_rel_error", "volume", "volume_rel_error"]


class ConfigError(ValueError):
    """Invalid config file or flag combination."""


class _UsageExit(Exception):
    def __init__(self, message: str):
        super().__init__(message)


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for data errors here
    def error(self, message):
        raise _UsageExit(f"{self.prog}: error: {message}")


@dataclass
class NoiseConfig:
    amplitude_percent: float | None = None  # None keeps each object's own level
    seed: int | None = None  # None inherits RunConfig.seed


@dataclass
class SamplingConfig:
    density: float = 4.0
    include_vertices: bool = True
    include_edges: bool = False
    seed: int | None = None  # None inherits RunConfig.seed


@dataclass
class RunConfig:
    """Declarative run description.

    ``objects`` entries are names (``sphere``, ``noisedsph``, ``cube``,
    ``csph``, ``torus``, ``torus-printed``, ``sombrero``) or mappings with
    ``name``, ``kind``, ``params``, ``center`` and ``noise_percent``.  When
    empty, ``gen`` and ``extract`` use ``sphere`` and ``compare`` uses the
    full six-object set.  ``volumes`` lists raw-volume descriptors that
    ``extract`` and ``compare`` process instead of generated objects.
    ``threads`` and ``out`` do not affect output content and are excluded
    from the config hash.
    """

    objects: list = field(default_factory=list)
    dims: list[int] = field(default_factory=lambda: [64, 64, 64])
    threshold: float = 0.0
    methods: list[str] = field(default_factory=lambda: ["mc", "mt5", "mt6", "ccl"])
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    out: str = "out"
    seed: int = 0
    params: dict[str, float] = field(default_factory=dict)
    paper_rms: bool = False
    threads: int = 1
    mesh_format: str = "obj"
    dtype: str = "f32"
    volumes: list[str] = field(default_factory=list)
    radii: list[float] = field(default_factory=lambda: [float(r) for r in range(5, 31)])

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        d = dict(d)
        for key, sub in (("noise", NoiseConfig), ("sampling", SamplingConfig)):
            if key in d:
                if not isinstance(d[key], dict):
                    raise ConfigError(f"{key!r} must be an object")
                bad = set(d[key]) - {f.name for f in fields(sub)}
                if bad:
                    raise ConfigError(f"unknown {key} keys {sorted(bad)}")
                d[key] = sub(**d[key])
        cfg = cls(**d)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            doc = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)

    def validate(self) -> None:
        if len(self.dims) != 3 or any(int(n) != n or n < 2 for n in self.dims):
            raise ConfigError(f"dims must be three integers >= 2, got {self.dims}")
        self.dims = [int(n) for n in self.dims]
        if not self.methods:
            raise ConfigError("method list is empty")
        try:
            self.methods = [ExtractionMethod.parse(m).value for m in self.methods]
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.mesh_format not in ("obj", "ply"):
            raise ConfigError(f"mesh_format must be 'obj' or 'ply', got {self.mesh_format!r}")
        if not self.radii or any(not r > 0 for r in self.radii):
            raise ConfigError("radii must be a non-empty list of positive numbers")
        if not self.sampling.density > 0:
            raise ConfigError("sampling density must be > 0")
        if self.noise.amplitude_percent is not None and self.noise.amplitude_percent < 0:
            raise ConfigError("noise amplitude must be >= 0")

    @property
    def grid_dims(self) -> GridDims:
        return GridDims(*self.dims)

    def sampling_spec(self) -> SamplingSpec:
        s = self.sampling
        seed = self.seed if s.seed is None else s.seed
        return SamplingSpec(s.density, s.include_vertices, s.include_edges, seed)

    def noise_seed(self) -> int:
        return self.seed if self.noise.seed is None else self.noise.seed

    def content_dict(self) -> dict:
        d = asdict(self)
        d.pop("threads")
        d.pop("out")
        return d

    def hash(self) -> str:
        return config_hash(self.content_dict())


def _parse_dims(text: str) -> list[int]:
    parts = [p for p in text.replace("x", ",").split(",") if p]
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dims {text!r}") from None
    if len(vals) == 1:
        vals *= 3
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"dims needs 1 or 3 values, got {text!r}")
    return vals


def _parse_param(text: str) -> tuple[str, float]:
    key, sep, val = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key.strip(), float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter {key!r} needs a number, got {val!r}") from None


def _parse_radii(text: str) -> list[float]:
    if ":" in text:
        try:
            start, stop, *step = (float(x) for x in text.split(":"))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad radius range {text!r}") from None
        step = step[0] if step else 1.0
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError(f"bad radius range {text!r}")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(n)]
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad radius list {text!r}") from None


def _split_list(values: Iterable[str] | None) -> list[str]:
    return [v for item in values or [] for v in item.split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON run config; flags override its values")
    common.add_argument("--object", action="append", metavar="NAME[,NAME...]",
                        help="object name(s); repeatable")
    common.add_argument("--volume", action="append", metavar="DESCRIPTOR",
                        help="raw-volume JSON descriptor to process instead of generated objects")
    common.add_argument("--dims", type=_parse_dims, help="grid samples per axis: N or NX,NY,NZ")
    common.add_argument("--method", action="append", metavar="M[,M...]", help="mc, mt5, mt6, ccl")
    common.add_argument("--threshold", type=float)
    common.add_argument("--noise", type=float, metavar="PERCENT",
                        help="noise amplitude in percent of the object's size, for every object")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("--density", type=float, help="surface samples per unit area")
    common.add_argument("--paper-rms", action="store_true", default=None,
                        help="report sqrt(sum d^2)/n instead of sqrt(mean d^2)")
    common.add_argument("--threads", type=int, help="maximum worker threads")
    common.add_argument("--param", action="append", type=_parse_param, metavar="KEY=VALUE",
                        help="override an object parameter; repeatable")
    common.add_argument("--format", dest="mesh_format", choices=["obj", "ply"])
    common.add_argument("--dtype", choices=["u8", "u16", "f32", "f64"], help="sample type written by gen")
    common.add_argument("--radii", type=_parse_radii, metavar="START:STOP[:STEP]|R,R,...",
                        help="sweep radii")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="isotet", description="Iso-surface extraction and comparison.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("gen", parents=[common], help="write raw volumes for analytic objects")
    sub.add_parser("extract", parents=[common], help="extract meshes and print their statistics")
    sub.add_parser("compare", parents=[common], help="object x method metrics report")
    sub.add_parser("sweep", parents=[common], help="sphere radius sweep")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    objects = _split_list(args.object)
    if objects:
        cfg.objects = objects
    if args.volume:
        cfg.volumes = list(args.volume)
    methods = _split_list(args.method)
    if methods:
        cfg.methods = methods
    for name in ("dims", "threshold", "seed", "out", "threads", "mesh_format", "dtype", "radii", "paper_rms"):
        val = getattr(args, name)
        if val is not None:
            setattr(cfg, name, val)
    if args.noise is not None:
        cfg.noise.amplitude_percent = args.noise
    if args.density is not None:
        cfg.sampling.density = args.density
    if args.param:
        cfg.params = {**cfg.params, **dict(args.param)}
    cfg.validate()
    return cfg


@dataclass
class _Source:
    name: str
    grid: ScalarGrid
    spec: FieldSpec | None


def _objects(cfg: RunConfig, default: Sequence[str]) -> list[TestObject]:
    dims = cfg.grid_dims
    entries = cfg.objects or list(default)
    try:
        return [make_object(e, dims, cfg.noise.amplitude_percent, cfg.noise_seed(), cfg.params)
                for e in entries]
    except (ValueError, TypeError) as exc:
        if isinstance(exc, FieldFitError):
            raise
        raise ConfigError(str(exc)) from None


def _sources(cfg: RunConfig, default: Sequence[str]) -> Iterable[_Source]:
    if cfg.volumes:
        for desc in cfg.volumes:
            yield _Source(Path(desc).stem, load_raw(desc), None)
        return
    for obj in _objects(cfg, default):
        yield _Source(obj.name, obj.grid(cfg.grid_dims), obj.spec)


def _pmap(fn: Callable, items: Sequence, threads: int) -> list:
    """Ordered map; results do not depend on ``threads``."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _check_threshold(grid: ScalarGrid, threshold: float, name: str) -> None:
    lo, hi = float(grid.data.min()), float(grid.data.max())
    if not lo < threshold <= hi:
        log.warning("threshold %r is outside the data range [%r, %r] of %s; the mesh will be empty",
                    threshold, lo, hi, name)


def cmd_gen(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    objs = _objects(cfg, ["sphere"])
    grids = _pmap(lambda o: o.grid(cfg.grid_dims), objs, cfg.threads)
    for obj, grid in zip(objs, grids):
        desc = save_raw(grid, out / obj.name, dtype=cfg.dtype)
        print(f"{obj.name}: {grid.dims.nx}x{grid.dims.ny}x{grid.dims.nz} {cfg.dtype} -> {desc}")
    return EXIT_OK


def _write_mesh(mesh: IndexedMesh, path: Path, fmt: str) -> Path:
    return export_obj(mesh, path.with_suffix(".obj")) if fmt == "obj" else export_ply(mesh, path.with_suffix(".ply"))


def cmd_extract(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    sources = list(_sources(cfg, ["sphere"]))
    for src in sources:
        _check_threshold(src.grid, cfg.threshold, src.name)
    jobs = [(s, m) for s in sources for m in cfg.methods]
    meshes = _pmap(lambda job: extract(job[0].grid, cfg.threshold, job[1]), jobs, cfg.threads)
    records = []
    print(f"{'object':<12} {'method':<6} {'triangles':>9} {'vertices':>9} {'boundary':>8} "
          f"{'nonmanif':>8} {'chi':>4} watertight")
    for (src, method), mesh in zip(jobs, meshes):
        stats = validate_topology(mesh)
        path = _write_mesh(mesh, out / f"{src.name}_{method}", cfg.mesh_format)
        if mesh.is_empty():
            log.warning("%s/%s: empty mesh written to %s", src.name, method, path)
        print(f"{src.name:<12} {method:<6} {stats.triangle_count:>9} {stats.vertex_count:>9} "
              f"{stats.boundary_edge_count:>8} {stats.non_manifold_edge_count:>8} "
              f"{stats.euler_characteristic:>4} {'yes' if stats.watertight else 'no'}")
        records.append({"object": src.name, "method": method, "file": path.name, **stats.as_dict()})
    doc = {"schema_version": REPORT_SCHEMA_VERSION, "config_hash": cfg.hash(), "meshes": records}
    (out / "extract_stats.json").write_text(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def _compare_source(src: _Source, cfg: RunConfig) -> list[MetricsReport]:
    sampling = cfg.sampling_spec()
    meshes = {m: extract(src.grid, cfg.threshold, m) for m in cfg.methods}
    ref = meshes.get("mc") or extract(src.grid, cfg.threshold, "mc")
    rows = []
    for method, mesh in meshes.items():
        stats = validate_topology(mesh)
        area = mesh_area(mesh)
        row = MetricsReport(object=src.name, method=method, threshold=cfg.threshold,
                            triangle_count=stats.triangle_count, vertex_count=stats.vertex_count,
                            area=area, watertight=stats.watertight,
                            euler_characteristic=stats.euler_characteristic)
        if mesh.tetra_volume is not None and stats.watertight and not mesh.is_empty():
            row.volume = mesh.tetra_volume
        if src.spec is not None:
            row.area_analytic = analytic_area(src.spec)
            row.volume_analytic = analytic_volume(src.spec)
            row.area_rel_error, row.volume_rel_error = relative_errors(area, row.volume, src.spec)
            if not mesh.is_empty():
                row.p_err = p_err(mesh, src.spec)
        if not mesh.is_empty() and not ref.is_empty():
            d = hausdorff(mesh, ref, sampling, paper_rms=cfg.paper_rms)
            row.hausdorff_forward = d.forward
            row.hausdorff_backward = d.backward
            row.hausdorff_symmetric = d.symmetric
            row.rms = d.rms_forward
            row.sample_count = d.sample_count
        rows.append(row)
    return rows


def cmd_compare(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    sources = list(_sources(cfg, COMPARE_OBJECTS))
    for src in sources:
        _check_threshold(src.grid, cfg.threshold, src.name)
    per_source = _pmap(lambda s: _compare_source(s, cfg), sources, cfg.threads)
    rows = [r for group in per_source for r in group]
    csv_path, json_path = write_reports(rows, out / "compare", cfg.hash(), cfg.content_dict())
    print(f"{len(rows)} rows -> {csv_path}, {json_path}")
    return EXIT_OK


def sweep_grid_size(radius: float) -> int:
    """Smallest grid that holds a centred sphere of ``radius`` with a two-cell margin plus slack."""
    return 2 * math.ceil(radius) + 6


def _sweep_radius(r: float, cfg: RunConfig) -> list[dict]:
    n = sweep_grid_size(r)
    dims = GridDims.cube(n)
    spec = FieldSpec.sphere(r, dims.center)
    obj = make_object({"name": "sphere", "params": {"r": r}}, dims, cfg.noise.amplitude_percent,
                      cfg.noise_seed())
    grid = obj.grid(dims)
    rows = []
    for method in cfg.methods:
        mesh = extract(grid, cfg.threshold, method)
        area = mesh_area(mesh)
        vol = mesh.tetra_volume
        area_rel, vol_rel = relative_errors(area, vol, spec)
        rows.append({"radius": r, "grid_n": n, "method": method, "triangle_count": mesh.n_triangles,
                     "area": area, "area_rel_error": area_rel, "volume": vol, "volume_rel_error": vol_rel})
    return rows


def cmd_sweep(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    per_radius = _pmap(lambda r: _sweep_radius(r, cfg), cfg.radii, cfg.threads)
    rows = [r for group in per_radius for r in group]
    csv_path, json_path = write_reports(rows, out / "sweep", cfg.hash(), cfg.content_dict(), SWEEP_COLUMNS)
    print(f"{len(rows)} rows -> {csv_path}, {json_path}")
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "extract": cmd_extract, "compare": cmd_compare, "sweep": cmd_sweep}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageExit as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"isotet {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FieldFitError, VolumeFormatError, UndefinedDistanceError, OSError) as exc:
        print(f"isotet {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
