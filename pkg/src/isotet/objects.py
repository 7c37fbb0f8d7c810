"""The named test objects and their default parameters.

``torus`` uses an embedded tube (main radius 20, tube radius 5) so that it
fits a 64^3 grid; ``torus-printed`` keeps main radius 20 with tube radius 42,
which self-intersects and needs a grid of at least 129 samples across.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .volume import FieldKind, FieldSpec, GridDims, NoiseSpec, ScalarGrid, add_noise, generate_field

COMPARE_OBJECTS = ("sphere", "noisedsph", "cube", "csph", "torus", "sombrero")

_DEFAULTS: dict[str, tuple[FieldKind, dict, float]] = {
    # name: (kind, params, noise percent)
    "sphere": (FieldKind.SPHERE, {"r": 25.0}, 0.0),
    "noisedsph": (FieldKind.SPHERE, {"r": 25.0}, 10.0),
    "cube": (FieldKind.CUBE, {"a": 42.0, "b": 42.0, "c": 42.0}, 0.0),
    "csph": (FieldKind.CUBE_MINUS_SPHERE, {"a": 42.0, "b": 42.0, "c": 42.0, "r": 25.0}, 0.0),
    "torus": (FieldKind.TORUS, {"c": 20.0, "a": 5.0}, 0.0),
    "torus-printed": (FieldKind.TORUS, {"c": 20.0, "a": 42.0}, 0.0),
    "sombrero": (FieldKind.SOMBRERO, {"a": 12.0, "b": 0.25, "c": 3.0}, 0.0),
}


@dataclass(frozen=True)
class TestObject:
    """A named analytic object, optionally with noise added to its samples."""

    name: str
    spec: FieldSpec
    noise_percent: float = 0.0
    noise_seed: int = 0

    def reference_length(self) -> float:
        p = self.spec.params
        kind = self.spec.kind
        if kind is FieldKind.SPHERE:
            return p["r"]
        if kind in (FieldKind.CUBE, FieldKind.CUBE_MINUS_SPHERE):
            return min(p["a"], p["b"], p["c"]) / 2
        return p["a"]

    def grid(self, dims: GridDims) -> ScalarGrid:
        g = generate_field(self.spec, dims)
        if self.noise_percent > 0:
            g = add_noise(g, NoiseSpec(self.noise_percent, self.noise_seed), self.reference_length())
        return g


def make_object(entry, dims: GridDims, noise_percent: float | None = None, noise_seed: int = 0,
                overrides: Mapping[str, float] | None = None) -> TestObject:
    """Build a :class:`TestObject` from a name or a ``{"name", "kind", "params", ...}`` mapping.

    Objects are centred in the grid unless the mapping gives ``center``.
    ``noise_percent`` (when not None) replaces the object's own noise level.
    """
    if isinstance(entry, str):
        entry = {"name": entry}
    entry = dict(entry)
    unknown = set(entry) - {"name", "kind", "params", "center", "noise_percent"}
    if unknown:
        raise ValueError(f"unknown object keys {sorted(unknown)}")
    name = entry.get("name") or entry.get("kind")
    if name is None:
        raise ValueError("object needs a name or a kind")
    if name in _DEFAULTS and "kind" not in entry:
        kind, params, noise = _DEFAULTS[name]
        params = dict(params)
    elif "kind" in entry:
        kind, params, noise = FieldKind(entry["kind"]), {}, 0.0
    else:
        raise ValueError(f"unknown object {name!r}; known objects: {sorted(_DEFAULTS)}")
    params.update(entry.get("params", {}))
    params.update(overrides or {})
    center = tuple(entry.get("center", dims.center))
    noise = entry.get("noise_percent", noise)
    if noise_percent is not None:
        noise = noise_percent
    return TestObject(name, FieldSpec(kind, center, params), float(noise), int(noise_seed))
