"""Iso-surface extraction by marching cubes and tetrahedral decompositions, with error metrics."""

from .extract import ExtractionMethod, extract
from .mesh import IndexedMesh, MeshStats, mesh_area, validate_topology
from .volume import FieldKind, FieldSpec, GridDims, NoiseSpec, ScalarGrid, add_noise, generate_field

__version__ = "0.1.0"

__all__ = [
    "ExtractionMethod",
    "FieldKind",
    "FieldSpec",
    "GridDims",
    "IndexedMesh",
    "MeshStats",
    "NoiseSpec",
    "ScalarGrid",
    "add_noise",
    "extract",
    "generate_field",
    "mesh_area",
    "validate_topology",
]
