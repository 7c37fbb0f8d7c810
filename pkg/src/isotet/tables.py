"""Case tables and cell decompositions.

Cube corner labels (local index: offset)::

    A=0 (0,0,0)  B=1 (1,0,0)  C=2 (1,1,0)  D=3 (0,1,0)
    E=4 (0,0,1)  F=5 (1,0,1)  G=6 (1,1,1)  H=7 (0,1,1)

A..D run counter-clockwise around the bottom face seen from +z, E..H sit
directly above them.  A cell index has A as its most significant bit and a
bit is 1 when the corner value is >= the threshold.

Every triangle in these tables is wound so that its right-hand normal
points toward the side with larger field values.
"""

from __future__ import annotations

import itertools

import numpy as np

CORNERS = np.array(
    [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0),
     (0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)],
    dtype=np.int64,
)

#: Cube edge -> (corner, corner).
EDGES = np.array(
    [(0, 1), (1, 2), (2, 3), (3, 0),
     (4, 5), (5, 6), (6, 7), (7, 4),
     (0, 4), (1, 5), (2, 6), (3, 7)],
    dtype=np.int64,
)

# Marching cubes triangles per cell index, as cube-edge triples.  Derived from
# the classic Lorensen-Cline / Bourke table: configurations with at most four
# corners below the threshold keep the published triangulation, the rest are
# the complement with reversed winding.  Index k and 255-k therefore describe
# the same surface with opposite orientation, and no case needs more than four
# triangles.
MC_TRIANGLES: tuple[tuple[tuple[int, int, int], ...], ...] = (
    (),
    ((7, 6, 11),),
    ((10, 6, 5),),
    ((11, 5, 10), (7, 5, 11)),
    ((9, 5, 4),),
    ((4, 9, 5), (7, 6, 11)),
    ((10, 4, 9), (6, 4, 10)),
    ((4, 11, 7), (4, 9, 11), (9, 10, 11)),
    ((4, 7, 8),),
    ((6, 8, 4), (11, 8, 6)),
    ((5, 10, 6), (4, 7, 8)),
    ((5, 8, 4), (5, 10, 8), (10, 11, 8)),
    ((9, 7, 8), (5, 7, 9)),
    ((6, 9, 5), (6, 11, 9), (11, 8, 9)),
    ((7, 10, 6), (7, 8, 10), (8, 9, 10)),
    ((9, 10, 8), (10, 11, 8)),
    ((3, 11, 2),),
    ((7, 2, 3), (6, 2, 7)),
    ((2, 3, 11), (10, 6, 5)),
    ((2, 5, 10), (2, 3, 5), (3, 7, 5)),
    ((9, 5, 4), (2, 3, 11)),
    ((7, 2, 3), (7, 6, 2), (5, 4, 9)),
    ((10, 4, 9), (10, 6, 4), (11, 2, 3)),
    ((2, 9, 10), (2, 7, 9), (2, 3, 7), (7, 4, 9)),
    ((8, 4, 7), (3, 11, 2)),
    ((8, 2, 3), (8, 4, 2), (4, 6, 2)),
    ((3, 11, 2), (7, 8, 4), (10, 6, 5)),
    ((2, 5, 10), (3, 5, 2), (3, 4, 5), (3, 8, 4)),
    ((7, 9, 5), (7, 8, 9), (3, 11, 2)),
    ((5, 8, 9), (5, 2, 8), (5, 6, 2), (3, 8, 2)),
    ((2, 3, 11), (10, 6, 8), (10, 8, 9), (8, 6, 7)),
    ((2, 3, 8), (2, 8, 10), (10, 8, 9)),
    ((1, 2, 10),),
    ((10, 1, 2), (6, 11, 7)),
    ((1, 6, 5), (2, 6, 1)),
    ((11, 1, 2), (11, 7, 1), (7, 5, 1)),
    ((1, 2, 10), (9, 5, 4)),
    ((9, 5, 4), (10, 1, 2), (7, 6, 11)),
    ((1, 4, 9), (1, 2, 4), (2, 6, 4)),
    ((4, 11, 7), (9, 11, 4), (9, 2, 11), (9, 1, 2)),
    ((1, 2, 10), (8, 4, 7)),
    ((6, 8, 4), (6, 11, 8), (2, 10, 1)),
    ((6, 1, 2), (6, 5, 1), (4, 7, 8)),
    ((2, 5, 1), (2, 8, 5), (2, 11, 8), (4, 5, 8)),
    ((9, 7, 8), (9, 5, 7), (10, 1, 2)),
    ((5, 6, 10), (1, 2, 9), (9, 2, 11), (9, 11, 8)),
    ((1, 2, 6), (1, 6, 8), (1, 8, 9), (8, 6, 7)),
    ((1, 2, 11), (1, 11, 9), (9, 11, 8)),
    ((3, 10, 1), (11, 10, 3)),
    ((10, 7, 6), (10, 1, 7), (1, 3, 7)),
    ((6, 3, 11), (6, 5, 3), (5, 1, 3)),
    ((1, 3, 5), (3, 7, 5)),
    ((10, 3, 11), (10, 1, 3), (9, 5, 4)),
    ((10, 5, 6), (1, 7, 9), (1, 3, 7), (7, 4, 9)),
    ((9, 6, 4), (9, 3, 6), (9, 1, 3), (11, 6, 3)),
    ((4, 9, 1), (4, 1, 7), (7, 1, 3)),
    ((3, 10, 1), (3, 11, 10), (7, 8, 4)),
    ((8, 1, 3), (8, 6, 1), (8, 4, 6), (6, 10, 1)),
    ((8, 4, 7), (3, 11, 5), (3, 5, 1), (5, 11, 6)),
    ((8, 4, 5), (8, 5, 3), (3, 5, 1)),
    ((9, 5, 8), (8, 5, 7), (10, 1, 3), (10, 3, 11)),
    ((1, 3, 8), (1, 8, 9), (5, 6, 10)),
    ((8, 9, 1), (8, 1, 3), (11, 6, 7)),
    ((1, 3, 8), (9, 1, 8)),
    ((0, 1, 9),),
    ((0, 1, 9), (11, 7, 6)),
    ((9, 0, 1), (5, 10, 6)),
    ((5, 11, 7), (5, 10, 11), (1, 9, 0)),
    ((0, 5, 4), (1, 5, 0)),
    ((5, 0, 1), (5, 4, 0), (7, 6, 11)),
    ((10, 0, 1), (10, 6, 0), (6, 4, 0)),
    ((1, 10, 11), (1, 11, 4), (1, 4, 0), (7, 4, 11)),
    ((0, 1, 9), (8, 4, 7)),
    ((8, 6, 11), (8, 4, 6), (9, 0, 1)),
    ((1, 9, 0), (5, 10, 6), (8, 4, 7)),
    ((4, 5, 9), (0, 1, 8), (8, 1, 10), (8, 10, 11)),
    ((0, 7, 8), (0, 1, 7), (1, 5, 7)),
    ((0, 11, 8), (0, 5, 11), (0, 1, 5), (5, 6, 11)),
    ((10, 6, 7), (1, 10, 7), (1, 7, 8), (1, 8, 0)),
    ((0, 1, 10), (0, 10, 8), (8, 10, 11)),
    ((1, 9, 0), (2, 3, 11)),
    ((2, 7, 6), (2, 3, 7), (0, 1, 9)),
    ((0, 1, 9), (2, 3, 11), (5, 10, 6)),
    ((10, 2, 1), (9, 0, 5), (5, 0, 3), (5, 3, 7)),
    ((0, 5, 4), (0, 1, 5), (2, 3, 11)),
    ((1, 5, 2), (5, 6, 2), (3, 4, 0), (3, 7, 4)),
    ((3, 11, 2), (0, 1, 6), (0, 6, 4), (6, 1, 10)),
    ((3, 7, 4), (3, 4, 0), (1, 10, 2)),
    ((9, 0, 1), (8, 4, 7), (2, 3, 11)),
    ((3, 8, 0), (1, 9, 2), (2, 9, 4), (2, 4, 6)),
    ((0, 1, 9), (4, 7, 8), (2, 3, 11), (5, 10, 6)),
    ((3, 8, 0), (1, 10, 2), (4, 5, 9)),
    ((2, 3, 11), (0, 1, 8), (1, 7, 8), (1, 5, 7)),
    ((1, 5, 6), (1, 6, 2), (3, 8, 0)),
    ((1, 10, 2), (3, 8, 0), (6, 7, 11)),
    ((0, 3, 8), (1, 10, 2)),
    ((9, 2, 10), (0, 2, 9)),
    ((2, 9, 0), (2, 10, 9), (6, 11, 7)),
    ((9, 6, 5), (9, 0, 6), (0, 2, 6)),
    ((9, 7, 5), (9, 2, 7), (9, 0, 2), (2, 11, 7)),
    ((5, 2, 10), (5, 4, 2), (4, 0, 2)),
    ((5, 6, 10), (4, 2, 7), (4, 0, 2), (2, 11, 7)),
    ((0, 2, 4), (4, 2, 6)),
    ((11, 7, 4), (11, 4, 2), (2, 4, 0)),
    ((9, 2, 10), (9, 0, 2), (8, 4, 7)),
    ((0, 2, 8), (2, 11, 8), (4, 10, 9), (4, 6, 10)),
    ((8, 4, 7), (9, 0, 5), (0, 6, 5), (0, 2, 6)),
    ((0, 2, 11), (0, 11, 8), (4, 5, 9)),
    ((8, 0, 2), (8, 2, 5), (8, 5, 7), (10, 5, 2)),
    ((11, 8, 0), (11, 0, 2), (10, 5, 6)),
    ((7, 8, 0), (7, 0, 6), (6, 0, 2)),
    ((0, 2, 11), (8, 0, 11)),
    ((3, 9, 0), (3, 11, 9), (11, 10, 9)),
    ((0, 3, 7), (0, 7, 10), (0, 10, 9), (6, 10, 7)),
    ((3, 11, 6), (0, 3, 6), (0, 6, 5), (0, 5, 9)),
    ((9, 0, 3), (9, 3, 5), (5, 3, 7)),
    ((5, 4, 0), (5, 0, 11), (5, 11, 10), (11, 0, 3)),
    ((4, 0, 3), (4, 3, 7), (6, 10, 5)),
    ((3, 11, 6), (3, 6, 0), (0, 6, 4)),
    ((4, 0, 3), (7, 4, 3)),
    ((4, 7, 8), (9, 0, 11), (9, 11, 10), (11, 0, 3)),
    ((4, 6, 10), (4, 10, 9), (0, 3, 8)),
    ((0, 3, 8), (4, 5, 9), (11, 6, 7)),
    ((9, 4, 5), (0, 3, 8)),
    ((11, 10, 5), (11, 5, 7), (8, 0, 3)),
    ((0, 3, 8), (5, 6, 10)),
    ((3, 8, 0), (11, 6, 7)),
    ((0, 3, 8),),
    ((0, 8, 3),),
    ((3, 0, 8), (11, 7, 6)),
    ((0, 8, 3), (5, 10, 6)),
    ((11, 5, 10), (11, 7, 5), (8, 3, 0)),
    ((9, 5, 4), (0, 8, 3)),
    ((0, 8, 3), (4, 9, 5), (11, 7, 6)),
    ((4, 10, 6), (4, 9, 10), (0, 8, 3)),
    ((4, 8, 7), (9, 11, 0), (9, 10, 11), (11, 3, 0)),
    ((4, 3, 0), (7, 3, 4)),
    ((3, 6, 11), (3, 0, 6), (0, 4, 6)),
    ((4, 3, 0), (4, 7, 3), (6, 5, 10)),
    ((5, 0, 4), (5, 11, 0), (5, 10, 11), (11, 3, 0)),
    ((9, 3, 0), (9, 5, 3), (5, 7, 3)),
    ((3, 6, 11), (0, 6, 3), (0, 5, 6), (0, 9, 5)),
    ((0, 7, 3), (0, 10, 7), (0, 9, 10), (6, 7, 10)),
    ((3, 0, 9), (3, 9, 11), (11, 9, 10)),
    ((0, 11, 2), (8, 11, 0)),
    ((7, 0, 8), (7, 6, 0), (6, 2, 0)),
    ((11, 0, 8), (11, 2, 0), (10, 6, 5)),
    ((8, 2, 0), (8, 5, 2), (8, 7, 5), (10, 2, 5)),
    ((0, 11, 2), (0, 8, 11), (4, 9, 5)),
    ((8, 7, 4), (9, 5, 0), (0, 5, 6), (0, 6, 2)),
    ((0, 8, 2), (2, 8, 11), (4, 9, 10), (4, 10, 6)),
    ((9, 10, 2), (9, 2, 0), (8, 7, 4)),
    ((11, 4, 7), (11, 2, 4), (2, 0, 4)),
    ((0, 4, 2), (4, 6, 2)),
    ((5, 10, 6), (4, 7, 2), (4, 2, 0), (2, 7, 11)),
    ((5, 10, 2), (5, 2, 4), (4, 2, 0)),
    ((9, 5, 7), (9, 7, 2), (9, 2, 0), (2, 7, 11)),
    ((9, 5, 6), (9, 6, 0), (0, 6, 2)),
    ((2, 0, 9), (2, 9, 10), (6, 7, 11)),
    ((9, 10, 2), (0, 9, 2)),
    ((0, 8, 3), (1, 2, 10)),
    ((1, 2, 10), (3, 0, 8), (6, 11, 7)),
    ((1, 6, 5), (1, 2, 6), (3, 0, 8)),
    ((2, 11, 3), (0, 8, 1), (1, 8, 7), (1, 7, 5)),
    ((3, 0, 8), (1, 2, 10), (4, 9, 5)),
    ((0, 9, 1), (4, 8, 7), (2, 11, 3), (5, 6, 10)),
    ((3, 0, 8), (1, 2, 9), (2, 4, 9), (2, 6, 4)),
    ((9, 1, 0), (8, 7, 4), (2, 11, 3)),
    ((3, 4, 7), (3, 0, 4), (1, 2, 10)),
    ((3, 2, 11), (0, 6, 1), (0, 4, 6), (6, 10, 1)),
    ((1, 2, 5), (5, 2, 6), (3, 0, 4), (3, 4, 7)),
    ((0, 4, 5), (0, 5, 1), (2, 11, 3)),
    ((10, 1, 2), (9, 5, 0), (5, 3, 0), (5, 7, 3)),
    ((0, 9, 1), (2, 11, 3), (5, 6, 10)),
    ((2, 6, 7), (2, 7, 3), (0, 9, 1)),
    ((1, 0, 9), (2, 11, 3)),
    ((0, 10, 1), (0, 8, 10), (8, 11, 10)),
    ((10, 7, 6), (1, 7, 10), (1, 8, 7), (1, 0, 8)),
    ((0, 8, 11), (0, 11, 5), (0, 5, 1), (5, 11, 6)),
    ((0, 8, 7), (0, 7, 1), (1, 7, 5)),
    ((4, 9, 5), (0, 8, 1), (8, 10, 1), (8, 11, 10)),
    ((1, 0, 9), (5, 6, 10), (8, 7, 4)),
    ((8, 11, 6), (8, 6, 4), (9, 1, 0)),
    ((0, 9, 1), (8, 7, 4)),
    ((1, 11, 10), (1, 4, 11), (1, 0, 4), (7, 11, 4)),
    ((10, 1, 0), (10, 0, 6), (6, 0, 4)),
    ((5, 1, 0), (5, 0, 4), (7, 11, 6)),
    ((0, 4, 5), (1, 0, 5)),
    ((5, 7, 11), (5, 11, 10), (1, 0, 9)),
    ((9, 1, 0), (5, 6, 10)),
    ((0, 9, 1), (11, 6, 7)),
    ((0, 9, 1),),
    ((1, 8, 3), (9, 8, 1)),
    ((8, 1, 9), (8, 3, 1), (11, 7, 6)),
    ((1, 8, 3), (1, 9, 8), (5, 10, 6)),
    ((9, 8, 5), (8, 7, 5), (10, 3, 1), (10, 11, 3)),
    ((8, 5, 4), (8, 3, 5), (3, 1, 5)),
    ((8, 7, 4), (3, 5, 11), (3, 1, 5), (5, 6, 11)),
    ((8, 3, 1), (8, 1, 6), (8, 6, 4), (6, 1, 10)),
    ((3, 1, 10), (3, 10, 11), (7, 4, 8)),
    ((4, 1, 9), (4, 7, 1), (7, 3, 1)),
    ((9, 4, 6), (9, 6, 3), (9, 3, 1), (11, 3, 6)),
    ((10, 6, 5), (1, 9, 7), (1, 7, 3), (7, 9, 4)),
    ((10, 11, 3), (10, 3, 1), (9, 4, 5)),
    ((1, 5, 3), (3, 5, 7)),
    ((6, 11, 3), (6, 3, 5), (5, 3, 1)),
    ((10, 6, 7), (10, 7, 1), (1, 7, 3)),
    ((3, 1, 10), (11, 3, 10)),
    ((1, 11, 2), (1, 9, 11), (9, 8, 11)),
    ((1, 6, 2), (1, 8, 6), (1, 9, 8), (8, 7, 6)),
    ((5, 10, 6), (1, 9, 2), (9, 11, 2), (9, 8, 11)),
    ((9, 8, 7), (9, 7, 5), (10, 2, 1)),
    ((2, 1, 5), (2, 5, 8), (2, 8, 11), (4, 8, 5)),
    ((6, 2, 1), (6, 1, 5), (4, 8, 7)),
    ((6, 4, 8), (6, 8, 11), (2, 1, 10)),
    ((1, 10, 2), (8, 7, 4)),
    ((4, 7, 11), (9, 4, 11), (9, 11, 2), (9, 2, 1)),
    ((1, 9, 4), (1, 4, 2), (2, 4, 6)),
    ((9, 4, 5), (10, 2, 1), (7, 11, 6)),
    ((1, 10, 2), (9, 4, 5)),
    ((11, 2, 1), (11, 1, 7), (7, 1, 5)),
    ((1, 5, 6), (2, 1, 6)),
    ((10, 2, 1), (6, 7, 11)),
    ((1, 10, 2),),
    ((2, 8, 3), (2, 10, 8), (10, 9, 8)),
    ((2, 11, 3), (10, 8, 6), (10, 9, 8), (8, 7, 6)),
    ((5, 9, 8), (5, 8, 2), (5, 2, 6), (3, 2, 8)),
    ((7, 5, 9), (7, 9, 8), (3, 2, 11)),
    ((2, 10, 5), (3, 2, 5), (3, 5, 4), (3, 4, 8)),
    ((3, 2, 11), (7, 4, 8), (10, 5, 6)),
    ((8, 3, 2), (8, 2, 4), (4, 2, 6)),
    ((8, 7, 4), (3, 2, 11)),
    ((2, 10, 9), (2, 9, 7), (2, 7, 3), (7, 9, 4)),
    ((10, 9, 4), (10, 4, 6), (11, 3, 2)),
    ((7, 3, 2), (7, 2, 6), (5, 9, 4)),
    ((9, 4, 5), (2, 11, 3)),
    ((2, 10, 5), (2, 5, 3), (3, 5, 7)),
    ((2, 11, 3), (10, 5, 6)),
    ((7, 3, 2), (6, 7, 2)),
    ((3, 2, 11),),
    ((9, 8, 10), (10, 8, 11)),
    ((7, 6, 10), (7, 10, 8), (8, 10, 9)),
    ((6, 5, 9), (6, 9, 11), (11, 9, 8)),
    ((9, 8, 7), (5, 9, 7)),
    ((5, 4, 8), (5, 8, 10), (10, 8, 11)),
    ((5, 6, 10), (4, 8, 7)),
    ((6, 4, 8), (11, 6, 8)),
    ((4, 8, 7),),
    ((4, 7, 11), (4, 11, 9), (9, 11, 10)),
    ((10, 9, 4), (6, 10, 4)),
    ((4, 5, 9), (7, 11, 6)),
    ((9, 4, 5),),
    ((11, 10, 5), (7, 11, 5)),
    ((10, 5, 6),),
    ((7, 11, 6),),
    (),
)


def signed_volume(p0, p1, p2, p3):
    """Signed volume of tetrahedra; positive when ``p1-p0, p2-p0, p3-p0`` is right-handed."""
    p0 = np.asarray(p0, dtype=np.float64)
    u = np.asarray(p1) - p0
    v = np.asarray(p2) - p0
    w = np.asarray(p3) - p0
    return np.einsum("...i,...i->...", u, np.cross(v, w)) / 6.0


def _oriented(tets, coords):
    out = []
    for t in tets:
        t = list(t)
        if signed_volume(*coords[t]) < 0:
            t[2], t[3] = t[3], t[2]
        out.append(t)
    return np.array(out, dtype=np.int64)


def _pairs(tris, edges):
    """Pad edge-triples into a (ncase, maxtri, 3, 2) array of corner pairs."""
    ntri = np.array([len(t) for t in tris], dtype=np.int64)
    out = np.full((len(tris), max(1, ntri.max()), 3, 2), -1, dtype=np.int64)
    for case, entry in enumerate(tris):
        for s, tri in enumerate(entry):
            out[case, s] = [edges[e] for e in tri]
    return out, ntri


MC_PAIRS, MC_NTRI = _pairs(MC_TRIANGLES, [tuple(e) for e in EDGES])


def _tet_table():
    ref = np.array([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)], dtype=np.float64)
    table = []
    for case in range(16):
        above = [i for i in range(4) if case >> (3 - i) & 1]
        below = [i for i in range(4) if i not in above]
        tris = []
        if len(above) in (1, 3):
            s = above[0] if len(above) == 1 else below[0]
            others = [i for i in range(4) if i != s]
            tri = [(s, o) for o in others]
            mid = [(ref[a] + ref[b]) / 2 for a, b in tri]
            n = np.cross(mid[1] - mid[0], mid[2] - mid[0])
            toward_s = np.dot(n, ref[s] - mid[0]) > 0
            if toward_s != (len(above) == 1):
                tri[1], tri[2] = tri[2], tri[1]
            tris.append(tri)
        elif len(above) == 2:
            a, b = above
            c, d = below
            ring = [(a, c), (b, c), (b, d), (a, d)]
            up = (ref[a] + ref[b]) / 2
            for tri in ([ring[0], ring[1], ring[2]], [ring[0], ring[2], ring[3]]):
                mid = [(ref[u] + ref[v]) / 2 for u, v in tri]
                n = np.cross(mid[1] - mid[0], mid[2] - mid[0])
                if np.dot(n, up - sum(mid) / 3) < 0:
                    tri[1], tri[2] = tri[2], tri[1]
                tris.append(tri)
        table.append(tris)
    ntri = np.array([len(t) for t in table], dtype=np.int64)
    out = np.full((16, 2, 3, 2), -1, dtype=np.int64)
    for case, entry in enumerate(table):
        for s, tri in enumerate(entry):
            out[case, s] = tri
    return out, ntri


#: Tetra case table for positively oriented tetrahedra: (16, 2, 3, 2) vertex pairs.
TET_PAIRS, TET_NTRI = _tet_table()

_CORNER_F = CORNERS.astype(np.float64)

#: Five-tetra split, indexed by cell parity (i+j+k) % 2.  The central
#: tetrahedron is always spanned by the corners whose global coordinate sum is
#: even, so neighbouring cells pick the same diagonal on their shared face.
MT5_TETS = np.stack([
    _oriented([(0, 2, 5, 7), (1, 0, 2, 5), (3, 0, 2, 7), (4, 0, 5, 7), (6, 2, 5, 7)], _CORNER_F),
    _oriented([(1, 3, 4, 6), (0, 1, 3, 4), (2, 1, 3, 6), (5, 1, 4, 6), (7, 3, 4, 6)], _CORNER_F),
])

#: Six congruent tetrahedra around the A-G interior diagonal.
MT6_TETS = _oriented(
    [(0, 1, 2, 6), (0, 1, 5, 6), (0, 3, 2, 6), (0, 3, 7, 6), (0, 4, 5, 6), (0, 4, 7, 6)],
    _CORNER_F,
)

#: Corner cycles of the faces at -x, +x, -y, +y, -z, +z.
FACE_CYCLES = np.array([
    (0, 3, 7, 4), (1, 2, 6, 5),
    (0, 1, 5, 4), (3, 2, 6, 7),
    (0, 1, 2, 3), (4, 5, 6, 7),
], dtype=np.int64)

#: Local points of the centred-lattice split: corners 0-7, own centre 8 and the
#: neighbour centres 9-14 across the -x, +x, -y, +y, -z, +z faces.
CCL_POINTS = np.vstack([
    _CORNER_F,
    [(0.5, 0.5, 0.5)],
    [(-0.5, 0.5, 0.5), (1.5, 0.5, 0.5), (0.5, -0.5, 0.5), (0.5, 1.5, 0.5), (0.5, 0.5, -0.5), (0.5, 0.5, 1.5)],
])


def _ccl_face(face):
    cyc = FACE_CYCLES[face]
    return [(int(cyc[e]), int(cyc[(e + 1) % 4]), 8, 9 + face) for e in range(4)]


#: The four tetrahedra on each +axis face, refs 0-7 corners, 8 own centre,
#: 9 the neighbour centre along that axis.  Shape (3, 4, 4).
CCL_FACE_TETS = np.stack([
    np.where(t == 10 + 2 * axis, 9, t)
    for axis, t in enumerate(_oriented(_ccl_face(2 * axis + 1), CCL_POINTS) for axis in range(3))
])

#: All 24 tetrahedra incident to one cell, refs into CCL_POINTS.
CCL_TETS = _oriented(list(itertools.chain.from_iterable(_ccl_face(f) for f in range(6))), CCL_POINTS)
