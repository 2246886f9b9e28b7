"""Meshes, CSV tables and JSON reports with deterministic formatting."""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .holofn import Disk, DomainSpec, Polygon, evaluate
from .weierstrass import DeformParams, WeierstrassData, surface_point

DEGENERATE_AREA = 1e-14
# disks are meshed up to this fraction of the radius; boundary values may be singular
DISK_MESH_EXTENT = 1 - 1e-3


def fmt(x) -> str:
    """17 significant digits, so values round-trip exactly."""
    x = float(x)
    if x == 0:
        return "0"
    return format(x, ".17g")


def _clean(obj):
    """Recursively convert numpy scalars and complex numbers for JSON output."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dump_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# domain grids


@dataclass
class ParamGrid:
    points: np.ndarray  # complex parameter values
    faces: np.ndarray  # (k, 3) zero-based
    kind: str
    shape: tuple


def domain_grid(domain: DomainSpec, N: int = 96) -> ParamGrid:
    """Triangulated parameter grid.

    Disks get a polar grid of ``N`` rings and ``round(8N/3)`` spokes (96 x 256
    by default); rectangles an ``N x N`` lattice; polygons a lattice masked to
    the interior.
    """
    if N < 2:
        raise ValueError("grid size must be at least 2")
    if isinstance(domain, Disk):
        spokes = max(3, round(8 * N / 3))
        r = domain.radius * DISK_MESH_EXTENT * np.arange(1, N + 1) / N
        phi = 2 * np.pi * np.arange(spokes) / spokes
        rings = (r[:, None] * np.exp(1j * phi[None, :])).ravel()
        pts = np.concatenate([[0j], rings])
        faces = []
        j = np.arange(spokes)
        jn = (j + 1) % spokes
        faces.append(np.column_stack([np.zeros(spokes, int), 1 + j, 1 + jn]))
        for i in range(N - 1):
            a, b = 1 + i * spokes, 1 + (i + 1) * spokes
            faces.append(np.column_stack([a + j, b + j, b + jn]))
            faces.append(np.column_stack([a + j, b + jn, a + jn]))
        return ParamGrid(pts, np.concatenate(faces), "polar", (N, spokes))

    x0, x1, y0, y1 = domain.bbox
    inset = 1e-9 * domain.diameter
    xs = np.linspace(x0 + inset, x1 - inset, N + 1)
    ys = np.linspace(y0 + inset, y1 - inset, N + 1)
    W = (xs[None, :] + 1j * ys[:, None]).ravel()
    idx = np.arange(W.size).reshape(N + 1, N + 1)
    a, b = idx[:-1, :-1].ravel(), idx[:-1, 1:].ravel()
    c, d = idx[1:, 1:].ravel(), idx[1:, :-1].ravel()
    faces = np.concatenate([np.column_stack([a, b, c]), np.column_stack([a, c, d])])
    kind = "rectangular"
    if isinstance(domain, Polygon):
        kind = "masked"
        keep = domain.contains(W)
        faces = faces[keep[faces].all(axis=1)]
        used = np.unique(faces)
        remap = -np.ones(W.size, dtype=int)
        remap[used] = np.arange(used.size)
        W, faces = W[used], remap[faces]
    return ParamGrid(W, faces, kind, (N + 1, N + 1))


# ---------------------------------------------------------------------------
# meshes


@dataclass
class Mesh:
    vertices: np.ndarray  # (k, 3)
    faces: np.ndarray  # (m, 3) zero-based
    singular: np.ndarray  # zero-based vertex indices on the singular set
    meta: dict = field(default_factory=dict)


def _triangle_areas(V: np.ndarray, faces: np.ndarray) -> np.ndarray:
    a, b, c = V[faces[:, 0]], V[faces[:, 1]], V[faces[:, 2]]
    return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)


def surface_mesh(data: WeierstrassData, p: DeformParams, N: int = 96,
                 meta: dict | None = None) -> Mesh:
    """Triangulated surface X_{theta,lambda,c} over a parameter grid.

    Triangles of area <= 1e-14 are dropped. A vertex is flagged singular
    when 1 + c lambda^2 |G|^2 changes sign across one of its edges (the
    vertex closer to the zero set is flagged) or F vanishes there.
    """
    grid = domain_grid(data.domain, N)
    sp = surface_point(data, p, grid.points)
    V = np.column_stack([sp.horizontal.real, sp.horizontal.imag, sp.height])
    if not np.all(np.isfinite(V)):
        raise FloatingPointError("non-finite surface values on the mesh grid")
    faces = grid.faces[_triangle_areas(V, grid.faces) > DEGENERATE_AREA]

    k = p.c * p.lam**2
    s = 1 + k * np.abs(evaluate(data.G, grid.points)) ** 2
    Fv = np.abs(evaluate(data.F, grid.points))
    flag = Fv <= 1e-12 * max(np.median(Fv), 1e-300)
    edges = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    flip = np.sign(s[edges[:, 0]]) != np.sign(s[edges[:, 1]])
    for i, j in edges[flip]:
        flag[i if abs(s[i]) <= abs(s[j]) else j] = True
    info = {"vertices": len(V), "faces": len(faces), "grid": f"{grid.kind} {grid.shape[0]}x{grid.shape[1]}",
            "degenerate_dropped": len(grid.faces) - len(faces),
            "singular_vertices": int(flag.sum())}
    info.update(meta or {})
    return Mesh(V, faces, np.flatnonzero(flag), info)


def mesh_text(mesh: Mesh) -> str:
    out = io.StringIO()
    for key, val in mesh.meta.items():
        out.write(f"# {key} {_meta_value(val)}\n")
    for x, y, t in mesh.vertices:
        out.write(f"v {fmt(x)} {fmt(y)} {fmt(t)}\n")
    for i, j, k in mesh.faces + 1:
        out.write(f"f {i} {j} {k}\n")
    return out.getvalue()


def singular_text(mesh: Mesh) -> str:
    out = io.StringIO()
    out.write("# 1-based indices of vertices on the singular set\n")
    for i in mesh.singular:
        x, y, t = mesh.vertices[i]
        out.write(f"{i + 1} {fmt(x)} {fmt(y)} {fmt(t)}\n")
    return out.getvalue()


def _meta_value(val) -> str:
    if isinstance(val, float):
        return fmt(val)
    if isinstance(val, (dict, list)):
        return json.dumps(_clean(val), sort_keys=True)
    return str(val)


def read_mesh(text: str) -> tuple[np.ndarray, np.ndarray, dict]:
    """Parse the text mesh format back into (vertices, zero-based faces, meta)."""
    V, Fc, meta = [], [], {}
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, val = line[2:].partition(" ")
            meta[key] = val
        elif line.startswith("v "):
            V.append([float(x) for x in line.split()[1:4]])
        elif line.startswith("f "):
            Fc.append([int(x) - 1 for x in line.split()[1:4]])
    return np.array(V), np.array(Fc, dtype=int).reshape(-1, 3), meta


# ---------------------------------------------------------------------------
# tables


REGION_COLUMNS = ("theta", "rho", "c_sign", "certificate", "oracle")


def region_csv(rows) -> str:
    out = io.StringIO()
    out.write(",".join(REGION_COLUMNS) + "\n")
    for r in rows:
        out.write(f"{fmt(r.theta)},{fmt(r.rho)},{r.c_sign:d},{r.certificate},{r.oracle}\n")
    return out.getvalue()
