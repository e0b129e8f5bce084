"""Triangle-mesh container and a minimal OBJ reader (v / vt / f subset)."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateMesh, ParseError


@dataclass
class TriMesh:
    """Triangulated mesh. vertices (V,3) meters, faces (F,3) int, uv (V,2) or None."""
    vertices: np.ndarray
    faces: np.ndarray
    uv: Optional[np.ndarray] = None

    def copy(self):
        return TriMesh(self.vertices.copy(), self.faces.copy(),
                       None if self.uv is None else self.uv.copy())


def _triangulate(corners):
    """Fan-split a polygon given as an index list: 0-1-2, 0-2-3, ..."""
    return [(corners[0], corners[i], corners[i + 1]) for i in range(1, len(corners) - 1)]


def load_object_mesh(path):
    """Parse an OBJ file (v / vt / f records only) into a TriMesh.

    Polygons with more than three corners are fan-triangulated
    deterministically (0-1-2 / 0-2-3 / ...). When per-corner texture indices
    disagree with a per-vertex assignment, vertices are split so the result
    carries one UV per vertex.

    Raises:
        ParseError: file unreadable or a malformed record.
        DegenerateMesh: no faces after parsing.
    """
    try:
        with open(path, "r") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ParseError(f"cannot read OBJ file {path}: {exc}") from exc

    positions = []
    texcoords = []
    corner_faces = []  # list of [(v_idx, vt_idx or None), ...]
    for lineno, line in enumerate(lines, start=1):
        tokens = line.split()
        if not tokens or tokens[0].startswith("#"):
            continue
        tag = tokens[0]
        try:
            if tag == "v":
                positions.append([float(x) for x in tokens[1:4]])
            elif tag == "vt":
                texcoords.append([float(x) for x in tokens[1:3]])
            elif tag == "f":
                corners = []
                for ref in tokens[1:]:
                    parts = ref.split("/")
                    vi = int(parts[0])
                    ti = int(parts[1]) if len(parts) > 1 and parts[1] != "" else None
                    corners.append((vi, ti))
                if len(corners) < 3:
                    raise ValueError("face with fewer than 3 corners")
                corner_faces.append(corners)
        except (ValueError, IndexError) as exc:
            raise ParseError(f"{path}:{lineno}: bad OBJ record {line.strip()!r}") from exc

    if not corner_faces:
        raise DegenerateMesh(f"{path}: no faces")
    if not positions:
        raise ParseError(f"{path}: faces reference vertices but no 'v' records present")

    positions = np.asarray(positions, dtype=np.float64)
    texcoords = np.asarray(texcoords, dtype=np.float64) if texcoords else None
    nv = len(positions)

    def resolve(idx, count):
        # OBJ indices are 1-based; negative indices count from the end
        j = idx - 1 if idx > 0 else count + idx
        if j < 0 or j >= count:
            raise ParseError(f"{path}: index {idx} out of range")
        return j

    # original vertex order is preserved; a vertex is split only when two
    # corners disagree on its texture coordinate
    has_uv = texcoords is not None
    out_vertices = list(positions)
    vert_uv_idx = [None] * nv          # per output vertex: assigned vt index
    split_of = {}                      # (v, t) -> split vertex id
    faces = []
    for corners in corner_faces:
        resolved = []
        for vi, ti in corners:
            v = resolve(vi, nv)
            t = resolve(ti, len(texcoords)) if (ti is not None and has_uv) else None
            if vert_uv_idx[v] is None or vert_uv_idx[v] == t:
                vert_uv_idx[v] = t
                resolved.append(v)
            elif (v, t) in split_of:
                resolved.append(split_of[(v, t)])
            else:
                split_of[(v, t)] = len(out_vertices)
                out_vertices.append(positions[v])
                vert_uv_idx.append(t)
                resolved.append(split_of[(v, t)])
        faces.extend(_triangulate(resolved))

    uv = None
    if has_uv:
        uv = np.array([texcoords[t] if t is not None else (0.0, 0.0)
                       for t in vert_uv_idx], dtype=np.float64)
    return TriMesh(np.asarray(out_vertices, dtype=np.float64),
                   np.asarray(faces, dtype=np.int32), uv)
