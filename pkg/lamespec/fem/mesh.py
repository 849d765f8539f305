"""
Triangle meshes with the edge table needed by quadratic elements.

Meshes are built from structured templates (a rectangle, a polar disk) and affine
or radial maps of them. Vertex coordinates and triangles are stored as numpy arrays;
edges, boundary flags and the quadratic node numbering are derived on construction.
"""

import logging
import math
from pathlib import Path
from typing import Any, Callable, Dict, List

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.spatial import cKDTree
from typing_extensions import Self

from ..errors import DomainError, MeshError


logger = logging.getLogger(__name__)

DUPLICATE_TOL = 1e-12
# Local edge i of a triangle is the one opposite to local vertex i.
LOCAL_EDGES = np.array([[1, 2], [2, 0], [0, 1]])


class Mesh(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    vertices: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray
    triangle_edges: np.ndarray
    boundary_edge_flags: np.ndarray
    boundary_vertex_flags: np.ndarray

    def __init__(self, **data: Any) -> None:
        """
        Build a mesh from `vertices` and `triangles`; the edge table and boundary flags are
        derived unless given. Checks run outside pydantic validation so that callers see `MeshError`.
        """

        if 'edges' not in data:
            data = self._derive_topology(data['vertices'], data['triangles'])
        super().__init__(**data)
        self._check_geometry()

    @staticmethod
    def _derive_topology(vertices: Any, triangles: Any) -> Dict[str, np.ndarray]:
        """
        Derive the edge table and boundary flags from vertices and triangles.
        An edge is on the boundary iff exactly one triangle owns it.

        Args:
            vertices (Any): Vertex coordinates, shape (n, 2).
            triangles (Any): Vertex indices, shape (m, 3).

        Returns:
            (Dict[str, np.ndarray]): Constructor data with every derived array filled in.
        """

        vertices = np.ascontiguousarray(vertices, dtype=float)
        triangles = np.ascontiguousarray(triangles, dtype=np.int64)
        if vertices.ndim != 2 or vertices.shape[1] != 2:
            raise MeshError(f'Vertices must have shape (n, 2), got {vertices.shape}!')
        if triangles.ndim != 2 or triangles.shape[1] != 3 or not len(triangles):
            raise MeshError(f'Triangles must have shape (n, 3), got {triangles.shape}!')
        if triangles.min() < 0 or triangles.max() >= len(vertices):
            raise MeshError('Triangle indices out of range!')

        local = np.sort(triangles[:, LOCAL_EDGES], axis=2).reshape(-1, 2)
        edges, inverse, counts = np.unique(local, axis=0, return_inverse=True, return_counts=True)
        if counts.max() > 2:
            raise MeshError('An edge is shared by more than two triangles!')

        boundary_edges = counts == 1
        boundary_vertices = np.zeros(len(vertices), dtype=bool)
        boundary_vertices[edges[boundary_edges].ravel()] = True

        return {
            'vertices': vertices,
            'triangles': triangles,
            'edges': edges,
            'triangle_edges': inverse.reshape(-1, 3),
            'boundary_edge_flags': boundary_edges,
            'boundary_vertex_flags': boundary_vertices,
        }

    def _check_geometry(self) -> None:
        areas = self.signed_areas()
        if np.any(areas <= 0):
            raise MeshError(f'{int(np.sum(areas <= 0))} triangles are inverted or degenerate!')
        if cKDTree(self.vertices).query_pairs(DUPLICATE_TOL):
            raise MeshError('Mesh has duplicate vertices!')

    @classmethod
    def from_arrays(cls, vertices: np.ndarray, triangles: np.ndarray) -> Self:
        return cls(vertices=vertices, triangles=triangles)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def n_nodes(self) -> int:
        """Number of quadratic nodes: vertices, then edge midpoints."""
        return self.n_vertices + len(self.edges)

    def signed_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def area(self) -> float:
        return float(np.sum(self.signed_areas()))

    def nodes(self) -> np.ndarray:
        """Coordinates of the quadratic nodes."""
        midpoints = 0.5 * (self.vertices[self.edges[:, 0]] + self.vertices[self.edges[:, 1]])
        return np.vstack((self.vertices, midpoints))

    def node_boundary_flags(self) -> np.ndarray:
        return np.concatenate((self.boundary_vertex_flags, self.boundary_edge_flags))

    def local_nodes(self) -> np.ndarray:
        """Per triangle: three vertices, then the midpoints of edges opposite to vertices 0, 1, 2."""
        return np.hstack((self.triangles, self.n_vertices + self.triangle_edges))

    def map(self, transform: Callable[[np.ndarray], np.ndarray]) -> Self:
        """Move the vertices with `transform`, keeping the connectivity."""
        return self.__class__(vertices=transform(self.vertices.copy()), triangles=self.triangles)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mesh):
            return NotImplemented
        return np.array_equal(self.triangles, other.triangles) and np.allclose(
            self.vertices, other.vertices, rtol=0, atol=1e-12
        )

    __hash__ = None  # type: ignore[assignment]


def mesh_rectangle(L: float, ell: float, nx: int, ny: int) -> Mesh:
    """
    Structured mesh of `(0, L) x (0, ell)`: two triangles per cell, diagonals alternating
    like a checkerboard.

    Args:
        L (float): Width.
        ell (float): Height.
        nx (int): Cells along x, at least 2.
        ny (int): Cells along y, at least 2.

    Returns:
        (Mesh): The mesh, with `2 nx ny` triangles.
    """

    if L <= 0 or ell <= 0:
        raise MeshError(f'Rectangle sides must be positive, got {L} x {ell}!')
    if nx < 2 or ny < 2:
        raise MeshError(f'Need at least 2 cells per direction, got {nx} x {ny}!')

    xs, ys = np.linspace(0.0, L, nx + 1), np.linspace(0.0, ell, ny + 1)
    gx, gy = np.meshgrid(xs, ys)
    vertices = np.column_stack((gx.ravel(), gy.ravel()))

    i, j = np.meshgrid(np.arange(nx), np.arange(ny))
    i, j = i.ravel(), j.ravel()
    v00 = j * (nx + 1) + i
    v10, v01, v11 = v00 + 1, v00 + nx + 1, v00 + nx + 2

    even = (i + j) % 2 == 0
    first = np.where(even[:, None], np.column_stack((v00, v10, v11)), np.column_stack((v00, v10, v01)))
    second = np.where(even[:, None], np.column_stack((v00, v11, v01)), np.column_stack((v10, v11, v01)))
    return Mesh(vertices=vertices, triangles=np.vstack((first, second)))


def ring_sizes(n_r: int, n_t: int) -> List[int]:
    return [max(6, int(round(n_t * i / n_r))) for i in range(1, n_r + 1)]


def _stitch(inner: np.ndarray, outer: np.ndarray, inner_shift: int, outer_shift: int) -> List[List[int]]:
    # Angles are (2 q + shift) / (2 m) turns; compare them exactly as integers.
    m_in, m_out = len(inner), len(outer)
    triangles, p, q = [], 0, 0
    while p < m_in or q < m_out:
        outer_first = (2 * (q + 1) + outer_shift) * m_in <= (2 * (p + 1) + inner_shift) * m_out
        take_outer = q < m_out and (p == m_in or outer_first)
        if take_outer:
            triangles.append([inner[p % m_in], outer[q % m_out], outer[(q + 1) % m_out]])
            q += 1
        else:
            triangles.append([inner[p % m_in], outer[q % m_out], inner[(p + 1) % m_in]])
            p += 1
    return triangles


def mesh_ellipse(a: float, n_r: int, n_t: int) -> Mesh:
    """
    Polar mesh of the unit disk mapped by `diag(a, 1/a)` onto the ellipse with semi-axes `a`, `1/a`.

    Ring i sits at radius `i / n_r` and carries `max(6, round(n_t i / n_r))` vertices; odd rings
    are shifted by half a step. A fan closes the centre. Boundary vertices lie on the ellipse.

    Args:
        a (float): Semi-axis along x, positive.
        n_r (int): Number of rings, at least 3.
        n_t (int): Vertices on the outer ring, at least 8.

    Returns:
        (Mesh): The mesh. Its area is below pi since the boundary is inscribed.
    """

    if a <= 0:
        raise DomainError(f'Semi-axis must be positive, got {a}!')
    if n_r < 3 or n_t < 8:
        raise MeshError(f'Need n_r >= 3 and n_t >= 8, got n_r={n_r}, n_t={n_t}!')

    sizes = ring_sizes(n_r, n_t)
    points = [np.zeros((1, 2))]
    rings = [np.array([0])]
    shifts = [0]
    start = 1
    for i, m in enumerate(sizes, start=1):
        shift = i % 2
        theta = 2.0 * math.pi * (np.arange(m) + 0.5 * shift) / m
        points.append((i / n_r) * np.column_stack((np.cos(theta), np.sin(theta))))
        rings.append(np.arange(start, start + m))
        shifts.append(shift)
        start += m

    triangles = [[0, ring[q], ring[(q + 1) % len(ring)]] for ring in rings[1:2] for q in range(len(ring))]
    for i in range(1, n_r):
        triangles.extend(_stitch(rings[i], rings[i + 1], shifts[i], shifts[i + 1]))

    vertices = np.vstack(points) * np.array([a, 1.0 / a])
    triangles = np.asarray(triangles, dtype=np.int64)

    # Walk triangles that came out clockwise get their last two vertices swapped.
    p = vertices[triangles]
    d1, d2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
    signed = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    flip = signed < 0
    triangles[flip] = triangles[flip][:, [0, 2, 1]]

    mesh = Mesh(vertices=vertices, triangles=triangles)
    logger.debug(
        'Ellipse mesh a=%g: %d vertices, %d triangles, area deficit %.3e',
        a,
        mesh.n_vertices,
        mesh.n_triangles,
        math.pi - mesh.area(),
    )
    return mesh


def mesh_affine_map(mesh: Mesh, J: np.ndarray, shift: np.ndarray | None = None) -> Mesh:
    """
    Image of a mesh under `X -> J X + shift`. Orientation is restored when `det J < 0`.

    Args:
        mesh (Mesh): Source mesh.
        J (np.ndarray): 2x2 matrix with nonzero determinant.
        shift (np.ndarray | None): Translation.

    Returns:
        (Mesh): The mapped mesh.
    """

    J = np.asarray(J, dtype=float)
    det = float(np.linalg.det(J))
    if abs(det) < 1e-14:
        raise MeshError(f'Affine map is singular (det={det:.3e})!')
    offset = np.zeros(2) if shift is None else np.asarray(shift, dtype=float)

    vertices = mesh.vertices @ J.T + offset
    triangles = mesh.triangles if det > 0 else mesh.triangles[:, [0, 2, 1]]
    return Mesh(vertices=vertices, triangles=triangles)


def write_mesh(mesh: Mesh, path: str | Path) -> None:
    """
    Write a mesh as text: `NV NT`, then NV lines `x y boundary_flag`, then NT lines `i j k` (0-based).

    Args:
        mesh (Mesh): The mesh.
        path (str | Path): Destination file.
    """

    lines = [f'{mesh.n_vertices} {mesh.n_triangles}']
    lines.extend(
        f'{x!r} {y!r} {int(flag)}' for (x, y), flag in zip(mesh.vertices.tolist(), mesh.boundary_vertex_flags)
    )
    lines.extend(f'{i} {j} {k}' for i, j, k in mesh.triangles.tolist())
    Path(path).write_text('\n'.join(lines) + '\n')


def read_mesh(path: str | Path) -> Mesh:
    """
    Read a mesh written by `write_mesh`. Boundary flags in the file must agree with the
    flags derived from the triangles.

    Args:
        path (str | Path): Source file.

    Returns:
        (Mesh): The mesh.
    """

    rows = [line.split() for line in Path(path).read_text().splitlines() if line.strip()]
    try:
        n_vertices, n_triangles = int(rows[0][0]), int(rows[0][1])
        vertex_rows = rows[1 : 1 + n_vertices]
        triangle_rows = rows[1 + n_vertices : 1 + n_vertices + n_triangles]
        vertices = np.array([[float(r[0]), float(r[1])] for r in vertex_rows])
        flags = np.array([bool(int(r[2])) for r in vertex_rows])
        triangles = np.array([[int(v) for v in r[:3]] for r in triangle_rows], dtype=np.int64)
    except (IndexError, ValueError) as exc:
        raise MeshError(f'Malformed mesh file {path}: {exc}') from exc

    if len(vertices) != n_vertices or len(triangles) != n_triangles:
        raise MeshError(f'Mesh file {path} is truncated!')

    mesh = Mesh(vertices=vertices, triangles=triangles)
    if not np.array_equal(flags, mesh.boundary_vertex_flags):
        raise MeshError(f'Boundary flags in {path} disagree with the triangulation!')
    return mesh
