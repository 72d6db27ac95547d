"""Closed triangulated surfaces with conformal densities and cone points.

A :class:`Mesh` stores combinatorics (triangles) and an *intrinsic* geometry
given by the three edge lengths of every triangle.  Meshes that carry a map to
the unit sphere (``projection``) can be flagged ``spherical``: their intrinsic
geometry is then the round metric pulled back through the projection, so areas
and angles are measured on geodesic triangles of the sphere.

Conformal densities are always relative to the mesh's *reference metric*,
``g_ref = g_intrinsic / s**2`` where ``s`` is the per-vertex ``ref_scale``
(identically one except near the branch points of glued covers, where it makes
the reference metric smooth).  A density ``f`` describes the metric
``f**2 * g_ref``.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

__all__ = [
    "BranchedCoverSpec",
    "ConformalDensity",
    "Mesh",
    "MeshError",
    "build_flat_torus",
    "build_hyperelliptic_cover",
    "build_octasphere",
    "build_sphere",
    "power_map_sphere",
    "pullback_density",
    "read_off",
    "write_off",
]


class MeshError(ValueError):
    """Invalid mesh input or construction request."""


def _frozen(a, dtype):
    if a is None:
        return None
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


# --------------------------------------------------------------------------
# geometry helpers
# --------------------------------------------------------------------------


def _lengths_from_positions(P: np.ndarray, T: np.ndarray) -> np.ndarray:
    a, b, c = P[T[:, 0]], P[T[:, 1]], P[T[:, 2]]
    return np.stack(
        [np.linalg.norm(c - b, axis=1), np.linalg.norm(a - c, axis=1), np.linalg.norm(b - a, axis=1)],
        axis=1,
    )


def _heron(L: np.ndarray) -> np.ndarray:
    a, b, c = np.sort(L, axis=1)[:, ::-1].T
    # numerically stable Heron (Kahan)
    q = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
    return 0.25 * np.sqrt(np.clip(q, 0.0, None))


def _flat_angles(L: np.ndarray) -> np.ndarray:
    """Interior angles at the three corners from the opposite edge lengths."""
    a, b, c = L[:, 0], L[:, 1], L[:, 2]
    ca = (b**2 + c**2 - a**2) / (2 * b * c)
    cb = (a**2 + c**2 - b**2) / (2 * a * c)
    cc = (a**2 + b**2 - c**2) / (2 * a * b)
    return np.arccos(np.clip(np.stack([ca, cb, cc], axis=1), -1.0, 1.0))


def _spherical_areas(A: np.ndarray, B: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Areas of geodesic triangles with unit-vector corners (spherical excess)."""
    # a.(b x c) written with edge vectors: no cancellation for tiny triangles
    num = np.abs(np.einsum("ij,ij->i", A, np.cross(B - A, C - A)))
    den = 1.0 + np.einsum("ij,ij->i", A, B) + np.einsum("ij,ij->i", B, C) + np.einsum("ij,ij->i", C, A)
    return 2.0 * np.arctan2(num, den)


def _spherical_angle(A: np.ndarray, B: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Angle at ``A`` between the great-circle arcs ``AB`` and ``AC``."""
    tb = B - np.einsum("ij,ij->i", A, B)[:, None] * A
    tc = C - np.einsum("ij,ij->i", A, C)[:, None] * A
    cos = np.einsum("ij,ij->i", tb, tc)
    sin = np.linalg.norm(np.cross(tb, tc), axis=1)
    return np.arctan2(sin, cos)


# --------------------------------------------------------------------------
# Mesh
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Mesh:
    """Closed oriented triangle mesh with intrinsic edge lengths.

    Parameters
    ----------
    triangles : (F, 3) int array
        Vertex indices, consistently oriented.
    lengths : (F, 3) float array
        ``lengths[t, k]`` is the length of the edge of triangle ``t`` opposite
        its ``k``-th corner.
    n_vertices : int
    vertices : (V, 3) float array, optional
        Positions used for export and for deriving lengths; may be a flat
        fundamental-domain layout for tori.
    cone_points : dict
        ``vertex -> k`` for a cone point of total angle ``2*pi*k``.
    projection : (V, 3) float array, optional
        Unit vectors: a map from the surface to the round sphere.
    spherical : bool
        Intrinsic geometry is the pullback of the round metric through
        ``projection`` (areas and angles are spherical).
    ref_scale : (V,) float array, optional
        Reference metric is ``g_intrinsic / ref_scale**2``; default ones.
    involution : (V,) int array, optional
        Deck transformation of a double cover.
    declared_genus : int, optional
        Genus implied by the construction, checked against ``V - E + F``.
    snap_distance : float
        Largest chordal distance moved when snapping requested points to
        vertices.
    """

    triangles: np.ndarray
    lengths: np.ndarray
    n_vertices: int
    vertices: np.ndarray | None = None
    cone_points: dict = field(default_factory=dict)
    projection: np.ndarray | None = None
    spherical: bool = False
    ref_scale: np.ndarray | None = None
    involution: np.ndarray | None = None
    declared_genus: int | None = None
    snap_distance: float = 0.0
    name: str = "mesh"

    def __post_init__(self):
        T = _frozen(self.triangles, np.int64)
        L = _frozen(self.lengths, float)
        if T.ndim != 2 or T.shape[1] != 3 or L.shape != T.shape:
            raise MeshError("triangles and lengths must both have shape (F, 3)")
        object.__setattr__(self, "triangles", T)
        object.__setattr__(self, "lengths", L)
        for name in ("vertices", "projection", "ref_scale"):
            object.__setattr__(self, name, _frozen(getattr(self, name), float))
        object.__setattr__(self, "involution", _frozen(self.involution, np.int64))
        object.__setattr__(self, "cone_points", {int(v): int(k) for v, k in dict(self.cone_points).items()})
        if self.spherical and self.projection is None:
            raise MeshError("a spherical mesh needs a projection")
        self._check()

    # -- topology ----------------------------------------------------------

    @property
    def V(self) -> int:
        return self.n_vertices

    @property
    def F(self) -> int:
        return len(self.triangles)

    @property
    def edges(self) -> np.ndarray:
        """Unique undirected edges as sorted pairs, shape ``(E, 2)``."""
        T = self.triangles
        e = np.concatenate([T[:, [0, 1]], T[:, [1, 2]], T[:, [2, 0]]])
        return np.unique(np.sort(e, axis=1), axis=0)

    @property
    def E(self) -> int:
        return len(self.edges)

    @property
    def euler_characteristic(self) -> int:
        return self.V - self.E + self.F

    @property
    def genus(self) -> int:
        return (2 - self.euler_characteristic) // 2

    def _check(self) -> None:
        T = self.triangles
        if T.min(initial=0) < 0 or T.max(initial=-1) >= self.n_vertices:
            raise MeshError("triangle index out of range")
        if np.unique(T).size != self.n_vertices:
            raise MeshError("mesh has isolated vertices")
        if np.any((T[:, 0] == T[:, 1]) | (T[:, 1] == T[:, 2]) | (T[:, 0] == T[:, 2])):
            raise MeshError("degenerate triangle (repeated vertex)")
        directed = np.concatenate([T[:, [0, 1]], T[:, [1, 2]], T[:, [2, 0]]])
        if len(np.unique(directed, axis=0)) != len(directed):
            raise MeshError("inconsistent orientation or non-manifold edge")
        und = np.sort(directed, axis=1)
        _, counts = np.unique(und, axis=0, return_counts=True)
        if np.any(counts != 2):
            raise MeshError("surface is not closed: every edge needs exactly two triangles")
        if np.any(self.triangle_areas() <= 0):
            raise MeshError("triangle with non-positive area")
        if self.declared_genus is not None and self.genus != self.declared_genus:
            raise MeshError(
                f"Euler characteristic {self.euler_characteristic} contradicts declared genus {self.declared_genus}"
            )

    # -- geometry ------------------------------------------------------------

    def triangle_areas(self) -> np.ndarray:
        """Intrinsic triangle areas (spherical excess for spherical meshes)."""
        if self.spherical:
            P, T = self.projection, self.triangles
            return _spherical_areas(P[T[:, 0]], P[T[:, 1]], P[T[:, 2]])
        return _heron(self.lengths)

    def flat_areas(self) -> np.ndarray:
        return _heron(self.lengths)

    def corner_angles(self) -> np.ndarray:
        """Intrinsic interior angles, shape ``(F, 3)``."""
        if self.spherical:
            P, T = self.projection, self.triangles
            a, b, c = P[T[:, 0]], P[T[:, 1]], P[T[:, 2]]
            return np.stack([_spherical_angle(a, b, c), _spherical_angle(b, c, a), _spherical_angle(c, a, b)], axis=1)
        return _flat_angles(self.lengths)

    def angle_sums(self) -> np.ndarray:
        """Total intrinsic angle around every vertex."""
        return np.bincount(self.triangles.ravel(), weights=self.corner_angles().ravel(), minlength=self.V)

    def area(self) -> float:
        return float(self.triangle_areas().sum())

    @property
    def scale(self) -> np.ndarray:
        return self.ref_scale if self.ref_scale is not None else np.ones(self.V)

    def reference_areas(self) -> np.ndarray:
        """Triangle areas in the reference metric (one-point rule for the scale)."""
        s = self.scale[self.triangles].mean(axis=1)
        return self.triangle_areas() / s**2

    def adjacency(self) -> sparse.csr_matrix:
        e = self.edges
        n = self.V
        A = sparse.coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n))
        return (A + A.T).tocsr()

    def is_connected(self) -> bool:
        return csgraph.connected_components(self.adjacency(), directed=False)[0] == 1

    def mean_edge_length(self) -> float:
        return float(self.lengths.mean())

    def cone_angle_errors(self) -> np.ndarray:
        """``angle_sum - 2*pi*k`` per vertex (``k = 1`` off the cone points)."""
        k = np.ones(self.V)
        for v, m in self.cone_points.items():
            k[v] = m
        return self.angle_sums() - 2 * np.pi * k

    def replace(self, **changes) -> "Mesh":
        kw = {f: getattr(self, f) for f in self.__dataclass_fields__}
        kw.update(changes)
        return Mesh(**kw)

    def __repr__(self) -> str:
        return f"Mesh({self.name!r}, V={self.V}, E={self.E}, F={self.F}, chi={self.euler_characteristic}, cones={len(self.cone_points)})"


# --------------------------------------------------------------------------
# densities
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ConformalDensity:
    """Per-vertex conformal factor ``f >= 0``; the metric is ``f**2 g_ref``.

    Zeros must be isolated: no two adjacent vertices may both vanish.
    """

    values: np.ndarray
    mesh: Mesh | None = None

    def __post_init__(self):
        f = _frozen(self.values, float)
        if f.ndim != 1:
            raise MeshError("density must be one value per vertex")
        if not np.all(np.isfinite(f)) or np.any(f < 0):
            raise MeshError("density must be finite and non-negative")
        object.__setattr__(self, "values", f)
        if self.mesh is not None:
            if len(f) != self.mesh.V:
                raise MeshError(f"density has {len(f)} values, mesh has {self.mesh.V} vertices")
            e = self.mesh.edges
            if np.any((f[e[:, 0]] == 0) & (f[e[:, 1]] == 0)):
                raise MeshError("non-isolated zero: adjacent vertices both have zero density")

    @property
    def zero_set(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.values == 0)]

    @classmethod
    def constant(cls, mesh: Mesh, c: float = 1.0) -> "ConformalDensity":
        return cls(np.full(mesh.V, float(c)), mesh)

    def scaled(self, t: float) -> "ConformalDensity":
        return ConformalDensity(self.values * t, self.mesh)

    def to_json(self) -> dict:
        return {"density": self.values.tolist()}


def _one_ring_jacobian_norm2(mesh: Mesh) -> np.ndarray:
    """``|d phi|**2`` per vertex (intrinsic metric), by a least-squares fit of
    the differential of the projection on every one-ring.

    Domain edge vectors are rebuilt in a local frame from the intrinsic
    lengths of the first incident triangle and the positions of the
    remaining ring vertices; positions are required (``vertices``).
    """
    if mesh.vertices is None:
        raise MeshError("fitting the differential needs vertex positions")
    X, Y = mesh.vertices, mesh.projection
    nbr = mesh.adjacency()
    out = np.empty(mesh.V)
    for v in range(mesh.V):
        ring = nbr.indices[nbr.indptr[v] : nbr.indptr[v + 1]]
        dX = X[ring] - X[v]
        # tangent frame of the domain from the ring's principal directions
        _, _, Vt = np.linalg.svd(dX, full_matrices=False)
        E = dX @ Vt[:2].T
        dY = Y[ring] - Y[v]
        dY = dY - np.outer(dY @ Y[v], Y[v])
        J, *_ = np.linalg.lstsq(E, dY, rcond=None)
        out[v] = float(np.sum(J**2))
    return out


def pullback_density(mesh: Mesh) -> ConformalDensity:
    """Density of the round metric pulled back through ``mesh.projection``.

    For spherical meshes (glued covers, the round sphere) this is exactly the
    reference scale: the metric ``f**2 g_ref`` is then the intrinsic spherical
    metric.  For a general map the squared density at a vertex is the ratio of
    image area to reference area over its one-ring.  Declared cone points are
    the zero set.

    Raises
    ------
    MeshError
        If the mesh carries no projection.
    """
    if mesh.projection is None:
        raise MeshError("mesh has no projection to the sphere")
    if mesh.spherical:
        f = np.array(mesh.scale, dtype=float)
    else:
        f = np.sqrt(0.5 * _one_ring_jacobian_norm2(mesh)) * mesh.scale
    for v in mesh.cone_points:
        f[v] = 0.0
    return ConformalDensity(f, mesh)


# --------------------------------------------------------------------------
# builders
# --------------------------------------------------------------------------


def _sphere_mesh(P: np.ndarray, T: np.ndarray, name: str) -> Mesh:
    P = P / np.linalg.norm(P, axis=1)[:, None]
    return Mesh(
        triangles=T,
        lengths=_lengths_from_positions(P, T),
        n_vertices=len(P),
        vertices=P,
        projection=P,
        spherical=True,
        declared_genus=0,
        name=name,
    )


def build_sphere(refinement: int) -> Mesh:
    """Icosahedral sphere with ``refinement`` rounds of quadrisection.

    The mesh carries the identity projection and is spherical, so its total
    area is exactly ``4*pi``.  ``V = 10*4**r + 2`` and ``F = 20*4**r``.
    """
    if refinement < 0:
        raise MeshError("refinement must be >= 0")
    t = (1 + 5**0.5) / 2
    P = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0), (0, -1, t), (0, 1, t),
         (0, -1, -t), (0, 1, -t), (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    T = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11), (1, 5, 9), (5, 11, 4),
         (11, 10, 2), (10, 7, 6), (7, 1, 8), (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8),
         (3, 8, 9), (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    P = np.array(P, float)
    P /= np.linalg.norm(P, axis=1)[:, None]
    T = np.array(T, np.int64)
    for _ in range(refinement):
        P, T = _quadrisect(P, T)
    return _sphere_mesh(P, T, f"icosphere-{refinement}")


def _quadrisect(P, T):
    e = np.concatenate([T[:, [0, 1]], T[:, [1, 2]], T[:, [2, 0]]])
    e = np.sort(e, axis=1)
    uniq, inv = np.unique(e, axis=0, return_inverse=True)
    mid = P[uniq[:, 0]] + P[uniq[:, 1]]
    mid /= np.linalg.norm(mid, axis=1)[:, None]
    n = len(P)
    F = len(T)
    inv = inv.ravel()
    m01, m12, m20 = inv[:F] + n, inv[F : 2 * F] + n, inv[2 * F :] + n
    a, b, c = T.T
    T2 = np.concatenate(
        [np.stack(x, axis=1) for x in ((a, m01, m20), (b, m12, m01), (c, m20, m12), (m01, m12, m20))]
    )
    return np.concatenate([P, mid]), T2


def build_octasphere(n: int) -> Mesh:
    """Octahedron with every face split into an ``n x n`` triangular grid,
    projected to the unit sphere.

    The six points ``±e_i`` are vertices for every ``n``; the eight points
    ``(±1, ±1, ±1)/sqrt(3)`` are vertices when ``3 | n``.  Octahedron edges
    map onto great-circle arcs made of mesh edges.
    """
    if n < 1:
        raise MeshError("n must be >= 1")
    index: dict[tuple, int] = {}
    pts: list = []
    tris: list = []

    def vid(key):
        if key not in index:
            index[key] = len(pts)
            pts.append(key)
        return index[key]

    I = np.eye(3, dtype=np.int64)
    for sx in (1, -1):
        for sy in (1, -1):
            for sz in (1, -1):
                a, b, c = sx * I[0], sy * I[1], sz * I[2]
                if np.dot(np.cross(b - a, c - a), a + b + c) < 0:
                    b, c = c, b
                grid = {}
                for p in range(n + 1):
                    for q in range(n + 1 - p):
                        grid[p, q] = vid(tuple((n - p - q) * a + p * b + q * c))
                for p in range(n):
                    for q in range(n - p):
                        tris.append((grid[p, q], grid[p + 1, q], grid[p, q + 1]))
                        if p + q <= n - 2:
                            tris.append((grid[p + 1, q], grid[p + 1, q + 1], grid[p, q + 1]))
    P = np.array(pts, float)
    return _sphere_mesh(P, np.array(tris, np.int64), f"octasphere-{n}")


def build_flat_torus(tau: complex, n: int) -> Mesh:
    """Flat torus ``C / (Z + tau Z)`` on an ``n x n`` grid.

    Each cell is split along its shorter diagonal, so the equilateral
    modulus ``exp(i pi/3)`` yields equilateral triangles.  Total area is
    ``Im(tau)``.  Vertices are laid out in the fundamental domain (``z = 0``)
    for export; the intrinsic lengths are the lattice lengths.
    """
    tau = complex(tau)
    if tau.imag <= 0:
        raise MeshError("Im(tau) must be positive")
    if n < 3:
        raise MeshError("n must be >= 3")
    idx = lambda i, j: (i % n) * n + (j % n)
    long_diag = abs(1 + tau) > abs(tau - 1)
    tris, vecs = [], []
    for i in range(n):
        for j in range(n):
            v00, v10, v01, v11 = idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1)
            if not long_diag:
                tris += [(v00, v10, v11), (v00, v11, v01)]
                vecs += [(0, 1, 1 + tau), (0, 1 + tau, tau)]
            else:
                tris += [(v00, v10, v01), (v10, v11, v01)]
                vecs += [(0, 1, tau), (1, 1 + tau, tau)]
    Z = np.array(vecs, complex) / n
    L = np.abs(np.stack([Z[:, 2] - Z[:, 1], Z[:, 0] - Z[:, 2], Z[:, 1] - Z[:, 0]], axis=1))
    grid = np.array([(i + j * tau) / n for i in range(n) for j in range(n)])
    verts = np.stack([grid.real, grid.imag, np.zeros(n * n)], axis=1)
    return Mesh(
        triangles=np.array(tris, np.int64),
        lengths=L,
        n_vertices=n * n,
        vertices=verts,
        declared_genus=1,
        name=f"flat-torus(tau={tau.real:.6g}{tau.imag:+.6g}i, n={n})",
    )


def _stereo(P: np.ndarray) -> np.ndarray:
    """Stereographic coordinate from the north pole (``z = 0`` is the south pole)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return (P[:, 0] + 1j * P[:, 1]) / (1 - P[:, 2])


def _inverse_stereo(z: np.ndarray) -> np.ndarray:
    out = np.empty((len(z), 3))
    inf = ~np.isfinite(z)
    zz = np.where(inf, 0, z)
    r2 = np.abs(zz) ** 2
    out[:, 0] = 2 * zz.real / (1 + r2)
    out[:, 1] = 2 * zz.imag / (1 + r2)
    out[:, 2] = (r2 - 1) / (r2 + 1)
    out[inf] = (0.0, 0.0, 1.0)
    return out


def power_map_sphere(n: int, d: int) -> Mesh:
    """Round octasphere carrying the projection ``z -> z**d``.

    The poles are vertices and become cone points of angle ``2*pi*d`` for
    the pulled-back metric (branch points of order ``d - 1``).
    """
    if d < 1:
        raise MeshError("degree must be >= 1")
    base = build_octasphere(n)
    P = np.array(base.projection)
    z = _stereo(P)
    south, north = int(np.argmin(P[:, 2])), int(np.argmax(P[:, 2]))
    z[north] = np.inf
    w = np.where(np.isfinite(z), np.power(np.where(np.isfinite(z), z, 0), d), np.inf)
    cones = {south: d, north: d} if d > 1 else {}
    return base.replace(
        projection=_inverse_stereo(w), spherical=False, cone_points=cones, name=f"z^{d} on {base.name}"
    )


# --------------------------------------------------------------------------
# branched double covers
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BranchedCoverSpec:
    """Branch points on the unit sphere and the slit pairing.

    Parameters
    ----------
    branch_points : sequence of 3-vectors
        An even number (>= 4) of distinct points; normalized on input.
    pairing : sequence of index pairs, optional
        Slits join ``branch_points[i]`` and ``branch_points[j]`` along the
        shorter great-circle arc.  Default pairs consecutive points.
    base : {"octasphere", "icosphere"}
    refinement : int
        Grid size ``n`` for the octasphere, subdivision level for the icosphere.
    """

    branch_points: tuple
    pairing: tuple | None = None
    base: str = "octasphere"
    refinement: int = 24

    def __post_init__(self):
        B = np.asarray(self.branch_points, float)
        if B.ndim != 2 or B.shape[1] != 3:
            raise MeshError("branch points must be 3-vectors")
        if len(B) < 4 or len(B) % 2:
            raise MeshError("need an even number (>= 4) of branch points")
        B = B / np.linalg.norm(B, axis=1)[:, None]
        object.__setattr__(self, "branch_points", tuple(map(tuple, B)))
        pairs = self.pairing or [(2 * i, 2 * i + 1) for i in range(len(B) // 2)]
        pairs = tuple((int(a), int(b)) for a, b in pairs)
        flat = sorted(i for p in pairs for i in p)
        if flat != list(range(len(B))):
            raise MeshError("pairing must use every branch point exactly once")
        object.__setattr__(self, "pairing", pairs)
        if self.base not in ("octasphere", "icosphere"):
            raise MeshError(f"unknown base mesh {self.base!r}")

    @property
    def genus(self) -> int:
        return len(self.branch_points) // 2 - 1

    def to_json(self) -> dict:
        return {
            "branch_points": [list(p) for p in self.branch_points],
            "pairing": [list(p) for p in self.pairing],
            "base": self.base,
            "refinement": self.refinement,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BranchedCoverSpec":
        return cls(
            tuple(map(tuple, obj["branch_points"])),
            tuple(map(tuple, obj["pairing"])) if obj.get("pairing") else None,
            obj.get("base", "octasphere"),
            int(obj.get("refinement", 24)),
        )


def _arcs_intersect(a, b, c, d, eps=1e-12) -> bool:
    """Do the minor great-circle arcs ``ab`` and ``cd`` meet?"""
    n1, n2 = np.cross(a, b), np.cross(c, d)
    x = np.cross(n1, n2)
    if np.linalg.norm(x) < eps:
        # same great circle: overlap iff an endpoint lies on the other arc
        on = lambda p, u, v: np.linalg.norm(np.cross(u, p) + np.cross(p, v) - np.cross(u, v)) < 1e-9 and np.dot(np.cross(u, p), np.cross(p, v)) >= -eps
        return any(on(p, a, b) for p in (c, d)) or any(on(p, c, d) for p in (a, b))
    x = x / np.linalg.norm(x)
    for s in (x, -x):
        inside = lambda u, v, n: np.dot(np.cross(u, s), n) >= -eps and np.dot(np.cross(s, v), n) >= -eps
        if inside(a, b, n1) and inside(c, d, n2):
            return True
    return False


def _arc_distance(P: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = np.cross(a, b)
    n /= np.linalg.norm(n)
    h = P @ n
    Q = P - h[:, None] * n
    Qn = np.linalg.norm(Q, axis=1)
    within = (np.cross(a, Q) @ n >= 0) & (np.cross(Q, b) @ n >= 0) & (Qn > 1e-12)
    d_plane = np.abs(np.arcsin(np.clip(h, -1, 1)))
    d_end = np.minimum(np.arccos(np.clip(P @ a, -1, 1)), np.arccos(np.clip(P @ b, -1, 1)))
    return np.where(within, d_plane, d_end)


def _slit_path(mesh: Mesh, s: int, t: int, a, b, blocked: set[int]) -> list[int]:
    """Edge path from ``s`` to ``t`` hugging the arc ``ab`` (Dijkstra)."""
    P = mesh.projection
    h = mesh.mean_edge_length()
    dist = _arc_distance(P, a, b)
    nbrs = mesh.adjacency()
    best = {s: 0.0}
    prev = {}
    heap = [(0.0, s)]
    while heap:
        d, u = heapq.heappop(heap)
        if u == t:
            break
        if d > best.get(u, np.inf):
            continue
        for w in nbrs.indices[nbrs.indptr[u] : nbrs.indptr[u + 1]]:
            if w in blocked and w != t:
                continue
            step = np.linalg.norm(P[u] - P[w]) * (1.0 + 50.0 * (dist[u] + dist[w]) / h)
            nd = d + step
            if nd < best.get(w, np.inf):
                best[w] = nd
                prev[w] = u
                heapq.heappush(heap, (nd, w))
    if t not in prev and s != t:
        raise MeshError("could not route a slit between branch points without crossing another slit")
    path = [t]
    while path[-1] != s:
        path.append(prev[path[-1]])
    return path[::-1]


def build_hyperelliptic_cover(spec: BranchedCoverSpec) -> Mesh:
    """Two copies of a sphere mesh, cut along slits and cross-glued.

    Branch points are snapped to the nearest base vertex (the largest snap
    distance is recorded on the mesh).  Slits follow the great-circle arcs of
    the pairing as mesh-edge paths; the double cover is obtained by
    identifying triangle corners across every base edge, switching sheets
    across slit edges.  Branch vertices become cone points of angle ``4*pi``
    and the result has ``chi = 2 - 2*genus``.

    The reference scale is ``min(1, sqrt(d / rho))`` with ``d`` the chordal
    distance to the nearest branch point and ``rho`` half the minimal branch
    separation; in a local uniformizer ``w = sqrt(z - b)`` it makes the
    reference metric smooth, and the pulled-back round metric is the density
    ``ref_scale`` which vanishes exactly at the branch points.

    Raises
    ------
    MeshError
        If slits intersect or two branch points snap to the same vertex.
    """
    B = np.array(spec.branch_points)
    pairs = spec.pairing
    for i, (p, q) in enumerate(pairs):
        if np.linalg.norm(B[p] + B[q]) < 1e-9:
            raise MeshError("antipodal branch points have no unique connecting arc")
        for r, s in pairs[i + 1 :]:
            if _arcs_intersect(B[p], B[q], B[r], B[s]):
                raise MeshError(f"slits ({p},{q}) and ({r},{s}) intersect")
    base = build_octasphere(spec.refinement) if spec.base == "octasphere" else build_sphere(spec.refinement)
    P = base.projection
    snapped = [int(np.argmax(P @ b)) for b in B]
    if len(set(snapped)) != len(snapped):
        raise MeshError("branch points closer than the mesh resolution (snapped to the same vertex)")
    snap = float(max(np.linalg.norm(P[v] - b) for v, b in zip(snapped, B)))

    used: set[int] = set(snapped)
    slit_edges: set[tuple[int, int]] = set()
    for p, q in pairs:
        blocked = used - {snapped[p], snapped[q]}
        path = _slit_path(base, snapped[p], snapped[q], P[snapped[p]], P[snapped[q]], blocked)
        interior = set(path[1:-1])
        if interior & used:
            raise MeshError("slits intersect on the mesh")
        used |= interior
        slit_edges |= {tuple(sorted(e)) for e in zip(path[:-1], path[1:])}

    T = base.triangles
    F = len(T)
    # corner id: (sheet * F + t) * 3 + k
    corner = lambda sheet, t, k: (sheet * F + t) * 3 + k
    he_t = np.repeat(np.arange(F), 3)
    he_k = np.tile(np.arange(3), F)
    he_u = T[he_t, he_k]
    he_w = T[he_t, (he_k + 1) % 3]
    key = np.minimum(he_u, he_w) * base.V + np.maximum(he_u, he_w)
    order = np.argsort(key, kind="stable")
    i1, i2 = order[0::2], order[1::2]
    assert np.all(key[i1] == key[i2])
    rows, cols = [], []
    for h1, h2 in zip(i1, i2):
        t1, k1, t2, k2 = he_t[h1], he_k[h1], he_t[h2], he_k[h2]
        u, w = he_u[h1], he_w[h1]
        cross = (min(u, w), max(u, w)) in slit_edges
        # local corner index of u and w in each triangle
        ku1, kw1 = k1, (k1 + 1) % 3
        # triangle 2 traverses the edge as (w, u)
        kw2, ku2 = k2, (k2 + 1) % 3
        for s in (0, 1):
            s2 = 1 - s if cross else s
            rows += [corner(s, t1, ku1), corner(s, t1, kw1)]
            cols += [corner(s2, t2, ku2), corner(s2, t2, kw2)]
    n_corners = 2 * F * 3
    G = sparse.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n_corners, n_corners))
    ncomp, label = csgraph.connected_components(G, directed=False)
    tri2 = label.reshape(2 * F, 3)
    base_vertex = np.empty(ncomp, np.int64)
    base_vertex[label] = np.concatenate([T.ravel(), T.ravel()])
    # deck transformation: corner (s, t, k) -> (1 - s, t, k)
    inv = np.empty(ncomp, np.int64)
    swapped = np.concatenate([label[F * 3 :], label[: F * 3]])
    inv[label] = swapped
    proj = P[base_vertex]
    branch_ids = {int(v) for v in np.flatnonzero(inv == np.arange(ncomp))}
    if {int(base_vertex[v]) for v in branch_ids} != set(snapped):
        raise MeshError("gluing failed: fixed points of the involution differ from the branch points")

    sep = min(np.linalg.norm(B[i] - B[j]) for i in range(len(B)) for j in range(i))
    rho = 0.5 * sep
    d = np.min(np.linalg.norm(proj[:, None, :] - P[snapped][None, :, :], axis=2), axis=1)
    ref = np.minimum(1.0, np.sqrt(d / rho))
    return Mesh(
        triangles=tri2,
        lengths=np.concatenate([base.lengths, base.lengths]),
        n_vertices=ncomp,
        vertices=proj,
        cone_points={v: 2 for v in branch_ids},
        projection=proj,
        spherical=True,
        ref_scale=ref,
        involution=inv,
        declared_genus=spec.genus,
        snap_distance=snap,
        name=f"hyperelliptic-cover(genus={spec.genus}, {base.name})",
    )


# --------------------------------------------------------------------------
# OFF + sidecar IO
# --------------------------------------------------------------------------


def _sidecar(path: Path) -> Path:
    return path.with_name(path.name + ".json")


def write_off(mesh: Mesh, path, density: ConformalDensity | None = None) -> None:
    """Write ``path`` (ASCII OFF) and ``path + '.json'`` (sidecar).

    The sidecar holds cone points, the optional projection, and the data not
    expressible in OFF: intrinsic lengths (when they are not the chordal
    lengths of the vertex positions), the reference scale, the spherical
    flag, the deck involution and an optional density.
    """
    path = Path(path)
    P = mesh.vertices if mesh.vertices is not None else np.zeros((mesh.V, 3))
    lines = ["OFF", f"{mesh.V} {mesh.F} {mesh.E}"]
    lines += [" ".join(repr(float(c)) for c in p) for p in P]
    lines += ["3 " + " ".join(str(int(i)) for i in t) for t in mesh.triangles]
    path.write_text("\n".join(lines) + "\n")
    side = {
        "cone_points": [{"vertex": v, "angle_over_2pi": k} for v, k in sorted(mesh.cone_points.items())],
        "name": mesh.name,
        "spherical": mesh.spherical,
    }
    if mesh.projection is not None:
        side["projection"] = mesh.projection.tolist()
    if mesh.vertices is None or not np.allclose(_lengths_from_positions(P, mesh.triangles), mesh.lengths, rtol=1e-12, atol=0):
        side["lengths"] = mesh.lengths.tolist()
    if mesh.ref_scale is not None:
        side["ref_scale"] = mesh.ref_scale.tolist()
    if mesh.involution is not None:
        side["involution"] = mesh.involution.tolist()
    if mesh.declared_genus is not None:
        side["genus"] = mesh.declared_genus
    if density is not None:
        side["density"] = density.values.tolist()
    _sidecar(path).write_text(json.dumps(side))


def read_off(path) -> tuple[Mesh, ConformalDensity | None]:
    """Read an OFF mesh plus its sidecar (if present).

    Returns
    -------
    mesh, density
        ``density`` is ``None`` unless the sidecar stores one.
    """
    path = Path(path)
    try:
        tokens = [ln.split("#")[0].split() for ln in path.read_text().splitlines()]
    except OSError as exc:
        raise MeshError(f"cannot read {path}: {exc}") from exc
    tokens = [t for t in tokens if t]
    if not tokens or tokens[0][0] != "OFF":
        raise MeshError(f"{path}: missing OFF header")
    head = tokens[0][1:] or tokens[1]
    start = 1 if tokens[0][1:] else 2
    try:
        nv, nf = int(head[0]), int(head[1])
        P = np.array([[float(c) for c in t[:3]] for t in tokens[start : start + nv]])
        faces = tokens[start + nv : start + nv + nf]
        arity = [int(f[0]) for f in faces]
        T = np.array([[int(c) for c in f[1:4]] for f in faces], np.int64)
    except (ValueError, IndexError) as exc:
        raise MeshError(f"{path}: malformed OFF body") from exc
    if any(k != 3 for k in arity):
        raise MeshError(f"{path}: only triangle faces are supported")
    if len(P) != nv or len(T) != nf:
        raise MeshError(f"{path}: truncated OFF file")
    side = {}
    if _sidecar(path).exists():
        try:
            side = json.loads(_sidecar(path).read_text())
        except json.JSONDecodeError as exc:
            raise MeshError(f"{_sidecar(path)}: invalid JSON") from exc
    L = np.array(side["lengths"]) if "lengths" in side else _lengths_from_positions(P, T)
    mesh = Mesh(
        triangles=T,
        lengths=L,
        n_vertices=nv,
        vertices=P,
        cone_points={c["vertex"]: c["angle_over_2pi"] for c in side.get("cone_points", [])},
        projection=np.array(side["projection"]) if "projection" in side else None,
        spherical=bool(side.get("spherical", False)),
        ref_scale=np.array(side["ref_scale"]) if "ref_scale" in side else None,
        involution=np.array(side["involution"]) if "involution" in side else None,
        declared_genus=side.get("genus"),
        name=side.get("name", path.stem),
    )
    density = ConformalDensity(np.array(side["density"]), mesh) if "density" in side else None
    return mesh, density
