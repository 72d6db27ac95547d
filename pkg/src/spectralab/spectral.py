"""Laplace spectra of conformal metrics on triangle meshes.

The Dirichlet energy is conformally invariant in two dimensions, so the
stiffness matrix is the cotangent Laplacian of the mesh's own triangles and
only the mass matrix sees the conformal density.  All eigenproblems are
symmetric-definite generalized problems ``K u = lam M u`` solved by
shift-invert Lanczos (ARPACK through :func:`scipy.sparse.linalg.eigsh`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh, splu

from .mesh import ConformalDensity, Mesh, MeshError, _spherical_areas, pullback_density

__all__ = [
    "EigenSolveError",
    "IndexResult",
    "InsufficientSpectrum",
    "PotentialField",
    "SpectrumResult",
    "YangYauReport",
    "assemble",
    "counting_function",
    "eigen_solve",
    "index_of_map",
    "lambda1_degree_bound_check",
    "map_potential",
    "mesh_tolerance",
    "potential_matrix",
    "schrodinger_index",
    "spectrum",
    "yang_yau_bound",
    "yang_yau_check",
]

_LOCAL_MASS = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0


class EigenSolveError(RuntimeError):
    """Eigensolver failure; ``partial`` holds whatever converged."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class InsufficientSpectrum(ValueError):
    """Counting requested beyond the computed part of the spectrum."""


# --------------------------------------------------------------------------
# assembly
# --------------------------------------------------------------------------


def _density_values(mesh: Mesh, density) -> np.ndarray:
    if density is None:
        return np.ones(mesh.V)
    f = density.values if isinstance(density, ConformalDensity) else np.asarray(density, float)
    if f.shape != (mesh.V,):
        raise MeshError(f"density has shape {f.shape}, expected ({mesh.V},)")
    if np.any(f < 0) or not np.all(np.isfinite(f)):
        raise MeshError("density must be finite and non-negative")
    return f


def cotangent_stiffness(mesh: Mesh) -> sparse.csr_matrix:
    """Cotangent Laplacian ``K`` (positive semidefinite, kernel = constants)."""
    L = mesh.lengths
    A = mesh.flat_areas()
    scale = L.max(axis=1) ** 2
    if np.any(A <= 1e-14 * scale):
        raise MeshError("degenerate triangle (zero area) in stiffness assembly")
    a2, b2, c2 = (L**2).T
    cot = np.stack([b2 + c2 - a2, a2 + c2 - b2, a2 + b2 - c2], axis=1) / (4.0 * A[:, None])
    T = mesh.triangles
    # edge opposite corner k joins corners k+1 and k+2
    i = np.concatenate([T[:, 1], T[:, 2], T[:, 0]])
    j = np.concatenate([T[:, 2], T[:, 0], T[:, 1]])
    w = 0.5 * np.concatenate([cot[:, 0], cot[:, 1], cot[:, 2]])
    n = mesh.V
    W = sparse.coo_matrix((w, (i, j)), shape=(n, n))
    W = W + W.T
    return (sparse.diags(np.asarray(W.sum(axis=1)).ravel()) - W).tocsr()


def _weighted_mass(mesh: Mesh, f: np.ndarray, tri_weight: np.ndarray | None, quadrature: str) -> sparse.csr_matrix:
    T = mesh.triangles
    s = mesh.scale
    area = mesh.triangle_areas()
    if quadrature == "centroid":
        rho = (f[T].mean(axis=1) / s[T].mean(axis=1)) ** 2
        w = rho * area
        if tri_weight is not None:
            w = w * tri_weight
        vals = w[:, None, None] * _LOCAL_MASS[None]
    elif quadrature == "three-point":
        # midpoint rule: exact for quadratics, phi_a(m) in {0, 1/2}
        vals = np.zeros((len(T), 3, 3))
        for a, b in ((0, 1), (1, 2), (2, 0)):
            rho = ((f[T[:, a]] + f[T[:, b]]) / (s[T[:, a]] + s[T[:, b]])) ** 2
            w = rho * area / 3.0
            if tri_weight is not None:
                w = w * tri_weight
            phi = np.zeros(3)
            phi[[a, b]] = 0.5
            vals += w[:, None, None] * np.outer(phi, phi)[None]
    else:
        raise ValueError(f"unknown quadrature {quadrature!r}")
    rows = np.repeat(T, 3, axis=1).ravel()
    cols = np.tile(T, (1, 3)).ravel()
    n = mesh.V
    return sparse.coo_matrix((vals.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def assemble(mesh: Mesh, density=None, quadrature: str = "centroid"):
    """Stiffness and mass matrices of ``f**2 g_ref``.

    Parameters
    ----------
    mesh : Mesh
    density : ConformalDensity or array_like, optional
        Per-vertex conformal factor relative to the mesh reference metric
        (default: ones).
    quadrature : {"centroid", "three-point"}
        Rule for the ``density**2`` weight of the consistent P1 mass matrix.

    Returns
    -------
    K, M : scipy.sparse.csr_matrix
        ``K`` is the cotangent stiffness, ``M`` the density-weighted mass;
        ``M.sum()`` is the total area of the metric.

    Raises
    ------
    MeshError
        On degenerate triangles, or when the density vanishes on all three
        vertices of a triangle ("non-isolated zero").
    """
    f = _density_values(mesh, density)
    if np.any(np.all(f[mesh.triangles] == 0, axis=1)):
        raise MeshError("non-isolated zero: density vanishes on a whole triangle")
    K = cotangent_stiffness(mesh)
    M = _weighted_mass(mesh, f, None, quadrature)
    return K, M


@dataclass(frozen=True)
class PotentialField:
    """Per-triangle potential ``V >= 0`` (e.g. ``|grad phi|_g**2``)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, float)
        if v.ndim != 1 or not np.all(np.isfinite(v)):
            raise MeshError("potential must be finite on every triangle")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, mesh: Mesh, c: float) -> "PotentialField":
        return cls(np.full(mesh.F, float(c)))


def potential_matrix(mesh: Mesh, density, potential: PotentialField, quadrature: str = "centroid"):
    """``P_ij = integral of V phi_i phi_j dA_g`` for the metric ``f**2 g_ref``."""
    if len(potential.values) != mesh.F:
        raise MeshError("potential must have one value per triangle")
    return _weighted_mass(mesh, _density_values(mesh, density), potential.values, quadrature)


def map_potential(mesh: Mesh, density=None) -> PotentialField:
    """Energy density ``|grad phi|_g**2`` of the projection, per triangle.

    For a conformal map ``|grad phi|_g**2 dA_g = 2 phi^*(dA_S2)``, so the value
    on a triangle is twice the spherical area of its image divided by its
    area in ``g``.
    """
    if mesh.projection is None:
        raise MeshError("mesh has no projection to the sphere")
    P, T = mesh.projection, mesh.triangles
    img = _spherical_areas(P[T[:, 0]], P[T[:, 1]], P[T[:, 2]])
    f = _density_values(mesh, density)
    s = mesh.scale
    area_g = (f[T].mean(axis=1) / s[T].mean(axis=1)) ** 2 * mesh.triangle_areas()
    if np.any(area_g <= 0):
        raise MeshError("metric has a triangle of zero area")
    return PotentialField(2.0 * img / area_g)


# --------------------------------------------------------------------------
# eigenproblems
# --------------------------------------------------------------------------


@dataclass
class SpectrumResult:
    """Lowest eigenvalues of ``K u = lam M u``.

    Attributes
    ----------
    eigenvalues : ndarray
        Ascending; values below round-off relative to the largest are 0.
    area : float
        ``M.sum()``, the total area of the metric.
    normalized : ndarray
        ``eigenvalues * area`` (scale invariant).
    residuals : ndarray
        Relative residuals ``|K u - lam M u| / ((|K| + |lam| |M|) |u|)``.
    diagnostics : dict
        Solver name, shift, tolerance.
    """

    eigenvalues: np.ndarray
    area: float
    normalized: np.ndarray
    residuals: np.ndarray
    diagnostics: dict = field(default_factory=dict)
    eigenvectors: np.ndarray | None = field(default=None, repr=False)

    @property
    def lambda1(self) -> float:
        return float(self.eigenvalues[1])

    @property
    def normalized_lambda1(self) -> float:
        return float(self.normalized[1])

    def cluster(self, index: int = 1, band: float = 0.05) -> np.ndarray:
        """Indices of eigenvalues within relative ``band`` of ``eigenvalues[index]``."""
        lam = self.eigenvalues[index]
        return np.flatnonzero(np.abs(self.eigenvalues - lam) <= band * abs(lam))

    def to_json(self) -> dict:
        return {
            "eigenvalues": self.eigenvalues.tolist(),
            "area": self.area,
            "normalized": self.normalized.tolist(),
            "residuals": self.residuals.tolist(),
            "diagnostics": self.diagnostics,
        }


def _norm1(A) -> float:
    return float(abs(A).sum(axis=0).max())


def _lowest_eigenpairs(A, M, sigma: float, nev: int, tol: float, maxiter: int | None = None):
    """``nev`` eigenpairs of ``A u = mu M u`` closest above ``sigma``.

    Shift-invert Lanczos with one sparse LU factorization of ``A - sigma M``.
    Lanczos can silently drop copies of a degenerate eigenvalue, so the
    result is verified by deflation: the found eigenvectors are projected out
    of the shift-invert operator (same factorization) and the next
    eigenvalues are computed; anything lying below the current largest is a
    missed eigenvalue and is merged in.  The loop ends when the deflated
    problem finds nothing below the accepted set.
    """
    n = A.shape[0]
    A, M = A.tocsc(), M.tocsc()
    lu = splu((A - sigma * M).tocsc())
    rng = np.random.default_rng(0)

    def run(k, U):
        if U is None:
            op = LinearOperator((n, n), matvec=lu.solve, dtype=float)
        else:
            MU = M @ U

            def apply(x):
                y = lu.solve(x)
                return y - U @ (MU.T @ y)

            op = LinearOperator((n, n), matvec=apply, dtype=float)
        try:
            return eigsh(
                A, k=k, M=M, sigma=sigma, OPinv=op, which="LM", tol=tol, maxiter=maxiter,
                v0=rng.standard_normal(n), ncv=min(n - 1, max(2 * k + 10, 30)),
            )
        except ArpackNoConvergence as exc:
            raise EigenSolveError(f"eigensolver did not converge: {exc}", partial=exc.eigenvalues) from exc

    w, U = run(nev, None)
    for _ in range(nev + 1):
        order = np.argsort(w)
        w, U = w[order][:nev], U[:, order][:, :nev]
        k2 = min(max(3, nev // 4), n - nev - 2)
        if k2 < 1:
            break
        w2, U2 = run(k2, U)
        gap = 1e-8 * max(1.0, abs(w[-1]))
        missed = w2 < w[-1] - gap
        if not np.any(missed):
            break
        w = np.concatenate([w, w2[missed]])
        U = np.concatenate([U, U2[:, missed]], axis=1)
    else:
        raise EigenSolveError("deflation check did not settle", partial=w)
    # re-orthonormalize in the M inner product (merged blocks)
    G = U.T @ (M @ U)
    C = np.linalg.cholesky(0.5 * (G + G.T))
    U = np.linalg.solve(C, U.T).T
    return w, U


def eigen_solve(K, M, k: int, tol: float = 1e-8, sigma: float | None = None, maxiter: int | None = None) -> SpectrumResult:
    """The ``k + 1`` smallest eigenpairs of ``K u = lam M u``.

    Parameters
    ----------
    K, M : sparse matrices
        Symmetric; ``K`` positive semidefinite and ``M`` positive definite.
    k : int
        Number of eigenvalues after ``lam_0``.
    tol : float
        Maximal accepted relative residual.
    sigma : float, optional
        Shift for shift-invert mode; default slightly below zero, scaled by
        the area, which keeps ``K - sigma M`` positive definite.

    Raises
    ------
    EigenSolveError
        If ARPACK does not converge or residuals exceed ``tol``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = K.shape[0]
    nev = k + 1
    if nev >= n - 1:
        raise ValueError(f"k={k} too large for a problem of size {n}")
    area = float(M.sum())
    if sigma is None:
        sigma = -1.0 / area
    w, U = _lowest_eigenpairs(K, M, sigma, nev, tol * 1e-2, maxiter)
    KU, MU = K @ U, M @ U
    res = np.linalg.norm(KU - MU * w, axis=0) / ((_norm1(K) + np.abs(w) * _norm1(M)) * np.linalg.norm(U, axis=0))
    if np.any(res > tol):
        raise EigenSolveError(f"residual {res.max():.2e} exceeds tolerance {tol:.1e}", partial=w)
    scale = np.abs(w).max()
    w = np.where(np.abs(w) <= 1e-9 * scale, 0.0, w)
    return SpectrumResult(
        eigenvalues=w,
        area=area,
        normalized=w * area,
        residuals=res,
        diagnostics={"solver": "arpack shift-invert", "sigma": sigma, "tol": tol, "n": n},
        eigenvectors=U,
    )


def spectrum(mesh: Mesh, density=None, k: int = 6, tol: float = 1e-8, quadrature: str = "centroid") -> SpectrumResult:
    """Convenience wrapper: :func:`assemble` then :func:`eigen_solve`."""
    K, M = assemble(mesh, density, quadrature)
    return eigen_solve(K, M, k, tol)


def counting_function(spectrum: SpectrumResult, lam: float) -> int:
    """Weyl counting function ``N(lam) = #{i : lam_i < lam}``.

    Raises
    ------
    InsufficientSpectrum
        If ``lam`` exceeds the largest computed eigenvalue, so that
        eigenvalues below ``lam`` might be missing.
    """
    ev = spectrum.eigenvalues
    if lam > ev[-1]:
        raise InsufficientSpectrum(
            f"insufficient spectrum: lambda={lam} exceeds the largest computed eigenvalue {ev[-1]:.6g}"
        )
    return int(np.sum(ev < lam))


def mesh_tolerance(mesh: Mesh, value: float) -> float:
    """Heuristic discretization tolerance ``value * (2 h)**2`` for an
    eigenvalue-type quantity, ``h`` the mean edge length measured in units of
    the square root of the total area."""
    h = mesh.mean_edge_length() / np.sqrt(mesh.area())
    return float(abs(value) * (2 * h) ** 2)


# --------------------------------------------------------------------------
# bounds and indices
# --------------------------------------------------------------------------


def yang_yau_bound(genus: int) -> float:
    if genus < 0:
        raise ValueError("genus must be >= 0")
    return 8 * np.pi * ((genus + 3) // 2)


@dataclass(frozen=True)
class YangYauReport:
    genus: int
    normalized_lambda1: float
    bound: float
    margin: float
    mesh_tolerance: float
    strict_expected: bool
    passed: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def yang_yau_check(genus: int, normalized_lambda1: float, mesh_tolerance: float = 0.0) -> YangYauReport:
    """Compare ``normalized_lambda1`` with ``8 pi floor((genus + 3) / 2)``.

    ``strict_expected`` flags genera (all but 0 and 2) where the inequality
    is known to be strict; it is a label, not a numerical certificate.
    """
    bound = yang_yau_bound(genus)
    margin = bound - normalized_lambda1
    return YangYauReport(
        genus=genus,
        normalized_lambda1=float(normalized_lambda1),
        bound=float(bound),
        margin=float(margin),
        mesh_tolerance=float(mesh_tolerance),
        strict_expected=genus not in (0, 2),
        passed=bool(margin >= -mesh_tolerance),
    )


@dataclass(frozen=True)
class IndexResult:
    """Eigenvalue counts around a threshold.

    ``index`` counts eigenvalues below ``threshold - band``, ``nullity``
    those within ``band`` of the threshold.
    """

    index: int
    nullity: int
    band: float
    threshold: float = 0.0
    eigenvalues: tuple = ()
    route: str = ""

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "nullity": self.nullity,
            "band": self.band,
            "threshold": self.threshold,
            "eigenvalues": list(self.eigenvalues),
            "route": self.route,
        }


def _lowest_until(A, M, sigma: float, beyond: float, tol: float, start: int = 8):
    """Lowest eigenvalues of ``A u = mu M u`` until one exceeds ``beyond``."""
    n = A.shape[0]
    m = start
    while True:
        m = min(m, n - 3)
        w, _ = _lowest_eigenpairs(A, M, sigma, m, tol)
        if w[-1] > beyond or m == n - 3:
            return w
        m *= 2


def schrodinger_index(mesh: Mesh, density, potential: PotentialField, band: float, tol: float = 1e-10) -> IndexResult:
    """Index and nullity of ``Delta_g - V``.

    Counts eigenvalues ``mu`` of ``(K - P) u = mu M u`` with ``mu < -band``
    (index) and ``|mu| <= band`` (nullity), where ``P`` is the
    potential-weighted mass matrix.
    """
    if band <= 0:
        raise ValueError("band must be positive")
    K, M = assemble(mesh, density)
    P = potential_matrix(mesh, density, potential)
    vmax = float(max(potential.values.max(), 0.0))
    w = _lowest_until(K - P, M, sigma=-vmax - 1.0, beyond=band, tol=tol)
    return IndexResult(
        index=int(np.sum(w < -band)),
        nullity=int(np.sum(np.abs(w) <= band)),
        band=band,
        threshold=0.0,
        eigenvalues=tuple(float(x) for x in w),
        route="potential",
    )


def index_of_map(mesh: Mesh, band: float = 0.1, density=None, tol: float = 1e-10) -> IndexResult:
    """Index of a map to the sphere as ``N(2)`` for the pulled-back metric.

    ``index`` counts Laplace eigenvalues below ``2 - band`` of
    ``phi^* g_S2`` (density from :func:`pullback_density` unless given);
    ``nullity`` counts those in ``[2 - band, 2 + band]``.
    """
    if band <= 0:
        raise ValueError("band must be positive")
    f = pullback_density(mesh) if density is None else density
    K, M = assemble(mesh, f)
    area = float(M.sum())
    w = _lowest_until(K, M, sigma=-1.0 / area, beyond=2.0 + band, tol=tol)
    w = np.where(np.abs(w) <= 1e-9 * np.abs(w).max(), 0.0, w)
    return IndexResult(
        index=int(np.sum(w < 2.0 - band)),
        nullity=int(np.sum(np.abs(w - 2.0) <= band)),
        band=band,
        threshold=2.0,
        eigenvalues=tuple(float(x) for x in w),
        route="counting",
    )


@dataclass(frozen=True)
class DegreeBoundReport:
    degree: int
    normalized_lambda1: float
    bound: float
    margin: float
    mesh_tolerance: float
    passed: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def lambda1_degree_bound_check(mesh: Mesh, degree: int, density=None, tol: float | None = None) -> DegreeBoundReport:
    """Check ``lambda1_bar <= 8 pi degree`` for a metric conformal to the
    pullback (default: the pullback itself)."""
    f = pullback_density(mesh) if density is None else density
    sp = spectrum(mesh, f, k=2)
    bound = 8 * np.pi * degree
    tol = mesh_tolerance(mesh, bound) if tol is None else tol
    margin = bound - sp.normalized_lambda1
    return DegreeBoundReport(degree, sp.normalized_lambda1, bound, float(margin), tol, bool(margin >= -tol))
