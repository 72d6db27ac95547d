"""Maximization of the normalized first eigenvalue within a conformal class.

The metric is ``f**2 g_ref`` with a per-vertex density ``f`` (stored as
``log f``, ``-inf`` at isolated zeros).  For an ``M``-orthonormal basis
``u_1 .. u_k`` of the first eigenspace cluster, the Gram field

    G = sum_i u_i**2

has mean ``k / area``.  Under a conformal change ``delta log(f**2) = w`` the
Dirichlet energy is unchanged and the mass changes, so the cluster mean of
``lambda * area`` varies by

    lambda * integral w (1 - G / mean(G)) dA.

Lowering the density where ``G`` exceeds its mean therefore increases the
cluster, and ``G`` is constant at a conformally extremal metric (the
eigenfunctions then define a harmonic map into a sphere).

When the first eigenvalue is multiple the functional is not differentiable;
its generalized gradients are ``1 - area * sum_ij P_ij u_i u_j`` over
positive semidefinite weights ``P`` of unit trace.  Each step moves
``log(f**2)`` along the minimum-norm generalized gradient (the steepest
ascent direction, zero exactly at extremal metrics), scaled by
``damping * step``, then renormalizes the area and backtracks on
``lambda_1 * area``.  Several cluster bands are tried per iteration and the
best accepted trial is kept.  Results are locally maximal candidates only.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .mesh import ConformalDensity, Mesh, MeshError, write_off
from .spectral import (
    EigenSolveError,
    SpectrumResult,
    _LOCAL_MASS,
    _weighted_mass,
    cotangent_stiffness,
    eigen_solve,
    mesh_tolerance,
    yang_yau_check,
)

__all__ = [
    "MaximizeConfig",
    "OptimizationState",
    "StationarityReport",
    "maximize_lambda1",
    "stationarity_report",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MaximizeConfig:
    """Optimization settings.

    Attributes
    ----------
    max_iters : int
    step : float
        Initial step multiplier (grows by 1.5 after accepted steps, capped at 4).
    damping : float
        Factor applied to the ascent direction.
    band : float
        Relative width of the first eigenvalue cluster.
    tol : float
        Stop when the stationarity residual falls below ``tol``.
    backtrack_tol : float
        Relative decrease of ``lambda_1 * area`` tolerated on acceptance.
    min_step : float
        Stop when backtracking shrinks the step below this.
    k : int
        Eigenvalues computed per iteration (grown if the cluster reaches it).
    quadrature : str
    """

    max_iters: int = 60
    step: float = 1.0
    damping: float = 0.5
    band: float = 0.05
    tol: float = 1e-3
    backtrack_tol: float = 1e-6
    min_step: float = 1e-3
    k: int = 10
    quadrature: str = "centroid"

    def __post_init__(self):
        if self.max_iters < 0 or self.k < 2:
            raise ValueError("need max_iters >= 0 and k >= 2")
        for name in ("step", "damping", "band", "tol", "min_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.backtrack_tol < 0:
            raise ValueError("backtrack_tol must be >= 0")

    @classmethod
    def from_json(cls, obj: dict) -> "MaximizeConfig":
        unknown = set(obj) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**obj)

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class OptimizationState:
    """Current iterate of :func:`maximize_lambda1`."""

    mesh: Mesh
    log_density: np.ndarray
    spectrum: SpectrumResult
    iteration: int
    step: float
    history: list = field(default_factory=list)
    trace: list = field(default_factory=list)
    converged: bool = False
    stop_reason: str = ""
    config: MaximizeConfig = field(default_factory=MaximizeConfig)
    band: float = 0.05  # current cluster band (tightened near stationarity)

    @property
    def density(self) -> ConformalDensity:
        return ConformalDensity(np.exp(self.log_density), self.mesh)

    @property
    def normalized_lambda1(self) -> float:
        return self.spectrum.normalized_lambda1

    @property
    def label(self) -> str:
        return "locally maximal candidate"

    def write_trace(self, path) -> None:
        """CSV columns: iter, lambda1_bar, cluster_width, residual, step, band,
        accepted, chosen.

        One row per trial step; ``chosen`` marks the trial that became the
        iterate (its ``residual`` is filled in)."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iter", "lambda1_bar", "cluster_width", "residual", "step", "band", "accepted", "chosen"])
            for row in self.trace:
                w.writerow([row["iter"], repr(row["lambda1_bar"]), repr(row["cluster_width"]), repr(row["residual"]), repr(row["step"]), repr(row["band"]), int(row["accepted"]), int(row["chosen"])])

    def write_density(self, path) -> None:
        """Mesh plus density sidecar (readable by :func:`spectralab.mesh.read_off`)."""
        write_off(self.mesh, path, self.density)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "iterations": self.iteration,
            "normalized_lambda1": self.normalized_lambda1,
            "history": list(map(float, self.history)),
            "converged": self.converged,
            "stop_reason": self.stop_reason,
            "config": self.config.to_json(),
        }


def _density_from_log(logf: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return np.exp(logf)


def _project_spectral_simplex(P: np.ndarray) -> np.ndarray:
    """Euclidean projection onto ``{P symmetric, P >= 0, trace P = 1}``."""
    w, V = np.linalg.eigh(0.5 * (P + P.T))
    u = np.sort(w)[::-1]
    css = np.cumsum(u) - 1.0
    r = np.nonzero(u - css / np.arange(1, len(u) + 1) > 0)[0][-1]
    w = np.maximum(w - css[r] / (r + 1), 0.0)
    return (V * w) @ V.T


def _min_norm_weights(Q: np.ndarray, k: int, iters: int = 500) -> np.ndarray:
    """``argmin P:Q:P`` over the spectral simplex (projected gradient)."""
    Qm = Q.reshape(k * k, k * k)
    L = max(np.linalg.norm(Qm, 2), 1e-300)
    P = np.eye(k) / k
    for _ in range(iters):
        grad = 2.0 * (Qm @ P.ravel()).reshape(k, k)
        Pn = _project_spectral_simplex(P - grad / L)
        if np.abs(Pn - P).max() < 1e-12:
            P = Pn
            break
        P = Pn
    return P


@dataclass(frozen=True)
class _Ascent:
    cluster: np.ndarray
    direction: np.ndarray  # per-vertex increment of log(f**2)
    residual: float  # with the optimal cluster weights
    g_residual: float  # with equal weights: || G / mean(G) - 1 ||
    weights: np.ndarray


def _ascent(mesh: Mesh, f: np.ndarray, spec: SpectrumResult, band: float) -> _Ascent:
    """Steepest ascent data for ``lambda_1 * area`` at a (possibly multiple)
    first eigenvalue.

    With triangle weights ``w_T`` (mass of ``T``) and local Gram matrices
    ``e_T[i, j] = u_i|_T^T Mloc u_j|_T`` the cluster derivative along
    ``delta log w_T = h_T`` is ``lambda sum_T w_T h_T (delta_ij - A e_T[i, j])``.
    The generalized gradients are ``1 - A e_T(P)`` for ``P >= 0, tr P = 1``;
    the min-norm one is the steepest ascent direction, and it vanishes
    exactly when the eigenfunctions can be weighted to have constant
    squared sum (extremality).
    """
    idx = spec.cluster(1, band)
    idx = idx[idx >= 1]
    k = len(idx)
    T = mesh.triangles
    s = mesh.scale
    w = (f[T].mean(axis=1) / s[T].mean(axis=1)) ** 2 * mesh.triangle_areas()
    A = float(w.sum())
    UT = spec.eigenvectors[:, idx][T]  # F x 3 x k
    e = np.einsum("fak,ab,fbl->fkl", UT, _LOCAL_MASS, UT)
    Q = np.einsum("f,fij,fkl->ijkl", w, e, e)
    P = _min_norm_weights(Q, k)
    h = 1.0 - A * np.einsum("fij,ij->f", e, P)
    h_eq = 1.0 - A * np.einsum("fii->f", e) / k
    res = math.sqrt(float(w @ h**2) / A)
    g_res = math.sqrt(float(w @ h_eq**2) / A)
    # per-vertex direction: w-weighted average of h over incident triangles
    num = np.zeros(mesh.V)
    den = np.zeros(mesh.V)
    for c in range(3):
        np.add.at(num, T[:, c], w * h)
        np.add.at(den, T[:, c], w)
    return _Ascent(idx, num / np.maximum(den, 1e-300), res, g_res, P)


class _Problem:
    def __init__(self, mesh: Mesh, cfg: MaximizeConfig):
        self.mesh, self.cfg = mesh, cfg
        self.K = cotangent_stiffness(mesh)
        self.k = cfg.k

    def normalize(self, logf: np.ndarray) -> np.ndarray:
        M = _weighted_mass(self.mesh, _density_from_log(logf), None, self.cfg.quadrature)
        return logf - 0.5 * math.log(float(M.sum()))

    def solve(self, logf: np.ndarray):
        f = _density_from_log(logf)
        if np.any(np.all(f[self.mesh.triangles] == 0, axis=1)):
            raise MeshError("non-isolated zero: density vanishes on a whole triangle")
        M = _weighted_mass(self.mesh, f, None, self.cfg.quadrature)
        while True:
            spec = eigen_solve(self.K, M, self.k)
            if spec.eigenvalues[1] <= 0:
                raise EigenSolveError("first eigenvalue collapsed to 0")
            idx = spec.cluster(1, self.cfg.band)
            if idx.max() < len(spec.eigenvalues) - 1 or self.k >= self.mesh.V // 4:
                return spec, M
            self.k = min(2 * self.k, self.mesh.V // 4)


def maximize_lambda1(mesh: Mesh, density=None, config: MaximizeConfig | dict | None = None) -> OptimizationState:
    """Maximize ``lambda_1 * area`` over densities ``f**2 g_ref`` on ``mesh``.

    Parameters
    ----------
    mesh : Mesh
        Connected closed mesh.
    density : ConformalDensity or array_like, optional
        Initial density (default: constant).  Zeros are allowed at isolated
        vertices and stay zero.
    config : MaximizeConfig or dict, optional

    Returns
    -------
    OptimizationState
        The accepted final iterate (area 1) with its history and trace.

    Raises
    ------
    MeshError
        Disconnected mesh or invalid density.
    EigenSolveError
        Solver failure or collapse of ``lambda_1`` to 0.
    """
    cfg = config if isinstance(config, MaximizeConfig) else MaximizeConfig(**(config or {}))
    if not mesh.is_connected():
        raise MeshError("mesh is disconnected")
    f0 = np.ones(mesh.V) if density is None else np.asarray(getattr(density, "values", density), float)
    ConformalDensity(f0, mesh)  # validates shape, sign, isolated zeros
    with np.errstate(divide="ignore"):
        logf = np.log(f0)
    prob = _Problem(mesh, cfg)
    logf = prob.normalize(logf)
    spec, _ = prob.solve(logf)
    state = OptimizationState(mesh, logf, spec, 0, cfg.step, [spec.normalized_lambda1], [], config=cfg, band=cfg.tol)
    # cluster bands tried per iteration, widest first; the narrowest one
    # (= tol) decides stationarity, so a spread cluster never looks stationary
    bands = sorted({max(cfg.tol, cfg.band / 8**j) for j in range(4)}, reverse=True)
    steps = {b: cfg.step for b in bands}
    fine = _ascent(mesh, _density_from_log(logf), spec, cfg.tol)
    state.trace.append(_row(0, spec, fine.cluster, fine.residual, 0.0, True, cfg.tol))
    for it in range(1, cfg.max_iters + 1):
        if fine.residual < cfg.tol:
            state.converged, state.stop_reason = True, "stationarity residual below tol"
            break
        f = _density_from_log(state.log_density)
        best = None
        for band in bands:
            asc = fine if band == cfg.tol else _ascent(mesh, f, state.spectrum, band)
            direction = 0.5 * cfg.damping * asc.direction  # log f = log(f**2) / 2
            step = steps[band]
            while step >= cfg.min_step:
                trial = prob.normalize(state.log_density + step * direction)
                try:
                    tspec, _ = prob.solve(trial)
                except EigenSolveError:
                    step *= 0.5
                    continue
                ok = tspec.normalized_lambda1 >= state.normalized_lambda1 * (1 - cfg.backtrack_tol)
                state.trace.append(_row(it, tspec, tspec.cluster(1, band), float("nan"), step, ok, band))
                if ok:
                    break
                step *= 0.5
            steps[band] = max(step, cfg.min_step)
            if step >= cfg.min_step and (best is None or tspec.normalized_lambda1 > best[1].normalized_lambda1):
                best = (trial, tspec, band, len(state.trace) - 1)
        if best is None:
            state.stop_reason = "step below min_step (no ascent)"
            break
        trial, tspec, band, row = best
        steps[band] = min(4.0, 1.5 * steps[band])
        state.log_density, state.spectrum, state.iteration, state.band = trial, tspec, it, band
        state.history.append(tspec.normalized_lambda1)
        fine = _ascent(mesh, _density_from_log(trial), tspec, cfg.tol)
        state.trace[row]["residual"] = fine.residual
        state.trace[row]["chosen"] = True
        log.info("iter %d: lambda1_bar=%.6f residual=%.2e band=%.3g", it, tspec.normalized_lambda1, fine.residual, band)
    else:
        state.stop_reason = "max_iters reached"
    state.step = max(steps.values())
    state.band = cfg.tol
    return state


def _row(it, spec, idx, resid, step, accepted, band) -> dict:
    lam = spec.eigenvalues[idx]
    width = float((lam.max() - lam.min()) / lam.min()) if len(lam) else 0.0
    return {"iter": it, "lambda1_bar": spec.normalized_lambda1, "cluster_width": width, "residual": resid, "step": step, "accepted": accepted, "band": band, "chosen": it == 0}


@dataclass(frozen=True)
class StationarityReport:
    residual: float
    g_residual: float
    cluster_size: int
    cluster_width: float
    target_dim: int
    normalized_lambda1: float
    yang_yau_margin: float
    yang_yau_ok: bool
    history_monotone: bool
    label: str = "locally maximal candidate"

    def to_json(self) -> dict:
        return dict(self.__dict__)


def stationarity_report(state: OptimizationState) -> StationarityReport:
    """Stationarity residual (optimal cluster weights), the ``G``-flatness
    residual ``|| G / mean(G) - 1 ||`` (equal weights), cluster size and width, the implied
    harmonic-map target dimension ``S^(size - 1)``, the Yang-Yau margin, and
    monotonicity of the accepted history."""
    f = _density_from_log(state.log_density)
    asc = _ascent(state.mesh, f, state.spectrum, state.band)
    idx = _ascent(state.mesh, f, state.spectrum, state.config.band).cluster
    lam = state.spectrum.eigenvalues[idx]
    lbar = state.normalized_lambda1
    yy = yang_yau_check(state.mesh.genus, lbar, mesh_tolerance(state.mesh, lbar))
    h = np.asarray(state.history)
    mono = bool(np.all(np.diff(h) >= -state.config.backtrack_tol * np.abs(h[:-1]) - 1e-12)) if len(h) > 1 else True
    return StationarityReport(
        residual=asc.residual,
        g_residual=asc.g_residual,
        cluster_size=int(len(idx)),
        cluster_width=float((lam.max() - lam.min()) / lam.min()),
        target_dim=int(len(idx)) - 1,
        normalized_lambda1=float(lbar),
        yang_yau_margin=float(yy.margin),
        yang_yau_ok=bool(yy.passed),
        history_monotone=mono,
    )


def load_config(path) -> MaximizeConfig:
    return MaximizeConfig.from_json(json.loads(Path(path).read_text()))
