import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectralab.conformal_max import (
    MaximizeConfig,
    _ascent,
    _project_spectral_simplex,
    maximize_lambda1,
    stationarity_report,
)
from spectralab.mesh import Mesh, MeshError, build_flat_torus, build_sphere, read_off
from spectralab.spectral import assemble, eigen_solve

EQUILATERAL = complex(0.5, math.sqrt(3) / 2)


def _smooth_sphere_density(mesh, seed=1):
    rng = np.random.default_rng(seed)
    P = mesh.vertices
    return np.exp(0.4 * (P @ rng.standard_normal(3)) + 0.3 * ((P @ rng.standard_normal(3)) ** 2 - 1 / 3))


def _smooth_torus_density(mesh):
    P = mesh.vertices
    return np.exp(0.3 * np.cos(2 * np.pi * (P[:, 0] + 0.3)) + 0.2 * np.sin(2 * np.pi * P[:, 1] / P[:, 1].max()))


@pytest.fixture(scope="module")
def sphere_run():
    m = build_sphere(3)
    return maximize_lambda1(m, _smooth_sphere_density(m), {"max_iters": 40})


def test_sphere_reaches_hersch_value(sphere_run):
    s = sphere_run
    assert s.history[0] < 0.8 * 8 * np.pi  # genuinely perturbed start
    assert abs(s.normalized_lambda1 / (8 * np.pi) - 1) < 0.01
    rep = stationarity_report(s)
    assert rep.cluster_size == 3 and rep.target_dim == 2
    assert rep.history_monotone and rep.yang_yau_ok
    assert s.label == "locally maximal candidate"


def test_history_monotone_up_to_backtracking(sphere_run):
    h = np.array(sphere_run.history)
    assert np.all(np.diff(h) >= -sphere_run.config.backtrack_tol * h[:-1] - 1e-12)


def test_area_is_renormalized(sphere_run):
    _, M = assemble(sphere_run.mesh, sphere_run.density)
    assert M.sum() == pytest.approx(1.0, rel=1e-12)
    assert sphere_run.spectrum.area == pytest.approx(1.0, rel=1e-12)


def test_restart_is_a_fixed_point(sphere_run):
    s = sphere_run
    again = maximize_lambda1(s.mesh, s.density, {"max_iters": 5})
    assert abs(again.normalized_lambda1 - s.normalized_lambda1) < 10 * s.config.tol * s.normalized_lambda1


@pytest.mark.parametrize(
    "tau,target,size",
    [(EQUILATERAL, 8 * np.pi**2 / np.sqrt(3), 6), (1j, 4 * np.pi**2, 4)],
)
def test_flat_tori_targets(tau, target, size):
    m = build_flat_torus(tau, 16)
    s = maximize_lambda1(m, _smooth_torus_density(m), {"max_iters": 40})
    assert s.history[0] < 0.95 * target
    assert abs(s.normalized_lambda1 / target - 1) < 0.02
    assert stationarity_report(s).cluster_size == size


def test_derivative_formula_matches_finite_differences():
    # simple first eigenvalue on a perturbed square torus
    m = build_flat_torus(1j, 10)
    f = _smooth_torus_density(m)
    K, M = assemble(m, f)
    spec = eigen_solve(K, M, 4)
    assert spec.eigenvalues[2] > 1.01 * spec.eigenvalues[1]
    asc = _ascent(m, f, spec, 1e-6)
    assert list(asc.cluster) == [1]
    rng = np.random.default_rng(0)
    d = rng.standard_normal(m.V)  # delta log f per vertex
    T = m.triangles
    w = (f[T].mean(axis=1) / m.scale[T].mean(axis=1)) ** 2 * m.triangle_areas()
    # w_T ~ (mean of f over T)**2, so delta log w_T = 2 sum f_v d_v / sum f_v
    dlogw = 2 * (f[T] * d[T]).sum(axis=1) / f[T].sum(axis=1)
    # h_T = 1 - A e_T for the single eigenfunction
    from spectralab.spectral import _LOCAL_MASS

    u = spec.eigenvectors[:, 1][T]
    e = np.einsum("fa,ab,fb->f", u, _LOCAL_MASS, u)
    h = 1 - w.sum() * e
    predicted = spec.eigenvalues[1] * float(w @ (h * dlogw))

    def lbar(eps):
        K2, M2 = assemble(m, f * np.exp(eps * d))
        return eigen_solve(K2, M2, 3).normalized[1]

    eps = 1e-5
    fd = (lbar(eps) - lbar(-eps)) / (2 * eps)
    assert fd == pytest.approx(predicted, rel=1e-4)


def test_zeros_stay_zero():
    m = build_sphere(2)
    f = np.ones(m.V)
    f[0] = 0.0
    s = maximize_lambda1(m, f, {"max_iters": 3})
    assert s.density.values[0] == 0.0
    assert np.all(s.density.values[1:] > 0)


def test_disconnected_mesh_rejected():
    a = build_sphere(0)
    T = np.vstack([a.triangles, a.triangles + a.V])
    L = np.vstack([a.lengths, a.lengths])
    m = Mesh(T, L, 2 * a.V, declared_genus=None)
    with pytest.raises(MeshError, match="disconnected"):
        maximize_lambda1(m)


def test_invalid_inputs():
    m = build_sphere(1)
    with pytest.raises(MeshError):
        maximize_lambda1(m, -np.ones(m.V))
    with pytest.raises(ValueError):
        MaximizeConfig(damping=0)
    with pytest.raises(ValueError, match="unknown"):
        MaximizeConfig.from_json({"steps": 3})


def test_trace_and_density_outputs(tmp_path, sphere_run):
    s = sphere_run
    s.write_trace(tmp_path / "trace.csv")
    rows = list(csv.DictReader(open(tmp_path / "trace.csv")))
    assert rows[0].keys() >= {"iter", "lambda1_bar", "cluster_width", "residual"}
    chosen = [float(r["lambda1_bar"]) for r in rows if r["chosen"] == "1"]
    assert chosen == pytest.approx(s.history)
    s.write_density(tmp_path / "final.off")
    mesh, dens = read_off(tmp_path / "final.off")
    assert np.allclose(dens.values, s.density.values)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6))
def test_spectral_simplex_projection(k, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((k, k))
    P = _project_spectral_simplex(A + A.T)
    w = np.linalg.eigvalsh(P)
    assert w.min() >= -1e-12 and np.trace(P) == pytest.approx(1.0)
    assert np.allclose(_project_spectral_simplex(P), P, atol=1e-12)
