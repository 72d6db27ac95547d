import random

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_valid_pair
from spectralab.curves import (
    HyperellipticCurve,
    MeromorphicFunction,
    canonical_divisor,
    differential_divisor,
    h0,
    polar_divisor,
)
from spectralab.weierstrass import (
    WeierstrassData,
    Z,
    branching_divisor,
    catenoid,
    enneper,
    evaluate_immersion,
    helicoid,
    index_bound_check,
    local_identity_check,
    periods,
    rational_map_ramification,
)

ODD = {g: HyperellipticCurve([-1] + [0] * (2 * g) + [1]) for g in range(1, 6)}


def _grid(n, lo=-1.0, hi=1.0, shift=0.0):
    xs = np.linspace(lo, hi, n)
    return (xs[:, None] + 1j * xs[None, :]).ravel() + shift


def test_components_are_isotropic():
    for data in (enneper(), catenoid(), helicoid()):
        c = data.components()
        assert sp.simplify(sum(ci**2 for ci in c)) == 0


def test_enneper_closed_form():
    # X = Re(z - z^3/3, i(z + z^3/3), z^2)
    pts = _grid(4)
    got = evaluate_immersion(enneper(), 0, pts)
    ref = np.stack([(pts - pts**3 / 3).real, (1j * (pts + pts**3 / 3)).real, (pts**2).real], axis=1)
    assert np.allclose(got, ref, atol=1e-10)


def test_catenoid_closed_form():
    # X = Re(-1/z - z, i(z - 1/z), 2 log z); x^2 + y^2 = 4 cosh^2(log|z|)
    pts = np.array([np.exp(r + 1j * t) for r in (-0.7, 0.2, 0.9) for t in (0.3, 2.0)])
    got = evaluate_immersion(catenoid(), 1, pts) + np.array([-2.0, 0, 0])
    assert np.allclose(np.hypot(got[:, 0], got[:, 1]), 2 * np.cosh(np.log(np.abs(pts))), atol=1e-9)
    assert np.allclose(got[:, 2], 2 * np.log(np.abs(pts)), atol=1e-9)


def test_periods_catenoid_and_helicoid():
    loop = [{"circle": [0, 1], "n": 16}]
    rc = periods(catenoid(), loop)
    assert np.allclose(rc.values[0], 0, atol=1e-8)
    rh = periods(helicoid(), loop)
    assert np.allclose(rh.values[0], (0, 0, -4 * np.pi), atol=1e-8)
    assert rh.max_discrepancy < 1e-8 and rc.max_discrepancy < 1e-8


def test_periods_polygon_loop_matches_circle():
    sq = {"polygon": [1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]}
    assert np.allclose(periods(helicoid(), [sq]).values[0], (0, 0, -4 * np.pi), atol=1e-8)


def test_loop_not_enclosing_puncture_is_exact():
    r = periods(helicoid(), [{"circle": [3, 1]}])
    assert np.allclose(r.values[0], 0, atol=1e-9)


def test_path_through_pole_rejected():
    with pytest.raises(ValueError, match="pole"):
        evaluate_immersion(catenoid(), -1, [1])


def test_local_identities_enneper_50x50():
    rep = local_identity_check(enneper(), _grid(50), tol=1e-5)
    assert rep.passed, rep.failures[:3]
    assert rep.samples == 2500


def test_local_identities_catenoid_and_helicoid():
    for data in (catenoid(), helicoid()):
        rep = local_identity_check(data, _grid(6, 0.5, 1.5))
        assert rep.passed


def test_swapped_sign_triple_is_not_null():
    # the ordering (1 + phi^2, i (1 - phi^2), 2 phi) squares to 8 phi^2, so it
    # would not give a conformal map; the implemented ordering is null
    phi = Z
    swapped = (1 + phi**2, sp.I * (1 - phi**2), 2 * phi)
    assert sp.expand(sum(c**2 for c in swapped)) == 8 * Z**2


def test_branching_planar():
    B = branching_divisor(WeierstrassData("plane", Z, Z**2))
    assert B.total_order == 2
    assert branching_divisor(enneper()).total_order == 0
    # phi = z^2, omega = dz: no common zero
    assert branching_divisor(WeierstrassData("plane", Z**2, 1)).total_order == 0
    # conjugate pair of branch points
    B = branching_divisor(WeierstrassData("plane", Z, (Z**2 + 1) ** 3))
    assert B.total_order == 6


def test_branching_planar_rejects_poles():
    with pytest.raises(ValueError, match="not an immersion datum"):
        branching_divisor(WeierstrassData("plane", Z, 1 / Z))
    # declared puncture: allowed
    assert branching_divisor(catenoid()).total_order == 0


def test_from_pencil_genus3():
    C = ODD[3]
    data = WeierstrassData.from_pencil(C, MeromorphicFunction.x(C))
    B = branching_divisor(data)
    assert B.identity_checked and B.total_order == 0


def test_from_pencil_negative_degree():
    C = ODD[2]
    with pytest.raises(ValueError, match="< 0"):
        WeierstrassData.from_pencil(C, MeromorphicFunction.x(C))


def test_curve_pole_rejected():
    C = ODD[2]
    bad = WeierstrassData(C, MeromorphicFunction.x(C), MeromorphicFunction.constant(C, 1))
    with pytest.raises(ValueError, match="not an immersion datum"):
        branching_divisor(bad)


def test_branching_identity_fuzz():
    rng = random.Random(4)
    count = 0
    for _ in range(40):
        C, phi, omega = random_valid_pair(rng)
        data = WeierstrassData(C, phi, omega)
        B = branching_divisor(data)
        assert B.identity_checked
        assert B.divisor == differential_divisor(omega) - 2 * polar_divisor(phi)
        assert B.total_order == 2 * C.genus - 2 - 2 * polar_divisor(phi).degree
        count += 1
    assert count == 40


def test_index_bound_check():
    r = index_bound_check(3, 1)
    assert r.passed and r.bound == 1
    assert not index_bound_check(6, 2).passed
    assert index_bound_check(0, 0).passed


def test_index_bound_with_canonical_h0():
    # unbranched: h0(K - B) = h0(K) = genus
    C = ODD[3]
    assert h0(canonical_divisor(C), C) == 3
    assert index_bound_check(3, 1).passed


def test_json_roundtrip():
    for data in (catenoid(), helicoid()):
        back = WeierstrassData.from_json(data.to_json())
        assert sp.simplify(back.phi - data.phi) == 0 and sp.simplify(back.omega - data.omega) == 0
        assert back.multivalued == data.multivalued
    C = ODD[3]
    d = WeierstrassData.from_pencil(C, MeromorphicFunction.x(C))
    back = WeierstrassData.from_json(d.to_json())
    assert back.omega == d.omega and back.phi == d.phi


def test_invalid_inputs():
    with pytest.raises(ValueError):
        WeierstrassData("plane", "z + w", 1)
    with pytest.raises(ValueError):
        WeierstrassData("plane", Z, 0)
    with pytest.raises(ValueError):
        WeierstrassData("sphere", Z, 1)
    with pytest.raises(ValueError):
        WeierstrassData("plane", sp.exp(Z), 1)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.integers(-3, 3), min_size=1, max_size=5),
    st.lists(st.integers(-3, 3), min_size=1, max_size=4),
)
def test_rational_map_ramification_matches_riemann_hurwitz(num, den):
    # zero-by-zero count of d phi on the sphere versus 2 deg - 2
    P = sum(c * Z**i for i, c in enumerate(num))
    Q = sum(c * Z**i for i, c in enumerate(den))
    if Q == 0 or P == 0:
        return
    phi = sp.cancel(P / Q)
    n, d = sp.fraction(phi)
    deg = max(sp.degree(n, Z), sp.degree(d, Z))
    if deg < 1:
        with pytest.raises(ValueError):
            rational_map_ramification(phi)
        return
    r = rational_map_ramification(phi)
    assert r.degree == deg and r.total == 2 * deg - 2


@pytest.mark.parametrize("d", range(1, 7))
def test_power_map_ramification(d):
    r = rational_map_ramification(Z**d)
    assert r.total == 2 * d - 2
    assert dict(r.entries) == ({} if d == 1 else {Z: d - 1, "infinity": d - 1})
