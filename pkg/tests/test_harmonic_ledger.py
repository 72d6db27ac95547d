import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectralab.harmonic_ledger import (
    HarmonicMapRecord,
    audit_catalog,
    bound_extremal,
    bound_isotropic,
    bound_nonconformal,
    bound_nonisotropic,
    builtin_records,
    clifford_torus,
    cover_projection,
    energy_from_ramification,
    ledger_consistency,
    mutate_branching,
    nonorientable_reduce,
    power_map,
    rectangular_torus,
    veronese,
    veronese_rp2,
)


def _generic(name="rec", chi=-2, n=3, b=0, conformal=False, q=1, orientable=True, **kw):
    return HarmonicMapRecord(name, chi, orientable, n, b, False, conformal, q=q, **kw)


# -- ledger identities ---------------------------------------------------------


@pytest.mark.parametrize("d", range(1, 7))
def test_power_map_ledger(d):
    reps = ledger_consistency(power_map(d))
    assert reps and all(r.passed for r in reps), [r.name for r in reps if not r.passed]


def test_veronese_ledger():
    reps = ledger_consistency(veronese())
    assert all(r.passed for r in reps)
    names = " ".join(r.name for r in reps)
    assert "delta" in names and "sum_p c1(L_p) = 0" in names


@pytest.mark.parametrize("c", [0, -1, -3])
def test_unbranched_torus_constant_ladder(c):
    # 2g - 2 = 0 on the torus, so r(d_p) = c1(L_{p+1}) - c1(L_p) vanishes for
    # any constant ladder above L_0
    rec = HarmonicMapRecord("t", 0, True, 5, 0, False, True, q=3,
                            chern={0: 0, 1: 0, 2: 0, 3: c}, ramification={0: 0, 1: 0})
    assert all(r.passed for r in ledger_consistency(rec))
    assert bound_nonisotropic(rec).rhs == min(0, 3 * 0 + c)


def test_inconsistent_arrays_give_failing_reports():
    rec = power_map(3)
    broken = HarmonicMapRecord(**{**rec.__dict__, "chern": {-1: -6, 0: 1, 1: 6}})
    reps = ledger_consistency(broken)
    failed = [r.name for r in reps if not r.passed]
    assert "c1(L_0) = 0" in failed
    broken = HarmonicMapRecord(**{**rec.__dict__, "ramification": {-1: 4, 0: -1}})
    assert any(r.name == "r(d_0) >= 0" and not r.passed for r in ledger_consistency(broken))


def test_ledger_requires_arrays():
    with pytest.raises(ValueError):
        ledger_consistency(HarmonicMapRecord("x", 2, True, 2, 0, True, True, energy_over_pi=4))


# -- energy ------------------------------------------------------------------------


def test_energy_veronese_exactly_12pi():
    rep = energy_from_ramification(veronese())
    assert rep.over_pi == 12 and rep.agrees and not rep.degenerate


@pytest.mark.parametrize("d", range(1, 7))
def test_energy_power_maps_4pi_d(d):
    rep = energy_from_ramification(power_map(d))
    assert rep.over_pi == 4 * d


def test_energy_three_routes_agree_exactly():
    for rec in (veronese(), *[power_map(d) for d in range(1, 7)], cover_projection(2)):
        m = rec.m
        formula = energy_from_ramification(rec).over_pi
        osc = 2 * rec.osculating[m]
        chern = 2 * sum(rec.chern[p] for p in range(1, m + 1))
        assert formula == osc == chern == rec.energy_over_pi


def test_energy_degenerate_flag():
    rec = HarmonicMapRecord("deg", 0, True, 2, 0, True, True, ramification={0: 0})
    rep = energy_from_ramification(rec)
    assert rep.over_pi == 0 and rep.degenerate


def test_energy_errors():
    with pytest.raises(ValueError, match="total isotropy"):
        energy_from_ramification(clifford_torus())
    wrong = HarmonicMapRecord(**{**power_map(2).__dict__, "energy": None, "energy_over_pi": Fraction(9)})
    with pytest.raises(ValueError):
        energy_from_ramification(wrong)


# -- bounds ------------------------------------------------------------------------


def test_nonisotropic_examples():
    assert bound_nonisotropic(clifford_torus()).rhs == 0
    rec = _generic(chi=-2, n=3, conformal=True, q=2)
    assert bound_nonisotropic(rec).details["topological"] == 4
    kb = HarmonicMapRecord("kb", 0, False, 4, 0, False, True, q=2)
    r = bound_nonisotropic(kb)
    assert r.rhs == 0 and r.passed


def test_klein_bottle_with_branching_flagged():
    kb = HarmonicMapRecord("kb", 0, False, 4, 1, False, True, q=2)
    assert nonorientable_reduce(kb).total_branching == 2
    assert not bound_nonisotropic(kb).passed


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 8), st.integers(2, 12))
def test_topological_bound_identity(g, n):
    rec = _generic(chi=2 - 2 * g, n=n, conformal=True, q=2) if n >= 3 else _generic(chi=2 - 2 * g, n=n)
    r = bound_nonisotropic(rec)
    assert r.details["topological"] == r.details["(n+1)(g-1)"] == Fraction((n + 1) * (g - 1))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 8), st.integers(2, 10))
def test_nonisotropic_q1_coincides_with_nonconformal(g, n):
    rec = _generic(chi=2 - 2 * g, n=n, conformal=False, q=1)
    assert bound_nonisotropic(rec).details["refined"] == bound_nonconformal(rec).rhs


def test_positive_c1_invalidates_chain():
    rec = _generic(chi=-2, n=3, conformal=True, q=2, chern={0: 0, 2: 1})
    assert not bound_nonisotropic(rec).valid and not bound_nonisotropic(rec).passed


def test_isotropic_examples():
    r = bound_isotropic(power_map(2))
    assert r.rhs == 2 and r.lhs == 2 and r.passed and r.relation == "=="
    r = bound_isotropic(veronese())
    assert r.rhs == 0 and r.passed and r.relation == "<="


@pytest.mark.parametrize("d", range(1, 7))
def test_riemann_hurwitz_equality(d):
    r = bound_isotropic(power_map(d))
    assert r.lhs == r.rhs == 2 * d - 2 and r.passed
    assert not bound_isotropic(mutate_branching(power_map(d), +1)).passed
    if d > 1:
        assert not bound_isotropic(mutate_branching(power_map(d), -1)).passed


def test_isotropic_requires_energy():
    rec = HarmonicMapRecord("x", 2, True, 2, 2, True, True)
    with pytest.raises(ValueError, match="energy"):
        bound_isotropic(rec)
    with pytest.raises(ValueError):
        bound_isotropic(clifford_torus())


def test_nonconformal_examples():
    assert bound_nonconformal(_generic(chi=-2, b=2)).passed
    assert not bound_nonconformal(_generic(chi=-2, b=3)).passed
    assert bound_nonconformal(rectangular_torus()).rhs == 0
    sphere = _generic(chi=2, n=3, b=0)
    r = bound_nonconformal(sphere)
    assert r.rhs == -2 and not r.passed and "inconsistent" in r.details
    with pytest.raises(ValueError, match="non-conformal"):
        bound_nonconformal(clifford_torus())


def test_extremal_bound():
    r = bound_extremal(0, 1, 1, 1)
    assert r.details["shape (g+1)(g+k)"] == 1
    r = bound_extremal(3, 1, 2, 1)
    assert r.details["n_max"] == 8 and r.details["nonisotropic_rhs"] == 18
    assert r.rhs >= 18
    with pytest.raises(ValueError, match="korevaar_constant"):
        bound_extremal(2, 1, 1, None)
    with pytest.raises(ValueError, match="multiplicity_constant, korevaar_constant"):
        bound_extremal(2, 1)


def test_extremal_bound_isotropic_scaling():
    # isotropic branch at m = 1: C k (g+1) / (4 pi) + 2 (g - 1)
    for g in range(4):
        r = bound_extremal(g, 2, 1, 100, b=0)
        expected = 100 * 2 * (g + 1) / (4 * math.pi) + 2 * (g - 1)
        assert r.details["isotropic_rhs"] >= expected - 1e-12
        assert r.passed


# -- non-orientable reduction --------------------------------------------------------


def test_nonorientable_reduce():
    kb = HarmonicMapRecord("kb", 0, False, 4, 1, False, True, q=2, energy=3.0)
    red = nonorientable_reduce(kb)
    assert (red.euler_char, red.total_branching, red.energy, red.genus) == (0, 2, 6.0, 1)
    rp2 = nonorientable_reduce(veronese_rp2())
    assert rp2.euler_char == 2 and rp2.energy_over_pi == 12
    with pytest.raises(ValueError):
        nonorientable_reduce(veronese())


def test_rp2_veronese_pulls_back():
    r = bound_isotropic(veronese_rp2())
    assert r.passed and r.rhs == 0


# -- catalog audit and mutations ------------------------------------------------------


def test_catalog_passes():
    res = audit_catalog(builtin_records())
    assert res["passed"], {k: [r.name for r in v if not r.passed] for k, v in res["records"].items()}


BOUND_FUNCS = (bound_isotropic, bound_nonisotropic, bound_nonconformal)


def _bounds(rec):
    out = []
    for f in BOUND_FUNCS:
        try:
            out.append(f(rec))
        except ValueError:
            pass
    return out


def test_single_unit_mutations_past_tight_bounds_flagged():
    flagged = 0
    for rec in builtin_records():
        for r in _bounds(rec):
            assert r.passed
            mut = mutate_branching(rec, +1)
            after = {x.name: x for x in _bounds(mut)}[r.name]
            # one unit past a tight bound must fail; a slack bound absorbs it
            if r.tight or r.relation == "==":
                assert not after.passed, (rec.name, r.name)
                flagged += 1
            elif r.slack >= 1:
                assert after.passed
            # mutation by slack + 1 always fails
            k = int(math.floor(float(r.slack) * (2 if not rec.orientable else 1))) + 1
            assert not {x.name: x for x in _bounds(mutate_branching(rec, k))}[r.name].passed
    assert flagged >= 10


def test_json_roundtrip():
    for rec in builtin_records():
        back = HarmonicMapRecord.from_json(rec.to_json())
        assert back == rec


def test_record_validation():
    with pytest.raises(ValueError, match="even target"):
        HarmonicMapRecord("x", 2, True, 3, 0, True, True)
    with pytest.raises(ValueError, match="conformal"):
        HarmonicMapRecord("x", 2, True, 2, 0, True, False)
    with pytest.raises(ValueError):
        HarmonicMapRecord("x", 1, True, 2, 0, True, True)
    with pytest.raises(ValueError):
        HarmonicMapRecord("x", 2, True, 4, 0, False, True, q=3)
    with pytest.raises(ValueError):
        HarmonicMapRecord("x", 2, True, 2, -1, True, True)
    with pytest.raises(ValueError, match="missing"):
        HarmonicMapRecord.from_json({"name": "x"})
