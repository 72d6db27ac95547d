"""Riemann-Roch spaces on hyperelliptic curves by exact linear algebra.

For a divisor ``D`` let ``Q(x)`` be the product of ``m(x)^e`` over the fibers
``m`` carrying positive multiplicity, with ``e`` large enough that ``Q*f`` has
no finite poles for every ``f`` in ``L(D)``.  Then ``Q*f = A(x) + B(x) y`` with
polynomial ``A, B`` (``Q[x] + Q[x] y`` is integrally closed because ``p`` is
squarefree), and the pole bound at infinity caps ``deg A`` and ``deg B``.
``h0(D)`` is the kernel dimension of the order conditions on the coefficients
of ``A`` and ``B``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil

from sympy import Poly, QQ

from .curve import (
    X,
    Divisor,
    HyperellipticCurve,
    MeromorphicFunction,
    Place,
    canonical_divisor,
    coeffs_ascending,
    divisor_of,
    poly,
    series_sqrt,
    sheet_of,
    taylor,
    to_fraction,
)
from .field import nullity, rational_nullspace, squarefree_radical

Row = dict[int, tuple[Fraction, int]]


def _rem_vectors(n: int, M: Poly, factor: Poly | None = None) -> list[list[Fraction]]:
    """Coefficient vectors of ``x^i * factor mod M`` for ``i < n``."""
    size = M.degree()
    out = []
    base = factor if factor is not None else Poly(1, X, domain=QQ)
    for i in range(n):
        r = (Poly(X**i, X, domain=QQ) * base).rem(M)
        c = list(coeffs_ascending(r)) if not r.is_zero else []
        out.append(c + [Fraction(0)] * (size - len(c)))
    return out


def _vanish_mod(rows: list[Row], cols: list[int], vectors, size: int) -> None:
    for r in range(size):
        row = {col: (vec[r], 1) for col, vec in zip(cols, vectors) if vec[r] != 0}
        if row:
            rows.append(row)


def _sqrt_lift(s: Poly, P: Poly, M: Poly) -> Poly:
    """Newton-lift ``s`` with ``s^2 = P mod m`` to a square root of ``P`` modulo ``M = m^k``."""
    s = s.rem(M)
    for _ in range(64):
        if (s * s - P).rem(M).is_zero:
            return s
        s = ((s + P * s.invert(M)) * QQ(1, 2)).rem(M)
    raise ArithmeticError("square-root lift did not converge")


@dataclass
class _Layout:
    deg_a: int
    deg_b: int

    @property
    def ncols(self) -> int:
        return max(self.deg_a + 1, 0) + max(self.deg_b + 1, 0)

    def a(self, i: int) -> int:
        return i

    def b(self, i: int) -> int:
        return max(self.deg_a + 1, 0) + i


def _fibers(curve: HyperellipticCurve, D: Divisor):
    fibers: dict[tuple, dict] = {}
    for place, mult in D.items():
        if place.kind == "infinity":
            continue
        curve.validate_place(place)
        m = place.fiber_poly()
        key = coeffs_ascending(m)
        entry = fibers.setdefault(key, {"m": m, "branch": place.kind == "branch", "places": {}})
        entry["places"][place] = mult
    return fibers


def _geometric_places(curve, m: Poly, branch: bool) -> list[Place]:
    if m.degree() == 1:
        x0 = -to_fraction(m.TC())
        if branch:
            return [Place.branch(x0)]
        return [Place.finite(x0, 1), Place.finite(x0, -1)]
    mp = coeffs_ascending(m)
    if branch:
        return [Place("branch", minpoly=mp, root=r) for r in range(m.degree())]
    return [Place("finite", minpoly=mp, root=r, sheet=s) for r in range(m.degree()) for s in (1, -1)]


def _sheet_rows(rows, lay, a_series, b_series, radical, sigma, j, k_hi) -> None:
    """Rows forcing ``A + B y`` to vanish to order ``j`` on both sheets and to
    order ``k_hi`` on sheet ``sigma``; ``y = sigma*rho*sqrt(e)*S(t)`` locally."""
    rho, e = radical
    for r in range(j):
        row = {lay.a(i): (c[r], 1) for i, c in a_series.items() if c[r] != 0}
        if row:
            rows.append(row)
        row = {lay.b(i): (c[r], 1) for i, c in b_series.items() if c[r] != 0}
        if row:
            rows.append(row)
    for r in range(j, k_hi):
        row = {lay.a(i): (c[r], 1) for i, c in a_series.items() if c[r] != 0}
        row.update({lay.b(i): (sigma * rho * c[r], e) for i, c in b_series.items() if c[r] != 0})
        if row:
            rows.append(row)


def _mul_series(a: list[Fraction], b: list[Fraction], n: int) -> list[Fraction]:
    return [sum(a[i] * b[r - i] for i in range(r + 1) if i < len(a) and r - i < len(b)) for r in range(n)]


def _rational_fiber_rows(rows, lay, curve, x0: Fraction, k_plus: int, k_minus: int) -> None:
    j = max(0, min(k_plus, k_minus))
    k_hi = max(k_plus, k_minus, 0)
    if k_hi == 0:
        return
    c = curve.value_at(x0)
    S = series_sqrt([v / c for v in taylor(curve.p, x0)], k_hi)
    a_series = {}
    b_series = {}
    for i in range(lay.deg_a + 1):
        a_series[i] = taylor(Poly(X**i, X, domain=QQ), x0, k_hi)
    for i in range(lay.deg_b + 1):
        b_series[i] = _mul_series(taylor(Poly(X**i, X, domain=QQ), x0, k_hi), S, k_hi)
    sigma = 1 if k_plus >= k_minus else -1
    _sheet_rows(rows, lay, a_series, b_series, squarefree_radical(c), sigma, j, k_hi)


def _divisibility_rows(rows, lay, M: Poly, which: str, sfactor: Poly | None = None) -> None:
    if M.degree() <= 0:
        return
    size = M.degree()
    if which in ("A", "AB"):
        vecs = _rem_vectors(lay.deg_a + 1, M)
        _vanish_mod(rows, [lay.a(i) for i in range(lay.deg_a + 1)], vecs, size)
    if which in ("B", "AB"):
        vecs = _rem_vectors(lay.deg_b + 1, M)
        _vanish_mod(rows, [lay.b(i) for i in range(lay.deg_b + 1)], vecs, size)
    if which == "A+Bs":
        va = _rem_vectors(lay.deg_a + 1, M)
        vb = _rem_vectors(lay.deg_b + 1, M, sfactor)
        cols = [lay.a(i) for i in range(lay.deg_a + 1)] + [lay.b(i) for i in range(lay.deg_b + 1)]
        _vanish_mod(rows, cols, va + vb, size)


def _algebraic_fiber_rows(rows, lay, curve, m: Poly, thresholds: dict[Place, int], known) -> None:
    values = set(thresholds.values())
    if len(values) == 1:
        k = max(values.pop(), 0)
        _divisibility_rows(rows, lay, m**k, "AB")
        return
    ys = next((p.ypoly for p in known if p.ypoly is not None), None)
    if ys is None:
        raise NotImplementedError(
            "sheet-asymmetric multiplicities over an irrational fiber need a known y-section"
        )
    mp = coeffs_ascending(m)
    orbit = {Place("finite", minpoly=mp, root=r, sheet=sheet_of(curve, mp, r, ys)) for r in range(m.degree())}
    k_s = {thresholds[p] for p in orbit}
    k_o = {thresholds[p] for p in thresholds if p not in orbit}
    if len(k_s) != 1 or len(k_o) != 1:
        raise NotImplementedError("multiplicities must be constant on Galois orbits")
    k1, k2 = k_s.pop(), k_o.pop()
    j = max(0, min(k1, k2))
    _divisibility_rows(rows, lay, m**j, "AB")
    s = poly(ys)
    if k2 > k1:
        s, k1 = -s, k2
    if k1 > j:
        M = m**k1
        _divisibility_rows(rows, lay, M, "A+Bs", _sqrt_lift(s, curve.p, M))


def _branch_fiber_rows(rows, lay, m: Poly, thresholds: dict[Place, int]) -> None:
    values = set(thresholds.values())
    if len(values) != 1:
        raise NotImplementedError("multiplicities must be constant on Galois orbits")
    k = values.pop()
    ja, jb = max(0, ceil(k / 2)), max(0, ceil((k - 1) / 2))
    _divisibility_rows(rows, lay, m**ja, "A")
    _divisibility_rows(rows, lay, m**jb, "B")


def _infinity_rows(rows, lay, curve, D: Divisor) -> None:
    g = curve.genus
    d0, d1 = D.mult(Place.infinity(0)), D.mult(Place.infinity(1))
    dmax = max(d0, d1)
    k0, k1 = dmax - d0, dmax - d1
    j = min(k0, k1)
    k_hi = max(k0, k1)
    if k_hi == 0:
        return
    N = lay.deg_a
    lead = curve.lead
    S = series_sqrt([v / lead for v in coeffs_ascending(curve.reversed_poly)], k_hi)
    a_series, b_series = {}, {}
    for i in range(lay.deg_a + 1):
        c = [Fraction(0)] * k_hi
        if N - i < k_hi:
            c[N - i] = Fraction(1)
        a_series[i] = c
    for i in range(lay.deg_b + 1):
        shift = N - g - 1 - i
        b_series[i] = [S[r - shift] if r >= shift else Fraction(0) for r in range(k_hi)]
    sigma = 1 if k0 >= k1 else -1
    _sheet_rows(rows, lay, a_series, b_series, squarefree_radical(lead), sigma, j, k_hi)


def _system(D: Divisor, curve: HyperellipticCurve):
    """Order conditions for ``L(D)``: returns ``(rows, layout, Q)`` or ``None``
    when no coefficient is admissible."""
    g = curve.genus
    fibers = _fibers(curve, D)
    Q = Poly(1, X, domain=QQ)
    for entry in fibers.values():
        step = 2 if entry["branch"] else 1
        e = max(ceil(max(mult, 0) / step) for mult in entry["places"].values())
        entry["e"] = e
        Q = Q * entry["m"] ** e
    dq = Q.degree()
    if curve.is_odd:
        dinf = D.mult(Place.infinity(0))
        lay = _Layout((2 * dq + dinf) // 2, (2 * dq + dinf - 2 * g - 1) // 2)
    else:
        dmax = max(D.mult(Place.infinity(0)), D.mult(Place.infinity(1)))
        lay = _Layout(dq + dmax, dq + dmax - g - 1)
    if lay.ncols == 0:
        return None
    rows: list[Row] = []
    for entry in fibers.values():
        m, e = entry["m"], entry["e"]
        step = 2 if entry["branch"] else 1
        thresholds = {p: e * step - entry["places"].get(p, 0) for p in _geometric_places(curve, m, entry["branch"])}
        if entry["branch"]:
            _branch_fiber_rows(rows, lay, m, thresholds)
        elif m.degree() == 1:
            x0 = -to_fraction(m.TC())
            _rational_fiber_rows(rows, lay, curve, x0, thresholds[Place.finite(x0, 1)], thresholds[Place.finite(x0, -1)])
        else:
            _algebraic_fiber_rows(rows, lay, curve, m, thresholds, entry["places"])
    if not curve.is_odd:
        _infinity_rows(rows, lay, curve, D)
    return rows, lay, Q


def h0(D: Divisor, curve: HyperellipticCurve) -> int:
    """``dim {f : (f) + D >= 0} + ...`` (the zero function included)."""
    if D.degree < 0:
        return 0
    system = _system(D, curve)
    if system is None:
        return 0
    rows, lay, _ = system
    return nullity(rows, lay.ncols)


def riemann_roch_basis(D: Divisor, curve: HyperellipticCurve) -> list[MeromorphicFunction]:
    """Explicit basis of ``L(D)`` with rational coefficients.

    Raises
    ------
    ValueError
        If ``D`` is not invariant under conjugation, so that ``L(D)`` has no
        basis of functions with rational coefficients.
    """
    if D.degree < 0:
        return []
    system = _system(D, curve)
    if system is None:
        return []
    rows, lay, Q = system
    vectors = rational_nullspace(rows, lay.ncols)
    if len(vectors) != nullity(rows, lay.ncols):
        raise ValueError("L(D) is not defined over the rationals for this divisor")
    na = max(lay.deg_a + 1, 0)
    basis = []
    for vec in vectors:
        A = poly(vec[:na]) if na else Poly(0, X, domain=QQ)
        B = poly(vec[na:]) if lay.ncols > na else Poly(0, X, domain=QQ)
        basis.append(MeromorphicFunction(curve, A, B, Q))
    return basis


@dataclass(frozen=True)
class RiemannRochReport:
    degree: int
    genus: int
    h0_D: int
    h0_K_minus_D: int
    lhs: int
    rhs: int
    ok: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def riemann_roch_check(D: Divisor, curve: HyperellipticCurve) -> RiemannRochReport:
    """Compare ``h0(D) - h0(K - D)`` with ``deg D - g + 1`` as integers."""
    K = canonical_divisor(curve)
    a = h0(D, curve)
    b = h0(K - D, curve)
    lhs = a - b
    rhs = D.degree - curve.genus + 1
    return RiemannRochReport(D.degree, curve.genus, a, b, lhs, rhs, lhs == rhs)


def linearly_equivalent(D1: Divisor, D2: Divisor, curve: HyperellipticCurve) -> bool:
    """``D1 ~ D2`` iff the degree-zero difference has a nonzero section."""
    if D1.degree != D2.degree:
        return False
    return h0(D1 - D2, curve) >= 1


@dataclass(frozen=True)
class Pencil:
    degree: int
    f0: MeromorphicFunction
    f1: MeromorphicFunction
    divisor: Divisor
    base_locus: Divisor

    @property
    def base_point_free(self) -> bool:
        return not self.base_locus


def pencil_of(f: MeromorphicFunction, curve: HyperellipticCurve | None = None) -> Pencil:
    """Pencil spanned by ``{1, f}`` inside ``H0(P_f)``."""
    curve = curve or f.curve
    if f.is_constant():
        raise ValueError("a constant function does not define a pencil")
    div_f = divisor_of(f, curve)
    P = div_f.negative_part()
    base = {}
    for place in div_f.support:
        # the generic member of span{1, f} has order min(0, ord f)
        base[place] = min(0, div_f.mult(place)) + P.mult(place)
    one = MeromorphicFunction.constant(curve, 1)
    return Pencil(P.degree, one, f, P, Divisor(base))


def hyperelliptic_pencil(curve: HyperellipticCurve) -> Divisor:
    """The ``g^1_2``: polar divisor of ``x``."""
    return divisor_of(MeromorphicFunction.x(curve)).negative_part()


def h0_of_doubled_pencil(curve: HyperellipticCurve) -> int:
    return h0(2 * hyperelliptic_pencil(curve), curve)


def place_pool(curve: HyperellipticCurve, xs=range(-3, 4)) -> list[Place]:
    """Places with exact rational data: rational branch points, both sheets over
    small integers and the places at infinity."""
    pool = [p for p in curve.branch_places() if p.kind == "branch" and not p.is_algebraic]
    for x0 in xs:
        if curve.is_branch_x(x0):
            continue
        pool.extend([Place.finite(x0, 1), Place.finite(x0, -1)])
    pool.extend(curve.infinity_places())
    return pool


def random_divisor(curve, rng: random.Random, degree: int, pool=None, spread: int = 2) -> Divisor:
    """Random divisor of the given degree on ``pool`` with some negative entries."""
    pool = pool or place_pool(curve)
    d: dict[Place, int] = {}
    for _ in range(rng.randint(0, spread)):
        p = rng.choice(pool)
        d[p] = d.get(p, 0) - 1
    need = degree - sum(d.values())
    while need != 0:
        p = rng.choice(pool)
        step = 1 if need > 0 else -1
        d[p] = d.get(p, 0) + step
        need -= step
    return Divisor(d)


def random_effective_divisor(curve, rng: random.Random, degree: int, pool=None) -> Divisor:
    pool = pool or place_pool(curve)
    d: dict[Place, int] = {}
    for _ in range(degree):
        p = rng.choice(pool)
        d[p] = d.get(p, 0) + 1
    return Divisor(d)


@dataclass
class PencilProbeReport:
    genus: int
    degree: int
    samples: int
    with_pencil: list[Divisor] = field(default_factory=list)
    contains_g12: list[bool] = field(default_factory=list)
    label: str = "probe (randomized evidence, not a proof)"

    @property
    def all_hyperelliptic(self) -> bool:
        return all(self.contains_g12)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "genus": self.genus,
            "degree": self.degree,
            "samples": self.samples,
            "divisors_with_h0_ge_2": [d.to_json() for d in self.with_pencil],
            "contains_g12": self.contains_g12,
            "all_hyperelliptic": self.all_hyperelliptic,
        }


def unique_pencil_probe(curve: HyperellipticCurve, d: int, samples: int, seed: int = 0) -> PencilProbeReport:
    """Sample effective degree-``d`` divisors and test every one with ``h0 >= 2``
    for containing the hyperelliptic class (``D - g^1_2`` effective up to
    equivalence; for ``d = 2`` this is ``D ~ g^1_2``)."""
    if d < 1:
        raise ValueError("degree must be positive")
    rng = random.Random(seed)
    pool = place_pool(curve)
    g12 = hyperelliptic_pencil(curve)
    report = PencilProbeReport(curve.genus, d, samples)
    for _ in range(samples):
        D = random_effective_divisor(curve, rng, d, pool)
        if h0(D, curve) >= 2:
            report.with_pencil.append(D)
            report.contains_g12.append(h0(D - g12, curve) >= 1)
    return report
