"""Hyperelliptic curves ``y^2 = p(x)``, their places, divisors and functions.

All arithmetic is exact over the rationals.  A place is a geometric point of
the smooth projective model:

* ``finite``: a point ``(x0, y0)`` with ``p(x0) != 0``; ``sheet = +1`` picks
  ``y0 = +sqrt(p(x0))`` with the principal square root (``i*sqrt(|c|)`` for
  negative ``c``), ``sheet = -1`` the other one;
* ``branch``: the single point over a root of ``p``;
* ``infinity``: index 0 for the odd model, indices 0/1 for the even model,
  where index 0 is the place with ``y / x^(g+1) -> +sqrt(lead)``.

``x0`` is either a rational number or the ``root``-th root of an irreducible
monic ``minpoly`` of degree at least two, roots sorted by real then imaginary
part.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

import mpmath
import sympy
from sympy import Poly, QQ

X = sympy.Symbol("x")


def to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def poly(coeffs_ascending) -> Poly:
    """Polynomial in ``x`` over QQ from ascending rational coefficients."""
    coeffs = [QQ(Fraction(c).numerator, Fraction(c).denominator) for c in coeffs_ascending]
    return Poly(list(reversed(coeffs)) or [QQ(0)], X, domain=QQ)


def coeffs_ascending(P: Poly) -> tuple[Fraction, ...]:
    return tuple(to_fraction(c) for c in reversed(P.all_coeffs()))


def order_of(P: Poly, m: Poly) -> int | float:
    """Multiplicity of the irreducible ``m`` in ``P`` (``inf`` for ``P = 0``)."""
    if P.is_zero:
        return float("inf")
    k = 0
    while True:
        q, r = P.div(m)
        if not r.is_zero:
            return k
        P = q
        k += 1


def series_sqrt(values: list[Fraction], n: int) -> list[Fraction]:
    """First ``n`` coefficients of ``sqrt(f)`` for a series ``f`` with ``f(0) = 1``."""
    f = list(values) + [Fraction(0)] * max(0, n - len(values))
    assert f[0] == 1
    s = [Fraction(1)] + [Fraction(0)] * (n - 1)
    for k in range(1, n):
        acc = f[k] - sum(s[i] * s[k - i] for i in range(1, k))
        s[k] = acc / 2
    return s[:n]


def taylor(P: Poly, x0: Fraction, n: int | None = None) -> list[Fraction]:
    """Coefficients of ``P(x0 + t)`` in ascending powers of ``t``."""
    shifted = P.compose(Poly(X + QQ(x0.numerator, x0.denominator), X, domain=QQ))
    c = list(coeffs_ascending(shifted))
    if n is not None:
        c = (c + [Fraction(0)] * n)[:n]
    return c


@dataclass(frozen=True)
class Place:
    kind: str
    x: Fraction | None = None
    minpoly: tuple[Fraction, ...] | None = None
    root: int = 0
    sheet: int = 0
    # y0 = ypoly(x0) for algebraic split fibers; not part of the identity
    ypoly: tuple[Fraction, ...] | None = field(default=None, compare=False, hash=False)

    @classmethod
    def finite(cls, x0, sheet: int) -> "Place":
        if sheet not in (1, -1):
            raise ValueError("sheet must be +1 or -1")
        return cls("finite", x=Fraction(x0), sheet=sheet)

    @classmethod
    def branch(cls, x0) -> "Place":
        return cls("branch", x=Fraction(x0))

    @classmethod
    def infinity(cls, index: int = 0) -> "Place":
        return cls("infinity", sheet=index)

    @property
    def is_algebraic(self) -> bool:
        return self.minpoly is not None

    def fiber_poly(self) -> Poly:
        """Monic irreducible polynomial whose roots carry the ``x``-coordinate."""
        if self.kind == "infinity":
            raise ValueError("places at infinity have no finite fiber")
        if self.minpoly is not None:
            return poly(self.minpoly)
        return poly([-self.x, 1])

    def sort_key(self):
        kinds = {"finite": 0, "branch": 1, "infinity": 2}
        xk = (0, self.x) if self.x is not None else (1, self.minpoly or (), self.root)
        return (kinds[self.kind], xk, self.sheet)

    def to_json(self) -> dict:
        if self.kind == "infinity":
            return {"x": f"inf{self.sheet}", "sheet": 1}
        if self.minpoly is not None:
            x = {"minpoly": [str(c) for c in self.minpoly], "root": self.root}
        else:
            x = str(self.x)
        return {"x": x, "sheet": "branch" if self.kind == "branch" else self.sheet}

    @classmethod
    def from_json(cls, obj: dict) -> "Place":
        x, sheet = obj["x"], obj.get("sheet", 1)
        if isinstance(x, str) and x.startswith("inf"):
            return cls.infinity(int(x[3:] or 0))
        if isinstance(x, dict):
            mp = tuple(Fraction(c) for c in x["minpoly"])
            if sheet == "branch":
                return cls("branch", minpoly=mp, root=int(x["root"]))
            return cls("finite", minpoly=mp, root=int(x["root"]), sheet=int(sheet))
        if sheet == "branch":
            return cls.branch(Fraction(x))
        return cls.finite(Fraction(x), int(sheet))

    def __str__(self) -> str:
        if self.kind == "infinity":
            return f"inf{self.sheet}"
        xs = str(self.x) if self.minpoly is None else f"root{self.root}({_poly_str(self.minpoly)})"
        if self.kind == "branch":
            return f"Q[{xs}]"
        return f"P[{xs},{'+' if self.sheet > 0 else '-'}]"


def _merge(pairs) -> dict[Place, int]:
    total: dict[Place, int] = {}
    keys: dict[Place, Place] = {}
    for place, mult in pairs:
        if place not in keys or (place.ypoly is not None and keys[place].ypoly is None):
            keys[place] = place
        total[place] = total.get(place, 0) + int(mult)
    return {keys[p]: m for p, m in total.items() if m}


def _poly_str(c) -> str:
    return str(poly(c).as_expr())


class Divisor:
    """Finite formal integer combination of places; immutable."""

    __slots__ = ("_d",)

    def __init__(self, entries=None):
        self._d = _merge(dict(entries or {}).items())

    @property
    def degree(self) -> int:
        return sum(self._d.values())

    @property
    def support(self) -> tuple[Place, ...]:
        return tuple(sorted(self._d, key=Place.sort_key))

    def items(self):
        return [(p, self._d[p]) for p in self.support]

    def mult(self, place: Place) -> int:
        return self._d.get(place, 0)

    def is_effective(self) -> bool:
        return all(m >= 0 for m in self._d.values())

    def positive_part(self) -> "Divisor":
        return Divisor({p: m for p, m in self._d.items() if m > 0})

    def negative_part(self) -> "Divisor":
        return Divisor({p: -m for p, m in self._d.items() if m < 0})

    def __add__(self, other: "Divisor") -> "Divisor":
        out = Divisor()
        out._d = _merge(list(self._d.items()) + list(other._d.items()))
        return out

    def __neg__(self) -> "Divisor":
        return Divisor({p: -m for p, m in self._d.items()})

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __mul__(self, k: int) -> "Divisor":
        return Divisor({p: k * m for p, m in self._d.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Divisor) and self._d == other._d

    def __hash__(self) -> int:
        return hash(frozenset(self._d.items()))

    def __bool__(self) -> bool:
        return bool(self._d)

    def __repr__(self) -> str:
        if not self._d:
            return "Divisor(0)"
        return "Divisor(" + " + ".join(f"{m}*{p}" for p, m in self.items()) + ")"

    def to_json(self) -> list[dict]:
        return [{"place": p.to_json(), "mult": m} for p, m in self.items()]

    @classmethod
    def from_json(cls, items) -> "Divisor":
        d: dict[Place, int] = {}
        for it in items:
            p = Place.from_json(it["place"])
            d[p] = d.get(p, 0) + int(it["mult"])
        return cls(d)


class HyperellipticCurve:
    """Smooth projective model of ``y^2 = p(x)`` with ``p`` squarefree over QQ."""

    def __init__(self, coeffs):
        P = poly(coeffs)
        if P.degree() < 1:
            raise ValueError("p(x) must be non-constant")
        if P.gcd(P.diff(X)).degree() > 0:
            raise ValueError("p(x) is not squarefree")
        self.p = P
        self.coeffs = coeffs_ascending(P)
        n = P.degree()
        self.genus = (n - 1) // 2
        self.model = "hyperelliptic-odd" if n % 2 else "hyperelliptic-even"
        self.places_at_infinity = 1 if n % 2 else 2
        self.lead = to_fraction(P.LC())

    @property
    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus

    @property
    def is_odd(self) -> bool:
        return self.places_at_infinity == 1

    def __repr__(self) -> str:
        return f"HyperellipticCurve(y^2 = {self.p.as_expr()}, genus={self.genus})"

    def __eq__(self, other) -> bool:
        return isinstance(other, HyperellipticCurve) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    @cached_property
    def branch_factors(self) -> list[Poly]:
        _, facs = self.p.factor_list()
        return [f.monic() for f, _ in facs]

    @cached_property
    def reversed_poly(self) -> Poly:
        """``t^(2g+2) p(1/t)``, the model in the chart ``t = 1/x``."""
        if self.is_odd:
            raise ValueError("the chart at infinity is only used for the even model")
        return poly(list(reversed(self.coeffs)))

    def infinity_places(self) -> list[Place]:
        return [Place.infinity(i) for i in range(self.places_at_infinity)]

    def branch_places(self) -> list[Place]:
        """All branch places (finite roots of ``p`` plus infinity for the odd model)."""
        out = []
        for m in self.branch_factors:
            out.extend(_places_over(m, "branch"))
        if self.is_odd:
            out.append(Place.infinity(0))
        return out

    def is_branch_x(self, x0) -> bool:
        return self.p.eval(QQ(Fraction(x0).numerator, Fraction(x0).denominator)) == 0

    def place(self, x0, sheet: int | None = None) -> Place:
        """Place over rational ``x0``; ``sheet`` is ignored over branch points."""
        x0 = Fraction(x0)
        if self.is_branch_x(x0):
            return Place.branch(x0)
        if sheet is None:
            raise ValueError("sheet required over a non-branch point")
        return Place.finite(x0, sheet)

    def value_at(self, x0: Fraction) -> Fraction:
        return to_fraction(self.p.eval(QQ(x0.numerator, x0.denominator)))

    def validate_place(self, place: Place) -> None:
        if place.kind == "infinity":
            if place.sheet not in range(self.places_at_infinity):
                raise ValueError(f"curve has no place {place}")
            return
        m = place.fiber_poly()
        divides = self.p.rem(m).is_zero
        if place.kind == "branch" and not divides:
            raise ValueError(f"{place} is not over a root of p")
        if place.kind == "finite" and divides:
            raise ValueError(f"{place} lies over a root of p; use a branch place")
        if place.minpoly is not None and place.root >= m.degree():
            raise ValueError(f"root index out of range for {place}")

    def to_json(self) -> dict:
        return {"model": self.model, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> "HyperellipticCurve":
        C = cls([Fraction(c) for c in obj["coeffs"]])
        if "model" in obj and obj["model"] != C.model:
            raise ValueError(f"model {obj['model']!r} does not match degree of p")
        return C

    @classmethod
    def load(cls, path) -> "HyperellipticCurve":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _places_over(m: Poly, kind: str, sheet: int = 0) -> list[Place]:
    if m.degree() == 1:
        x0 = -to_fraction(m.monic().TC())
        return [Place(kind, x=x0, sheet=sheet)]
    mp = coeffs_ascending(m.monic())
    return [Place(kind, minpoly=mp, root=k, sheet=sheet) for k in range(m.degree())]


@lru_cache(maxsize=None)
def _algebraic_roots(mp: tuple[Fraction, ...], dps: int = 40) -> tuple:
    with mpmath.workdps(dps):
        coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(mp)]
        roots = mpmath.polyroots(coeffs, maxsteps=500, extraprec=4 * dps)
        roots = [mpmath.mpc(r) for r in roots]
        return tuple(sorted(roots, key=lambda z: (round(float(z.real), 12), round(float(z.imag), 12))))


def algebraic_root(mp: tuple[Fraction, ...], k: int):
    return _algebraic_roots(tuple(mp))[k]


def _eval_mp(coeffs: tuple[Fraction, ...], z):
    acc = mpmath.mpf(0)
    for c in reversed(coeffs):
        acc = acc * z + mpmath.mpf(c.numerator) / c.denominator
    return acc


def sheet_of(curve: HyperellipticCurve, mp: tuple[Fraction, ...], k: int, ypoly) -> int:
    """Sheet sign of the point ``(alpha_k, ypoly(alpha_k))`` over an algebraic root."""
    with mpmath.workdps(40):
        a = algebraic_root(mp, k)
        y0 = _eval_mp(tuple(ypoly), a)
        principal = mpmath.sqrt(_eval_mp(curve.coeffs, a))
        return 1 if abs(y0 - principal) < abs(y0 + principal) else -1


def split_ypoly(A1: Poly, B1: Poly, m: Poly) -> Poly:
    """``s = -A1/B1 mod m``: the value of ``y`` on the sheet where ``A1 + B1 y`` vanishes."""
    return (-A1 * B1.invert(m)).rem(m)


class MeromorphicFunction:
    """Element ``(A(x) + B(x) y) / Q(x)`` of the function field of a curve."""

    def __init__(self, curve: HyperellipticCurve, A: Poly, B: Poly, Q: Poly | None = None):
        Q = Q if Q is not None else Poly(1, X, domain=QQ)
        if Q.is_zero:
            raise ZeroDivisionError("zero denominator")
        g = A.gcd(B).gcd(Q) if not (A.is_zero and B.is_zero) else Q
        if g.degree() > 0:
            A, B, Q = A.quo(g), B.quo(g), Q.quo(g)
        lc = Q.LC()
        self.curve = curve
        self.A = A.quo_ground(lc)
        self.B = B.quo_ground(lc)
        self.Q = Q.monic()

    @classmethod
    def from_parts(cls, curve, a, b=0) -> "MeromorphicFunction":
        """Build ``a(x) + b(x) y`` from sympy rational functions (or numbers) in ``x``."""
        a = sympy.together(sympy.sympify(a))
        b = sympy.together(sympy.sympify(b))
        an, ad = sympy.fraction(a)
        bn, bd = sympy.fraction(b)
        An, Ad = Poly(an, X, domain=QQ), Poly(ad, X, domain=QQ)
        Bn, Bd = Poly(bn, X, domain=QQ), Poly(bd, X, domain=QQ)
        Q = Ad.lcm(Bd)
        return cls(curve, An * Q.quo(Ad), Bn * Q.quo(Bd), Q)

    @classmethod
    def x(cls, curve) -> "MeromorphicFunction":
        return cls.from_parts(curve, X)

    @classmethod
    def y(cls, curve) -> "MeromorphicFunction":
        return cls.from_parts(curve, 0, 1)

    @classmethod
    def constant(cls, curve, c) -> "MeromorphicFunction":
        c = Fraction(c)
        return cls.from_parts(curve, sympy.Rational(c.numerator, c.denominator))

    def is_zero(self) -> bool:
        return self.A.is_zero and self.B.is_zero

    def is_constant(self) -> bool:
        return self.B.is_zero and self.A.degree() <= 0 and self.Q.degree() == 0

    def _coerce(self, other) -> "MeromorphicFunction":
        if isinstance(other, MeromorphicFunction):
            return other
        if isinstance(other, (int, Fraction)):
            return MeromorphicFunction.constant(self.curve, other)
        return MeromorphicFunction.from_parts(self.curve, other)

    def __add__(self, other):
        o = self._coerce(other)
        return MeromorphicFunction(
            self.curve, self.A * o.Q + o.A * self.Q, self.B * o.Q + o.B * self.Q, self.Q * o.Q
        )

    __radd__ = __add__

    def __neg__(self):
        return MeromorphicFunction(self.curve, -self.A, -self.B, self.Q)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        p = self.curve.p
        A = self.A * o.A + self.B * o.B * p
        B = self.A * o.B + self.B * o.A
        return MeromorphicFunction(self.curve, A, B, self.Q * o.Q)

    __rmul__ = __mul__

    def inverse(self) -> "MeromorphicFunction":
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero function")
        norm = self.A * self.A - self.B * self.B * self.curve.p
        return MeromorphicFunction(self.curve, self.A * self.Q, -self.B * self.Q, norm)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = MeromorphicFunction.constant(self.curve, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, MeromorphicFunction):
            return False
        return (self - other).is_zero()

    def __hash__(self):
        return hash((coeffs_ascending(self.A), coeffs_ascending(self.B), coeffs_ascending(self.Q)))

    def __repr__(self) -> str:
        num = (self.A.as_expr() + self.B.as_expr() * sympy.Symbol("y"))
        return f"MeromorphicFunction(({num})/({self.Q.as_expr()}))"

    def to_json(self) -> dict:
        return {
            "A": [str(c) for c in coeffs_ascending(self.A)],
            "B": [str(c) for c in coeffs_ascending(self.B)],
            "Q": [str(c) for c in coeffs_ascending(self.Q)],
        }

    @classmethod
    def from_json(cls, curve, obj) -> "MeromorphicFunction":
        return cls(
            curve,
            poly([Fraction(c) for c in obj.get("A", ["0"])]),
            poly([Fraction(c) for c in obj.get("B", ["0"])]),
            poly([Fraction(c) for c in obj.get("Q", ["1"])]),
        )


# ---------------------------------------------------------------- local orders


def _fiber_split(A: Poly, B: Poly, P: Poly, m: Poly):
    """Orders of ``A + B y`` on the two sheets over the non-branch fiber ``m``.

    Returns ``(j, k, s)``: order ``j + k`` on the sheet where ``y = s`` mod ``m``
    and ``j`` on the other; ``s`` is None when ``k == 0``.
    """
    j = int(min(order_of(A, m), order_of(B, m)))
    mj = m ** j
    A1, B1 = A.quo(mj), B.quo(mj)
    N1 = A1 * A1 - B1 * B1 * P
    k = int(order_of(N1, m))
    if k == 0:
        return j, 0, None
    return j, k, split_ypoly(A1, B1, m)


def _infinity_orders(curve: HyperellipticCurve, A: Poly, B: Poly) -> dict[Place, int]:
    g = curve.genus
    inf = float("inf")
    if curve.is_odd:
        oa = -2 * A.degree() if not A.is_zero else inf
        ob = -2 * B.degree() - (2 * g + 1) if not B.is_zero else inf
        return {Place.infinity(0): int(min(oa, ob))}
    N = max(A.degree() if not A.is_zero else 0, (B.degree() + g + 1) if not B.is_zero else 0)
    At = _reverse(A, N)
    Bt = _reverse(B, N - g - 1)
    m = Poly(X, X, domain=QQ)
    j, k, s = _fiber_split(At, Bt, curve.reversed_poly, m)
    out = {Place.infinity(0): j - N, Place.infinity(1): j - N}
    if s is not None:
        s0 = to_fraction(s.eval(0))
        idx = 0 if s0 > 0 else 1
        out[Place.infinity(idx)] += k
    return out


def _reverse(P: Poly, N: int) -> Poly:
    """``t^N P(1/t)`` as a polynomial in ``t`` (written in the variable ``x``)."""
    if P.is_zero:
        return P
    c = list(coeffs_ascending(P))
    c = c + [Fraction(0)] * (N + 1 - len(c))
    return poly(list(reversed(c[: N + 1])))


def numerator_orders(curve: HyperellipticCurve, A: Poly, B: Poly, extra: Poly | None = None):
    """Orders of the polynomial function ``A + B y`` at every place where it can be
    non-zero, plus every place over the roots of ``extra``."""
    P = curve.p
    out: dict[Place, int] = {}
    N = A * A - B * B * P
    factors: dict[tuple, Poly] = {}
    for F in (N, P, extra):
        if F is None or F.is_zero or F.degree() <= 0:
            continue
        for fac, _ in F.factor_list()[1]:
            fac = fac.monic()
            factors[coeffs_ascending(fac)] = fac
    for m in factors.values():
        if P.rem(m).is_zero:
            o = min(2 * order_of(A, m), 2 * order_of(B, m) + 1)
            for place in _places_over(m, "branch"):
                out[place] = int(o)
            continue
        j, k, s = _fiber_split(A, B, P, m)
        if m.degree() == 1:
            x0 = -to_fraction(m.TC())
            out[Place.finite(x0, 1)] = j
            out[Place.finite(x0, -1)] = j
            if s is not None:
                # y0 = s(x0) is rational, so its sign is the sheet
                sheet = 1 if to_fraction(s.eval(0)) > 0 else -1
                out[Place.finite(x0, sheet)] = j + k
            continue
        mp = coeffs_ascending(m)
        ys = coeffs_ascending(s) if s is not None else None
        for r in range(m.degree()):
            for sheet in (1, -1):
                out[Place("finite", minpoly=mp, root=r, sheet=sheet)] = j
            if ys is not None:
                sheet = sheet_of(curve, mp, r, ys)
                place = Place("finite", minpoly=mp, root=r, sheet=sheet, ypoly=ys)
                del out[place]
                out[place] = j + k
    out.update(_infinity_orders(curve, A, B))
    return out


def order_at(f: MeromorphicFunction, place: Place) -> int:
    """``ord_P(f)`` computed from the local structure of the fiber over ``P``."""
    if f.is_zero():
        raise ValueError("order of the zero function is undefined")
    curve = f.curve
    curve.validate_place(place)
    if place.kind == "infinity":
        num = _infinity_orders(curve, f.A, f.B)[place]
        return num + 2 * f.Q.degree() if curve.is_odd else num + f.Q.degree()
    m = place.fiber_poly()
    e = 2 if place.kind == "branch" else 1
    num = numerator_orders(curve, f.A, f.B, extra=m).get(place, 0)
    return num - e * int(order_of(f.Q, m))


def divisor_of(f: MeromorphicFunction, curve: HyperellipticCurve | None = None) -> Divisor:
    """Principal divisor ``(f) = N_f - P_f``."""
    curve = curve or f.curve
    if f.curve != curve:
        raise ValueError("function lives on a different curve")
    if f.is_zero():
        raise ValueError("undefined divisor: f is the zero function")
    num = numerator_orders(curve, f.A, f.B, extra=f.Q)
    d: dict[Place, int] = {}
    for place, o in num.items():
        if place.kind == "infinity":
            q = 2 * f.Q.degree() if curve.is_odd else f.Q.degree()
            d[place] = o + q
        else:
            e = 2 if place.kind == "branch" else 1
            d[place] = o - e * int(order_of(f.Q, place.fiber_poly()))
    return Divisor(d)


def zero_divisor(f: MeromorphicFunction) -> Divisor:
    return divisor_of(f).positive_part()


def polar_divisor(f: MeromorphicFunction) -> Divisor:
    return divisor_of(f).negative_part()


def differential_divisor(f: MeromorphicFunction) -> Divisor:
    """Divisor of the differential ``f dx / y``."""
    return divisor_of(f) + canonical_divisor(f.curve)


def dx_divisor(curve: HyperellipticCurve) -> Divisor:
    """Divisor of ``dx``: simple zeros at finite branch places, poles at infinity."""
    d = {p: 1 for p in curve.branch_places() if p.kind == "branch"}
    for q in curve.infinity_places():
        d[q] = -3 if curve.is_odd else -2
    return Divisor(d)


def canonical_divisor(curve: HyperellipticCurve) -> Divisor:
    """``(dx/y) = (dx) - (y)``; degree ``2g - 2``."""
    return dx_divisor(curve) - divisor_of(MeromorphicFunction.y(curve))
