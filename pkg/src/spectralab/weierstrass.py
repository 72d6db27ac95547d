"""Weierstrass data of branched, possibly multivalued, minimal immersions.

The immersion attached to a Gauss map ``phi`` and a meromorphic 1-form
``omega`` is

    X(p) = Re  integral_{p0}^{p} ((1 - phi^2) omega, i (1 + phi^2) omega, 2 phi omega),

an isotropic triple, so ``X`` is conformal and harmonic wherever it is
defined.  Its induced metric is ``(|h| (1 + |phi|^2))^2 |dz|^2`` for
``omega = h dz``, its unit normal is the inverse stereographic image of
``phi``, and its branching divisor is the common zero divisor of the three
components.  Loops around punctures may carry translation periods.

Planar data are sympy rational functions of ``z``; data on a hyperelliptic
curve are :class:`~spectralab.curves.MeromorphicFunction` objects with
``omega = f dx / y``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy as sp
from scipy import integrate

from .curves import (
    Divisor,
    HyperellipticCurve,
    MeromorphicFunction,
    Place,
    differential_divisor,
    polar_divisor,
    riemann_roch_basis,
)
from .curves.curve import canonical_divisor

__all__ = [
    "BranchingDivisor",
    "IndexBoundReport",
    "LocalIdentityReport",
    "PeriodRepresentation",
    "QuadratureError",
    "WeierstrassData",
    "Z",
    "branching_divisor",
    "catenoid",
    "enneper",
    "evaluate_immersion",
    "helicoid",
    "index_bound_check",
    "local_identity_check",
    "periods",
    "rational_map_ramification",
]

Z = sp.Symbol("z")


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


def _as_rational(expr) -> sp.Expr:
    e = sp.cancel(sp.sympify(expr, locals={"z": Z, "I": sp.I}))
    if e.free_symbols - {Z}:
        raise ValueError(f"expression {expr!r} may only depend on z")
    if not e.is_rational_function(Z):
        raise ValueError(f"expression {expr!r} is not a rational function of z")
    return e


@dataclass(frozen=True, eq=False)
class WeierstrassData:
    """Gauss map and 1-form on a domain.

    Parameters
    ----------
    domain : "plane", "torus" or HyperellipticCurve
    phi : sympy expression in ``z`` or MeromorphicFunction
    omega : sympy expression ``h(z)`` (meaning ``h dz``) or MeromorphicFunction
        ``f`` (meaning ``f dx / y``)
    punctures : tuple
        Complex points (planar) or places (curves) removed from the domain.
    tau : complex
        Lattice modulus for the torus domain ``C / (Z + tau Z)``.
    multivalued : bool
        Declares that nonzero periods are expected.
    """

    domain: object
    phi: object
    omega: object
    punctures: tuple = ()
    tau: complex = 1j
    multivalued: bool = False
    name: str = ""

    def __post_init__(self):
        if isinstance(self.domain, HyperellipticCurve):
            for obj in (self.phi, self.omega):
                if not isinstance(obj, MeromorphicFunction) or obj.curve != self.domain:
                    raise ValueError("curve data must be meromorphic functions on the domain curve")
            if self.omega.is_zero():
                raise ValueError("omega must not vanish identically")
        elif self.domain in ("plane", "torus"):
            object.__setattr__(self, "phi", _as_rational(self.phi))
            object.__setattr__(self, "omega", _as_rational(self.omega))
            if self.omega == 0:
                raise ValueError("omega must not vanish identically")
            object.__setattr__(self, "punctures", tuple(sp.nsimplify(p) for p in self.punctures))
        else:
            raise ValueError(f"unknown domain {self.domain!r}")

    @property
    def is_planar(self) -> bool:
        return not isinstance(self.domain, HyperellipticCurve)

    def components(self) -> tuple:
        """The three coefficient functions of ``dz`` (or of ``dx/y``)."""
        phi, w = self.phi, self.omega
        if self.is_planar:
            return (sp.cancel((1 - phi**2) * w), sp.cancel(sp.I * (1 + phi**2) * w), sp.cancel(2 * phi * w))
        one = MeromorphicFunction.constant(self.domain, 1)
        return ((one - phi * phi) * w, (one + phi * phi) * w, phi * w)

    @classmethod
    def from_pencil(cls, curve: HyperellipticCurve, phi: MeromorphicFunction, choice: int = 0) -> "WeierstrassData":
        """Data ``(phi, omega)`` with ``omega`` a holomorphic section of
        ``K - 2 P_phi`` (so the immersion has no poles).

        Raises
        ------
        ValueError
            If ``deg(K - 2 P_phi) < 0`` or the linear system is empty.
        """
        D = canonical_divisor(curve) - 2 * polar_divisor(phi)
        if D.degree < 0:
            raise ValueError(
                f"deg(K - 2 P_phi) = {D.degree} < 0: no 1-form omega with (omega) >= 2 P_phi exists"
            )
        basis = riemann_roch_basis(D, curve)
        if not basis:
            raise ValueError("K - 2 P_phi has no holomorphic sections")
        return cls(curve, phi, basis[choice % len(basis)], name="from-pencil")

    # -- serialization ----------------------------------------------------------

    def to_json(self) -> dict:
        if self.is_planar:
            out = {
                "domain": self.domain,
                "phi": str(self.phi),
                "omega": str(self.omega),
                "punctures": [str(p) for p in self.punctures],
                "multivalued": self.multivalued,
            }
            if self.domain == "torus":
                out["tau"] = [self.tau.real, self.tau.imag]
        else:
            out = {
                "domain": self.domain.to_json(),
                "phi": self.phi.to_json(),
                "omega": self.omega.to_json(),
                "punctures": [p.to_json() for p in self.punctures],
                "multivalued": self.multivalued,
            }
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "WeierstrassData":
        dom = obj["domain"]
        if isinstance(dom, dict):
            curve = HyperellipticCurve.from_json(dom)
            return cls(
                curve,
                MeromorphicFunction.from_json(curve, obj["phi"]),
                MeromorphicFunction.from_json(curve, obj["omega"]),
                tuple(Place.from_json(p) for p in obj.get("punctures", [])),
                multivalued=bool(obj.get("multivalued", False)),
                name=obj.get("name", ""),
            )
        tau = complex(*obj["tau"]) if "tau" in obj else 1j
        return cls(
            dom,
            obj["phi"],
            obj["omega"],
            tuple(obj.get("punctures", [])),
            tau=tau,
            multivalued=bool(obj.get("multivalued", False)),
            name=obj.get("name", ""),
        )


def enneper() -> WeierstrassData:
    return WeierstrassData("plane", Z, 1, name="enneper")


def catenoid() -> WeierstrassData:
    return WeierstrassData("plane", Z, 1 / Z**2, punctures=(0,), name="catenoid")


def helicoid() -> WeierstrassData:
    return WeierstrassData("plane", Z, sp.I / Z**2, punctures=(0,), multivalued=True, name="helicoid")


# --------------------------------------------------------------------------
# branching divisor
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BranchingDivisor:
    """Effective divisor ``B`` of zeros of ``dX``.

    ``entries`` maps a point to its multiplicity.  Planar points are
    irreducible factors ``m(z)`` over the rationals (each root carries the
    multiplicity), curve points are places.
    """

    entries: tuple
    total_order: int
    divisor: Divisor | None = None
    identity_checked: bool = False

    def to_json(self) -> dict:
        pts = []
        for pt, mult in self.entries:
            pts.append({"point": pt.to_json() if isinstance(pt, Place) else str(pt), "mult": mult})
        return {"entries": pts, "total_order": self.total_order, "identity_B_eq_omega_minus_2P": self.identity_checked}


def _factor_orders(expr) -> dict:
    # factor over Q(i) so that all three components share the same keys
    num, den = sp.fraction(sp.cancel(expr))
    out: dict = {}
    for part, sign in ((num, 1), (den, -1)):
        part = sp.Poly(part, Z, extension=sp.I)
        for fac, mult in part.factor_list()[1]:
            key = fac.monic().as_expr()
            out[key] = out.get(key, 0) + sign * mult
    return out


def _planar_branching(data: WeierstrassData) -> BranchingDivisor:
    comps = data.components()
    orders = [_factor_orders(c) for c in comps]
    keys = set().union(*orders)
    entries = []
    total = 0
    for m in sorted(keys, key=str):
        mult = min(o.get(m, 0) for o in orders)
        if mult == 0:
            continue
        deg = sp.degree(m, Z)
        punctured = any(sp.simplify(m.subs(Z, p)) == 0 for p in data.punctures)
        if mult < 0:
            if punctured:
                continue
            raise ValueError(f"not an immersion datum: pole of dX at the roots of {m}")
        if punctured:
            continue
        entries.append((m, mult))
        total += deg * mult
    return BranchingDivisor(tuple(entries), total)


def _curve_branching(data: WeierstrassData) -> BranchingDivisor:
    divs = [differential_divisor(c) for c in data.components()]
    support = set().union(*(d.support for d in divs))
    B = {}
    for p in support:
        mult = min(d.mult(p) for d in divs)
        if mult < 0:
            if p in data.punctures:
                continue
            raise ValueError(f"not an immersion datum: pole of dX at {p}")
        if mult and p not in data.punctures:
            B[p] = mult
    Bdiv = Divisor(B)
    checked = False
    if not data.punctures:
        expected = differential_divisor(data.omega) - 2 * polar_divisor(data.phi)
        if Bdiv != expected:
            raise AssertionError(f"B = (omega) - 2 P_phi failed: {Bdiv} != {expected}")
        checked = True
    return BranchingDivisor(tuple(sorted(Bdiv.items(), key=lambda kv: kv[0].sort_key())), Bdiv.degree, Bdiv, checked)


def branching_divisor(data: WeierstrassData) -> BranchingDivisor:
    """Branching divisor ``mult_p B = min_i ord_p(component_i)``.

    On curves (without punctures) it also verifies ``B = (omega) - 2 P_phi``
    as an identity of divisors.

    Raises
    ------
    ValueError
        "not an immersion datum" if some component has a pole at a point
        that is not a declared puncture.
    """
    if data.domain == "torus":
        raise NotImplementedError("branching divisors are computed on planar and curve domains")
    return _planar_branching(data) if data.is_planar else _curve_branching(data)


@dataclass(frozen=True)
class MapRamification:
    """Ramification ``sum_p (e_p - 1)`` of a rational map of the Riemann sphere."""

    degree: int
    entries: tuple
    total: int

    def to_json(self) -> dict:
        return {"degree": self.degree, "entries": [{"point": str(k), "order": v} for k, v in self.entries], "total": self.total}


def rational_map_ramification(phi) -> MapRamification:
    """Count the zeros of ``d phi`` for a rational ``phi(z)``, point by point.

    At finite points ``e_p - 1`` is the vanishing order of the Wronskian
    ``P'Q - PQ'`` of ``phi = P/Q`` (this covers poles too); at infinity it is
    read off from ``phi(1/w)`` at ``w = 0``.  The Riemann-Hurwitz count is not
    used, so the total is an independent check of ``2 deg - 2``.
    """
    phi = _as_rational(phi)
    P, Q = (sp.Poly(e, Z) for e in sp.fraction(sp.cancel(phi)))
    degree = max(P.degree(), Q.degree())
    if degree < 1:
        raise ValueError("phi must be nonconstant")
    W = P.diff(Z) * Q - P * Q.diff(Z)
    entries = []
    for fac, mult in W.factor_list()[1]:
        entries.append((fac.monic().as_expr(), fac.degree() * mult))
    # local coordinate w = 1/z at infinity
    W_ = sp.Symbol("w")
    psi = sp.cancel(phi.subs(Z, 1 / W_))
    if sp.limit(psi, W_, 0) in (sp.oo, -sp.oo, sp.zoo):
        psi = sp.cancel(1 / psi)
    local = sp.Poly(sp.fraction(sp.cancel(psi - psi.subs(W_, 0)))[0], W_)
    e_inf = min(m[0] for m in local.monoms())
    if e_inf > 1:
        entries.append(("infinity", e_inf - 1))
    return MapRamification(degree, tuple(entries), sum(v for _, v in entries))


# --------------------------------------------------------------------------
# numerics on planar / torus domains
# --------------------------------------------------------------------------


def _integrand(data: WeierstrassData):
    if not data.is_planar:
        raise NotImplementedError("numerical integration is implemented for planar and torus domains")
    fs = [sp.lambdify(Z, c, "numpy") for c in data.components()]
    return lambda z: np.array([complex(f(z)) for f in fs])


def _poles(data: WeierstrassData) -> np.ndarray:
    dens = [sp.fraction(sp.cancel(c))[1] for c in data.components()]
    pts = []
    for d in dens:
        P = sp.Poly(d, Z, extension=sp.I)
        if P.degree() > 0:
            P = P.sqf_part()
            pts.extend(np.roots([complex(c) for c in P.all_coeffs()]))
    return np.array(pts, complex)


def _segment_integral(F, a: complex, b: complex, tol: float) -> np.ndarray:
    """``integral_a^b F(z) dz`` (complex 3-vector) by adaptive Gauss-Kronrod."""
    d = b - a
    out = np.zeros(3, complex)
    for k in range(3):
        for part in (np.real, np.imag):
            val, err = integrate.quad(lambda t: part(F(a + t * d)[k] * d), 0.0, 1.0, epsabs=tol, epsrel=tol, limit=200)
            if not np.isfinite(val) or err > 100 * max(tol, tol * abs(val)):
                raise QuadratureError(f"quadrature did not converge on segment {a}->{b} (error {err:.1e})")
            out[k] += val if part is np.real else 1j * val
    return out


def _check_path(poles: np.ndarray, a: complex, b: complex, eps: float = 1e-9) -> None:
    if len(poles) == 0:
        return
    d = b - a
    t = np.clip(np.real((poles - a) * np.conj(d)) / max(abs(d) ** 2, 1e-300), 0, 1)
    if np.min(np.abs(a + t * d - poles)) < eps:
        raise ValueError("integration path passes through a pole")


def _as_complex(p) -> complex:
    """A complex number from a number, a string or a ``[re, im]`` pair."""
    if isinstance(p, (list, tuple)):
        if len(p) != 2:
            raise ValueError(f"expected [re, im], got {p!r}")
        return complex(float(p[0]), float(p[1]))
    return complex(p)


def _loop_segments(loop) -> list[tuple[complex, complex]]:
    """Loop spec -> closed polygon segments.

    ``{"circle": [center, radius], "n": 64}``, ``{"polygon": [z0, z1, ...]}``,
    or for torus domains ``"a"`` / ``"b"`` (lattice generators from 0).
    Points are numbers, strings such as ``"1+2j"`` or ``[re, im]`` pairs.
    """
    if isinstance(loop, dict) and "circle" in loop:
        c, r = _as_complex(loop["circle"][0]), float(loop["circle"][1])
        n = int(loop.get("n", 64))
        pts = [c + r * np.exp(2j * np.pi * k / n) for k in range(n)]
    elif isinstance(loop, dict) and "polygon" in loop:
        pts = [_as_complex(p) for p in loop["polygon"]]
    else:
        raise ValueError(f"unrecognized loop {loop!r}")
    return [(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))]


@dataclass(frozen=True)
class PeriodRepresentation:
    """Periods ``rho(loop)`` in R^3 with residue cross-checks."""

    generators: tuple
    values: tuple
    residue_values: tuple = ()
    max_discrepancy: float = 0.0

    def to_json(self) -> dict:
        return {
            "generators": [g if isinstance(g, (dict, str)) else str(g) for g in self.generators],
            "values": [list(map(float, v)) for v in self.values],
            "residue_values": [None if r is None else list(map(float, r)) for r in self.residue_values],
            "max_discrepancy": self.max_discrepancy,
        }


def _residue_period(data: WeierstrassData, loop) -> np.ndarray | None:
    """``Re(2 pi i sum of residues)`` inside a circular loop, or None."""
    if not (isinstance(loop, dict) and "circle" in loop):
        return None
    c, r = complex(loop["circle"][0]), float(loop["circle"][1])
    inside = [p for p in _poles(data) if abs(p - c) < r]
    # use exact residues at exact roots of the denominators
    out = np.zeros(3)
    for k, comp in enumerate(data.components()):
        den = sp.Poly(sp.fraction(sp.cancel(comp))[1], Z)
        total = 0j
        for root in sp.roots(den, multiple=False) if den.degree() > 0 else {}:
            if abs(complex(root) - c) < r:
                total += complex(sp.residue(comp, Z, root))
        if den.degree() > 0 and len(sp.roots(den, multiple=True)) != den.degree():
            return None  # roots not expressible in radicals
        out[k] = (2j * np.pi * total).real
    del inside
    return out


def periods(data: WeierstrassData, loops, tol: float = 1e-11) -> PeriodRepresentation:
    """``rho(loop) = Re`` of the loop integral of the component triple.

    Planar loops are circles or polygons; torus loops ``"a"``/``"b"`` are
    the straight lattice generators from the origin.  Circular planar loops
    are cross-checked against ``Re(2 pi i * sum of residues)``.
    """
    F = _integrand(data)
    poles = _poles(data)
    values, checks = [], []
    for loop in loops:
        if data.domain == "torus" and loop in ("a", "b"):
            segs = [(0j, 1 + 0j)] if loop == "a" else [(0j, complex(data.tau))]
        else:
            segs = _loop_segments(loop)
        total = np.zeros(3, complex)
        for a, b in segs:
            _check_path(poles, a, b)
            total += _segment_integral(F, a, b, tol)
        values.append(tuple(total.real))
        checks.append(None if data.domain == "torus" else _residue_period(data, loop))
    disc = max(
        (float(np.max(np.abs(np.array(v) - c))) for v, c in zip(values, checks) if c is not None),
        default=0.0,
    )
    return PeriodRepresentation(tuple(map(str, loops)), tuple(values), tuple(None if c is None else tuple(c) for c in checks), disc)


def evaluate_immersion(data: WeierstrassData, basepoint: complex, points, tol: float = 1e-11, via=None) -> np.ndarray:
    """``X(p)`` for each point by integrating along straight segments from
    ``basepoint`` (through the optional waypoints ``via``)."""
    F = _integrand(data)
    poles = _poles(data)
    out = []
    for p in np.atleast_1d(np.asarray(points, complex)):
        path = [complex(basepoint)] + [complex(v) for v in (via or [])] + [complex(p)]
        total = np.zeros(3, complex)
        for a, b in zip(path[:-1], path[1:]):
            if a == b:
                continue
            _check_path(poles, a, b)
            total += _segment_integral(F, a, b, tol)
        out.append(total.real)
    return np.array(out)


@dataclass(frozen=True)
class LocalIdentityReport:
    samples: int
    max_laplacian: float
    max_conformality_defect: float
    max_normal_error: float
    max_metric_error: float
    tol: float
    failures: tuple = ()

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["failures"] = list(self.failures)
        d["passed"] = self.passed
        return d


def local_identity_check(data: WeierstrassData, samples, h: float = 1e-3, tol: float = 1e-5) -> LocalIdentityReport:
    """Finite-difference checks at regular sample points.

    (i) each coordinate of ``X`` is harmonic (fourth-order 9-point Laplacian); (ii) the
    first fundamental form is conformal; (iii) the unit normal equals the
    inverse stereographic image of ``phi``; plus the conformal factor equals
    ``(|h| (1 + |phi|^2))^2``.  Increments of ``X`` are integrated locally, so
    the checks do not depend on a basepoint.  Defects (ii)-(iv) are relative.
    """
    F = _integrand(data)
    phi = sp.lambdify(Z, data.phi, "numpy")
    hfun = sp.lambdify(Z, data.omega, "numpy")
    fails = []
    mx = dict(lap=0.0, conf=0.0, nrm=0.0, met=0.0)
    pts = np.atleast_1d(np.asarray(samples, complex))
    for p in pts:
        def dX(d):
            return _segment_integral(F, p, p + d, 1e-13).real

        xp, xm, yp, ym = dX(h), dX(-h), dX(1j * h), dX(-1j * h)
        far = dX(2 * h) + dX(-2 * h) + dX(2j * h) + dX(-2j * h)
        # fourth-order accurate Laplacian (increments are relative to X(p))
        lap = float(np.max(np.abs(16 * (xp + xm + yp + ym) - far))) / (12 * h**2)
        Xu, Xv = (xp - xm) / (2 * h), (yp - ym) / (2 * h)
        E, G, Fm = Xu @ Xu, Xv @ Xv, Xu @ Xv
        conf = (abs(E - G) + 2 * abs(Fm)) / (E + G)
        g = complex(phi(p))
        n_expected = np.array([2 * g.real, 2 * g.imag, abs(g) ** 2 - 1]) / (abs(g) ** 2 + 1)
        n = np.cross(Xu, Xv)
        n /= np.linalg.norm(n)
        nrm = float(np.linalg.norm(n - n_expected))
        lam = (abs(complex(hfun(p))) * (1 + abs(g) ** 2)) ** 2
        met = abs(0.5 * (E + G) - lam) / lam
        for key, val in (("lap", lap), ("conf", conf), ("nrm", nrm), ("met", met)):
            mx[key] = max(mx[key], float(val))
        bad = [name for name, val in (("harmonic", lap), ("conformal", conf), ("normal", nrm), ("metric", met)) if val > tol]
        if bad:
            fails.append({"point": [p.real, p.imag], "failed": bad})
    return LocalIdentityReport(len(pts), mx["lap"], mx["conf"], mx["nrm"], mx["met"], tol, tuple(map(str, fails)))


# --------------------------------------------------------------------------
# index bound
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class IndexBoundReport:
    h0_K_minus_B: int
    bound: Fraction
    index: int
    passed: bool

    def to_json(self) -> dict:
        return {"h0_K_minus_B": self.h0_K_minus_B, "bound": str(self.bound), "bound_float": float(self.bound), "index": self.index, "passed": self.passed}


def index_bound_check(h0_K_minus_B: int, index) -> IndexBoundReport:
    """``index >= (2 h0(K - B) - 3) / 3`` for a branched minimal immersion
    with branching divisor ``B``; both sides reported exactly."""
    ind = int(getattr(index, "index", index))
    bound = Fraction(2 * int(h0_K_minus_B) - 3, 3)
    return IndexBoundReport(int(h0_K_minus_B), bound, ind, ind >= bound)
