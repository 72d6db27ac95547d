"""Bookkeeping for harmonic sequences of maps into spheres.

A harmonic map ``Phi: M -> S^n`` from a closed surface carries a harmonic
sequence of line bundles ``L_p`` with Chern numbers ``c1(L_p)`` and
ramification indices ``r(d_p) >= 0`` of the maps ``d_p: L_p -> L_{p+1}``.
They satisfy

    r(d_p) = 2 gamma - 2 + c1(L_{p+1}) - c1(L_p),     c1(L_0) = 0,
    c1(L_{-p}) = -c1(L_p),                             b = r(d_0),

and, for a totally isotropic map into ``S^{2m}`` with osculating degrees
``delta_k`` of its directrix,

    c1(L_{-m+k}) = delta_{k-1} - delta_k    (delta_{-1} = 0),
    E = 2 pi delta_m = 2 pi sum_{p=1}^m c1(L_p)
      = 2 pi (m (m + 1) (1 - gamma) + sum_{j<m} (m - j) r(d_j)).

The records here are certified metadata (closed-form maps or glued-mesh
computations); this module checks every identity and branching bound on
them exactly, with integers and fractions wherever the data allow.

Energies are stored as a float ``energy`` and, when known exactly, as the
rational multiple ``energy_over_pi`` of pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

__all__ = [
    "BoundReport",
    "EnergyReport",
    "HarmonicMapRecord",
    "audit",
    "audit_catalog",
    "bound_extremal",
    "bound_isotropic",
    "bound_nonconformal",
    "bound_nonisotropic",
    "builtin_records",
    "clifford_torus",
    "cover_projection",
    "energy_from_ramification",
    "ledger_consistency",
    "mutate_branching",
    "nonorientable_reduce",
    "power_map",
    "rectangular_torus",
    "veronese",
    "veronese_rp2",
]

_FLOAT_RTOL = 1e-9


def _int_keys(d) -> dict[int, int]:
    return {int(k): int(v) for k, v in (d or {}).items()}


@dataclass(frozen=True)
class HarmonicMapRecord:
    """Metadata of a linearly full harmonic map ``M -> S^n``.

    Parameters
    ----------
    euler_char : int
    orientable : bool
    target_dim : int
        ``n`` in ``S^n``.
    total_branching : int
        ``b``, branch points counted with multiplicity.
    totally_isotropic : bool
    conformal : bool
    q : int, optional
        First level with a nonvanishing ``H_q`` (non-isotropic maps).
        Conformal non-isotropic maps have ``q >= 2``, non-conformal ones
        ``q = 1``.
    energy, energy_over_pi : float / Fraction, optional
    chern : dict[int, int], optional
        ``p -> c1(L_p)``.
    ramification : dict[int, int], optional
        ``p -> r(d_p)``.
    osculating : tuple[int, ...], optional
        ``(delta_0, ..., delta_m)``.
    """

    name: str
    euler_char: int
    orientable: bool
    target_dim: int
    total_branching: int
    totally_isotropic: bool
    conformal: bool
    linearly_full: bool = True
    q: int | None = None
    energy: float | None = None
    energy_over_pi: Fraction | None = None
    chern: dict = field(default_factory=dict)
    ramification: dict = field(default_factory=dict)
    osculating: tuple = ()
    provenance: str = ""

    def __post_init__(self):
        object.__setattr__(self, "chern", _int_keys(self.chern))
        object.__setattr__(self, "ramification", _int_keys(self.ramification))
        object.__setattr__(self, "osculating", tuple(int(d) for d in self.osculating))
        if self.energy_over_pi is not None:
            e = Fraction(self.energy_over_pi)
            object.__setattr__(self, "energy_over_pi", e)
            if self.energy is None:
                object.__setattr__(self, "energy", float(e) * math.pi)
            elif not math.isclose(self.energy, float(e) * math.pi, rel_tol=_FLOAT_RTOL, abs_tol=1e-12):
                raise ValueError(f"{self.name}: energy {self.energy} != {e} pi")
        if self.orientable and self.euler_char % 2:
            raise ValueError(f"{self.name}: orientable surfaces have even Euler characteristic")
        if self.euler_char > 2 or (not self.orientable and self.euler_char > 1):
            raise ValueError(f"{self.name}: impossible Euler characteristic {self.euler_char}")
        if self.target_dim < 2:
            raise ValueError(f"{self.name}: target dimension must be >= 2")
        if self.total_branching < 0:
            raise ValueError(f"{self.name}: total branching must be >= 0")
        if self.energy is not None and self.energy < 0:
            raise ValueError(f"{self.name}: energy must be >= 0")
        if self.totally_isotropic:
            if self.target_dim % 2:
                raise ValueError(f"{self.name}: totally isotropic maps have even target dimension")
            if not self.conformal:
                raise ValueError(f"{self.name}: totally isotropic maps are conformal")
        elif self.q is not None:
            if self.q < 1 or 2 * self.q > self.target_dim + 1:
                raise ValueError(f"{self.name}: need 1 <= q and 2q <= n + 1 (q={self.q}, n={self.target_dim})")
            if (self.q == 1) == self.conformal:
                raise ValueError(f"{self.name}: q = 1 exactly for non-conformal maps")

    # -- derived ---------------------------------------------------------------

    @property
    def genus(self) -> int | None:
        return (2 - self.euler_char) // 2 if self.orientable else None

    @property
    def m(self) -> int | None:
        return self.target_dim // 2 if self.totally_isotropic else None

    @property
    def energy_exact(self) -> bool:
        return self.energy_over_pi is not None

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "euler_char": self.euler_char,
            "orientable": self.orientable,
            "target_dim": self.target_dim,
            "total_branching": self.total_branching,
            "totally_isotropic": self.totally_isotropic,
            "conformal": self.conformal,
            "linearly_full": self.linearly_full,
            "provenance": self.provenance,
        }
        if self.orientable:
            out["genus"] = self.genus
        if self.q is not None:
            out["q"] = self.q
        if self.energy is not None:
            out["energy"] = self.energy
        if self.energy_over_pi is not None:
            out["energy_over_pi"] = str(self.energy_over_pi)
        if self.chern:
            out["chern"] = {str(k): v for k, v in sorted(self.chern.items())}
        if self.ramification:
            out["ramification"] = {str(k): v for k, v in sorted(self.ramification.items())}
        if self.osculating:
            out["osculating"] = list(self.osculating)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "HarmonicMapRecord":
        try:
            chi = obj["euler_char"] if "euler_char" in obj else 2 - 2 * int(obj["genus"])
            rec = cls(
                name=str(obj.get("name", "")),
                euler_char=int(chi),
                orientable=bool(obj.get("orientable", True)),
                target_dim=int(obj["target_dim"]),
                total_branching=int(obj["total_branching"]),
                totally_isotropic=bool(obj["totally_isotropic"]),
                conformal=bool(obj.get("conformal", obj["totally_isotropic"])),
                linearly_full=bool(obj.get("linearly_full", True)),
                q=obj.get("q"),
                energy=obj.get("energy"),
                energy_over_pi=Fraction(obj["energy_over_pi"]) if "energy_over_pi" in obj else None,
                chern=obj.get("chern", {}),
                ramification=obj.get("ramification", {}),
                osculating=tuple(obj.get("osculating", ())),
                provenance=str(obj.get("provenance", "")),
            )
        except KeyError as exc:
            raise ValueError(f"record is missing field {exc}") from None
        if "genus" in obj and rec.orientable and int(obj["genus"]) != rec.genus:
            raise ValueError(f"{rec.name}: genus {obj['genus']} inconsistent with euler_char {rec.euler_char}")
        return rec


@dataclass(frozen=True)
class BoundReport:
    """Outcome of one identity (``relation == "=="``) or bound (``"<="``)."""

    name: str
    lhs: object
    rhs: object
    relation: str = "<="
    details: dict = field(default_factory=dict)
    tol: float = 0.0
    valid: bool = True  # side conditions of the bound's derivation hold

    @property
    def slack(self):
        if self.lhs is None or self.rhs is None:
            return None
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        if not self.valid:
            return False
        if self.lhs is None or self.rhs is None:
            return True
        diff = self.rhs - self.lhs
        if self.relation == "==":
            return abs(diff) <= self.tol
        return diff >= -self.tol

    @property
    def tight(self) -> bool:
        return self.relation == "<=" and self.slack is not None and abs(self.slack) <= self.tol

    def to_json(self) -> dict:
        conv = lambda v: v if v is None or isinstance(v, (int, float, bool)) else (str(v) if isinstance(v, Fraction) else v)
        return {
            "name": self.name,
            "lhs": conv(self.lhs),
            "rhs": conv(self.rhs),
            "relation": self.relation,
            "slack": conv(self.slack),
            "passed": self.passed,
            "details": {k: conv(v) for k, v in self.details.items()},
            "valid": self.valid,
        }


# --------------------------------------------------------------------------
# identities
# --------------------------------------------------------------------------


def ledger_consistency(rec: HarmonicMapRecord) -> list[BoundReport]:
    """Check every ledger identity for which the record carries data.

    Inconsistencies produce failing reports, never exceptions.
    """
    out: list[BoundReport] = []
    c, r, delta = rec.chern, rec.ramification, rec.osculating
    if not c and not r:
        raise ValueError(f"{rec.name}: ledger needs Chern numbers and/or ramification indices")
    k2 = 2 * rec.genus - 2 if rec.orientable else -rec.euler_char
    if 0 in c:
        out.append(BoundReport("c1(L_0) = 0", c[0], 0, "=="))
    for p in sorted(c):
        if p > 0 and -p in c:
            out.append(BoundReport(f"c1(L_-{p}) = -c1(L_{p})", c[-p], -c[p], "=="))
    m = rec.m
    if m is not None and all(p in c for p in range(-m, m + 1)):
        out.append(BoundReport("sum_p c1(L_p) = 0", sum(c[p] for p in range(-m, m + 1)), 0, "=="))
    for p in sorted(r):
        out.append(BoundReport(f"r(d_{p}) >= 0", 0, r[p]))
    if 0 in r:
        out.append(BoundReport("b = r(d_0)", rec.total_branching, r[0], "=="))
    for p in sorted(r):
        if p in c and p + 1 in c:
            out.append(BoundReport(f"r(d_{p}) = 2g-2 + c1(L_{p + 1}) - c1(L_{p})", r[p], k2 + c[p + 1] - c[p], "=="))
    for k in sorted(q for q in c if q > 0):
        if all(p in r for p in range(k)):
            out.append(BoundReport(f"c1(L_{k}) + {k}(2g-2) = sum_{{p<{k}}} r(d_p)", c[k] + k * k2, sum(r[p] for p in range(k)), "=="))
    if delta:
        if m is None:
            out.append(BoundReport("osculating degrees need total isotropy", 1, 0, "=="))
        else:
            if len(delta) != m + 1:
                out.append(BoundReport("len(delta) = m + 1", len(delta), m + 1, "=="))
            else:
                d = (0,) + delta  # d[k + 1] = delta_k, delta_{-1} = 0
                for k in range(m + 1):
                    if -m + k in c:
                        out.append(BoundReport(f"c1(L_{-m + k}) = delta_{k - 1} - delta_{k}", c[-m + k], d[k] - d[k + 1], "=="))
                out.extend(_energy_routes(rec))
    return out


def _energy_routes(rec: HarmonicMapRecord) -> list[BoundReport]:
    """``E = 2 pi delta_m = 2 pi sum c1(L_p) = formula``, in units of pi."""
    m, c = rec.m, rec.chern
    routes = {}
    if rec.osculating:
        routes["2 delta_m"] = Fraction(2 * rec.osculating[m])
        # top level energy pi (delta_{m-1} + delta_m) of psi_0 = Phi
        prev = rec.osculating[m - 1] if m >= 1 else 0
        routes["delta_(m-1) + delta_m"] = Fraction(prev + rec.osculating[m])
    if all(p in c for p in range(1, m + 1)):
        routes["2 sum_(p>=1) c1(L_p)"] = Fraction(2 * sum(c[p] for p in range(1, m + 1)))
    if all(p in rec.ramification for p in range(m)):
        routes["ramification formula"] = _formula_over_pi(rec)
    out = []
    names = list(routes)
    for a, b in zip(names, names[1:]):
        out.append(BoundReport(f"E/pi: {a} = {b}", routes[a], routes[b], "=="))
    if rec.energy is not None and names:
        ref = routes[names[0]]
        if rec.energy_exact:
            out.append(BoundReport(f"E/pi: supplied = {names[0]}", rec.energy_over_pi, ref, "=="))
        else:
            out.append(BoundReport(f"E: supplied = pi * {names[0]}", rec.energy, float(ref) * math.pi, "==", tol=_FLOAT_RTOL * max(1.0, rec.energy)))
    return out


def _formula_over_pi(rec: HarmonicMapRecord) -> Fraction:
    m, g, r = rec.m, rec.genus, rec.ramification
    return Fraction(2 * (m * (m + 1) * (1 - g) + sum((m - j) * r[j] for j in range(m))))


@dataclass(frozen=True)
class EnergyReport:
    """Energy from ramification data, as a rational multiple of pi."""

    over_pi: Fraction
    supplied: float | None
    agrees: bool | None
    degenerate: bool

    @property
    def energy(self) -> float:
        return float(self.over_pi) * math.pi

    def __float__(self) -> float:
        return self.energy

    def to_json(self) -> dict:
        return {"energy": self.energy, "energy_over_pi": str(self.over_pi), "supplied": self.supplied, "agrees": self.agrees, "degenerate": self.degenerate}


def energy_from_ramification(rec: HarmonicMapRecord) -> EnergyReport:
    """``E = 2 pi (m (m+1)(1 - gamma) + sum_{j=0}^{m-1} (m - j) r(d_j))``.

    Raises
    ------
    ValueError
        "formula requires total isotropy" for non-isotropic records, or if
        ramification indices ``r(d_0) .. r(d_{m-1})`` are missing, or if a
        supplied energy disagrees.
    """
    if not rec.totally_isotropic:
        raise ValueError("formula requires total isotropy")
    if not rec.orientable:
        raise ValueError("formula is stated on orientable surfaces; apply nonorientable_reduce first")
    missing = [j for j in range(rec.m) if j not in rec.ramification]
    if missing:
        raise ValueError(f"ramification indices r(d_j) missing for j in {missing}")
    val = _formula_over_pi(rec)
    agrees = None
    if rec.energy_exact:
        agrees = rec.energy_over_pi == val
    elif rec.energy is not None:
        agrees = math.isclose(rec.energy, float(val) * math.pi, rel_tol=_FLOAT_RTOL)
    if agrees is False:
        raise ValueError(f"{rec.name}: supplied energy {rec.energy} != formula {val} pi")
    # a linearly full map is nonconstant, so its energy is positive
    return EnergyReport(val, rec.energy, agrees, val <= 0)


# --------------------------------------------------------------------------
# bounds
# --------------------------------------------------------------------------


def _pull_back(report: BoundReport, rec: HarmonicMapRecord) -> BoundReport:
    """Express a bound on the oriented double cover on the original surface."""
    det = dict(report.details)
    det.update(reduced_lhs=report.lhs, reduced_rhs=report.rhs, via="oriented double cover")
    rhs = None if report.rhs is None else report.rhs / 2
    return BoundReport(report.name + " (non-orientable)", rec.total_branching, rhs, report.relation, det, report.tol / 2, report.valid)


def bound_nonisotropic(rec: HarmonicMapRecord) -> BoundReport:
    """``b <= -(n+1) chi / 2`` for maps that are not totally isotropic.

    The refined chain ``b <= q(2 gamma - 2) + c1(L_q) <= q(2 gamma - 2) <=
    (n + 1)(gamma - 1)`` is reported in ``details`` and must also hold; the
    identity ``-(n+1) chi / 2 = (n+1)(gamma - 1)`` is asserted.
    """
    if rec.totally_isotropic:
        raise ValueError("bound requires a map that is not totally isotropic")
    if not rec.orientable:
        return _pull_back(bound_nonisotropic(nonorientable_reduce(rec)), rec)
    n, g, b = rec.target_dim, rec.genus, rec.total_branching
    topo = Fraction(-(n + 1) * rec.euler_char, 2)
    alt = Fraction((n + 1) * (g - 1))
    if topo != alt:
        raise AssertionError(f"-(n+1) chi / 2 = {topo} != (n+1)(g-1) = {alt}")
    det = {"topological": topo, "(n+1)(g-1)": alt}
    rhs, valid = topo, True
    if rec.q is not None:
        q = rec.q
        refined = q * (2 * g - 2)
        if q in rec.chern:
            det["c1(L_q)"] = rec.chern[q]
            valid = rec.chern[q] <= 0  # H_q is a nonzero section of (L_q^*)^2
            det["c1(L_q) <= 0"] = valid
            refined += rec.chern[q]
        det["refined"] = Fraction(refined)
        rhs = min(rhs, Fraction(refined))
    return BoundReport("b <= -(n+1) chi / 2", Fraction(b), rhs, details=det, valid=valid)


def bound_isotropic(rec: HarmonicMapRecord) -> BoundReport:
    """``b <= E / (2 pi m) - (m + 1) chi / 2`` for totally isotropic maps,
    with equality required when ``m = 1`` (Riemann-Hurwitz)."""
    if not rec.totally_isotropic:
        raise ValueError("bound requires a totally isotropic map")
    if rec.energy is None:
        raise ValueError(f"{rec.name}: energy E is required")
    if not rec.orientable:
        return _pull_back(bound_isotropic(nonorientable_reduce(rec)), rec)
    m, chi, b = rec.m, rec.euler_char, rec.total_branching
    if rec.energy_exact:
        rhs = rec.energy_over_pi / (2 * m) - Fraction((m + 1) * chi, 2)
        lhs, tol = Fraction(b), 0.0
    else:
        rhs = rec.energy / (2 * math.pi * m) - (m + 1) * chi / 2
        lhs, tol = float(b), 1e-9 * max(1.0, abs(rhs))
    rel = "==" if m == 1 else "<="
    name = "b = E/(2 pi) - chi (Riemann-Hurwitz)" if m == 1 else "b <= E/(2 pi m) - (m+1) chi / 2"
    return BoundReport(name, lhs, rhs, rel, {"m": m, "equality_required": m == 1}, tol)


def bound_nonconformal(rec: HarmonicMapRecord) -> BoundReport:
    """``b <= -chi`` for non-conformal harmonic maps."""
    if rec.conformal:
        raise ValueError("proposition requires non-conformal")
    if not rec.orientable:
        return _pull_back(bound_nonconformal(nonorientable_reduce(rec)), rec)
    rhs = -rec.euler_char
    det = {}
    if rhs < 0:
        det["inconsistent"] = "bound is negative: no non-conformal harmonic map exists on this surface"
    return BoundReport("b <= -chi (non-conformal)", rec.total_branching, rhs, details=det)


def bound_extremal(
    genus: int,
    k: int,
    multiplicity_constant=None,
    korevaar_constant=None,
    b: int | None = None,
) -> BoundReport:
    """Branching bound for a ``lambda_k`` conformally extremal metric.

    Non-isotropic branch: ``n <= C'(gamma + k)`` in ``b <= (n + 1)(gamma - 1)``.
    Isotropic branch: ``Lambda_k = 2E <= C k (gamma + 1)`` in
    ``b <= E / (2 pi m) + (m + 1)(gamma - 1)`` maximized over
    ``1 <= m <= n / 2``.  The right-hand side is the larger of the two; the
    ``(gamma + 1)(gamma + k)`` shape is reported alongside.

    Raises
    ------
    ValueError
        Listing whichever of the two constants is missing.
    """
    missing = [n for n, v in (("multiplicity_constant", multiplicity_constant), ("korevaar_constant", korevaar_constant)) if v is None]
    if missing:
        raise ValueError(f"missing constants: {', '.join(missing)}")
    if genus < 0 or k < 1:
        raise ValueError("need genus >= 0 and k >= 1")
    Cp, C = Fraction(multiplicity_constant), Fraction(korevaar_constant)
    n_max = math.floor(Cp * (genus + k))
    noniso = Fraction((n_max + 1) * (genus - 1))
    E_max = C * k * (genus + 1) / 2  # E <= Lambda_k / 2
    iso = max(float(E_max) / (2 * math.pi * m) + (m + 1) * (genus - 1) for m in range(1, max(1, n_max // 2) + 1))
    rhs = max(float(noniso), iso)
    det = {
        "n_max": n_max,
        "nonisotropic_rhs": noniso,
        "isotropic_rhs": iso,
        "E_max": float(E_max),
        "shape (g+1)(g+k)": (genus + 1) * (genus + k),
        "C*shape": float(C) * (genus + 1) * (genus + k),
    }
    return BoundReport("b <= extremal branching bound", b, rhs, details=det)


def nonorientable_reduce(rec: HarmonicMapRecord) -> HarmonicMapRecord:
    """Record of ``Phi o pi`` on the oriented double cover: ``b, chi, E`` double."""
    if rec.orientable:
        raise ValueError("record is already orientable")
    return HarmonicMapRecord(
        name=f"{rec.name} (oriented double cover)",
        euler_char=2 * rec.euler_char,
        orientable=True,
        target_dim=rec.target_dim,
        total_branching=2 * rec.total_branching,
        totally_isotropic=rec.totally_isotropic,
        conformal=rec.conformal,
        linearly_full=rec.linearly_full,
        q=rec.q,
        energy=None if rec.energy is None else 2 * rec.energy,
        energy_over_pi=None if rec.energy_over_pi is None else 2 * rec.energy_over_pi,
        provenance=f"double cover of: {rec.provenance}",
    )


def audit(rec: HarmonicMapRecord) -> list[BoundReport]:
    """All applicable bounds (and ledger identities when data are present)."""
    out: list[BoundReport] = []
    if rec.orientable and (rec.chern or rec.ramification):
        out.extend(ledger_consistency(rec))
    if rec.totally_isotropic:
        out.append(bound_isotropic(rec))
    else:
        out.append(bound_nonisotropic(rec))
    if not rec.conformal:
        out.append(bound_nonconformal(rec))
    return out


def audit_catalog(records) -> dict:
    """Batch audit: per-record reports and an aggregate verdict."""
    per = {}
    for rec in records:
        per[rec.name] = audit(rec)
    return {"records": per, "passed": all(r.passed for reps in per.values() for r in reps)}


def mutate_branching(rec: HarmonicMapRecord, delta: int = 1) -> HarmonicMapRecord:
    """Copy of ``rec`` with ``b`` (and ``r(d_0)``) shifted by ``delta``."""
    ram = dict(rec.ramification)
    if 0 in ram:
        ram[0] += delta
    return replace(rec, name=f"{rec.name} (b{delta:+d})", total_branching=rec.total_branching + delta, ramification=ram)


# --------------------------------------------------------------------------
# built-in records
# --------------------------------------------------------------------------


def power_map(d: int) -> HarmonicMapRecord:
    """``z -> z^d`` on the Riemann sphere (``m = 1``)."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    return HarmonicMapRecord(
        name=f"z^{d}",
        euler_char=2,
        orientable=True,
        target_dim=2,
        total_branching=2 * d - 2,
        totally_isotropic=True,
        conformal=True,
        energy_over_pi=Fraction(4 * d),
        chern={-1: -2 * d, 0: 0, 1: 2 * d},
        ramification={-1: 2 * d - 2, 0: 2 * d - 2},
        osculating=(2 * d, 2 * d),
        provenance=f"closed form: holomorphic map z^{d} of degree {d}; branch points at 0 and infinity of order {d - 1}",
    )


def veronese() -> HarmonicMapRecord:
    """Veronese minimal sphere in ``S^4`` (``m = 2``, unbranched)."""
    return HarmonicMapRecord(
        name="veronese",
        euler_char=2,
        orientable=True,
        target_dim=4,
        total_branching=0,
        totally_isotropic=True,
        conformal=True,
        energy_over_pi=Fraction(12),
        chern={p: 2 * p for p in range(-2, 3)},
        ramification={p: 0 for p in range(-2, 2)},
        osculating=(4, 6, 6),
        provenance="closed form: directrix is the rational normal quartic in CP^4",
    )


def veronese_rp2() -> HarmonicMapRecord:
    """The Veronese map factored through the projective plane."""
    return HarmonicMapRecord(
        name="veronese-rp2",
        euler_char=1,
        orientable=False,
        target_dim=4,
        total_branching=0,
        totally_isotropic=True,
        conformal=True,
        energy_over_pi=Fraction(6),
        provenance="closed form: Veronese sphere is antipodally invariant; quotient by the antipodal map",
    )


def clifford_torus() -> HarmonicMapRecord:
    """Clifford torus in ``S^3``: conformal, not totally isotropic, ``q = 2``."""
    return HarmonicMapRecord(
        name="clifford-torus",
        euler_char=0,
        orientable=True,
        target_dim=3,
        total_branching=0,
        totally_isotropic=False,
        conformal=True,
        q=2,
        energy=2 * math.pi**2,
        chern={0: 0, 1: 0},
        ramification={0: 0},
        provenance="closed form: (cos x, sin x, cos y, sin y)/sqrt(2) on the square torus",
    )


def rectangular_torus(ratio: float = 2.0) -> HarmonicMapRecord:
    """``(cos x, sin x, cos(y/a), sin(y/a))/sqrt 2`` on a rectangular torus,
    harmonic but not conformal for ``a != 1``."""
    if ratio == 1:
        raise ValueError("ratio 1 is the conformal Clifford torus")
    return HarmonicMapRecord(
        name=f"rectangular-torus-{ratio:g}",
        euler_char=0,
        orientable=True,
        target_dim=3,
        total_branching=0,
        totally_isotropic=False,
        conformal=False,
        q=1,
        energy=math.pi**2 * (ratio + 1 / ratio),
        provenance=f"closed form: eigenfunction map on the {ratio:g} x 1 rectangular torus",
    )


def cover_projection(genus: int, n_branch: int | None = None, source: str = "") -> HarmonicMapRecord:
    """Hyperelliptic projection of a glued double cover onto ``S^2``.

    ``n_branch`` is the number of branch points (default ``2 genus + 2``),
    each a simple branch point.
    """
    nb = 2 * genus + 2 if n_branch is None else int(n_branch)
    if nb != 2 * genus + 2:
        raise ValueError("a double cover of the sphere with genus g has 2g + 2 branch points")
    return HarmonicMapRecord(
        name=f"cover-projection-g{genus}",
        euler_char=2 - 2 * genus,
        orientable=True,
        target_dim=2,
        total_branching=nb,
        totally_isotropic=True,
        conformal=True,
        energy_over_pi=Fraction(8),
        chern={-1: -4, 0: 0, 1: 4},
        ramification={-1: nb, 0: nb},
        osculating=(4, 4),
        provenance=source or f"glued double cover of the sphere branched at {nb} points; degree-2 projection",
    )


def builtin_records() -> list[HarmonicMapRecord]:
    """The catalog used by the branching audit."""
    recs = [power_map(d) for d in range(1, 7)]
    recs += [veronese(), veronese_rp2(), clifford_torus(), rectangular_torus(2.0)]
    recs += [
        cover_projection(2, source="glued double cover branched at the 6 octahedral vertices; degree-2 projection"),
        cover_projection(3, source="glued double cover branched at the 8 cube vertices; degree-2 projection"),
    ]
    return recs
