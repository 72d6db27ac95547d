"""Exact linear algebra over multiquadratic fields Q(sqrt(c1), ..., sqrt(ck)).

Matrix entries are monomials ``r * sqrt(e)`` with ``r`` rational and ``e`` a
squarefree integer (``e = -1`` stands for ``i``).  Ranks are computed by
expanding every entry into the rational matrix of multiplication by that
monomial on the power basis of the field, which multiplies every rank by the
field degree.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from gmpy2 import mpq
from sympy import factorint


def squarefree_radical(c: Fraction) -> tuple[Fraction, int]:
    """Write ``sqrt(c) = r * sqrt(e)`` with rational ``r > 0`` and squarefree ``e``.

    For ``c < 0`` the radicand ``e`` is negative and ``sqrt(e)`` means
    ``i * sqrt(|e|)``.
    """
    c = Fraction(c)
    if c == 0:
        raise ValueError("square root of zero has no radicand")
    num = abs(c.numerator) * c.denominator
    outside = 1
    inside = 1
    for prime, power in factorint(num).items():
        outside *= prime ** (power // 2)
        if power % 2:
            inside *= prime
    sign = -1 if c < 0 else 1
    return Fraction(outside, c.denominator), sign * inside


def multiply_radicands(e1: int, e2: int) -> tuple[int, int]:
    """``sqrt(e1) * sqrt(e2) = scale * sqrt(e3)``; returns ``(scale, e3)``."""
    g = gcd(abs(e1), abs(e2))
    magnitude = abs(e1) * abs(e2) // (g * g)
    negatives = (e1 < 0) + (e2 < 0)
    if negatives == 2:
        return -g, magnitude
    if negatives == 1:
        return g, -magnitude
    return g, magnitude


def radicand_group(generators) -> list[int]:
    """Power basis of the field generated by the square roots of ``generators``."""
    basis = [1]
    for gen in generators:
        if gen in basis:
            continue
        basis.extend([multiply_radicands(b, gen)[1] for b in basis])
    return basis


def nullity(rows: list[dict[int, tuple[Fraction, int]]], ncols: int) -> int:
    """Dimension of the kernel of a monomial-entry matrix over its field.

    ``rows`` holds sparse rows ``{column: (coefficient, radicand)}``.
    """
    if ncols == 0:
        return 0
    radicands = sorted({e for row in rows for (_, e) in row.values() if e != 1})
    basis = radicand_group(radicands)
    d = len(basis)
    index = {e: k for k, e in enumerate(basis)}
    expanded: list[dict[int, mpq]] = []
    for row in rows:
        block: list[dict[int, mpq]] = [{} for _ in range(d)]
        for col, (coef, e) in row.items():
            if coef == 0:
                continue
            value = mpq(coef.numerator, coef.denominator)
            for j, b in enumerate(basis):
                scale, target = multiply_radicands(e, b)
                block[index[target]][col * d + j] = value * scale
        expanded.extend(r for r in block if r)
    rank = sparse_rank(expanded)
    assert rank % d == 0
    return ncols - rank // d


def sparse_rank(rows: list[dict[int, mpq]]) -> int:
    """Exact rank of a sparse rational matrix by Gaussian elimination."""
    pivots: dict[int, dict[int, mpq]] = {}
    for row in rows:
        row = {c: v for c, v in row.items() if v}
        while row:
            col = min(row)
            piv = pivots.get(col)
            if piv is None:
                inv = 1 / row[col]
                pivots[col] = {c: v * inv for c, v in row.items()}
                break
            factor = row[col]
            for c, v in piv.items():
                nv = row.get(c, 0) - factor * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
    return len(pivots)


def rational_nullspace(rows: list[dict[int, tuple[Fraction, int]]], ncols: int) -> list[list[Fraction]]:
    """Basis of the rational solutions of a monomial-entry system.

    A rational vector solves a row ``sum c_j sqrt(e_j) u_j = 0`` iff each
    radicand component vanishes separately (square roots of distinct
    squarefree integers are linearly independent over the rationals), so the
    system splits into rational rows.  The basis is read off the reduced row
    echelon form.
    """
    split: list[dict[int, mpq]] = []
    for row in rows:
        parts: dict[int, dict[int, mpq]] = {}
        for col, (coef, e) in row.items():
            if coef:
                parts.setdefault(e, {})[col] = mpq(coef.numerator, coef.denominator)
        split.extend(parts.values())
    pivots: dict[int, dict[int, mpq]] = {}
    for row in split:
        row = dict(row)
        while row:
            col = min(row)
            piv = pivots.get(col)
            if piv is None:
                inv = 1 / row[col]
                pivots[col] = {c: v * inv for c, v in row.items()}
                break
            factor = row[col]
            for c, v in piv.items():
                nv = row.get(c, 0) - factor * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
    # back substitution to reduced form
    for col in sorted(pivots, reverse=True):
        prow = pivots[col]
        for other, orow in pivots.items():
            if other != col and col in orow:
                factor = orow[col]
                for c, v in prow.items():
                    nv = orow.get(c, 0) - factor * v
                    if nv:
                        orow[c] = nv
                    else:
                        orow.pop(c, None)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        vec = [Fraction(0)] * ncols
        vec[fcol] = Fraction(1)
        for pcol, prow in pivots.items():
            v = prow.get(fcol)
            if v:
                vec[pcol] = -Fraction(int(v.numerator), int(v.denominator))
        basis.append(vec)
    return basis
