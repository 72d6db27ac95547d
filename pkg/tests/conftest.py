"""Shared helpers and the acceptance summary printed after the test run."""

from spectralab.curves import (
    HyperellipticCurve,
    MeromorphicFunction,
    differential_divisor,
    polar_divisor,
)
from spectralab.curves.curve import X

ODD_CURVES = {g: HyperellipticCurve([-1] + [0] * (2 * g) + [1]) for g in range(1, 6)}

# criterion number -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def random_valid_pair(rng):
    """A random Gauss map / 1-form pair on y^2 = x^(2g+1) - 1 with
    ``(omega) - 2 P_phi`` effective.

    ``phi = alpha(x) / (x - a)^k`` and ``omega = c(x) (x - a)^m dx / y`` with
    ``m >= 2k`` and enough vanishing of ``omega`` at infinity; pairs where
    ``alpha`` cancels against the denominator are redrawn.
    """
    while True:
        g = rng.randint(3, 5)
        C = ODD_CURVES[g]
        e = rng.randint(0, (g - 1) // 2)
        alpha = sum(rng.randint(-3, 3) * X**i for i in range(e)) + X**e
        a = rng.choice([2, 3, -2])
        k = rng.randint(0, 1)
        phi = MeromorphicFunction.from_parts(C, alpha)
        if k:
            phi = phi / ((X - a) ** k)
        if phi.is_constant():
            phi, e = MeromorphicFunction.from_parts(C, X), 1
        # phi has a pole of order 2 max(0, e - k) at infinity; omega ~ x^deg
        # there has order 2g - 2 - 2 deg
        m = 2 * k + rng.randint(0, 1)
        budget = (2 * g - 2 - 4 * max(0, e - k)) // 2 - m
        if budget < 0:
            continue
        extra = rng.randint(0, budget)
        c = sum(rng.randint(-2, 2) * X**i for i in range(extra)) + X**extra
        omega = MeromorphicFunction.from_parts(C, c * (X - a) ** m)
        if (differential_divisor(omega) - 2 * polar_divisor(phi)).is_effective():
            return C, phi, omega


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
