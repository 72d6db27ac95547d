"""Desk-scale workbench for conformal Laplace spectra, divisors on
hyperelliptic curves, Weierstrass data and branching bounds of harmonic maps."""

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "catalog",
    "cli",
    "conformal_max",
    "curves",
    "harmonic_ledger",
    "mesh",
    "spectral",
    "weierstrass",
]
