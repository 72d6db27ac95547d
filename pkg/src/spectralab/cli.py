"""Command-line entry point.

Every subcommand writes one JSON report (to ``--out`` or stdout) holding the
tool version, SHA-256 hashes of the input files, the tolerances used, the
seed, the result and a ``passed`` verdict.  Exit codes:

====  ==========================================================
0     success
1     a checked bound or identity is violated
2     usage or input error (unknown subcommand, unreadable file)
3     solver failure (eigensolver, quadrature)
====  ==========================================================

``SPECTRALAB_THREADS`` sizes the worker pool for multi-scenario commands
and caps the BLAS thread count.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .catalog import catalog_meshes, get_mesh, write_catalog
from .conformal_max import MaximizeConfig, maximize_lambda1, stationarity_report
from .curves import (
    Divisor,
    HyperellipticCurve,
    canonical_divisor,
    h0,
    h0_of_doubled_pencil,
    riemann_roch_check,
    unique_pencil_probe,
)
from .harmonic_ledger import HarmonicMapRecord, audit_catalog, builtin_records, energy_from_ramification
from .mesh import ConformalDensity, MeshError, pullback_density, read_off
from .spectral import (
    EigenSolveError,
    InsufficientSpectrum,
    counting_function,
    index_of_map,
    map_potential,
    mesh_tolerance,
    schrodinger_index,
    spectrum,
    yang_yau_check,
)
from .weierstrass import (
    QuadratureError,
    WeierstrassData,
    branching_divisor,
    index_bound_check,
    local_identity_check,
    periods,
)

EXIT_OK, EXIT_VIOLATED, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3


class InputError(ValueError):
    """Bad command-line input (exit code 2)."""


def _threads() -> int:
    raw = os.environ.get("SPECTRALAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise InputError(f"SPECTRALAB_THREADS must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise InputError("SPECTRALAB_THREADS must be a positive integer")
    return n


class _Context:
    """Collects input hashes and tolerances for the report."""

    def __init__(self, args):
        self.args = args
        self.inputs: dict[str, str] = {}
        self.tolerances: dict[str, float] = {}

    def read_bytes(self, path) -> bytes:
        p = Path(path)
        try:
            data = p.read_bytes()
        except OSError as exc:
            raise InputError(f"cannot read {p}: {exc.strerror or exc}") from exc
        self.inputs[str(p)] = hashlib.sha256(data).hexdigest()
        return data

    def read_json(self, path):
        try:
            return json.loads(self.read_bytes(path))
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from exc

    def load_mesh(self, spec: str):
        """``catalog:<name>`` or an OFF path (sidecar hashed too)."""
        if spec.startswith("catalog:"):
            try:
                entry = get_mesh(spec.split(":", 1)[1])
            except KeyError as exc:
                raise InputError(str(exc.args[0])) from exc
            mesh, dens = entry.build(getattr(self.args, "size", None))
            self.inputs[spec] = hashlib.sha256(json.dumps(entry.describe(), sort_keys=True).encode()).hexdigest()
            return mesh, dens
        self.read_bytes(spec)
        side = Path(spec).with_name(Path(spec).name + ".json")
        if side.exists():
            self.read_bytes(side)
        return read_off(spec)

    def load_curve(self, path) -> HyperellipticCurve:
        obj = self.read_json(path)
        try:
            return HyperellipticCurve.from_json(obj)
        except (KeyError, TypeError) as exc:
            raise InputError(f"{path}: not a curve spec ({exc})") from exc


def _density(mesh, stored, choice: str):
    if choice == "stored":
        if stored is None:
            raise InputError("mesh carries no stored density")
        return stored
    if choice == "pullback":
        return pullback_density(mesh)
    if choice == "constant":
        return ConformalDensity.constant(mesh)
    # auto: stored, else pullback when a projection exists, else constant
    if stored is not None:
        return stored
    return pullback_density(mesh) if mesh.projection is not None else ConformalDensity.constant(mesh)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "numerator") and hasattr(obj, "denominator") and not isinstance(obj, (int, bool)):
        return str(obj)
    return obj


# --------------------------------------------------------------------------
# subcommands; each returns (result dict, passed)
# --------------------------------------------------------------------------


def _spectrum_one(ctx, mesh_spec):
    a = ctx.args
    mesh, stored = ctx.load_mesh(mesh_spec)
    dens = _density(mesh, stored, a.density)
    sp = spectrum(mesh, dens, k=a.k, tol=a.tol, quadrature=a.quadrature)
    tol = mesh_tolerance(mesh, sp.normalized_lambda1)
    yy = yang_yau_check(mesh.genus, sp.normalized_lambda1, tol)
    lam = a.lam if a.lam is not None else float(sp.eigenvalues[-1]) * 0.999
    out = {
        "scenario": mesh_spec,
        "genus": mesh.genus,
        "eigenvalues": sp.eigenvalues,
        "area": sp.area,
        "normalized": sp.normalized,
        "residuals": sp.residuals,
        "counting": {"lambda": lam, "N": counting_function(sp, lam)},
        "bound": yy.bound,
        "margin": yy.margin,
        "mesh_tolerance": tol,
        "nullity": int(len(sp.cluster(1, a.band))),
        "band": a.band,
    }
    return out, yy.passed


def cmd_spectrum(ctx):
    ctx.tolerances.update(eigensolver=ctx.args.tol, band=ctx.args.band)
    return _spectrum_one(ctx, ctx.args.mesh)


def cmd_index(ctx):
    a = ctx.args
    ctx.tolerances.update(band=a.band)
    mesh, stored = ctx.load_mesh(a.mesh)
    dens = None if a.density == "auto" and stored is None else _density(mesh, stored, a.density)
    out = {"scenario": a.mesh}
    routes = []
    if a.route in ("counting", "both"):
        r = index_of_map(mesh, a.band, density=dens)
        out["counting"] = r.to_json()
        routes.append(r)
    if a.route in ("potential", "both"):
        r = schrodinger_index(mesh, dens, map_potential(mesh, dens), a.band)
        out["potential"] = r.to_json()
        routes.append(r)
    agree = len({(r.index, r.nullity) for r in routes}) == 1
    out.update(index=routes[0].index, nullity=routes[0].nullity, band=a.band, routes_agree=agree)
    return out, agree


def cmd_yy_check(ctx):
    a = ctx.args
    ctx.tolerances.update(eigensolver=a.tol, band=a.band, mesh_tolerance="value * (2 h / sqrt(area))**2")
    specs = list(a.mesh or [])
    if a.catalog:
        specs += [f"catalog:{n}" for n, e in catalog_meshes().items() if e.genus <= 3]
    if not specs:
        raise InputError("yy-check needs --mesh or --catalog")
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(lambda s: _spectrum_one(ctx, s), specs))
    reports = []
    for (res, ok), s in zip(results, specs):
        yy = yang_yau_check(res["genus"], res["normalized"][1], res["mesh_tolerance"])
        reports.append({"scenario": s, **yy.to_json()})
    return {"reports": reports}, all(r["passed"] for r in reports)


def cmd_rr(ctx):
    a = ctx.args
    C = ctx.load_curve(a.curve)
    try:
        D = Divisor.from_json(ctx.read_json(a.divisor))
        for p in D.support:
            C.validate_place(p)
    except (KeyError, TypeError) as exc:
        raise InputError(f"{a.divisor}: not a divisor ({exc})") from exc
    rep = riemann_roch_check(D, C)
    out = rep.to_json() | {"genus": C.genus, "h0_K": h0(canonical_divisor(C), C), "h0_0": h0(Divisor({}), C)}
    return out, bool(rep.ok) and out["h0_K"] == C.genus and out["h0_0"] == 1


def cmd_pencil(ctx):
    a = ctx.args
    C = ctx.load_curve(a.curve)
    rep = unique_pencil_probe(C, a.degree, a.samples, seed=a.seed)
    out = rep.to_json() | {"h0_2g12": h0_of_doubled_pencil(C), "label": "evidence only"}
    return out, True


def _load_weierstrass(ctx, path) -> WeierstrassData:
    obj = ctx.read_json(path)
    try:
        return WeierstrassData.from_json(obj)
    except (KeyError, TypeError) as exc:
        raise InputError(f"{path}: not Weierstrass data ({exc})") from exc


def cmd_weierstrass(ctx):
    a = ctx.args
    ctx.tolerances.update(identity=a.tol, step=a.h)
    data = _load_weierstrass(ctx, a.data)
    out = {"name": data.name}
    ok = True
    if data.is_planar:
        rng = np.random.default_rng(a.seed)
        pts = rng.uniform(-1, 1, a.samples) + 1j * rng.uniform(-1, 1, a.samples) + complex(*a.center)
        rep = local_identity_check(data, pts, h=a.h, tol=a.tol)
        out["local_identities"] = rep.to_json()
        ok &= rep.passed
    try:
        B = branching_divisor(data)
    except NotImplementedError as exc:
        out["branching"] = {"skipped": str(exc)}
    else:
        out["branching"] = B.to_json()
        if a.index is not None:
            if data.is_planar:
                raise InputError("--index needs curve data")
            K = canonical_divisor(data.domain)
            ib = index_bound_check(h0(K - B.divisor, data.domain), a.index)
            out["index_bound"] = ib.to_json()
            ok &= ib.passed
    return out, bool(ok)


def cmd_periods(ctx):
    a = ctx.args
    ctx.tolerances.update(quadrature=a.tol, check=a.check_tol)
    data = _load_weierstrass(ctx, a.data)
    loops = ctx.read_json(a.loops) if a.loops else [{"circle": [0, 1], "n": 64}]
    if isinstance(loops, dict):
        loops = [loops]
    rep = periods(data, loops, tol=a.tol)
    out = rep.to_json()
    ok = rep.max_discrepancy <= a.check_tol
    if not data.multivalued:
        ok &= bool(np.all(np.abs(np.asarray(rep.values)) <= a.check_tol))
    return out, bool(ok)


def cmd_branching_audit(ctx):
    a = ctx.args
    if a.records:
        raw = ctx.read_json(a.records)
        try:
            recs = [HarmonicMapRecord.from_json(r) for r in raw]
        except (KeyError, TypeError) as exc:
            raise InputError(f"{a.records}: not a record list ({exc})") from exc
    else:
        recs = builtin_records()
    res = audit_catalog(recs)
    out = {
        "records": {name: [r.to_json() for r in reps] for name, reps in res["records"].items()},
        "energy": {},
        "aggregate": res["passed"],
    }
    for rec in recs:
        try:
            out["energy"][rec.name] = energy_from_ramification(rec).to_json()
        except ValueError:
            pass
    return out, res["passed"]


def cmd_maximize(ctx):
    a = ctx.args
    cfg = MaximizeConfig.from_json(ctx.read_json(a.config)) if a.config else MaximizeConfig()
    overrides = {k: getattr(a, k) for k in ("max_iters", "tol", "band") if getattr(a, k) is not None}
    if overrides:
        cfg = MaximizeConfig.from_json(cfg.to_json() | overrides)
    ctx.tolerances.update(tol=cfg.tol, band=cfg.band, backtrack_tol=cfg.backtrack_tol)
    mesh, stored = ctx.load_mesh(a.mesh)
    dens = _density(mesh, stored, a.density)
    f = np.array(dens.values)
    if a.perturb > 0:
        rng = np.random.default_rng(a.seed)
        f = f * np.exp(a.perturb * rng.standard_normal(mesh.V))
    state = maximize_lambda1(mesh, f, cfg)
    if a.trace:
        state.write_trace(a.trace)
    if a.density_out:
        state.write_density(a.density_out)
    rep = stationarity_report(state)
    out = state.to_json() | {"stationarity": rep.to_json()}
    return out, bool(rep.yang_yau_ok and rep.history_monotone)


def cmd_catalog(ctx):
    out_dir = Path(ctx.args.out_dir)
    try:
        manifest = write_catalog(out_dir)
    except OSError as exc:
        raise InputError(f"cannot write catalog to {out_dir}: {exc.strerror or exc}") from exc
    return {"out_dir": str(out_dir), "manifest": manifest}, True


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spectralab", description="Conformal spectra, divisors and branching bounds.")
    p.add_argument("--version", action="version", version=f"spectralab {__version__}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")

    def common(sp):
        sp.add_argument("--out", help="report path (default: stdout)")
        sp.add_argument("--seed", type=int, default=0, help="seed for randomized probes")

    def mesh_args(sp, density_default="auto"):
        sp.add_argument("--mesh", required=True, help="OFF file or catalog:<name>")
        sp.add_argument("--size", type=int, help="refinement for catalog meshes")
        sp.add_argument("--density", choices=["auto", "stored", "pullback", "constant"], default=density_default)

    s = sub.add_parser("spectrum", help="lowest Laplace eigenvalues of a conformal metric")
    mesh_args(s)
    s.add_argument("--k", type=int, default=6)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--band", type=float, default=0.05)
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--quadrature", choices=["centroid", "three-point"], default="centroid")
    common(s)

    s = sub.add_parser("index", help="index and nullity of a map to the sphere")
    mesh_args(s)
    s.add_argument("--band", type=float, default=0.1)
    s.add_argument("--route", choices=["counting", "potential", "both"], default="both")
    common(s)

    s = sub.add_parser("yy-check", help="Yang-Yau inequality on meshes")
    s.add_argument("--mesh", action="append", help="OFF file or catalog:<name> (repeatable)")
    s.add_argument("--catalog", action="store_true", help="all catalog metrics of genus <= 3")
    s.add_argument("--size", type=int)
    s.add_argument("--density", choices=["auto", "stored", "pullback", "constant"], default="auto")
    s.add_argument("--k", type=int, default=6)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--band", type=float, default=0.05)
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--quadrature", choices=["centroid", "three-point"], default="centroid")
    common(s)

    s = sub.add_parser("rr", help="exact Riemann-Roch identity for a divisor")
    s.add_argument("--curve", required=True)
    s.add_argument("--divisor", required=True)
    common(s)

    s = sub.add_parser("pencil", help="randomized probe for degree-d pencils")
    s.add_argument("--curve", required=True)
    s.add_argument("--degree", type=int, default=2)
    s.add_argument("--samples", type=int, default=20)
    common(s)

    s = sub.add_parser("weierstrass", help="local identities and branching divisor")
    s.add_argument("--data", required=True)
    s.add_argument("--samples", type=int, default=100)
    s.add_argument("--center", type=float, nargs=2, default=(0.0, 0.0), metavar=("RE", "IM"))
    s.add_argument("--h", type=float, default=1e-3)
    s.add_argument("--tol", type=float, default=1e-5)
    s.add_argument("--index", type=int, help="Morse index to test against the h0 bound (curve data)")
    common(s)

    s = sub.add_parser("periods", help="real periods along closed loops")
    s.add_argument("--data", required=True)
    s.add_argument("--loops", help="JSON loop list (default: unit circle)")
    s.add_argument("--tol", type=float, default=1e-11)
    s.add_argument("--check-tol", type=float, default=1e-8)
    common(s)

    s = sub.add_parser("branching-audit", help="all branching bounds on a record list")
    s.add_argument("--records", help="record JSON list (default: built-in catalog)")
    common(s)

    s = sub.add_parser("maximize", help="conformal ascent of the first eigenvalue")
    mesh_args(s)
    s.add_argument("--config")
    s.add_argument("--max-iters", dest="max_iters", type=int)
    s.add_argument("--tol", type=float)
    s.add_argument("--band", type=float)
    s.add_argument("--perturb", type=float, default=0.0, help="log-normal noise on the initial density")
    s.add_argument("--trace", help="CSV trace path")
    s.add_argument("--density-out", dest="density_out", help="OFF path for the final density")
    common(s)

    s = sub.add_parser("catalog", help="write the built-in catalog")
    s.add_argument("out_dir")
    common(s)
    return p


COMMANDS = {
    "spectrum": cmd_spectrum,
    "index": cmd_index,
    "yy-check": cmd_yy_check,
    "rr": cmd_rr,
    "pencil": cmd_pencil,
    "weierstrass": cmd_weierstrass,
    "periods": cmd_periods,
    "branching-audit": cmd_branching_audit,
    "maximize": cmd_maximize,
    "catalog": cmd_catalog,
}


def _emit(report: dict, out) -> None:
    text = json.dumps(_jsonable(report), indent=1, default=str)
    if out:
        Path(out).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def run(argv=None) -> int:
    """Parse ``argv``, run the subcommand, write the report; return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    ctx = _Context(args)
    report = {"tool": "spectralab", "version": __version__, "command": args.command, "seed": args.seed}
    code = EXIT_OK
    try:
        with threadpool_limits(limits=_threads()):
            result, passed = COMMANDS[args.command](ctx)
        report |= {"result": result, "passed": bool(passed)}
        code = EXIT_OK if passed else EXIT_VIOLATED
    except (InputError, MeshError, FileNotFoundError, KeyError) as exc:
        report |= {"error": {"kind": "input", "message": str(exc)}, "passed": False}
        code = EXIT_INPUT
    except (EigenSolveError, QuadratureError, InsufficientSpectrum, np.linalg.LinAlgError) as exc:
        report |= {"error": {"kind": "solver", "message": str(exc)}, "passed": False}
        code = EXIT_SOLVER
    except ValueError as exc:
        report |= {"error": {"kind": "input", "message": str(exc)}, "passed": False}
        code = EXIT_INPUT
    except RuntimeError as exc:
        report |= {"error": {"kind": "solver", "message": str(exc)}, "passed": False}
        code = EXIT_SOLVER
    report |= {"inputs": ctx.inputs, "tolerances": ctx.tolerances, "exit_code": code}
    if "error" in report:
        print(f"spectralab {args.command}: {report['error']['message']}", file=sys.stderr)
    try:
        _emit(report, getattr(args, "out", None))
    except OSError as exc:
        print(f"spectralab: cannot write report: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
