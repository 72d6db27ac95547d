import hashlib
import json

import numpy as np
import pytest

from spectralab import __version__, cli
from spectralab.catalog import catalog_meshes, catalog_records, write_catalog
from spectralab.harmonic_ledger import mutate_branching, power_map
from spectralab.spectral import EigenSolveError


@pytest.fixture(scope="module")
def cat(tmp_path_factory):
    root = tmp_path_factory.mktemp("catalog")
    sizes = {"sphere": 3, "cover-genus2-octahedral": 12, "cover-genus3-cube": 12}
    sizes |= {f"power-map-z{d}": 12 for d in range(1, 5)}
    write_catalog(root, sizes)
    return root


def _run(argv, tmp_path):
    out = tmp_path / "report.json"
    code = cli.run(argv + ["--out", str(out)])
    return code, json.loads(out.read_text())


def test_catalog_manifest(cat):
    man = json.loads((cat / "manifest.json").read_text())
    names = {m["name"] for m in man["meshes"]}
    assert {"sphere", "torus-equilateral", "torus-square", "cover-genus2-octahedral"} <= names
    assert all(m["provenance"] for m in man["meshes"] + man["curves"] + man["weierstrass"])
    oct_ = next(m for m in man["meshes"] if m["name"] == "cover-genus2-octahedral")
    assert len(oct_["cover"]["branch_points"]) == 6 and (cat / oct_["cover_file"]).exists()
    assert {f"z^{d}" for d in range(1, 7)} <= set(man["records"]["names"])
    assert {w["name"] for w in man["weierstrass"]} >= {"catenoid", "helicoid"}
    recs = json.loads((cat / "records.json").read_text())
    assert all(r["provenance"] for r in recs)


def test_report_metadata_and_hashes(cat, tmp_path):
    mesh = cat / "meshes" / "sphere.off"
    code, rep = _run(["spectrum", "--mesh", str(mesh), "--k", "5"], tmp_path)
    assert code == 0 and rep["passed"]
    assert rep["version"] == __version__ and rep["seed"] == 0
    assert rep["inputs"][str(mesh)] == hashlib.sha256(mesh.read_bytes()).hexdigest()
    assert rep["tolerances"]["eigensolver"] == 1e-8
    res = rep["result"]
    assert set(res) >= {"scenario", "eigenvalues", "area", "normalized", "counting", "bound", "margin", "nullity", "band"}
    assert res["normalized"][1] == pytest.approx(8 * np.pi, rel=0.01)
    assert res["nullity"] == 3


def test_index_routes(tmp_path):
    code, rep = _run(["index", "--mesh", "catalog:power-map-z2", "--size", "16"], tmp_path)
    assert code == 0 and rep["result"]["routes_agree"] and rep["result"]["index"] >= 2


def test_yy_check_catalog_and_threads(tmp_path, monkeypatch):
    monkeypatch.setenv("SPECTRALAB_THREADS", "3")
    code, rep = _run(["yy-check", "--mesh", "catalog:sphere", "--mesh", "catalog:torus-square", "--size", "3"], tmp_path)
    assert code == 0
    assert [r["strict_expected"] for r in rep["result"]["reports"]] == [False, True]
    monkeypatch.setenv("SPECTRALAB_THREADS", "zero")
    assert cli.run(["yy-check", "--mesh", "catalog:sphere", "--out", str(tmp_path / "x.json")]) == 2


def test_rr(cat, tmp_path):
    d = tmp_path / "d.json"
    d.write_text(json.dumps([{"place": {"x": "inf0", "sheet": 1}, "mult": 3}, {"place": {"x": "1", "sheet": "branch"}, "mult": 1}]))
    code, rep = _run(["rr", "--curve", str(cat / "curves" / "odd-genus2.json"), "--divisor", str(d)], tmp_path)
    assert code == 0
    r = rep["result"]
    assert r["lhs"] == r["rhs"] == 4 - 2 + 1 and r["h0_K"] == 2 and r["h0_0"] == 1
    d.write_text(json.dumps([{"place": {"x": "inf1", "sheet": 1}, "mult": 1}]))
    assert _run(["rr", "--curve", str(cat / "curves" / "odd-genus2.json"), "--divisor", str(d)], tmp_path)[0] == 2


def test_pencil_is_deterministic(cat, tmp_path):
    argv = ["pencil", "--curve", str(cat / "curves" / "odd-genus2.json"), "--samples", "6", "--seed", "7"]
    a = _run(argv, tmp_path)
    b = _run(argv, tmp_path)
    assert a == b and a[0] == 0 and a[1]["seed"] == 7


def test_weierstrass_and_index_bound(cat, tmp_path):
    code, rep = _run(["weierstrass", "--data", str(cat / "weierstrass" / "enneper.json"), "--samples", "30"], tmp_path)
    assert code == 0 and rep["result"]["local_identities"]["passed"]
    g3 = str(cat / "weierstrass" / "genus3-pencil.json")
    code, rep = _run(["weierstrass", "--data", g3, "--index", "1"], tmp_path)
    assert code == 0 and rep["result"]["index_bound"]["bound"] == "1"
    assert _run(["weierstrass", "--data", g3, "--index", "0"], tmp_path)[0] == 1


def test_periods(cat, tmp_path):
    code, rep = _run(["periods", "--data", str(cat / "weierstrass" / "helicoid.json")], tmp_path)
    assert code == 0
    assert rep["result"]["values"][0][2] == pytest.approx(-4 * np.pi, abs=1e-8)
    # the same data declared single-valued violates the zero-period check
    obj = json.loads((cat / "weierstrass" / "helicoid.json").read_text())
    obj["multivalued"] = False
    bad = tmp_path / "h.json"
    bad.write_text(json.dumps(obj))
    assert _run(["periods", "--data", str(bad)], tmp_path)[0] == 1
    loops = tmp_path / "loops.json"
    loops.write_text(json.dumps([{"circle": [0, 2]}, {"polygon": [[3, 1], [2, 1], [2, 2]]}]))
    code, rep = _run(["periods", "--data", str(cat / "weierstrass" / "catenoid.json"), "--loops", str(loops)], tmp_path)
    assert code == 0


def test_branching_audit(cat, tmp_path):
    code, rep = _run(["branching-audit", "--records", str(cat / "records.json")], tmp_path)
    assert code == 0 and rep["result"]["aggregate"]
    assert rep["result"]["energy"]["z^3"]["energy_over_pi"] == "12"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps([mutate_branching(power_map(3), 1).to_json()]))
    code, rep = _run(["branching-audit", "--records", str(bad)], tmp_path)
    assert code == 1 and not rep["result"]["aggregate"]


def test_maximize_outputs(tmp_path):
    trace, dens = tmp_path / "t.csv", tmp_path / "f.off"
    argv = ["maximize", "--mesh", "catalog:sphere", "--size", "2", "--perturb", "0.2", "--seed", "3",
            "--max-iters", "8", "--trace", str(trace), "--density-out", str(dens)]
    code, rep = _run(argv, tmp_path)
    assert code == 0
    assert trace.read_text().startswith("iter,lambda1_bar")
    assert dens.exists()
    hist = rep["result"]["history"]
    assert hist[-1] >= hist[0]
    _, again = _run(argv, tmp_path)
    assert again["result"]["history"] == hist


def test_exit_codes(tmp_path, monkeypatch):
    assert cli.run(["frobnicate"]) == 2
    assert cli.run([]) == 2
    assert cli.run(["spectrum", "--mesh", str(tmp_path / "missing.off")]) == 2
    assert cli.run(["spectrum", "--mesh", "catalog:nope"]) == 2
    assert cli.run(["catalog", "/proc/forbidden/dir"]) == 2

    def boom(*a, **k):
        raise EigenSolveError("no convergence")

    monkeypatch.setattr(cli, "spectrum", boom)
    code, rep = _run(["spectrum", "--mesh", "catalog:sphere", "--size", "1"], tmp_path)
    assert code == 3 and rep["error"]["kind"] == "solver"


def test_catalog_subcommand(tmp_path):
    code, rep = _run(["catalog", str(tmp_path / "c")], tmp_path)
    assert code == 0 and (tmp_path / "c" / "manifest.json").exists()


def test_catalog_tables():
    meshes = catalog_meshes()
    assert {e.genus for e in meshes.values()} == {0, 1, 2, 3}
    assert all(e.provenance for e in meshes.values())
    assert len(catalog_records()) >= 10
