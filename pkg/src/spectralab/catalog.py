"""Built-in scenarios: meshes with densities, curves, Weierstrass data and
harmonic-map records, each with a provenance note.

Everything here is reconstructed from closed forms or deterministic mesh
constructions, so the catalog can be regenerated on any machine with
:func:`write_catalog`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .curves import HyperellipticCurve, MeromorphicFunction
from .harmonic_ledger import HarmonicMapRecord, builtin_records
from .mesh import (
    BranchedCoverSpec,
    ConformalDensity,
    Mesh,
    build_flat_torus,
    build_hyperelliptic_cover,
    build_sphere,
    power_map_sphere,
    pullback_density,
    write_off,
)
from .weierstrass import WeierstrassData, catenoid, enneper, helicoid

__all__ = [
    "CatalogMesh",
    "EQUILATERAL_TAU",
    "OCTAHEDRAL_POINTS",
    "CUBE_POINTS",
    "catalog_curves",
    "catalog_meshes",
    "catalog_records",
    "catalog_weierstrass",
    "get_mesh",
    "write_catalog",
]

EQUILATERAL_TAU = complex(0.5, math.sqrt(3) / 2)
OCTAHEDRAL_POINTS = ((1, 0, 0), (0, 1, 0), (-1, 0, 0), (0, 0, 1), (0, -1, 0), (0, 0, -1))
CUBE_POINTS = tuple((x, y, z) for x in (1, -1) for y in (1, -1) for z in (1, -1))
SQUARE_POINTS = ((1, 0, 0), (0, 1, 0), (-1, 0, 0), (0, -1, 0))


@dataclass(frozen=True)
class CatalogMesh:
    """A named mesh scenario.

    Attributes
    ----------
    name : str
    genus : int
    builder : callable
        ``builder(size) -> Mesh``; ``size`` is the refinement parameter.
    size : int
        Default refinement parameter.
    density : {"pullback", "constant"}
        The metric of the scenario, as a conformal density on the mesh.
    provenance : str
    target : float or None
        Known value of the normalized first eigenvalue, if any.
    degree : int or None
        Degree of the map to the sphere carried by the mesh, if any.
    cover : BranchedCoverSpec or None
        Branch data for glued covers.
    """

    name: str
    genus: int
    builder: Callable[[int], Mesh] = field(repr=False)
    size: int
    density: str
    provenance: str
    target: float | None = None
    degree: int | None = None
    cover: BranchedCoverSpec | None = None

    def build(self, size: int | None = None) -> tuple[Mesh, ConformalDensity]:
        mesh = self.builder(self.size if size is None else size)
        if self.density == "pullback":
            return mesh, pullback_density(mesh)
        return mesh, ConformalDensity.constant(mesh)

    def describe(self) -> dict:
        out = {
            "name": self.name,
            "genus": self.genus,
            "size": self.size,
            "density": self.density,
            "provenance": self.provenance,
            "target": self.target,
            "degree": self.degree,
        }
        if self.cover is not None:
            out["cover"] = self.cover.to_json()
        return out


def _cover_entry(name, points, size, provenance, target=None) -> CatalogMesh:
    spec = BranchedCoverSpec(points, refinement=size)

    def build(n: int) -> Mesh:
        return build_hyperelliptic_cover(BranchedCoverSpec(points, refinement=n))

    return CatalogMesh(name, spec.genus, build, size, "pullback", provenance, target, 2, spec)


def catalog_meshes() -> dict[str, CatalogMesh]:
    """All mesh scenarios, keyed by name."""
    entries = [
        CatalogMesh(
            "sphere", 0, build_sphere, 4, "pullback",
            "icosahedral subdivision of the unit sphere; round metric", 8 * math.pi, 1,
        ),
        CatalogMesh(
            "torus-equilateral", 1, lambda n: build_flat_torus(EQUILATERAL_TAU, n), 32, "constant",
            "flat torus C/(Z + e^{i pi/3} Z); closed-form lattice spectrum", 8 * math.pi**2 / math.sqrt(3),
        ),
        CatalogMesh(
            "torus-square", 1, lambda n: build_flat_torus(1j, n), 32, "constant",
            "flat torus C/(Z + iZ); closed-form lattice spectrum", 4 * math.pi**2,
        ),
        _cover_entry(
            "cover-genus1-square", SQUARE_POINTS, 12,
            "glued double cover branched at 4 equatorial points; pulled-back round metric",
        ),
        _cover_entry(
            "cover-genus2-octahedral", OCTAHEDRAL_POINTS, 24,
            "glued double cover branched at the 6 octahedral vertices; pulled-back round metric",
            16 * math.pi,
        ),
        _cover_entry(
            "cover-genus3-cube", CUBE_POINTS, 24,
            "glued double cover branched at the 8 cube vertices; pulled-back round metric",
        ),
    ]
    for d in range(1, 5):
        entries.append(
            CatalogMesh(
                f"power-map-z{d}", 0, (lambda n, d=d: power_map_sphere(n, d)), 24, "pullback",
                f"octahedral sphere mesh with the map z -> z^{d} (stereographic coordinate)", None, d,
            )
        )
    return {e.name: e for e in entries}


def get_mesh(name: str) -> CatalogMesh:
    table = catalog_meshes()
    if name not in table:
        raise KeyError(f"unknown catalog mesh {name!r}; known: {', '.join(table)}")
    return table[name]


def catalog_curves() -> dict[str, tuple[HyperellipticCurve, str]]:
    """Hyperelliptic curves with provenance."""
    out = {}
    for g in range(1, 5):
        out[f"odd-genus{g}"] = (
            HyperellipticCurve([-1] + [0] * (2 * g) + [1]),
            f"y^2 = x^{2 * g + 1} - 1, one place at infinity",
        )
    out["octahedral-genus2"] = (
        HyperellipticCurve([0, -1, 0, 0, 0, 1]),
        "y^2 = x^5 - x: branched over 0, infinity, +-1, +-i (octahedral vertices under stereographic projection)",
    )
    out["cube-genus3"] = (
        HyperellipticCurve([1, 0, 0, 0, 14, 0, 0, 0, 1]),
        "y^2 = x^8 + 14 x^4 + 1: branched over the stereographic images of the cube vertices",
    )
    return out


def catalog_weierstrass() -> dict[str, tuple[WeierstrassData, str]]:
    """Weierstrass data with provenance."""
    g3 = HyperellipticCurve([-1] + [0] * 6 + [1])
    return {
        "enneper": (enneper(), "phi = z, omega = dz on the plane"),
        "catenoid": (catenoid(), "phi = z, omega = dz / z^2 on the punctured plane; zero period"),
        "helicoid": (helicoid(), "phi = z, omega = i dz / z^2; multivalued, vertical period"),
        "genus3-pencil": (
            WeierstrassData.from_pencil(g3, MeromorphicFunction.x(g3)),
            "phi = x on y^2 = x^7 - 1 with omega from L(K - 2 P_phi); unbranched",
        ),
    }


def catalog_records() -> list[HarmonicMapRecord]:
    return builtin_records()


def write_catalog(out_dir, sizes: dict | None = None) -> dict:
    """Write every catalog item below ``out_dir`` and return the manifest.

    Layout: ``meshes/<name>.off`` (+ sidecar with density), ``meshes/<name>.cover.json``
    for glued covers, ``curves/<name>.json``, ``weierstrass/<name>.json``,
    ``records.json`` and ``manifest.json``.

    Raises
    ------
    OSError
        If ``out_dir`` cannot be created or written.
    """
    root = Path(out_dir)
    sizes = sizes or {}
    for sub in ("meshes", "curves", "weierstrass"):
        (root / sub).mkdir(parents=True, exist_ok=True)
    manifest = {"meshes": [], "curves": [], "weierstrass": [], "records": None}
    for name, entry in catalog_meshes().items():
        mesh, dens = entry.build(sizes.get(name))
        path = root / "meshes" / f"{name}.off"
        write_off(mesh, path, dens)
        item = entry.describe() | {"file": str(path.relative_to(root)), "vertices": mesh.V}
        if entry.cover is not None:
            cpath = root / "meshes" / f"{name}.cover.json"
            cpath.write_text(json.dumps(entry.cover.to_json(), indent=1))
            item["cover_file"] = str(cpath.relative_to(root))
        manifest["meshes"].append(item)
    for name, (curve, prov) in catalog_curves().items():
        path = root / "curves" / f"{name}.json"
        path.write_text(json.dumps(curve.to_json(), indent=1))
        manifest["curves"].append({"name": name, "genus": curve.genus, "provenance": prov, "file": str(path.relative_to(root))})
    for name, (data, prov) in catalog_weierstrass().items():
        path = root / "weierstrass" / f"{name}.json"
        path.write_text(json.dumps(data.to_json(), indent=1))
        manifest["weierstrass"].append({"name": name, "provenance": prov, "file": str(path.relative_to(root))})
    recs = catalog_records()
    (root / "records.json").write_text(json.dumps([r.to_json() for r in recs], indent=1))
    manifest["records"] = {"file": "records.json", "names": [r.name for r in recs]}
    (root / "manifest.json").write_text(json.dumps(manifest, indent=1))
    return manifest


def target_cluster(mesh_name: str) -> int | None:
    """Multiplicity of the first nonzero eigenvalue for catalog metrics with
    a closed-form spectrum."""
    return {"sphere": 3, "torus-equilateral": 6, "torus-square": 4}.get(mesh_name)

