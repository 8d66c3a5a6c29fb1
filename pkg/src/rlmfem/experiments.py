"""Experiment configuration, the mesh-assemble-solve pipeline and the study drivers.

A configuration is a TOML document with the sections ``domain``,
``material``, ``inclusions``, ``mesh``, ``bc``, ``solver`` and ``output``.
Missing keys take the defaults below; unknown keys are rejected.  Every CSV
written by a driver starts with ``# config-sha256=<hex> seed=<n>``.
"""

from __future__ import annotations

import copy
import hashlib
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np
import tomli

from .coupling import Inclusion, assemble_coupling, assemble_reduced_rhs, read_inclusions_csv, split_multipliers, validate_inclusions, write_inclusions_csv
from .errors import ArgumentError, ConfigError, RlmError
from .fem import FeSpace, apply_dirichlet, assemble_stiffness, build_space, compression_bc, error_norms, shear_bc, write_nodal_csv, write_vtk, zero_bc
from .mesh import DiscDomain, Mesh, RectDomain, check_mesh, circle_band_marker, dump_mesh, refine_local, refine_uniform
from .placement import PlacementResult, place_random, place_semistructured, place_structured, place_two_density
from .postprocess import (
    CONVERGENCE_HEADER,
    MODE_HEADER,
    AnalyticAxisym,
    ConvergenceRecord,
    area_reduction,
    boundary_stress_integral,
    convergence_rows,
    effective_bulk,
    effective_shear,
    mean_pressure,
    mode_report,
    volume_fraction,
)
from .solver import SaddleSystem, SolveReport, factor_primal, solve_saddle

log = logging.getLogger(__name__)

SIDES = ("left", "right", "bottom", "top")

DEFAULTS: dict[str, dict[str, Any]] = {
    "domain": {"kind": "rect", "xmin": -1.0, "xmax": 1.0, "ymin": -1.0, "ymax": 1.0, "radius": 1.0},
    "material": {"mu": 1.0, "lam": 1.0},
    "inclusions": {
        "placement": "none",
        "m": 0,
        "radius": 0.05,
        "gbar": 0.1,
        "modes": 2,
        "seed": 0,
        "seeds": 1,
        "centers": [],
        "file": "",
        "core": 11,
        "max_attempts": 100_000,
        "radii": [],
        "probe": 2,
    },
    "mesh": {
        "n": 16,
        "n_rings": 12,
        "n_sectors": 6,
        "global_levels": 0,
        "local_levels": 0,
        "band_width": 0.0,
        "levels": 4,
        "refinement": "global",
        "scale_local": True,
    },
    "bc": {"kind": "zero", "alpha": 0.1, "alphas": [0.0, 0.025, 0.05, 0.075, 0.1, 0.125, 0.15]},
    "solver": {"tol": 1e-10, "max_iter": 500, "points": 0},
    "output": {"dir": "out", "vtk": False, "nodal": True, "prefix": ""},
}

PLACEMENTS = ("none", "single", "list", "file", "structured", "semistructured", "random", "two_density")


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def _coerce(default, value, where: str):
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected a boolean, got {value!r}")
        return value
    if isinstance(default, int) and not isinstance(default, bool):
        if isinstance(value, list):  # grid dimensions such as m = [4, 5]
            return [int(v) for v in value]
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if not isinstance(value, int) or isinstance(value, bool):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        if not math.isfinite(value):
            raise ConfigError(f"{where}: value must be finite, got {value!r}")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string, got {value!r}")
        return value
    if isinstance(default, list):
        if not isinstance(value, list):
            raise ConfigError(f"{where}: expected a list, got {value!r}")
        return value
    return value


def parse_override(text: str) -> tuple[str, str, Any]:
    """Parse ``section.key=value``; the value is read as TOML, falling back to a bare string."""
    text = text[2:] if text.startswith("--") else text
    if "=" not in text:
        raise ConfigError(f"override {text!r} must look like section.key=value")
    path, raw = text.split("=", 1)
    if path.count(".") != 1:
        raise ConfigError(f"override key {path!r} must be section.key")
    section, key = path.split(".")
    try:
        value = tomli.loads(f"v = {raw}")["v"]
    except tomli.TOMLDecodeError:
        value = raw
    return section.strip(), key.strip(), value


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated, fully defaulted configuration (plain nested dictionaries)."""

    data: dict

    @classmethod
    def from_dict(cls, raw: dict | None = None, overrides: Sequence[str] = ()) -> "ExperimentConfig":
        merged = copy.deepcopy(DEFAULTS)
        stray = set(raw or {}) - set(DEFAULTS)
        if stray:
            raise ConfigError(f"unknown config section [{sorted(stray)[0]}]")
        items = [(s, k, v) for s, sec in (raw or {}).items() for k, v in _section_items(s, sec)]
        items += [parse_override(o) for o in overrides]
        for section, key, value in items:
            if section not in merged:
                raise ConfigError(f"unknown config section [{section}]")
            if key not in merged[section]:
                raise ConfigError(f"unknown key {section}.{key}")
            merged[section][key] = _coerce(DEFAULTS[section][key], value, f"{section}.{key}")
        cfg = cls(merged)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | os.PathLike | None, overrides: Sequence[str] = ()) -> "ExperimentConfig":
        raw = {}
        if path:
            try:
                with open(path, "rb") as fh:
                    raw = tomli.load(fh)
            except (OSError, tomli.TOMLDecodeError) as exc:
                raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(raw, overrides)

    def __getitem__(self, section: str) -> dict:
        return self.data[section]

    def with_overrides(self, **sections) -> "ExperimentConfig":
        data = copy.deepcopy(self.data)
        for s, kv in sections.items():
            data[s].update(kv)
        return ExperimentConfig.from_dict(data)

    @property
    def sha256(self) -> str:
        blob = json.dumps(self.data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @property
    def seed(self) -> int:
        return int(self["inclusions"]["seed"])

    def header(self, seed: int | None = None) -> str:
        return f"# config-sha256={self.sha256} seed={self.seed if seed is None else seed}"

    def validate(self) -> None:
        d, mat, inc, me, bc = self["domain"], self["material"], self["inclusions"], self["mesh"], self["bc"]
        if d["kind"] not in ("rect", "disc"):
            raise ConfigError(f"domain.kind must be rect or disc, got {d['kind']!r}")
        if d["kind"] == "rect" and not (d["xmin"] < d["xmax"] and d["ymin"] < d["ymax"]):
            raise ConfigError("rect domain needs xmin < xmax and ymin < ymax")
        if d["kind"] == "disc" and d["radius"] <= 0:
            raise ConfigError("disc radius must be positive")
        if mat["mu"] <= 0 or mat["lam"] < 0:
            raise ConfigError("material needs mu > 0 and lam >= 0")
        if inc["placement"] not in PLACEMENTS:
            raise ConfigError(f"inclusions.placement must be one of {PLACEMENTS}")
        if inc["radius"] <= 0 or inc["modes"] < 2 or inc["modes"] % 2 or inc["seeds"] < 1:
            raise ConfigError("inclusions need radius > 0, an even mode count >= 2 and seeds >= 1")
        if any(r <= 0 for r in inc["radii"]):
            raise ConfigError("inclusions.radii must be positive")
        if me["n"] < 1 or me["n_rings"] < 1 or me["n_sectors"] < 3 or me["levels"] < 1:
            raise ConfigError("mesh needs n >= 1, n_rings >= 1, n_sectors >= 3 and levels >= 1")
        if me["global_levels"] < 0 or me["local_levels"] < 0 or me["band_width"] < 0:
            raise ConfigError("refinement counts and band width must be non-negative")
        if me["refinement"] not in ("global", "local"):
            raise ConfigError("mesh.refinement must be global or local")
        if bc["kind"] not in ("zero", "compression", "shear"):
            raise ConfigError("bc.kind must be zero, compression or shear")
        if not all(isinstance(a, (int, float)) and 0 <= a < 1 for a in [bc["alpha"], *bc["alphas"]]):
            raise ConfigError("compression factors must lie in [0, 1)")
        if self["solver"]["tol"] <= 0 or self["solver"]["max_iter"] < 1:
            raise ConfigError("solver needs tol > 0 and max_iter >= 1")


def _section_items(section, body):
    if not isinstance(body, dict):
        raise ConfigError(f"[{section}] must be a table")
    return body.items()


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------

def make_domain(cfg: ExperimentConfig):
    d = cfg["domain"]
    if d["kind"] == "disc":
        return DiscDomain(d["radius"])
    return RectDomain(d["xmin"], d["xmax"], d["ymin"], d["ymax"])


def base_mesh(cfg: ExperimentConfig) -> Mesh:
    d, m = cfg["domain"], cfg["mesh"]
    dom = make_domain(cfg)
    return dom.mesh(m["n_rings"], m["n_sectors"]) if d["kind"] == "disc" else dom.mesh(m["n"])


def refine_mesh(mesh: Mesh, inclusions: Sequence[Inclusion], global_levels: int, local_levels: int, band_width: float) -> Mesh:
    """``global_levels`` red refinements, then ``local_levels`` bisection passes on triangles near any circle."""
    for _ in range(global_levels):
        mesh = refine_uniform(mesh)
    if local_levels and inclusions:
        mark = circle_band_marker([(i.center, i.radius) for i in inclusions], band_width)
        for _ in range(local_levels):
            mesh = refine_local(mesh, mark)
    return mesh


def build_mesh(cfg: ExperimentConfig, inclusions: Sequence[Inclusion] = ()) -> Mesh:
    m = cfg["mesh"]
    return refine_mesh(base_mesh(cfg), inclusions, m["global_levels"], m["local_levels"], m["band_width"])


def make_inclusions(cfg: ExperimentConfig, seed: int | None = None, radius: float | None = None) -> PlacementResult:
    """Inclusion layout described by ``[inclusions]`` (``seed``/``radius`` override the config)."""
    inc = cfg["inclusions"]
    dom = make_domain(cfg)
    r = inc["radius"] if radius is None else radius
    seed = inc["seed"] if seed is None else seed
    kind = inc["placement"]
    g, N = inc["gbar"], inc["modes"]
    if kind == "none":
        return PlacementResult((), 0.0, 0, seed)
    if kind == "single":
        cx = (dom.xmin + dom.xmax) / 2 if isinstance(dom, RectDomain) else 0.0
        cy = (dom.ymin + dom.ymax) / 2 if isinstance(dom, RectDomain) else 0.0
        incs = (Inclusion((cx, cy), r, g, N),)
    elif kind == "list":
        if not inc["centers"]:
            raise ConfigError("placement 'list' needs inclusions.centers")
        incs = tuple(Inclusion(tuple(c), r, g, N) for c in inc["centers"])
    elif kind == "file":
        incs = tuple(read_inclusions_csv(inc["file"], N, dom))
    else:
        if not isinstance(dom, RectDomain):
            raise ConfigError(f"placement {kind!r} needs a rect domain")
        if kind == "structured":
            return place_structured(dom, inc["m"], r, g, N)
        if kind == "semistructured":
            return place_semistructured(dom, inc["m"], r, g, seed, N)
        if kind == "random":
            return place_random(dom, int(inc["m"]), r, g, seed, inc["max_attempts"], N)
        return place_two_density(dom, inc["core"], g, r, N)
    validate_inclusions(incs, dom)
    radii = [i.radius for i in incs]
    return PlacementResult(incs, volume_fraction(radii, area=dom.area), 1, seed)


def boundary_condition(kind: str, alpha: float = 0.0) -> Callable:
    if kind == "compression":
        return compression_bc(alpha)
    if kind == "shear":
        return shear_bc
    return zero_bc


@dataclass
class Solution:
    space: FeSpace
    u: np.ndarray
    multipliers: np.ndarray
    report: SolveReport
    inclusions: tuple


class Problem:
    """Mesh, material and inclusions with one cached factorization.

    All solves share the Dirichlet dof set (every boundary vertex), so one
    factorization serves any number of boundary data.
    """

    def __init__(self, mesh: Mesh, inclusions: Sequence[Inclusion], mu: float, lam: float, tol: float = 1e-10, max_iter: int = 500, points: int = 0):
        self.mesh = mesh
        self.inclusions = tuple(inclusions)
        self.mu, self.lam = mu, lam
        self.tol, self.max_iter = tol, max_iter
        space = build_space(mesh)
        self.A = assemble_stiffness(space, mu, lam)
        self.B = assemble_coupling(space, self.inclusions, points=points or None)
        self.G = assemble_reduced_rhs(self.inclusions)
        self._factor = None
        self._space0 = space

    def solve(self, bc: Callable = zero_bc, gbar_scale: float = 1.0) -> Solution:
        space = apply_dirichlet(self._space0, bc)
        system = SaddleSystem(space, self.A, self.B, np.zeros(space.n_dofs), gbar_scale * self.G)
        if self._factor is None:
            self._factor = factor_primal(system.reduced()[0])
        u, lam, report = solve_saddle(system, self.tol, self.max_iter, factor=self._factor)
        return Solution(space, u, lam, report, self.inclusions)

    def side_forces(self, sol: Solution) -> np.ndarray:
        return np.array([boundary_stress_integral(sol.space, sol.u, s, self.mu, self.lam) for s in SIDES])


def problem_from_config(cfg: ExperimentConfig, inclusions: Sequence[Inclusion], mesh: Mesh | None = None) -> Problem:
    s, mat = cfg["solver"], cfg["material"]
    mesh = mesh if mesh is not None else build_mesh(cfg, inclusions)
    return Problem(mesh, inclusions, mat["mu"], mat["lam"], s["tol"], s["max_iter"], s["points"])


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def write_csv(path: Path, header_comment: str, columns: Sequence[str], rows: Sequence[Sequence]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [header_comment, ",".join(columns)] + [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def _out(cfg: ExperimentConfig, name: str) -> Path:
    o = cfg["output"]
    return Path(o["dir"]) / f"{o['prefix']}{name}"


def thread_cap() -> int:
    """Worker count: ``RLM_THREADS`` if set, else the CPU count."""
    raw = os.environ.get("RLM_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"RLM_THREADS must be an integer, got {raw!r}") from exc
    return max(1, n)


def _map(fn, items: Sequence, workers: int | None = None) -> list:
    workers = min(thread_cap() if workers is None else workers, len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------

def run_mesh(cfg: ExperimentConfig) -> dict:
    incs = make_inclusions(cfg).inclusions
    mesh = build_mesh(cfg, incs)
    check_mesh(mesh)
    path = _out(cfg, "mesh.txt")
    path.parent.mkdir(parents=True, exist_ok=True)
    dump_mesh(mesh, path)
    return {"mesh": str(path), "vertices": mesh.n_vertices, "triangles": mesh.n_triangles, "h_max": mesh.h_max}


def run_solve(cfg: ExperimentConfig) -> dict:
    placement = make_inclusions(cfg)
    prob = problem_from_config(cfg, placement.inclusions)
    bc = cfg["bc"]
    sol = prob.solve(boundary_condition(bc["kind"], bc["alpha"]))
    head = cfg.header()
    files = {}
    if cfg["output"]["nodal"]:
        path = _out(cfg, "solution.csv")
        path.parent.mkdir(parents=True, exist_ok=True)
        write_nodal_csv(sol.space, sol.u, path, comment=head)
        files["nodal"] = str(path)
    rows = []
    for j, lam_j in enumerate(split_multipliers(sol.inclusions, sol.multipliers)):
        for k, v in enumerate(lam_j):
            rows.append((j, k // 2 + 1, "xy"[k % 2], v))
    files["multipliers"] = str(write_csv(_out(cfg, "multipliers.csv"), head, ("inclusion", "mode", "component", "value"), rows))
    rep = sol.report
    files["report"] = str(write_csv(_out(cfg, "report.csv"), head, SolveReport.CSV_HEADER.split(","), [(rep.outer_iters, rep.schur_res, rep.primal_res, rep.factor_nnz)]))
    path = _out(cfg, "inclusions.csv")
    write_inclusions_csv(sol.inclusions, path, comment=head)
    files["inclusions"] = str(path)
    if cfg["output"]["vtk"]:
        path = _out(cfg, "solution.vtk")
        write_vtk(sol.space, sol.u, path)
        files["vtk"] = str(path)
    forces = prob.side_forces(sol) if isinstance(make_domain(cfg), RectDomain) else None
    return {"files": files, "report": rep, "vf": placement.vf, "forces": forces, "ndof": sol.space.n_dofs, "solution": sol}


def convergence_study(cfg: ExperimentConfig) -> list[ConvergenceRecord]:
    """Single centred inclusion on a clamped disc against the axisymmetric closed form.

    Level ``k`` applies ``k`` red refinements to the base mesh; with
    ``mesh.refinement = "local"`` it adds ``k`` bisection passes around the
    inclusion, so the local size scales like ``h_k^2 / h_0``.
    """
    d, inc, me = cfg["domain"], cfg["inclusions"], cfg["mesh"]
    if d["kind"] != "disc":
        raise ConfigError("the convergence study needs a disc domain")
    exact = AnalyticAxisym(d["radius"], inc["radius"], inc["gbar"])
    incl = Inclusion((0.0, 0.0), inc["radius"], inc["gbar"], inc["modes"])
    base = base_mesh(cfg)
    records = []
    mesh = refine_mesh(base, (), me["global_levels"], 0, 0.0)
    for level in range(me["levels"]):
        local = level if me["refinement"] == "local" else 0
        fine = refine_mesh(mesh, (incl,), 0, local, me["band_width"])
        prob = problem_from_config(cfg, (incl,), fine)
        sol = prob.solve(zero_bc)
        eL2, eH1 = error_norms(sol.space, sol.u, exact.displacement, exact.gradient, kinks=[((0.0, 0.0), incl.radius)])
        records.append(ConvergenceRecord(level, sol.space.n_dofs, mesh.h_max, eL2, eH1))
        log.info("level %d: ndof %d h %.4g eL2 %.4g eH1 %.4g", level, sol.space.n_dofs, mesh.h_max, eL2, eH1)
        mesh = refine_uniform(mesh)
    return records


def run_converge(cfg: ExperimentConfig) -> dict:
    records = convergence_study(cfg)
    path = _out(cfg, "convergence.csv")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join([cfg.header(), CONVERGENCE_HEADER, *convergence_rows(records)]) + "\n")
    return {"file": str(path), "records": records}


def modes_study(cfg: ExperimentConfig) -> list[tuple[int, float, int, Any]]:
    """Mode reports for every inclusion and every radius in ``inclusions.radii``.

    With ``mesh.scale_local`` the local passes grow by ``log2(r0 / r)`` so the
    mesh resolves each radius equally well.
    """
    inc, me = cfg["inclusions"], cfg["mesh"]
    radii = inc["radii"] or [inc["radius"]]
    out = []
    for r in radii:
        extra = max(0, round(math.log2(radii[0] / r))) if me["scale_local"] else 0
        layout = make_inclusions(cfg, radius=r).inclusions
        mesh = refine_mesh(base_mesh(cfg), layout, me["global_levels"], me["local_levels"] + extra, me["band_width"])
        sol = problem_from_config(cfg, layout, mesh).solve(zero_bc)
        for j, lam_j in enumerate(split_multipliers(layout, sol.multipliers)):
            out.append((j + 1, r, layout[j].modes, mode_report(lam_j)))
    return out


def run_modes(cfg: ExperimentConfig) -> dict:
    rows = [(j, r, n, rep.norm, rep.rel_m1x, rep.rel_m2y, rep.trunc_error) for j, r, n, rep in modes_study(cfg)]
    path = write_csv(_out(cfg, "modes.csv"), cfg.header(), MODE_HEADER.split(","), rows)
    return {"file": str(path), "rows": rows}


EFFECTIVE_COLUMNS = ("vf", "placement", "seed", "kappa_eff", "mu_eff") + tuple(f"F{i}{c}" for i in range(4) for c in "xy") + ("shear_Fx_top",)
SUMMARY_COLUMNS = ("placement", "vf", "n_runs", "kappa_mean", "kappa_std", "mu_mean", "mu_std")


def effective_moduli(cfg: ExperimentConfig, seed: int | None = None) -> dict:
    """Compression and shear tests on one layout; both share one factorization."""
    placement = make_inclusions(cfg, seed=seed)
    dom = make_domain(cfg)
    if not isinstance(dom, RectDomain):
        raise ConfigError("effective moduli need a rect domain")
    prob = problem_from_config(cfg, placement.inclusions)
    alpha = cfg["bc"]["alpha"]
    comp = prob.solve(compression_bc(alpha))
    Fc = prob.side_forces(comp)
    shear = prob.solve(shear_bc)
    Fs = prob.side_forces(shear)
    width = dom.xmax - dom.xmin
    return {
        "vf": placement.vf,
        "seed": placement.seed,
        "kappa_eff": effective_bulk(Fc, area_reduction(alpha, dom.area)),
        "mu_eff": effective_shear(Fs[3, 0], width),
        "forces": Fc,
        "shear_forces": Fs,
        "m": placement.m,
    }


def _effective_worker(args):
    data, seed = args
    return effective_moduli(ExperimentConfig(data), seed)


def effective_study(cfg: ExperimentConfig) -> list[dict]:
    inc = cfg["inclusions"]
    seeds = [inc["seed"] + k for k in range(inc["seeds"])] if inc["placement"] in ("random", "semistructured") else [inc["seed"]]
    return _map(_effective_worker, [(cfg.data, s) for s in seeds])


def summarize(results: Sequence[dict]) -> dict:
    k = np.array([r["kappa_eff"] for r in results])
    m = np.array([r["mu_eff"] for r in results])
    ddof = 1 if len(results) > 1 else 0
    return {
        "vf": float(np.mean([r["vf"] for r in results])),
        "n_runs": len(results),
        "kappa_mean": float(k.mean()),
        "kappa_std": float(k.std(ddof=ddof)),
        "mu_mean": float(m.mean()),
        "mu_std": float(m.std(ddof=ddof)),
    }


def run_effective(cfg: ExperimentConfig) -> dict:
    results = effective_study(cfg)
    kind = cfg["inclusions"]["placement"]
    rows = [
        (r["vf"], kind, r["seed"] if r["seed"] is not None else cfg.seed, r["kappa_eff"], r["mu_eff"], *r["forces"].ravel(), r["shear_forces"][3, 0])
        for r in results
    ]
    path = write_csv(_out(cfg, "effective.csv"), cfg.header(), EFFECTIVE_COLUMNS, rows)
    s = summarize(results)
    spath = write_csv(
        _out(cfg, "effective_summary.csv"),
        cfg.header(),
        SUMMARY_COLUMNS,
        [(kind, s["vf"], s["n_runs"], s["kappa_mean"], s["kappa_std"], s["mu_mean"], s["mu_std"])],
    )
    return {"file": str(path), "summary_file": str(spath), "results": results, "summary": s}


SWEEP_COLUMNS = ("alpha", "area_reduction", "pressure", "kappa_eff")


def compression_sweep(cfg: ExperimentConfig) -> list[tuple[float, float, float, float]]:
    """Average boundary pressure versus area reduction over ``bc.alphas`` on one factorization."""
    placement = make_inclusions(cfg)
    dom = make_domain(cfg)
    if not isinstance(dom, RectDomain):
        raise ConfigError("the compression sweep needs a rect domain")
    prob = problem_from_config(cfg, placement.inclusions)
    perimeter = 2 * ((dom.xmax - dom.xmin) + (dom.ymax - dom.ymin))
    rows = []
    for a in cfg["bc"]["alphas"]:
        sol = prob.solve(compression_bc(float(a)))
        F = prob.side_forces(sol)
        dA = area_reduction(float(a), dom.area)
        kappa = effective_bulk(F, dA) if dA > 0 else float("nan")
        rows.append((float(a), dA, mean_pressure(F, perimeter), kappa))
    return rows


def run_sweep(cfg: ExperimentConfig) -> dict:
    rows = compression_sweep(cfg)
    path = write_csv(_out(cfg, "sweep.csv"), cfg.header(), SWEEP_COLUMNS, rows)
    return {"file": str(path), "rows": rows}


DRIVERS: dict[str, Callable[[ExperimentConfig], dict]] = {
    "mesh": run_mesh,
    "solve": run_solve,
    "converge": run_converge,
    "modes": run_modes,
    "effective": run_effective,
    "sweep": run_sweep,
}


def run_experiment(cfg: ExperimentConfig, kind: str = "solve") -> dict:
    """Run one driver; module errors are re-raised with the experiment name attached."""
    if kind not in DRIVERS:
        raise ArgumentError(f"unknown experiment {kind!r}; choose from {sorted(DRIVERS)}")
    try:
        return DRIVERS[kind](cfg)
    except RlmError as exc:
        exc.args = (f"{kind}: {exc}",) + exc.args[1:]
        raise
