"""Configuration-driven case execution: build, solve, postprocess, report.

A case config is a single JSON document:

{
  "geometry": {"builtin": "square4", "params": {"offset": [-0.15, 0.1]}},
  "discretization": {"p": 3, "r": 1, "quad_order": null,
                     "stabilize": {"enabled": false, "fine_segments": null}},
  "material": {"E": 1e4, "nu": 0.0, "D": 1.0},          # exactly one of t | D
  "bcs": {"all": "clamped"},                            # or per_patch / groups
  "loads": {"surface": "from_exact",                    # | {"const": v} | {"expr": "..."}
            "point": [{"at": [0, 0], "F": 1.0}],
            "edges": [{"group": "load_edges", "Q": 100.0}]},
  "exact": {"builtin": "cos2_square"},
  "reference": {"builtin": "point_load_series", "terms": 4001},  # or {"value": v}
  "study": {"segments": [4, 8]},
  "outputs": {"csv": "out.csv", "fields": null, "sample_grid": [9, 9],
              "eval_point": [0, 0]}
}
"""

import json
import time

import numpy as np

from . import models
from .coupling import build_coupled_space, verify_asg1, asg1_coefficients, c1_jump_report, reproduction_vector
from .errors import ConfigError
from .geometry import apply_bc_tags, locate_point
from .plate import (
    LoadSpec,
    PlateMaterial,
    cos2_square,
    error_norms,
    evaluate,
    manufactured_rhs,
    point_load_reference,
    solve_plate,
)
from .stabilize import CombinedSpaceSpec, build_combined_space

__all__ = ["CaseConfig", "ResultRow", "run_case", "verify_case", "export_case", "write_csv"]

CSV_COLUMNS = [
    "h", "p", "r", "N", "N4", "N6", "h2_semi", "l2",
    "center_deflection", "u_over_uref", "cond_estimate", "wall_time_s",
]

_BUILTIN_EXACT = {"cos2_square": cos2_square}

_GEOMETRY_BUILDERS = {
    "square4": models.square4,
    "disk4": models.disk4,
    "fan2": models.fan2,
    "two_blocks_square": models.two_blocks_square,
    "perforated_disk": models.perforated_disk,
    "l_bracket": models.l_bracket,
}


class ResultRow:
    def __init__(self, **kw):
        for c in CSV_COLUMNS:
            setattr(self, c, kw.get(c))

    def as_list(self):
        return [getattr(self, c) for c in CSV_COLUMNS]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(rows, path):
    with open(path, "w") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row.as_list()) + "\n")


class CaseConfig:
    """Validated case description; raises ConfigError with a path hint."""

    def __init__(self, doc):
        self.doc = doc
        geo = self._get("geometry", dict)
        if "builtin" not in geo:
            raise ConfigError("geometry.builtin is required", tag="config-error")
        if geo["builtin"] not in _GEOMETRY_BUILDERS and geo["builtin"] not in (
            "chamfered_square",
            "square_with_hole",
        ):
            raise ConfigError("unknown geometry %r" % geo["builtin"], tag="config-error")
        dis = self._get("discretization", dict)
        self.p = int(dis.get("p", 3))
        self.r = int(dis.get("r", 1))
        if not 0 <= self.r <= self.p - 1:
            raise ConfigError("discretization.r must satisfy 0 <= r <= p-1", tag="config-error")
        self.quad_order = dis.get("quad_order")
        self.interface_quad = dis.get("interface_quad")
        self.tol_null = float(dis.get("tol_null", 1e-10))
        st = dis.get("stabilize", {}) or {}
        self.stabilize = bool(st.get("enabled", False))
        self.stabilize_fine = st.get("fine_segments")
        mat = self._get("material", dict)
        if ("t" in mat) == ("D" in mat):
            raise ConfigError("material needs exactly one of t or D", tag="config-error")
        self.material = PlateMaterial(
            mat.get("E", 1.0), mat.get("nu", 0.0), t=mat.get("t"), D=mat.get("D")
        )
        self.bcs = doc.get("bcs", {}) or {}
        for tag in self._bc_tags(self.bcs):
            if tag not in ("clamped", "simply_supported", "free"):
                raise ConfigError("unknown bc tag %r" % tag, tag="config-error")
        self.loads = doc.get("loads", {}) or {}
        self.exact_name = (doc.get("exact") or {}).get("builtin")
        if self.exact_name is not None and self.exact_name not in _BUILTIN_EXACT:
            raise ConfigError("unknown exact solution %r" % self.exact_name, tag="config-error")
        self.reference = doc.get("reference")
        study = doc.get("study", {}) or {}
        self.segments = [int(s) for s in study.get("segments", [1])]
        if any(s < 1 for s in self.segments):
            raise ConfigError("study.segments must be >= 1", tag="config-error")
        self.outputs = doc.get("outputs", {}) or {}

    @staticmethod
    def _bc_tags(bcs):
        for key, val in bcs.items():
            if key == "groups":
                yield from val.values()
            elif key == "per_patch":
                yield from val.values()
            else:
                yield val

    def _get(self, key, typ):
        if key not in self.doc or not isinstance(self.doc[key], typ):
            raise ConfigError("missing or invalid %r section" % key, tag="config-error")
        return self.doc[key]

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError("config is not valid JSON: %s" % exc, tag="config-error")
        return cls(doc)

    # ------------------------------------------------------------------

    def build_base_domain(self):
        """Unrefined domain with BC tags applied; returns (domain, info)."""
        geo = self.doc["geometry"]
        name = geo["builtin"]
        params = dict(geo.get("params", {}))
        info = {}
        if name in ("chamfered_square", "square_with_hole"):
            from .trim import assemble_trimmed_domain

            builder = getattr(models, name)
            square, spec = builder(degree=self.p, **params)
            domain = assemble_trimmed_domain(square, spec)
        else:
            built = _GEOMETRY_BUILDERS[name](degree=self.p, **params)
            domain, info = built if isinstance(built, tuple) else (built, {})
        bc = {}
        if "all" in self.bcs:
            bc["all"] = self.bcs["all"]
        for k, v in (self.bcs.get("per_patch") or {}).items():
            bc[int(k)] = v
        for gname, tag in (self.bcs.get("groups") or {}).items():
            for k in info.get(gname, []):
                bc[int(k)] = tag
        if bc:
            apply_bc_tags(domain, bc)
        return domain, info

    def build_space(self, base_domain, segments):
        if self.stabilize:
            fine = self.stabilize_fine or segments
            return build_combined_space(
                base_domain,
                CombinedSpaceSpec(fine),
                self.r,
                tol_null=self.tol_null,
                interface_quad=self.interface_quad,
            )
        dom = base_domain.with_segments(segments, segments, self.r)
        return build_coupled_space(
            dom, tol_null=self.tol_null, interface_quad=self.interface_quad
        )

    def exact_solution(self):
        return _BUILTIN_EXACT[self.exact_name]() if self.exact_name else None

    def load_spec(self, info):
        surface = None
        src = self.loads.get("surface")
        if src == "from_exact":
            exact = self.exact_solution()
            if exact is None:
                raise ConfigError("loads.surface = from_exact needs exact", tag="config-error")
            surface = manufactured_rhs(exact, self.material.D)
        elif isinstance(src, dict) and "const" in src:
            c = float(src["const"])
            surface = lambda x, y: np.full_like(np.asarray(x, dtype=float), c)
        elif isinstance(src, dict) and "expr" in src:
            code = compile(src["expr"], "<surface-load>", "eval")
            ns = {"np": np, "pi": np.pi, "sin": np.sin, "cos": np.cos, "exp": np.exp}
            surface = lambda x, y: eval(code, {"__builtins__": {}}, dict(ns, x=x, y=y))
        elif src is not None:
            raise ConfigError("unrecognized loads.surface", tag="config-error")
        point_loads = [
            (pl["at"], pl.get("F", 1.0)) for pl in self.loads.get("point", [])
        ]
        edge_loads, edge_moments = [], []
        for e in self.loads.get("edges", []):
            targets = [int(e["patch"])] if "patch" in e else list(info.get(e.get("group"), []))
            if not targets:
                raise ConfigError("edge load names no patch", tag="config-error")
            for t in targets:
                if "Q" in e:
                    edge_loads.append((t, float(e["Q"])))
                if "M" in e:
                    edge_moments.append((t, float(e["M"])))
        return LoadSpec(surface, edge_loads, edge_moments, point_loads)

    def reference_value(self):
        ref = self.reference
        if ref is None:
            return None
        if "value" in ref:
            return float(ref["value"])
        if ref.get("builtin") == "point_load_series":
            return point_load_reference(
                F=ref.get("F", 1.0),
                L=ref.get("L", 1.0),
                D=self.material.D,
                terms=int(ref.get("terms", 4001)),
            )
        raise ConfigError("unrecognized reference", tag="config-error")


def run_case(cfg, csv_path=None, quad_order=None, progress=None):
    """Execute the study of a config; returns (rows, last solution)."""
    base, info = cfg.build_base_domain()
    exact = cfg.exact_solution()
    loads = cfg.load_spec(info)
    uref = cfg.reference_value()
    quad = quad_order or cfg.quad_order
    rows = []
    solution = None
    for s in cfg.segments:
        t0 = time.perf_counter()
        cs = cfg.build_space(base, s)
        solution = solve_plate(cs, cfg.material, loads, quad=quad)
        h2 = l2 = None
        if exact is not None:
            rep = error_norms(solution, exact, quad=quad)
            h2, l2 = rep.h2_semi, rep.l2
        ep = cfg.outputs.get("eval_point")
        xy = np.asarray(ep, dtype=float) if ep is not None else cs.domain.groups[0].x0
        m, z, x = locate_point(cs.domain, xy)
        center = float(evaluate(solution, [(m, z, x)], nders=0)[0])
        row = ResultRow(
            h=1.0 / s, p=cfg.p, r=cfg.r, N=cs.N, N4=cs.N4, N6=cs.N6,
            h2_semi=h2, l2=l2, center_deflection=center,
            u_over_uref=(center / uref if uref else None),
            cond_estimate=solution.cond_estimate,
            wall_time_s=time.perf_counter() - t0,
        )
        rows.append(row)
        if progress:
            progress(row)
    path = csv_path or cfg.outputs.get("csv")
    if path:
        write_csv(rows, path)
    return rows, solution


def convergence_table(rows):
    """Per-refinement observed orders (log ratios of consecutive rows)."""
    table = []
    for prev, cur in zip([None] + rows[:-1], rows):
        entry = {"h": cur.h, "h2_semi": cur.h2_semi, "l2": cur.l2}
        for key in ("h2_semi", "l2"):
            order = None
            if prev is not None and cur.h != prev.h:
                a, b = getattr(prev, key), getattr(cur, key)
                if a and b and a > 0 and b > 0:
                    order = float(np.log(a / b) / np.log(prev.h / cur.h))
            entry[key + "_order"] = order
        table.append(entry)
    return table


def verify_case(cfg, checks=("all",)):
    """Geometry/space verification; returns (ok, report lines)."""
    checks = set(checks)
    if "all" in checks:
        checks = {"asg1", "c1-jump", "reproduction"}
    base, info = cfg.build_base_domain()
    lines = []
    ok = True
    if "asg1" in checks:
        for itf in base.interfaces:
            res = verify_asg1(base, itf, asg1_coefficients(base, itf), samples=50)
            good = res <= 1e-12
            ok &= good
            lines.append(("asg1", repr(itf), res, 1e-12, good))
    if checks & {"c1-jump", "reproduction"}:
        s = cfg.segments[0]
        cs = cfg.build_space(base, s)
        if "c1-jump" in checks:
            for itf, rel in c1_jump_report(cs, nsamples=50):
                good = rel <= 1e-8
                ok &= good
                lines.append(("c1-jump", repr(itf), rel, 1e-8, good))
        if "reproduction" in checks:
            free, _ = cfg.build_base_domain()
            for be in free.boundary:
                be.tag = "free"
            csf = cfg.build_space(free, s)
            for which in ("1", "x", "y"):
                err = _reproduction_error(csf, which)
                good = err <= 1e-10
                ok &= good
                lines.append(("reproduction", which, err, 1e-10, good))
    return ok, lines


def _reproduction_error(cspace, which, nsamples=40, rng=None):
    rng = rng or np.random.default_rng(5)
    z = reproduction_vector(cspace, which)
    ctil = cspace.expand(z)
    worst = 0.0
    for _ in range(nsamples):
        m = rng.integers(0, len(cspace.domain.patches))
        ze, xe = rng.uniform(0.01, 0.99, 2)
        idx, V = cspace.uspace.parametric_eval(m, ze, xe, nders=0)[:2]
        val = ctil[idx] @ V
        xph, yph = cspace.domain.patches[m].map(ze, xe)
        target = {"1": 1.0, "x": xph, "y": yph}[which]
        worst = max(worst, abs(val - target))
    return worst


def export_case(cfg, out_path, quad_order=None):
    from .vtkio import export_field

    rows, solution = run_case(cfg, quad_order=quad_order)
    grid = cfg.outputs.get("sample_grid", [9, 9])
    return export_field(solution, grid, out_path)
