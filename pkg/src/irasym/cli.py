"""Command line: run identity checks described by a JSON scenario.

    irasym run scenario.json [--report out.json] [--plot-dir DIR] [--order N] [--tolerance-scale X]

Exit status 0 when every check passes, 1 when any fails, 2 on input errors.
"""
import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .asymptotics import (
    FreeFieldData,
    asymptote_diagnostics,
    electric_polarization,
    extract_null_asymptote,
    kirchhoff_sampler,
    magnetic_polarization,
    matching_verify,
    profile_wedge,
    total_asymptotes,
    transverse_polarization,
    zero_field,
)
from .currents import PointParticle, ScatteringEvent, current_profile
from .errors import IrasymError, ScenarioError
from .lorentz import four_velocity, mdot
from .staruszkiewicz import (
    StarData,
    StarWeylElement,
    casimir,
    charge_decompose,
    maxwell_residual,
    phase_difference,
    s_field,
    weyl_compose,
)
from .sympquant import fock_product, ir_divergence_scan, symp_null
from .triangle import (
    ChargeSmearing,
    TestParticle,
    charge_functional,
    finite_R_integrals,
    memory_kick,
    soft_relation,
)
from .celestial import harmonic_function

SCENARIO_VERSION = 1

_VEC3 = {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}
_VEC4 = {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4}
_HARMONICS = {
    "type": "array",
    "items": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
}
_PARTICLE = {
    "type": "object",
    "required": ["charge", "velocity"],
    "properties": {"charge": {"type": "number"}, "velocity": _VEC3},
    "additionalProperties": False,
}
_TERM = {
    "type": "object",
    "required": ["polarization"],
    "properties": {
        "family": {"enum": ["hermite", "step"]},
        "index": {"type": "integer", "minimum": 0},
        "width": {"type": "number", "exclusiveMinimum": 0},
        "center": {"type": "number"},
        "amplitude": {"type": "number"},
        "polarization": {
            "type": "object",
            "required": ["type"],
            "properties": {
                "type": {"enum": ["electric", "magnetic", "transverse"]},
                "velocities": {"type": "array", "items": _VEC3},
                "weights": {"type": "array", "items": {"type": "number"}},
                "p": _VEC4,
                "k": _VEC4,
                "w": _VEC4,
            },
        },
    },
}

SCHEMA = {
    "type": "object",
    "required": ["version", "checks"],
    "properties": {
        "version": {"const": SCENARIO_VERSION},
        "seed": {"type": "integer"},
        "elementary_charge": {"type": "number", "exclusiveMinimum": 0},
        "order": {"type": "integer", "minimum": 2},
        "events": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["incoming", "outgoing"],
                "properties": {
                    "incoming": {"type": "array", "items": _PARTICLE},
                    "outgoing": {"type": "array", "items": _PARTICLE},
                    "width": {"type": "number", "exclusiveMinimum": 0},
                    "center": {"type": "number"},
                },
            },
        },
        "fields": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["terms"],
                "properties": {"terms": {"type": "array", "items": _TERM}},
            },
        },
        "star": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "properties": {"D": _HARMONICS, "c": _HARMONICS},
            },
        },
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["type"],
                "properties": {
                    "type": {"type": "string"},
                    "name": {"type": "string"},
                    "tolerance": {"type": "number", "exclusiveMinimum": 0},
                    "event": {"type": "string"},
                    "field": {"type": "string"},
                    "incoming": {"type": "string"},
                    "fields": {"type": "array", "items": {"type": "string"}},
                    "data": {"anyOf": [{"type": "string"},
                                       {"type": "array", "items": {"type": "string"}}]},
                    "samples": {"type": "integer", "minimum": 1},
                    "levels": {"type": "integer", "minimum": 3},
                    "z": {"type": "number"},
                    "x": _VEC4,
                    "direction": _VEC3,
                    "velocity": _VEC3,
                    "v": _VEC3,
                    "v1": _VEC3,
                    "v2": _VEC3,
                    "points": {"type": "array", "items": _VEC4},
                    "epsilon": _HARMONICS,
                    "alpha": _HARMONICS,
                    "charge": {"type": "number"},
                    "mass": {"type": "number", "exclusiveMinimum": 0},
                    "tau0": {"type": "number"},
                    "omega_min": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
                },
            },
        },
    },
}


@dataclass
class Context:
    scenario: dict
    order: int = 16
    tolerance_scale: float = 1.0
    rng: np.random.Generator = field(default_factory=lambda: np.random.default_rng(0))

    @property
    def e(self):
        return float(self.scenario.get("elementary_charge", 1.0))

    def _lookup(self, table, name):
        try:
            return self.scenario[table][name]
        except KeyError:
            raise ScenarioError(f"{table}/{name}: not defined in the scenario") from None

    def event(self, name):
        spec = self._lookup("events", name)
        def parts(items):
            return [PointParticle(p["charge"], four_velocity(p["velocity"])) for p in items]
        return ScatteringEvent(parts(spec["incoming"]), parts(spec["outgoing"]),
                               spec.get("width", 1.0), spec.get("center", 0.0))

    def field(self, name):
        if name is None:
            return zero_field()
        return build_field(self._lookup("fields", name))

    def star(self, name):
        spec = self._lookup("star", name)
        return StarData.from_harmonics(spec.get("D", []), spec.get("c", []), self.e)


def _polarization(spec):
    kind = spec["type"]
    try:
        if kind == "electric":
            vs = [four_velocity(v) for v in spec["velocities"]]
            return electric_polarization(vs, spec["weights"])
        if kind == "magnetic":
            return magnetic_polarization(spec["p"], spec["k"])
        return transverse_polarization(spec["w"])
    except KeyError as exc:
        raise ScenarioError(f"polarization of type {kind!r} needs field {exc.args[0]!r}") from None


def build_field(spec):
    total = None
    for t in spec["terms"]:
        term = FreeFieldData(_polarization(t["polarization"]), t.get("family", "hermite"),
                             int(t.get("index", 0)), float(t.get("width", 1.0)),
                             float(t.get("center", 0.0)), amplitude=float(t.get("amplitude", 1.0)))
        total = term if total is None else total + term
    return total if total is not None else zero_field()


# --------------------------------------------------------------------------
# checks: each returns (lhs, rhs, residual, default tolerance, anchor, series),
# or a list of such tuples with a suffix for the row name appended


def _row_values(lhs, rhs):
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    return lhs, rhs, float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0


def check_gauss_constraint(ctx, spec):
    ev = ctx.event(spec["event"])
    Vj = current_profile(ev)
    n = int(spec.get("samples", 1000))
    nv = ctx.rng.normal(size=(n, 3))
    nv /= np.linalg.norm(nv, axis=1, keepdims=True)
    l = ctx.rng.uniform(0.3, 3.0, n)[:, None] * np.concatenate([np.ones((n, 1)), nv], axis=1)
    s = ctx.rng.normal(scale=3.0, size=n)
    res = float(np.max(np.abs(mdot(l, Vj(s, l)) - ev.charge_out)))
    return ev.charge_out, ev.charge_out, res, 1e-12, "l.V^j(s,l) = total charge", {}


def check_matching(ctx, spec):
    ev = ctx.event(spec["event"])
    parts = total_asymptotes(ev, ctx.field(spec.get("incoming")))
    res = matching_verify(parts["V"], parts["V_past"], parts["Vj"], rng=ctx.rng,
                          n=int(spec.get("samples", 200)), out=parts["out"],
                          in_past=parts["in_past"])
    worst = max(res.values())
    return 0.0, worst, worst, 1e-8, "future/past null data matching", {}


def check_null_round_trip(ctx, spec):
    data = ctx.field(spec["field"])
    x = np.asarray(spec.get("x", [0.2, -0.3, 0.1, 0.4]), dtype=float)
    n = np.asarray(spec.get("direction", [0.0, 0.6, 0.8]), dtype=float)
    l = np.concatenate([[1.0], n / np.linalg.norm(n)])
    order = int(spec.get("order", 32))
    rep = extract_null_asymptote(kirchhoff_sampler(data, order=order), x, l,
                                 levels=int(spec.get("levels", 13)), tol=np.inf)
    s = np.float64(mdot(x, l))
    lhs = np.concatenate([rep.V, rep.lV.ravel()])
    rhs = np.concatenate([data(s, l), profile_wedge(data, s, l).ravel()])
    _, _, res = _row_values(lhs, rhs)
    series = {"null_extrapolation": {
        "columns": ["R", "R*A^0", "R*A^1", "R*A^2", "R*A^3"],
        "title": "R A(x + R l) approaching the null asymptote V(x.l, l)",
        "rows": np.column_stack([rep.radii, rep.trace_A]).tolist()}}
    return lhs.tolist(), rhs.tolist(), res, 1e-3, "lim R A(x+Rl) = V(x.l, l)", series


def check_charge_equality(ctx, spec):
    eps = harmonic_function(_harm(spec["epsilon"]), 0)
    sm = ChargeSmearing.from_potential(eps)
    ev = ctx.event(spec["event"])
    parts = total_asymptotes(ev, ctx.field(spec.get("incoming")))
    q1, q2, d = charge_functional(sm, parts["V"].minus, parts["V"].charge, quad=ctx.order * 2)
    return q1, q2, d, 1e-6, "charge from smeared V+ equals charge from eps+", {}


def check_memory(ctx, spec):
    data = ctx.field(spec["field"])
    p = TestParticle(float(spec.get("charge", ctx.e)), float(spec.get("mass", 1.0)),
                     four_velocity(spec.get("velocity", [0.0, 0.0, 0.0])))
    dt, dc, g = memory_kick(p, data, quad=ctx.order * 2)
    scale = max(float(np.max(np.abs(dc))), 1e-300)
    res = max(float(np.max(np.abs(dt - dc))), float(np.max(np.abs(g - dc)))) / scale
    return dc.tolist(), g.tolist(), res, 1e-4, "memory shift equals momentum derivative of the phase", {}


def check_finite_R(ctx, spec):
    data = ctx.field(spec["field"])
    n = np.asarray(spec.get("direction", [0.0, 0.6, 0.8]), dtype=float)
    k = np.concatenate([[1.0], n / np.linalg.norm(n)])
    rep = finite_R_integrals(data, k, float(spec.get("tau0", -3.0)))
    full = max(float(np.max(np.abs(v))) for v in rep["full_line"].values())
    lhs, rhs, res = _row_values(rep["null"]["limit"], rep["null"]["expected"])
    if full > 1e-8:
        res = max(res, full)
    return lhs.tolist(), rhs.tolist(), res, 1e-3, "half-line R-limit equals k^V(tau0, k)", {}


def check_soft(ctx, spec):
    ev = ctx.event(spec["event"])
    rep = soft_relation(ev, ctx.field(spec.get("incoming")))
    return rep["lhs"].tolist(), rep["rhs"].tolist(), rep["residual"], 1e-6, \
        "classical soft relation", {}


def check_fock_commutator(ctx, spec):
    a, b = ctx.field(spec["fields"][0]), ctx.field(spec["fields"][1])
    lhs = fock_product(a, b, ctx.order) - fock_product(b, a, ctx.order)
    rhs = 1j * symp_null(a, b, ctx.order)
    return [lhs.real, lhs.imag], [rhs.real, rhs.imag], abs(lhs - rhs), 1e-6, \
        "(f1,f2) - (f2,f1) = i{V1,V2}", {}


def check_ir_scan(ctx, spec):
    data = ctx.field(spec["field"])
    omin = spec.get("omega_min")
    scan = ir_divergence_scan(data, omin, ctx.order)
    rel = abs(scan["slope"] - scan["expected_slope"]) / max(abs(scan["expected_slope"]), 1e-300)
    series = {"ir_scan": {
        "columns": ["ln(1/omega_min)", "value"],
        "title": "truncated Fock norm growing like a ln(1/omega_min)",
        "rows": np.column_stack([np.log(1.0 / scan["omega_min"]), scan["value"]]).tolist()}}
    return scan["slope"], scan["expected_slope"], rel, 0.05, "logarithmic infrared divergence", series


def check_star(ctx, spec):
    data = ctx.star(spec["data"])
    v1 = four_velocity(spec.get("v1", [0.2, -0.1, 0.3]))
    v2 = four_velocity(spec.get("v2", [-0.3, 0.2, 0.0]))
    xs = [np.asarray(x, dtype=float) for x in spec.get(
        "points", [[0.3, 1.0, -0.5, 0.7], [2.0, 0.3, 0.1, -0.4]])]
    res = 0.0
    vals = []
    for x in xs:
        s1 = s_field(data, v1, x)
        vals.append(s1)
        res = max(res, abs(s_field(data, v1, 2.0 * x) - s1), abs(s_field(data, v2, x) - s1))
    return vals, vals, res, 1e-6, "S(x) homogeneous of degree 0 and independent of v", {}


def check_star_maxwell(ctx, spec):
    data = ctx.star(spec["data"])
    x = np.asarray(spec.get("x", [0.3, 1.0, -0.5, 0.7]), dtype=float)
    div, bianchi = maxwell_residual(data, x)
    return 0.0, max(div, bianchi), max(div, bianchi), 1e-4, "free Maxwell equations in x^2 < 0", {}


def check_charge_decompose(ctx, spec):
    data = ctx.star(spec["data"])
    v = four_velocity(spec.get("v", [0.2, -0.1, 0.3]))
    dec = charge_decompose(data.c, v)
    return dec.Q, data.charge(), dec.residual, 1e-6, "c = Q/(v.l)^2 + d^2 F_v", {}


def check_weyl(ctx, spec):
    ws = [StarWeylElement(ctx.star(n)) for n in spec["data"]]
    if len(ws) != 3:
        raise ScenarioError("weyl_associativity needs exactly three star data names")
    left = weyl_compose(weyl_compose(ws[0], ws[1]), ws[2])
    right = weyl_compose(ws[0], weyl_compose(ws[1], ws[2]))
    return left.phase, right.phase, phase_difference(left.phase, right.phase), 1e-10, \
        "Weyl cocycle associativity", {}


def check_casimir(ctx, spec):
    value, nu, regime = casimir(float(spec["z"]))
    got = [value, nu]
    expected = spec.get("expected", got)
    res = 0.0
    for a, b in zip(got, expected):
        if (a is None) != (b is None):
            res = np.inf
        elif a is not None:
            res = max(res, abs(a - b))
    return got, expected, res, 1e-12, f"Casimir value ({regime})", {}


def check_lgt(ctx, spec):
    coeffs = _harm(spec["alpha"])
    x = np.asarray(spec.get("x", [0.2, 0.1, -0.3, 0.2]), dtype=float)
    n = np.asarray(spec.get("direction", [0.0, 0.6, 0.8]), dtype=float)
    l = np.concatenate([[1.0], n / np.linalg.norm(n)])
    rep = asymptote_diagnostics(coeffs, x, l)
    rows = []
    for key in ("future", "past"):
        d = rep[key]
        rows.append((d["limit"], rep["alpha"], abs(d["limit"] - rep["alpha"]), 1e-3,
                     f"{key} limit of lambda equals alpha(l)", {}, f"{key}_limit"))
        exp = d["expected_coefficient"]
        rel = float(np.max(np.abs(d["log_coefficient"] - exp))) / max(float(np.max(np.abs(exp))), 1e-300)
        rows.append((d["log_coefficient"].tolist(), exp.tolist(), rel, 0.05,
                     f"{key} log R / R coefficient", {}, f"{key}_log"))
    return rows


CHECKS = {
    "gauss_constraint": check_gauss_constraint,
    "matching_verify": check_matching,
    "null_round_trip": check_null_round_trip,
    "charge_equality": check_charge_equality,
    "memory_kick": check_memory,
    "finite_R": check_finite_R,
    "soft_relation": check_soft,
    "fock_commutator": check_fock_commutator,
    "ir_scan": check_ir_scan,
    "star_invariance": check_star,
    "star_maxwell": check_star_maxwell,
    "charge_decompose": check_charge_decompose,
    "weyl_associativity": check_weyl,
    "casimir": check_casimir,
    "lgt_diagnostics": check_lgt,
}


def _harm(items):
    return {(int(a), int(b)): float(v) for a, b, v in items}


def _jsonable(x):
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else None
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


# --------------------------------------------------------------------------
# scenario handling and report


def load_scenario(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc.strerror}") from None
    try:
        scenario = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
                            f"{exc.msg}") from None
    validate_scenario(scenario)
    return scenario


def validate_scenario(scenario):
    try:
        jsonschema.validate(scenario, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ScenarioError(f"scenario field {where}: {exc.message}") from None
    for i, chk in enumerate(scenario["checks"]):
        if chk["type"] not in CHECKS:
            raise ScenarioError(f"scenario field checks/{i}/type: unknown check {chk['type']!r} "
                                f"(known: {', '.join(sorted(CHECKS))})")


def run_scenario(scenario, order=None, tolerance_scale=1.0):
    ctx = Context(scenario, int(order or scenario.get("order", 16)), float(tolerance_scale),
                  np.random.default_rng(int(scenario.get("seed", 0))))
    rows, series = [], {}
    for i, chk in enumerate(scenario["checks"]):
        name = chk.get("name", f"{chk['type']}_{i}")
        try:
            out = CHECKS[chk["type"]](ctx, chk)
        except ScenarioError:
            raise
        except (KeyError, TypeError) as exc:
            raise ScenarioError(f"scenario field checks/{i}: missing or malformed {exc}") from None
        except IrasymError as exc:
            rows.append({"name": name, "type": chk["type"], "anchor": "", "lhs": None,
                         "rhs": None, "residual": None, "tolerance": None, "passed": False,
                         "error": f"{type(exc).__name__}: {exc}"})
            continue
        except ValueError as exc:
            raise ScenarioError(f"scenario field checks/{i}: {exc}") from None
        for item in (out if isinstance(out, list) else [out]):
            lhs, rhs, res, tol, anchor, extra = item[:6]
            tol = float(chk.get("tolerance", tol)) * ctx.tolerance_scale
            rows.append({"name": name if len(item) == 6 else f"{name}.{item[6]}",
                         "type": chk["type"], "anchor": anchor, "lhs": _jsonable(lhs),
                         "rhs": _jsonable(rhs), "residual": float(res), "tolerance": tol,
                         "passed": bool(np.isfinite(res) and res <= tol)})
            for key, val in extra.items():
                series[key if key not in series else f"{key}_{i}"] = _jsonable(val)
    return {
        "version": SCENARIO_VERSION,
        "package_version": __version__,
        "order": ctx.order,
        "tolerance_scale": ctx.tolerance_scale,
        "checks": rows,
        "series": series,
        "summary": {"total": len(rows), "passed": sum(r["passed"] for r in rows),
                    "failed": sum(not r["passed"] for r in rows)},
    }


def emit_plotdata(report, selection, directory):
    """Write the named series as whitespace columns with '#' headers; returns the path."""
    available = sorted(report.get("series", {}))
    if selection not in available:
        raise ScenarioError(f"unknown series {selection!r}; available: "
                            f"{', '.join(available) if available else '(none)'}")
    s = report["series"][selection]
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{selection}.dat"
    lines = [f"# {s['title']}", "# " + " ".join(s["columns"])]
    lines += [" ".join(f"{v:.16e}" for v in row) for row in s["rows"]]
    path.write_text("\n".join(lines) + "\n")
    return path


def main(argv=None):
    parser = argparse.ArgumentParser(prog="irasym", description="Infrared asymptotics identity checks")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the checks of a scenario file")
    run.add_argument("scenario")
    run.add_argument("--report", help="write the JSON report here")
    run.add_argument("--plot-dir", help="write plot-data column files into this directory")
    run.add_argument("--order", type=int, help="override the sphere quadrature order")
    run.add_argument("--tolerance-scale", type=float, default=1.0)
    args = parser.parse_args(argv)

    try:
        if args.tolerance_scale <= 0:
            raise ScenarioError("--tolerance-scale must be positive")
        if args.order is not None and args.order < 2:
            raise ScenarioError("--order must be at least 2")
        scenario = load_scenario(args.scenario)
        report = run_scenario(scenario, args.order, args.tolerance_scale)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    text = json.dumps(report, indent=2, sort_keys=True)
    if args.report:
        Path(args.report).write_text(text + "\n")
    if args.plot_dir:
        for name in report["series"]:
            emit_plotdata(report, name, args.plot_dir)
    for row in report["checks"]:
        status = "PASS" if row["passed"] else "FAIL"
        detail = row.get("error") or f"residual {row['residual']:.3e} (tol {row['tolerance']:.1e})"
        print(f"{status} {row['name']}: {detail}")
    return 0 if report["summary"]["failed"] == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
