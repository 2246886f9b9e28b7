"""Command-line interface ``zmc``.

Exit codes: 0 success, 2 bad input, 3 quadrature failure or (with --strict)
an inconclusive oracle, 4 a certificate contradicted by the oracle.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import catalog, export, holofn, krust
from . import univalence as U
from .weierstrass import (DeformParams, WeierstrassData, metric_coeff, planar_map_fn,
                          surface_point)

EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_CONTRADICTION = 4

DEFAULTS = {
    "n": 3, "truncation": 6.0, "domain": "halfplane",
    "theta": 0.0, "lambda": 1.0, "c": 1.0, "rho": None,
    "grid": 96, "resolution": 301,
    "theta_samples": 4, "rho_max": 2.0, "rho_samples": 9,
    "seed_theta": None, "seed_lambda": None, "seed_c": None, "M": None,
    "sweep": "c", "from": None, "to": None, "steps": None,
}
SWEEP_DEFAULTS = {"theta": (0.0, 2 * math.pi, 8), "lambda": (0.6, 2.0, 8), "c": (-1.0, 1.0, 9)}
FLOAT_KEYS = {"truncation", "theta", "lambda", "c", "rho", "rho_max", "seed_theta",
              "seed_lambda", "seed_c", "M", "from", "to"}
INT_KEYS = {"n", "grid", "resolution", "theta_samples", "rho_samples", "steps"}


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration


def read_config(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment; keys use flag names."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise InputError(f"cannot read config {path}: {err}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise InputError(f"{path}:{lineno}: expected key = value")
        key = key.strip().lstrip("-").replace("-", "_")
        if key not in DEFAULTS:
            raise InputError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _coerce(key, val.strip())
    return out


def _coerce(key, val):
    try:
        if key in INT_KEYS:
            return int(val)
        if key in FLOAT_KEYS:
            return float(val)
    except ValueError:
        raise InputError(f"bad value for {key}: {val!r}") from None
    return val


def resolve(args: argparse.Namespace) -> dict:
    """CLI flags > config file > defaults."""
    conf = read_config(args.config) if args.config else {}
    out = {}
    for key, default in DEFAULTS.items():
        cli = getattr(args, key, None)
        out[key] = cli if cli is not None else conf.get(key, default)
    return out


# ---------------------------------------------------------------------------
# inputs


def load_data_file(path: str) -> WeierstrassData:
    """JSON with expression strings ``F``, ``G``, a ``domain`` object and
    optional ``basepoint``, ``closed_forms`` {h, g, T} and ``name``."""
    try:
        spec = json.loads(Path(path).read_text(encoding="utf-8"))
        dom = spec.get("domain", {"shape": "disk", "radius": 1.0})
        shape = dom.get("shape", "disk")
        if shape == "disk":
            domain = holofn.Disk(float(dom.get("radius", 1.0)))
        elif shape == "halfplane":
            domain = holofn.TruncatedHalfPlane(float(dom.get("width", 6.0)),
                                               float(dom.get("height", 6.0)),
                                               float(dom.get("delta", 1e-3)))
        elif shape == "polygon":
            domain = holofn.Polygon([complex(x, y) for x, y in dom["vertices"]])
        else:
            raise InputError(f"unknown domain shape {shape!r}")
        base = spec.get("basepoint")
        base = None if base is None else complex(*base)
        forms = spec.get("closed_forms")
        if forms is not None:
            forms = tuple(holofn.parse(forms[k]) for k in ("h", "g", "T"))
        return WeierstrassData(holofn.parse(spec["F"]), holofn.parse(spec["G"]), domain,
                               base=base, closed_forms=forms,
                               name=str(spec.get("name", Path(path).stem)))
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as err:
        raise InputError(f"cannot load data file {path}: {err}") from None
    except (holofn.ExprSyntaxError, holofn.PoleOrBranchCut, ValueError) as err:
        raise InputError(f"invalid data file {path}: {err}") from None


def load_source(source: str, cfg: dict) -> WeierstrassData:
    if source in catalog.CATALOG:
        kwargs = {}
        if source in ("enneper", "exponential"):
            kwargs["n"] = cfg["n"]
        if source == "exponential":
            kwargs["truncation"] = cfg["truncation"]
            kwargs["domain"] = cfg["domain"]
        try:
            return catalog.get(source, **kwargs).data
        except ValueError as err:
            raise InputError(str(err)) from None
    if os.path.exists(source):
        return load_data_file(source)
    raise InputError(f"{source!r} is neither a catalog example {sorted(catalog.CATALOG)} "
                     "nor a data file")


def params_from(cfg: dict) -> DeformParams:
    lam = cfg["lambda"]
    c = cfg["c"]
    if cfg["rho"] is not None:
        c = math.copysign(cfg["rho"], c if c != 0 else 1.0) / lam**2
    try:
        return DeformParams(cfg["theta"], lam, c)
    except ValueError as err:
        raise InputError(str(err)) from None


def metadata(data: WeierstrassData, cfg: dict, p: DeformParams | None = None) -> dict:
    meta = {"data": data.name, "F": str(data.F), "G": str(data.G),
            "domain": data.domain.describe(), "truncated": data.domain.truncated,
            "quadrature_tol": data.tol, "symbolic_potentials": data.has_closed_forms}
    if p is not None:
        meta.update({"theta": p.theta, "lambda": p.lam, "c": p.c})
    meta["config"] = {k: v for k, v in cfg.items() if v is not None}
    return meta


def _write(path: str | None, text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_surface(args, cfg) -> int:
    data = load_source(args.source, cfg)
    p = params_from(cfg)
    mesh = export.surface_mesh(data, p, cfg["grid"], metadata(data, cfg, p))
    _write(args.out, export.mesh_text(mesh))
    if args.out is not None:
        _write(args.out + ".singular", export.singular_text(mesh))
    return 0


def verify_report(data: WeierstrassData, p: DeformParams, resolution: int) -> dict:
    f = planar_map_fn(data, p)
    rep = U.univalence_oracle(f, data.domain, resolution)
    try:
        shape = U.classify_image(U.boundary_image(f, data.domain, 4 * resolution))
        image_class, center = shape.classification, shape.starlike_center
    except U.NonSimplePolyline:
        image_class, center = U.UNKNOWN, None
    sup, _, _ = krust.sup_abs_G(data)
    out = {"verdict": rep.verdict, "jacobianSign": rep.jacobian_sign,
           "boundarySimple": rep.boundary_simple, "imageClass": image_class,
           "supAbsDilatation": p.rho * sup**2,
           "starlikeCenter": center, "jacobianCensus": rep.jacobian_counts}
    out.update({k: v for k, v in rep.as_dict().items() if k not in out})
    return out


def cmd_verify(args, cfg) -> int:
    data = load_source(args.source, cfg)
    p = params_from(cfg)
    try:
        report = verify_report(data, p, cfg["resolution"])
    except U.ResolutionTooLow as err:
        raise InputError(str(err)) from None
    report["metadata"] = metadata(data, cfg, p)
    _write(args.out, export.dump_json(report))
    if args.strict and report["verdict"] == U.INCONCLUSIVE:
        return EXIT_NUMERIC
    return 0


def _seed(cfg) -> DeformParams | None:
    keys = ("seed_theta", "seed_lambda", "seed_c")
    if all(cfg[k] is None for k in keys):
        return None
    return DeformParams(cfg["seed_theta"] or 0.0,
                        1.0 if cfg["seed_lambda"] is None else cfg["seed_lambda"],
                        cfg["seed_c"] or 0.0)


def cmd_region(args, cfg) -> int:
    data = load_source(args.source, cfg)
    region = krust.classify_region(data, seed=_seed(cfg), M=cfg["M"],
                                   oracle_n=cfg["resolution"])
    if args.corrupt_certificate:
        # test hook: stretch the first graph certificate over the whole sampled range
        bad = krust.Interval(0.0, max(cfg["rho_max"], 1.0) * 10)
        region.certified_graph.insert(0, krust.Certificate("graph", "corrupted", bad))
    thetas = 2 * np.pi * np.arange(cfg["theta_samples"]) / cfg["theta_samples"]
    rhos = np.linspace(0.0, cfg["rho_max"], cfg["rho_samples"])
    rows = []
    for theta in thetas:
        for rho in rhos:
            for sign in ((1,) if rho == 0 else (1, -1)):
                cert = region.classify(float(rho))
                if args.no_oracle:
                    verdict = "skipped"
                else:
                    pp = DeformParams(float(theta), 1.0, sign * float(rho))
                    verdict = U.univalence_oracle(planar_map_fn(data, pp), data.domain, cfg["resolution"]).verdict
                rows.append(krust.SweepRow(float(theta), float(rho), sign, cert, verdict,
                                           krust.judge(cert, verdict)))
    bad_rows = [r for r in rows if r.status == "contradiction"]
    doc = region.as_dict()
    doc["contradictions"] = len(bad_rows)
    doc["unconfirmed"] = sum(r.status == "unconfirmed" for r in rows)
    doc["metadata"] = metadata(data, cfg)
    base = args.out[:-4] if args.out.endswith(".csv") else args.out
    _write(base + ".csv", export.region_csv(rows))
    _write(base + ".json", export.dump_json(doc))
    if bad_rows:
        print(f"zmc: {len(bad_rows)} certificate/oracle contradiction(s)", file=sys.stderr)
        return EXIT_CONTRADICTION
    return 0


def cmd_family(args, cfg) -> int:
    data = load_source(args.source, cfg)
    sweep = cfg["sweep"]
    if sweep not in SWEEP_DEFAULTS:
        raise InputError(f"unknown sweep {sweep!r}")
    lo, hi, steps = SWEEP_DEFAULTS[sweep]
    lo = lo if cfg["from"] is None else cfg["from"]
    hi = hi if cfg["to"] is None else cfg["to"]
    steps = steps if cfg["steps"] is None else cfg["steps"]
    if steps < 1:
        raise InputError("--steps must be positive")
    if sweep == "theta" and cfg["to"] is None:
        values = lo + (hi - lo) * np.arange(steps) / steps  # full turn: skip the repeat
    else:
        values = np.linspace(lo, hi, steps)
    base = params_from(cfg)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    entries, params = [], []
    for k, v in enumerate(values):
        kw = {"theta": base.theta, "lam": base.lam, "c": base.c}
        kw[{"theta": "theta", "lambda": "lam", "c": "c"}[sweep]] = float(v)
        try:
            p = DeformParams(**kw)
        except ValueError as err:
            raise InputError(str(err)) from None
        params.append(p)
        name = f"mesh_{k:03d}.mesh"
        mesh = export.surface_mesh(data, p, cfg["grid"], metadata(data, cfg, p))
        _write(str(outdir / name), export.mesh_text(mesh))
        _write(str(outdir / (name + ".singular")), export.singular_text(mesh))
        entries.append({"file": name, "theta": p.theta, "lambda": p.lam, "c": p.c,
                        "vertices": len(mesh.vertices), "faces": len(mesh.faces)})
    manifest = {"sweep": sweep, "values": [float(v) for v in values], "meshes": entries,
                "invariants": family_invariants(data, sweep, params),
                "metadata": metadata(data, cfg)}
    _write(str(outdir / "index.json"), export.dump_json(manifest))
    return 0


def family_invariants(data: WeierstrassData, sweep: str, params: list) -> dict:
    """What a sweep preserves, measured at fixed sample points."""
    pts = data.domain.grid(12, margin=0.05 * data.domain.diameter)
    if sweep == "theta":
        m = np.array([metric_coeff(data, p, pts) for p in params])
        dev = float(np.max(np.abs(m - m[0]) / np.abs(m[0]))) if len(m) else 0.0
        return {"metric": "invariant", "maxRelativeDeviation": dev}
    if sweep == "lambda":
        t = np.array([surface_point(data, p, pts).height for p in params])
        return {"height": "invariant", "maxDeviation": float(np.max(np.abs(t - t[0])))}
    X = [surface_point(data, p, pts).xyz() for p in params]
    return {"c": "affine at each point",
            "maxSecondDifference": float(max((np.max(np.abs(X[k - 1] - 2 * X[k] + X[k + 1]))
                                               for k in range(1, len(X) - 1)), default=0.0))}


def cmd_examples(args, cfg) -> int:
    for name, factory in catalog.CATALOG.items():
        ex = factory()
        print(f"{name}: {ex.description} F = {ex.data.F}, G = {ex.data.G}, "
              f"domain = {ex.data.domain!r}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file; CLI flags take precedence")

    src = argparse.ArgumentParser(add_help=False, parents=[common])
    src.add_argument("source", help="catalog example name or JSON data file")
    src.add_argument("--n", type=int, help="exponent for enneper / exponential")
    src.add_argument("--truncation", type=float, help="half-plane truncation width")
    src.add_argument("--domain", choices=["halfplane", "disk"], help="exponential domain")
    src.add_argument("--theta", type=float)
    src.add_argument("--lambda", type=float)
    src.add_argument("--c", type=float)
    src.add_argument("--rho", type=float, help="set |c lambda^2|, keeping the sign of c")

    parser = argparse.ArgumentParser(prog="zmc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("surface", parents=[src], help="triangulated surface mesh")
    s.add_argument("--grid", type=int, help="rings (disk) or cells per side")
    s.add_argument("--out", help="mesh path (stdout when omitted)")
    s.set_defaults(func=cmd_surface)

    v = sub.add_parser("verify", parents=[src], help="univalence report as JSON")
    v.add_argument("--resolution", type=int)
    v.add_argument("--strict", action="store_true", help="exit 3 when inconclusive")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("region", parents=[src], help="certified region table")
    r.add_argument("--theta-samples", dest="theta_samples", type=int)
    r.add_argument("--rho-max", dest="rho_max", type=float)
    r.add_argument("--rho-samples", dest="rho_samples", type=int)
    r.add_argument("--resolution", type=int)
    r.add_argument("--seed-theta", dest="seed_theta", type=float)
    r.add_argument("--seed-lambda", dest="seed_lambda", type=float)
    r.add_argument("--seed-c", dest="seed_c", type=float)
    r.add_argument("--M", type=float, help="arcwise connectivity constant of h's image")
    r.add_argument("--no-oracle", dest="no_oracle", action="store_true")
    r.add_argument("--out", default="region", help="output prefix for .csv and .json")
    r.add_argument("--corrupt-certificate", dest="corrupt_certificate",
                   action="store_true", help=argparse.SUPPRESS)
    r.set_defaults(func=cmd_region)

    f = sub.add_parser("family", parents=[src], help="mesh sequence along a sweep")
    f.add_argument("--sweep", choices=sorted(SWEEP_DEFAULTS))
    f.add_argument("--from", dest="from", type=float)
    f.add_argument("--to", type=float)
    f.add_argument("--steps", type=int)
    f.add_argument("--grid", type=int)
    f.add_argument("--out", default="family", help="output directory")
    f.set_defaults(func=cmd_family)

    e = sub.add_parser("examples", parents=[common], help="list catalog examples")
    e.set_defaults(func=cmd_examples)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        return args.func(args, cfg)
    except InputError as err:
        print(f"zmc: {err}", file=sys.stderr)
        return EXIT_INPUT
    except (holofn.QuadratureNoConvergence, holofn.PoleOrBranchCut,
            holofn.PathExitsDomain, FloatingPointError) as err:
        print(f"zmc: numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
