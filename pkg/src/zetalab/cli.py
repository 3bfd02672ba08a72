"""Command-line entry point: subcommands over every module, explicit
precision control, and deterministic report emission.

Configuration precedence: CLI flags > config file (key=value lines) >
ZETALAB_THREADS env var (threads only) > defaults (256 bits, 1 thread,
json output).  Exit status: 0 success, 1 evaluation error (machine-
readable error object emitted), 2 usage error.

Floats in JSON output are decimal strings whose digit count is set by the
accompanying err_bound, so reports never show digits the computation
cannot back.  Identical invocations produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import mpmath

from . import contours, dirichlet, experiments, roots, zetafn
from .errors import OverrideError, ZetalabError
from .precision import CValue, PrecisionContext, to_float
from .sieve import mobius_table, coeff_table, write_csv

DEFAULT_BITS = 256
FORMATS = ("json", "csv", "text")


@dataclass
class RunConfig:
    precision_bits: int = DEFAULT_BITS
    threads: int = 1
    output_format: str = "json"
    output_path: str | None = None
    strict: bool = False

    def __post_init__(self):
        if self.precision_bits < 64:
            raise ValueError("precision_bits must be >= 64")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.output_format not in FORMATS:
            raise ValueError(f"output_format must be one of {FORMATS}")

    def ctx(self) -> PrecisionContext:
        return PrecisionContext(working_bits=self.precision_bits)


def _read_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"config line not key=value: {line!r}")
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


def build_config(args) -> RunConfig:
    cfg = {"precision_bits": DEFAULT_BITS, "threads": 1,
           "output_format": "json", "output_path": None, "strict": False}
    env_threads = os.environ.get("ZETALAB_THREADS")
    if env_threads:
        cfg["threads"] = int(env_threads)
    if args.config:
        for key, val in _read_config_file(args.config).items():
            if key == "precision_bits":
                cfg["precision_bits"] = int(val)
            elif key == "threads":
                cfg["threads"] = int(val)
            elif key == "output_format":
                cfg["output_format"] = val
            elif key == "strict":
                cfg["strict"] = val.lower() in ("1", "true", "yes")
            else:
                raise ValueError(f"unknown config key {key!r}")
    if args.precision is not None:
        cfg["precision_bits"] = args.precision
    if args.threads is not None:
        cfg["threads"] = args.threads
    if args.format is not None:
        cfg["output_format"] = args.format
    if getattr(args, "out", None) is not None:
        cfg["output_path"] = args.out
    if args.strict:
        cfg["strict"] = True
    return RunConfig(**cfg)


# ----------------------------------------------------------------------
# deterministic value formatting
# ----------------------------------------------------------------------

def decimal_str(x, err: float = 0.0) -> str:
    """Decimal rendering with digit count backed by err: roughly the
    significant digits above the error level, clamped to [4, 40]."""
    xm = mpmath.mpf(x) if not isinstance(x, mpmath.mpf) else x
    if xm == 0:
        return "0.0"
    ax = abs(to_float(xm))
    if err <= 0 or ax == 0:
        digits = 40
    else:
        digits = int(math.ceil(math.log10(max(ax / err, 10.0)))) + 2
        digits = max(4, min(40, digits))
    return mpmath.nstr(xm, digits, strip_zeros=True)


def cvalue_dict(v: CValue) -> dict:
    return {"re": decimal_str(v.re, v.err_bound),
            "im": decimal_str(v.im, v.err_bound),
            "err_bound": f"{v.err_bound:.3e}"}


def _emit(payload: dict, cfg: RunConfig) -> None:
    if cfg.output_format == "json":
        text = json.dumps(payload, indent=2, allow_nan=True) + "\n"
    elif cfg.output_format == "csv":
        text = _to_csv(payload)
    else:
        text = _to_text(payload)
    if cfg.output_path:
        with open(cfg.output_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _flat(prefix: str, obj, rows: list) -> None:
    if isinstance(obj, dict):
        for k, vv in obj.items():
            _flat(f"{prefix}.{k}" if prefix else str(k), vv, rows)
    elif isinstance(obj, (list, tuple)):
        for i, vv in enumerate(obj):
            _flat(f"{prefix}[{i}]", vv, rows)
    else:
        rows.append((prefix, obj))


def _to_csv(payload: dict) -> str:
    # grid dumps get one row per point; anything else flattens to key,value
    rows_data = None
    for holder in (payload, payload.get("report") or {}):
        extras = holder.get("extras")
        if isinstance(extras, dict) and extras.get("rows"):
            rows_data = extras["rows"]
            break
    if rows_data:
        cols = sorted({k for row in rows_data for k in row})
        lines = [",".join(cols)]
        for row in rows_data:
            lines.append(",".join(json.dumps(row.get(c, ""), default=str)
                                  .replace(",", ";") for c in cols))
        return "\n".join(lines) + "\n"
    rows = []
    _flat("", payload, rows)
    lines = ["key,value"] + [f"{k},{v}" for k, v in rows]
    return "\n".join(lines) + "\n"


def _to_text(payload: dict) -> str:
    rows = []
    _flat("", payload, rows)
    width = max((len(k) for k, _ in rows), default=0)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows)


# ----------------------------------------------------------------------
# subcommand handlers
# ----------------------------------------------------------------------

def _cmd_sieve(args, cfg: RunConfig) -> dict:
    if args.limit < 1:
        raise ValueError("--limit must be >= 1")
    table = mobius_table(args.limit)
    path = args.sieve_out or "sieve.csv"
    write_csv(table, path)
    return {"command": "sieve", "limit": args.limit, "path": path,
            "mertens": table.mertens()}


def _cmd_zeta(args, cfg: RunConfig) -> dict:
    if args.subop == "zero-free-boundary":
        if args.t is None:
            raise ValueError("zero-free-boundary needs --t")
        val = zetafn.zero_free_boundary(args.t)
        return {"command": "zeta zero-free-boundary", "t": args.t,
                "sigma": repr(val)}
    ctx = cfg.ctx()
    with ctx.workprec():
        s = mpmath.mpc(args.re, args.im)
        v = zetafn.zeta_em(s, args.order, ctx)
    return {"command": "zeta", "s": {"re": args.re, "im": args.im},
            "order": args.order, "precision_bits": cfg.precision_bits,
            "value": cvalue_dict(v)}


def _resolve_spec(V: int, tilde: bool, ctx, root_override=None):
    variant = "tilde" if tilde else "standard"
    table = experiments.shared_table(max(V, 100))
    if root_override is not None:
        return (dirichlet.MollifierSpec(V=V, root=root_override,
                                        variant=variant), table, [])
    root, notes = experiments.resolve_root(V, variant, table, ctx, 0.25)
    return dirichlet.MollifierSpec(V=V, root=root, variant=variant), table, notes


def _cmd_fv(args, cfg: RunConfig) -> dict:
    ctx = cfg.ctx()
    spec, table, notes = _resolve_spec(args.v, args.tilde, ctx, args.root)
    with ctx.workprec():
        val = dirichlet.f_v(mpmath.mpc(args.sigma, args.t), spec, table, ctx)
    return {"command": "fv", "V": args.v, "variant": spec.variant,
            "root": repr(spec.root), "s": {"re": args.sigma, "im": args.t},
            "value": cvalue_dict(val), "notes": notes}


def _cmd_guv(args, cfg: RunConfig) -> dict:
    ctx = cfg.ctx()
    spec, table, notes = _resolve_spec(args.v, args.tilde, ctx, args.root)
    s0 = args.s0 if args.s0 is not None else args.sigma
    g = dirichlet.GSpec(mollifier=spec, U=args.u, v=args.gamma, s0=s0)
    with ctx.workprec():
        s = mpmath.mpc(args.sigma, args.t)
        if args.j == 0:
            val = dirichlet.g_uv(s, g, table, ctx)
            desc = "g_uv(s)"
        elif args.method == "series":
            limit = args.limit or min(args.v * args.v, 2_000_000)
            ct = coeff_table(args.v, spec.shift, max(limit, args.v), table)
            val = dirichlet.g_deriv_series(args.j, s, g, ct, args.z0, ctx)
            desc = "(-z0)^j/j! * D^j g_uv(s) [series]"
        else:
            val = dirichlet.g_deriv_cauchy(args.j, s, g, args.radius, table, ctx)
            desc = "D^j g_uv(s) [cauchy]"
    return {"command": "guv", "V": args.v, "U": args.u, "gamma": args.gamma,
            "j": args.j, "method": args.method, "returns": desc,
            "root": repr(spec.root), "s0": s0, "z0": args.z0,
            "value": cvalue_dict(val), "notes": notes}


def _cmd_perron(args, cfg: RunConfig) -> dict:
    ctx = cfg.ctx()
    c = args.c if args.c is not None else contours.perron_abscissa(args.sigma, args.v)
    spec = contours.ContourSpec.vertical(c, args.w)
    table = experiments.shared_table(max(args.v, 100))
    with ctx.workprec():
        s = mpmath.mpc(args.sigma, args.t)
        p = contours.perron_mv(s, args.v, spec, ctx)
        direct = dirichlet.m_v(s, args.v, table, ctx)
        diff = to_float(abs(p.to_mpc() - direct.to_mpc()))
    env = contours.perron_envelope(s, args.v, spec)
    return {"command": "perron", "V": args.v, "c": c, "W": args.w,
            "s": {"re": args.sigma, "im": args.t},
            "perron": cvalue_dict(p), "direct": cvalue_dict(direct),
            "difference": repr(diff), "envelope": repr(env),
            "within_envelope": bool(diff <= env)}


def _cmd_winding(args, cfg: RunConfig) -> dict:
    ctx = cfg.ctx()
    center = complex(args.center)
    circle = contours.ContourSpec.circle(center, args.radius)
    kind = "inv_zeta" if args.fn == "invzeta" else "m_v"
    table = experiments.shared_table(max(args.v or 100, 100)) if kind == "m_v" else None
    w = contours.winding_number(kind, circle, args.v, ctx, table)
    return {"command": "winding", "fn": args.fn,
            "center": {"re": center.real, "im": center.imag},
            "radius": args.radius, "V": args.v, "winding_number": w}


def _root_result_dict(res: roots.RootResult) -> dict:
    return {"status": res.status,
            "value": decimal_str(res.value, max(res.residual, 1e-40))
            if res.value is not None else None,
            "residual": repr(res.residual),
            "bracket": [repr(res.bracket[0]), repr(res.bracket[1])],
            "within_radius": res.within_radius,
            "sign_changes": res.sign_changes,
            "notes": list(res.notes)}


def _cmd_root(args, cfg: RunConfig) -> dict:
    ctx = cfg.ctx()
    if args.which == "sv":
        table = experiments.shared_table(max(args.v, 100))
        res = roots.find_mollifier_root(args.v, args.radius, table, ctx)
        return {"command": "root sv", "V": args.v, "radius": args.radius,
                "result": _root_result_dict(res)}
    res = roots.find_zeta_zero(args.lo, args.hi, ctx)
    return {"command": "root zeta", "lo": args.lo, "hi": args.hi,
            "result": _root_result_dict(res)}


def _params_from_args(args, cfg: RunConfig, regime: str) -> experiments.ParamSet:
    if args.v is None:
        raise ValueError("--v is required for this command")
    overrides = {}
    for key in ("b", "r", "epsilon", "z0", "z1", "T"):
        val = getattr(args, key.replace("epsilon", "eps"), None)
        if val is not None:
            overrides[key] = val
    if getattr(args, "u", None):
        overrides["U"] = args.u
    if getattr(args, "j", None):
        overrides["J"] = args.j
    gamma0 = args.gamma
    if gamma0 is None:
        zero = roots.find_zeta_zero(14.0, 14.2, cfg.ctx())
        gamma0 = float(zero.value)
    return experiments.build_params(
        regime, args.v, gamma0, beta0=args.beta0,
        overrides=overrides, strict=cfg.strict)


def _cmd_check(args, cfg: RunConfig) -> dict:
    ctx = cfg.ctx()
    if args.what == "lemma1":
        rep = experiments.check_lemma1(args.j or 40, args.grid_step, ctx)
        return {"command": "check lemma1", "report": rep.to_dict()}
    if args.what == "bound":
        if args.lemma not in (3, 5, 6, 7):
            raise ValueError("--lemma must be 3, 5, 6 or 7 for bound checks")
        regime = args.regime or (experiments.DOUBLESTAR if args.lemma in (3, 6)
                                 else experiments.STAR)
        params = _params_from_args(args, cfg, regime)
        rep = experiments.check_bound(args.lemma, params, None, ctx,
                                      threads=cfg.threads)
        return {"command": f"check bound {args.lemma}", "report": rep.to_dict()}
    if args.what == "expansion":
        if args.lemma not in (8, 9):
            raise ValueError("--lemma must be 8 or 9 for expansion checks")
        regime = args.regime or (experiments.DOUBLESTAR if args.lemma == 8
                                 else experiments.STAR)
        params = _params_from_args(args, cfg, regime)
        rep = experiments.check_expansion(args.lemma, params, ctx)
        return {"command": f"check expansion {args.lemma}",
                "report": rep.to_dict()}
    if args.what == "taylor":
        regime = args.regime or experiments.DOUBLESTAR
        params = _params_from_args(args, cfg, regime)
        rep = experiments.taylor_identity_check(params, ctx)
        return {"command": "check taylor", "report": rep.to_dict()}
    raise ValueError(f"unknown check {args.what!r}")


def _cmd_final(args, cfg: RunConfig) -> dict:
    params = _params_from_args(args, cfg, args.regime)
    rep = experiments.final_report(args.regime, params, cfg.ctx())
    return {"command": f"final {args.regime}", "report": rep.to_dict()}


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------

def _add_common(sub, with_out: bool = True):
    sub.add_argument("--precision", type=int, default=None,
                     help="working precision in bits (default 256)")
    sub.add_argument("--threads", type=int, default=None)
    sub.add_argument("--format", choices=FORMATS, default=None)
    if with_out:
        sub.add_argument("--out", default=None, help="write output to this path")
    sub.add_argument("--config", default=None, help="key=value config file")
    sub.add_argument("--strict", action="store_true",
                     help="regime constraint violations become errors")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="zetalab",
        description="numerical laboratory for mollified zeta constructions")
    subs = ap.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("sieve", help="emit n,mu,d CSV")
    sp.add_argument("--limit", type=int, required=True)
    sp.add_argument("--out", dest="sieve_out", default=None,
                    help="CSV output path (default sieve.csv)")
    _add_common(sp, with_out=False)
    sp.set_defaults(handler=_cmd_sieve)

    sp = subs.add_parser("zeta", help="zeta / zeta' / zero-free boundary")
    sp.add_argument("subop", nargs="?", choices=["zero-free-boundary"])
    sp.add_argument("--re", type=float, default=2.0)
    sp.add_argument("--im", type=float, default=0.0)
    sp.add_argument("--order", type=int, choices=(0, 1), default=0)
    sp.add_argument("--t", type=float, default=None)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_zeta)

    sp = subs.add_parser("fv", help="mollified product f_v(s)")
    sp.add_argument("--v", type=int, required=True)
    sp.add_argument("--sigma", type=float, required=True)
    sp.add_argument("--t", type=float, default=0.0)
    sp.add_argument("--tilde", action="store_true")
    sp.add_argument("--root", type=float, default=None,
                    help="mollifier root override (skips the search)")
    _add_common(sp)
    sp.set_defaults(handler=_cmd_fv)

    sp = subs.add_parser("guv", help="g_uv and its derivatives")
    sp.add_argument("--u", type=int, required=True)
    sp.add_argument("--v", type=int, required=True)
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--j", type=int, default=0)
    sp.add_argument("--method", choices=("series", "cauchy"), default="cauchy")
    sp.add_argument("--sigma", type=float, required=True)
    sp.add_argument("--t", type=float, default=0.0)
    sp.add_argument("--s0", type=float, default=None)
    sp.add_argument("--z0", type=float, default=0.1)
    sp.add_argument("--radius", type=float, default=0.5)
    sp.add_argument("--limit", type=int, default=None)
    sp.add_argument("--tilde", action="store_true")
    sp.add_argument("--root", type=float, default=None)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_guv)

    sp = subs.add_parser("perron", help="Perron integral vs direct sum")
    sp.add_argument("--sigma", type=float, required=True)
    sp.add_argument("--t", type=float, default=0.0)
    sp.add_argument("--v", type=int, required=True)
    sp.add_argument("--c", type=float, default=None)
    sp.add_argument("--w", type=float, required=True)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_perron)

    sp = subs.add_parser("winding", help="argument-principle count")
    sp.add_argument("--fn", choices=("invzeta", "mv"), required=True)
    sp.add_argument("--center", required=True,
                    help="complex center, e.g. '1+0j'")
    sp.add_argument("--radius", type=float, required=True)
    sp.add_argument("--v", type=int, default=None)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_winding)

    sp = subs.add_parser("root", help="mollifier roots / zeta zeros")
    sp.add_argument("which", choices=("sv", "zeta"))
    sp.add_argument("--v", type=int, default=None)
    sp.add_argument("--radius", type=float, default=0.9)
    sp.add_argument("--lo", type=float, default=None)
    sp.add_argument("--hi", type=float, default=None)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_root)

    sp = subs.add_parser("check", help="bound / identity measurements")
    sp.add_argument("what", choices=("lemma1", "bound", "expansion", "taylor"))
    sp.add_argument("--lemma", type=int, default=None)
    sp.add_argument("--grid-step", type=float, default=1e-3)
    _param_flags_optional(sp)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_check)

    sp = subs.add_parser("final", help="closing-chain report (no verdict)")
    sp.add_argument("--regime", choices=(experiments.STAR, experiments.DOUBLESTAR),
                    required=True)
    _param_flags_optional(sp, v_required=True)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_final)

    return ap


def _param_flags_optional(sub, v_required: bool = False):
    sub.add_argument("--v", type=int, required=v_required, default=None)
    sub.add_argument("--gamma", type=float, default=None)
    sub.add_argument("--beta0", type=float, default=0.5)
    if not any(a.dest == "regime" for a in sub._actions):
        sub.add_argument("--regime",
                         choices=(experiments.STAR, experiments.DOUBLESTAR),
                         default=None)
    sub.add_argument("--b", type=float, default=None)
    sub.add_argument("--r", type=float, default=None)
    sub.add_argument("--eps", type=float, default=None)
    sub.add_argument("--z0", type=float, default=None)
    sub.add_argument("--z1", type=float, default=None)
    sub.add_argument("--u", type=int, default=None)
    sub.add_argument("--j", "--J", type=int, default=None, dest="j")
    sub.add_argument("--T", type=float, default=None)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = build_config(args)
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    try:
        payload = args.handler(args, cfg)
    except ZetalabError as exc:
        _emit({"error": {"type": type(exc).__name__, "message": str(exc)}}, cfg)
        return 1
    except ValueError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    _emit(payload, cfg)
    return 0


if __name__ == "__main__":
    sys.exit(main())
