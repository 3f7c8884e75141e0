"""Command-line interface: evaluate, verify, hunt, catalog, cache.

Configuration precedence is flags > environment (prefix ``CMZV_``) > config
file.  The config file (default ``./cmzv.toml``) uses one ``key = value``
assignment per line; ``#`` starts a comment and string values may be quoted.
Recognized keys: digits, catalog, parallel, output, cache_dir, angles.

Exit codes: 0 success; 1 verification failures; 2 specification or catalog
errors; 3 precision/convergence failures; 4 no relation found.
"""

from __future__ import annotations

import argparse
import fnmatch
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .cache import ResultCache, spec_key
from .catalog import load_catalog, summarize, verify_all
from .closedform import ClosedForm
from .errors import (CmzvError, NoRelationFound, PrecisionExhausted,
                     PrecisionTooLow, QuadratureNonConvergent, SchemaError)
from .hunter import BASIS_PRESETS, hunt_reduction
from .polylog import li
from .precision import PrecisionContext
from .quadrature import IntegralSpec, eval_integral
from .series import SeriesSpec, eval_series
from .words import Word, gpl_eval

_OUTPUTS = ("json", "csv", "pretty")


@dataclass
class RunConfig:
    digits: int = 50
    catalog_path: str = None
    cache_dir: str = ".cmzv-cache"
    parallelism: int = 1
    output: str = "pretty"
    angles: int = None

    def __post_init__(self):
        if not (20 <= self.digits <= 1000):
            raise SchemaError("digits must lie in [20, 1000]")
        if self.parallelism < 1:
            raise SchemaError("parallelism must be >= 1")
        if self.output not in _OUTPUTS:
            raise SchemaError(f"output must be one of {_OUTPUTS}")

    @property
    def ctx(self) -> PrecisionContext:
        return PrecisionContext.for_target(self.digits)


def _read_config_file(path):
    out = {}
    if not os.path.exists(path):
        return out
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line or "=" not in line:
                continue
            key, val = (s.strip() for s in line.split("=", 1))
            out[key] = val.strip("\"'")
    return out


def build_config(args) -> RunConfig:
    file_cfg = _read_config_file(args.config or "cmzv.toml")

    def pick(flag_val, env_key, file_key, default, conv=str):
        if flag_val is not None:
            return flag_val
        env = os.environ.get("CMZV_" + env_key)
        if env is not None:
            return conv(env)
        if file_key in file_cfg:
            return conv(file_cfg[file_key])
        return default

    return RunConfig(
        digits=pick(args.digits, "DIGITS", "digits", 50, int),
        catalog_path=pick(args.catalog, "CATALOG", "catalog", None),
        cache_dir=pick(args.cache_dir, "CACHE_DIR", "cache_dir", ".cmzv-cache"),
        parallelism=pick(args.parallel, "PARALLEL", "parallel", 1, int),
        output=pick(args.output, "OUTPUT", "output", "pretty"),
        angles=pick(args.angles, "ANGLES", "angles", None, int),
    )


def _format_closed_form(node: ClosedForm) -> str:
    kind = node.kind
    if kind == "rational":
        return str(node.payload[0])
    if kind == "constant":
        return node.payload[0]
    if kind == "surd_scale":
        q, d = node.payload
        return f"{q}*sqrt({d})"
    if kind == "power":
        return f"({_format_closed_form(node.payload[0])})^{node.payload[1]}"
    if kind == "product":
        return "*".join(f"({_format_closed_form(t)})" for t in node.payload)
    if kind == "sum":
        return " + ".join(_format_closed_form(t) for t in node.payload)
    return repr(node)


def _print_value(value, err_bound, cfg: RunConfig, kind: str):
    with mp.workdps(cfg.ctx.working_digits):
        value = mp.mpc(value)
        re_s = mp.nstr(mp.re(value), cfg.ctx.working_digits)
        im_s = mp.nstr(mp.im(value), cfg.ctx.working_digits)
        if cfg.output == "json":
            print(json.dumps({"kind": kind, "re": re_s, "im": im_s,
                              "error_bound": err_bound}))
        elif cfg.output == "csv":
            print("kind,re,im,error_bound")
            print(f"{kind},{re_s},{im_s},{err_bound}")
        else:
            shown = mp.nstr(value, cfg.digits) if mp.im(value) != 0 \
                else mp.nstr(mp.re(value), cfg.digits)
            print(f"{shown}  (+- {err_bound})")


def _load_spec_arg(spec_arg: str) -> dict:
    if os.path.exists(spec_arg):
        with open(spec_arg, "r", encoding="utf-8") as fh:
            return json.load(fh)
    try:
        return json.loads(spec_arg)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"spec is neither a file nor inline JSON: {exc}") from exc


def _parse_z(z):
    if isinstance(z, str):
        return Fraction(z)
    if isinstance(z, dict):
        return mp.mpc(mp.mpf(str(z.get("re", 0))), mp.mpf(str(z.get("im", 0))))
    return z


def cmd_eval(args, cfg: RunConfig) -> int:
    payload = _load_spec_arg(args.spec)
    cache = ResultCache(cfg.cache_dir)
    key = spec_key(args.kind, payload, cfg.ctx.working_digits)
    cached = cache.get(key)
    err_bound = f"1e-{cfg.ctx.target_digits}"
    if cached is not None:
        _print_value(cached, err_bound, cfg, args.kind)
        return 0
    ctx = cfg.ctx
    if args.kind == "series":
        value = eval_series(SeriesSpec.from_json(payload), ctx)
    elif args.kind == "li":
        value = li(int(payload["k"]), _parse_z(payload["z"]), ctx,
                   side=payload.get("side", "principal"))
    elif args.kind == "gpl":
        z = _parse_z(payload["z"])
        value = gpl_eval(Word.from_json(payload["letters"]), z, ctx)
    elif args.kind == "integral":
        value = eval_integral(IntegralSpec.from_json(payload), ctx)
    else:
        raise SchemaError(f"unknown eval kind {args.kind!r}")
    cache.put(key, value)
    _print_value(value, err_bound, cfg, args.kind)
    return 0


def _filter_records(records, group=None, id_glob=None):
    out = records
    if group:
        out = [r for r in out if r.group == group]
    if id_glob:
        out = [r for r in out if fnmatch.fnmatch(r.id, id_glob)]
    return out


def cmd_verify(args, cfg: RunConfig) -> int:
    records = load_catalog(cfg.catalog_path)
    records = _filter_records(records, args.group, args.id)
    if not records:
        raise SchemaError("no records match the filter")
    reports, summary = verify_all(records, cfg.ctx, cfg.parallelism, cfg.angles)

    os.makedirs(os.path.join(cfg.cache_dir, "reports"), exist_ok=True)
    slug = (args.group or args.id or "all").replace("*", "x").replace("/", "_")
    jsonl_path = os.path.join(cfg.cache_dir, "reports", f"verify-{slug}.jsonl")
    with open(jsonl_path, "w", encoding="utf-8") as fh:
        for rep in reports:
            fh.write(json.dumps(rep.to_json(), sort_keys=True) + "\n")
        fh.write(json.dumps({"summary": summary}, sort_keys=True) + "\n")

    if cfg.output == "csv":
        print("id,group,status,min_digits")
        for rep in reports:
            digs = min((p["digits"] for p in rep.checked_pairs), default="")
            print(f"{rep.id},{rep.group},{rep.status},{digs}")
    elif cfg.output == "json":
        print(json.dumps({"reports": [r.to_json() for r in reports],
                          "summary": summary}, sort_keys=True))
    else:
        for rep in reports:
            digs = min((p["digits"] for p in rep.checked_pairs), default=None)
            extra = f" (>= {digs} digits)" if digs is not None else ""
            extra += f"  [{rep.error}]" if rep.error else ""
            print(f"{rep.status.upper():4}  {rep.id}{extra}")
        print(f"---\n{summary['passed']}/{summary['total']} passed; "
              f"report: {jsonl_path}")
    return 0 if summary["all_pass"] else 1


def cmd_hunt(args, cfg: RunConfig) -> int:
    if args.preset not in BASIS_PRESETS:
        raise SchemaError(f"unknown preset {args.preset!r}; "
                          f"choose from {sorted(BASIS_PRESETS)}")
    records = None
    try:
        payload = _load_spec_arg(args.series)
        spec = SeriesSpec.from_json(payload)
    except SchemaError:
        records = load_catalog(cfg.catalog_path)
        matches = [r for r in records if r.id == args.series and r.series is not None]
        if not matches:
            raise SchemaError(f"{args.series!r} is neither a spec nor a catalog id")
        spec = matches[0].series
    candidate, residual, vec = hunt_reduction(spec, args.preset, cfg.ctx)
    with mp.workdps(cfg.ctx.working_digits):
        res_s = mp.nstr(residual, 3)
    if cfg.output == "json":
        print(json.dumps({"vector": vec, "candidate": candidate.to_json(),
                          "confirmation_residual": res_s}))
    else:
        labels = ["S"] + [lbl for lbl, _ in BASIS_PRESETS[args.preset]]
        rel = " + ".join(f"{c}*{l}" for c, l in zip(vec, labels) if c)
        print(f"relation: {rel} = 0")
        print(f"candidate: S = {_format_closed_form(candidate)}")
        print(f"confirmation residual (doubled precision): {res_s}")
    return 0


def cmd_catalog(args, cfg: RunConfig) -> int:
    records = load_catalog(cfg.catalog_path)
    if args.action == "validate":
        print(f"{len(records)} records OK")
        return 0
    if cfg.output == "json":
        print(json.dumps([r.to_json() for r in records]))
        return 0
    if cfg.output == "csv":
        print("id,group,weight,level,prefactor,sides")
        for r in records:
            sides = "+".join(r.sides_present()) or "parametric"
            print(f"{r.id},{r.group},{r.space.weight},{r.space.level},"
                  f"{r.space.prefactor},{sides}")
        return 0
    for r in records:
        sides = ", ".join(r.sides_present()) or f"parametric {r.angle_grid['family']}"
        print(f"{r.id:22} {r.group:8} w={r.space.weight} N={r.space.level:<2} "
              f"[{sides}]")
    print(f"--- {len(records)} records")
    return 0


def cmd_cache(args, cfg: RunConfig) -> int:
    cache = ResultCache(cfg.cache_dir)
    if args.action == "stats":
        print(json.dumps(cache.stats()))
    else:
        n = cache.clear()
        print(f"cleared {n} entries")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cmzv",
        description="Evaluate and verify binomial-sum / polylogarithm identities.")
    parser.add_argument("--digits", type=int, default=None,
                        help="target precision in decimal digits (20..1000)")
    parser.add_argument("--catalog", default=None, help="catalog JSON path")
    parser.add_argument("--parallel", type=int, default=None, help="worker count")
    parser.add_argument("--output", choices=_OUTPUTS, default=None)
    parser.add_argument("--cache-dir", dest="cache_dir", default=None)
    parser.add_argument("--angles", type=int, default=None,
                        help="grid size for parametric families")
    parser.add_argument("--config", default=None, help="config file path")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate one object")
    p.add_argument("kind", choices=("series", "gpl", "li", "integral"))
    p.add_argument("spec", help="inline JSON or a path to a JSON file")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="run the identity verification harness")
    p.add_argument("--group", default=None, help="restrict to one catalog group")
    p.add_argument("--id", default=None, help="id glob, e.g. 't14a-*'")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("hunt", help="integer-relation search for a series")
    p.add_argument("series", help="catalog record id, inline spec JSON, or file")
    p.add_argument("--preset", required=True,
                   help=f"basis preset: {', '.join(sorted(BASIS_PRESETS))}")
    p.set_defaults(func=cmd_hunt)

    p = sub.add_parser("catalog", help="list or validate the catalog")
    p.add_argument("action", choices=("list", "validate"))
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("cache", help="result cache maintenance")
    p.add_argument("action", choices=("stats", "clear"))
    p.set_defaults(func=cmd_cache)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return args.func(args, cfg)
    except NoRelationFound as exc:
        print(f"no relation: {exc}", file=sys.stderr)
        return 4
    except (PrecisionExhausted, QuadratureNonConvergent, PrecisionTooLow) as exc:
        print(f"precision failure: {exc}", file=sys.stderr)
        return 3
    except CmzvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
