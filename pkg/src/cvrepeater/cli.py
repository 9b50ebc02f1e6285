"""Command-line front end: CSV tables behind the repeater figures.

    cvrepeater link --eta 0.01 --chi 0.7
    cvrepeater sweep --chi 0.1,0.7 --n-eta 40
    cvrepeater concat2 --eta 7.0710678e-4 --samples 1000000
    cvrepeater scaling --eta 0.04 --chi 0.9 --scissors 3
    cvrepeater negativity --mode link --chi 0.01

Exit status: 0 on success, 2 on bad parameters, 3 when an integration misses
its error target within budget.
"""
from __future__ import annotations

import argparse
import hashlib
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .integrate import IntegratorConfig
from .link import LinkParams, link_closed, link_numeric, tuned_gain
from .negativity import log_negativity_limit, protocol_negativity_curve
from .optics import NlaSpec
from .repeater import Concat2Params, approx_link_success, concat2_numeric, scaling_table

EXIT_PARAM = 2
EXIT_BUDGET = 3

DEFAULTS = {
    "eta": None,
    "chi": None,
    "chi_inner": 0.01,
    "chi_outer": 0.7,
    "scissors": 1,
    "gain": "auto",
    "numeric": False,
    "samples": 1_000_000,
    "seed": 0,
    "cutoff": 15,
    "radius": 8.0,
    "grid_points": 48,
    "target_error": None,
    "protocol": "link",
    "mode": "link",
    "eta_min": 1e-4,
    "eta_max": 0.99,
    "n_eta": 40,
    "max_m": 2**20,
    "chi_source": None,
    "workers": 1,
}

TYPES = {
    "scissors": int,
    "samples": int,
    "seed": int,
    "cutoff": int,
    "grid_points": int,
    "n_eta": int,
    "max_m": int,
    "workers": int,
    "radius": float,
    "eta_min": float,
    "eta_max": float,
    "chi_inner": float,
    "chi_outer": float,
}


# settings that change how rows are computed but never their values
EXECUTION_ONLY = {"workers"}


class ParameterError(ValueError):
    pass


class BudgetError(RuntimeError):
    pass


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    return f"{float(value):.11e}"


def read_config(path: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _coerce(key, value):
    if value is None or value == "":
        return None
    if key == "numeric":
        return value if isinstance(value, bool) else str(value).lower() in ("1", "true", "yes")
    if key in ("eta", "chi"):
        if isinstance(value, (list, tuple)):
            return [float(v) for v in value]
        return [float(v) for v in str(value).split(",")]
    if key == "chi_source":
        return None if str(value).lower() in ("inf", "infinite", "none") else float(value)
    if key == "target_error":
        return float(value)
    if key in TYPES:
        return TYPES[key](float(value)) if TYPES[key] is int else TYPES[key](value)
    return value


def resolve(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            cfg.update(read_config(args.config))
        except OSError as exc:
            raise ParameterError(str(exc)) from exc
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None and value is not False:
            cfg[key] = value
    try:
        return {k: _coerce(k, v) for k, v in cfg.items()}
    except ValueError as exc:
        raise ParameterError(str(exc)) from exc


def _require(cfg, key):
    if cfg.get(key) is None:
        raise ParameterError(f"--{key.replace('_', '-')} is required")
    return cfg[key]


def _eta_grid(cfg):
    if cfg["eta"] is not None:
        return cfg["eta"]
    lo, hi, n = cfg["eta_min"], cfg["eta_max"], cfg["n_eta"]
    if not (0 < lo < hi <= 1) or n < 1:
        raise ParameterError("need 0 < eta-min < eta-max <= 1 and n-eta >= 1")
    return list(np.logspace(math.log10(lo), math.log10(hi), n))


LINK_COLUMNS = ["eta", "chi", "N", "g", "eta_eff", "P", "V", "delta", "eb_bound", "preserved"]


def link_row(cfg: dict, eta: float, chi: float) -> list:
    N = cfg["scissors"]
    gain = cfg["gain"]
    g = tuned_gain(eta, chi) if str(gain).lower() == "auto" else float(gain)
    if N == 1 and not cfg["numeric"]:
        res = link_closed(eta, chi, g)
    else:
        icfg = IntegratorConfig(
            radius=cfg["radius"], points=cfg["grid_points"], target_error=cfg["target_error"]
        )
        res = link_numeric(LinkParams(eta, chi, NlaSpec(g, N)), icfg, cutoff=cfg["cutoff"])
        if not res.converged:
            raise BudgetError(f"grid error {res.error_estimate} above target at eta={eta}, chi={chi}")
    return [
        eta, chi, N, g, res.effective_transmission, res.success_prob, res.variance,
        res.excess_noise, res.eb_bound, res.entanglement_preserving,
    ]


CONCAT_COLUMNS = [
    "eta", "eta_direct", "eta_eff", "chi_inner", "chi_outer", "g1", "g2", "g3",
    "P", "P_stderr", "P_joint", "P_joint_stderr", "V", "V_stderr", "delta",
    "eb_bound", "preserved", "samples",
]


def _concat_params(cfg, eta):
    gain = cfg["gain"]
    gains = None
    if str(gain).lower() != "auto":
        vals = [float(v) for v in str(gain).split(",")]
        gains = tuple(vals * 3 if len(vals) == 1 else vals)
        if len(gains) != 3:
            raise ParameterError("--gain for concat2 takes one value or three (g1,g2,g3)")
    return Concat2Params.tuned(eta, cfg["chi_inner"], cfg["chi_outer"], gains=gains)


def concat2_row(cfg: dict, eta: float) -> list:
    p = _concat_params(cfg, eta)
    icfg = IntegratorConfig(
        scheme="monte-carlo",
        samples=cfg["samples"],
        batch_size=min(cfg["samples"], 100_000),
        seed=cfg["seed"],
        target_error=cfg["target_error"],
    )
    res = concat2_numeric(p, icfg)
    if cfg["target_error"] is not None and not res.converged:
        raise BudgetError(
            f"Monte Carlo missed target {cfg['target_error']} after {res.samples_used} samples "
            f"(achieved {res.error_estimate['joint_success_prob'] / res.joint_success_prob:.3e})"
        )
    err = res.error_estimate
    return [
        eta, p.direct_transmission, res.effective_transmission, p.chi_inner, p.chi_outer,
        *p.gains, res.success_prob, err["success_prob"], res.joint_success_prob,
        err["joint_success_prob"], res.variance, err["variance"], res.excess_noise,
        res.eb_bound, res.entanglement_preserving, res.samples_used,
    ]


NEG_COLUMNS = ["eta_direct", "E_N_protocol", "E_N_bare_limit", "outperforms"]


def negativity_row(cfg: dict, eta: float) -> list:
    mode = cfg["mode"]
    if mode == "limit":
        e = log_negativity_limit(eta)
        return [eta, e, e, False]
    if mode == "link":
        chi = _require(cfg, "chi")[0]
        res = link_closed(eta, chi)
        point = (eta, res.effective_transmission, res.excess_noise)
    elif mode == "concat2":
        row = dict(zip(CONCAT_COLUMNS, concat2_row(cfg, eta)))
        point = (row["eta_direct"], row["eta_eff"], row["delta"])
    else:
        raise ParameterError(f"unknown negativity mode {mode!r}")
    (pt,) = protocol_negativity_curve([point], cfg["chi_source"])
    return [pt.eta_direct, pt.protocol, pt.bare_limit, pt.outperforms]


def _pool_map(fn, items, workers):
    if workers <= 1 or len(items) <= 1:
        return [fn(*item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*items)))


def run(command: str, cfg: dict) -> tuple[list[str], list[list]]:
    if command == "link":
        etas, chis = _require(cfg, "eta"), _require(cfg, "chi")
        items = [(cfg, e, c) for c in chis for e in etas]
        return LINK_COLUMNS, _pool_map(link_row, items, cfg["workers"])
    if command == "sweep":
        etas = _eta_grid(cfg)
        if cfg["protocol"] == "concat2":
            items = [(cfg, e) for e in etas]
            return CONCAT_COLUMNS, _pool_map(concat2_row, items, cfg["workers"])
        if cfg["protocol"] != "link":
            raise ParameterError(f"unknown sweep protocol {cfg['protocol']!r}")
        chis = cfg["chi"] or [0.1, 0.7]
        items = [(cfg, e, c) for c in chis for e in etas]
        return LINK_COLUMNS, _pool_map(link_row, items, cfg["workers"])
    if command == "concat2":
        etas = _require(cfg, "eta")
        return CONCAT_COLUMNS, _pool_map(concat2_row, [(cfg, e) for e in etas], cfg["workers"])
    if command == "scaling":
        eta, chi = _require(cfg, "eta")[0], _require(cfg, "chi")[0]
        if cfg["max_m"] < 1:
            raise ParameterError("--max-m must be at least 1")
        P = approx_link_success(eta, chi, cfg["scissors"])
        rows = scaling_table(P, eta, cfg["max_m"])
        return ["M", "P_M", "bare", "repeater_wins"], [
            [r["M"], r["P_M"], r["bare"], r["repeater_wins"]] for r in rows
        ]
    if command == "negativity":
        etas = _eta_grid(cfg)
        return NEG_COLUMNS, _pool_map(negativity_row, [(cfg, e) for e in etas], cfg["workers"])
    raise ParameterError(f"unknown command {command!r}")


def render(columns, rows, command, cfg) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    lines = [f"command={command}"]
    for key in sorted(cfg):
        if key in EXECUTION_ONLY:
            continue
        value = cfg[key]
        if isinstance(value, list):
            value = ",".join(repr(float(v)) for v in value)
        lines.append(f"{key}={value}")
    digest = hashlib.sha256("\n".join(lines).encode()).hexdigest()
    for line in lines:
        buf.write(f"# {line}\n")
    buf.write(f"# config_sha256={digest}\n")
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvrepeater", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value file; flags override it")
        p.add_argument("--out", help="CSV path (default stdout)")
        p.add_argument("--seed", type=int)
        p.add_argument("--cutoff", type=int)
        p.add_argument("--radius", type=float)
        p.add_argument("--grid-points", dest="grid_points", type=int)
        p.add_argument("--target-error", dest="target_error", type=float)
        p.add_argument("--workers", type=int)

    def sweep_args(p):
        p.add_argument("--eta-min", dest="eta_min", type=float)
        p.add_argument("--eta-max", dest="eta_max", type=float)
        p.add_argument("--n-eta", dest="n_eta", type=int)

    def link_args(p):
        p.add_argument("--eta", help="transmission (comma list allowed)")
        p.add_argument("--chi", help="EPR strength (comma list allowed)")
        p.add_argument("--scissors", type=int)
        p.add_argument("--gain", help="'auto' or a number")
        p.add_argument("--numeric", action="store_true", help="integrate the Fock pipeline")

    def concat_args(p):
        p.add_argument("--chi-inner", dest="chi_inner", type=float)
        p.add_argument("--chi-outer", dest="chi_outer", type=float)
        p.add_argument("--samples", type=int)

    p = sub.add_parser("link", help="one link (closed form for N=1)")
    common(p)
    link_args(p)
    p = sub.add_parser("sweep", help="variance curves against transmission")
    common(p)
    link_args(p)
    concat_args(p)
    sweep_args(p)
    p.add_argument("--protocol", choices=["link", "concat2"])
    p = sub.add_parser("concat2", help="two-link repeater by Monte Carlo")
    common(p)
    p.add_argument("--eta", help="segment transmission (comma list allowed)")
    p.add_argument("--gain", help="'auto', one gain, or g1,g2,g3")
    concat_args(p)
    p = sub.add_parser("scaling", help="ideal-NLA scaling and break-even table")
    common(p)
    p.add_argument("--eta")
    p.add_argument("--chi")
    p.add_argument("--scissors", type=int)
    p.add_argument("--max-m", dest="max_m", type=int)
    p = sub.add_parser("negativity", help="logarithmic negativity against the bare channel")
    common(p)
    link_args(p)
    concat_args(p)
    sweep_args(p)
    p.add_argument("--mode", choices=["link", "concat2", "limit"])
    p.add_argument("--chi-source", dest="chi_source", help="source EPR strength or 'inf'")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        columns, rows = run(args.command, cfg)
    except BudgetError as exc:
        print(f"cvrepeater: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, ZeroDivisionError) as exc:
        print(f"cvrepeater: {exc}", file=sys.stderr)
        return EXIT_PARAM
    text = render(columns, rows, args.command, cfg)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
