"""Command-line interface: sweeps, far-field tables, coefficient dumps, checks.

Subcommands
-----------
sweep     eps sweep -> CSV/JSON records plus a convergence-rate statement
farfield  far-field table of both problems at one eps
coeffs    per-mode coefficient dump with transmission residuals
check     identity suite -> JSON report

Values come from flags, then a flat key=value config file (``--config``),
then built-in defaults, in that precedence order.  All numbers are emitted
in scientific notation with 17 significant digits; output depends on
nothing but the flags and config file.

Exit codes: 0 success, 1 usage or config error, 2 violated bounds, failed
identities, or an unusable parameter regime (data is still written).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import harness, observables
from .mie import (
    Contrast,
    DegenerateModeError,
    PhysicalParams,
    effective_medium_coeffs,
    soft_sphere_coeffs,
    transmission_residuals,
    truncation_order,
)
from .observables import ParameterRegimeError

_DEFAULTS = {
    "k": 1.0,
    "r1": 1.0,
    "eta0": 1.0,
    "tau0": 1.0,
    "d": "0,0,1",
    "eps": None,
    "eps-min": 1e-6,
    "eps-max": 1e-1,
    "points": None,
    "nmax": None,
    "out": None,
    "format": "csv",
}

_RATE_WINDOW = (1e-4, 1e-1)


class _Parser(argparse.ArgumentParser):
    # Usage problems are exit code 1, not argparse's default 2.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    """Merged flag/config-file/default values for one invocation."""

    params: PhysicalParams
    eps: float | None
    eps_list: list | None
    eps_min: float
    eps_max: float
    points: int | None
    nmax: int | None
    out: str | None
    fmt: str
    perturb_branch: bool = False


def _fmt(x):
    return f"{x:.16e}"


def _parse_direction(text):
    parts = [float(p) for p in str(text).split(",")]
    if len(parts) != 3:
        raise ValueError(f"direction must be three comma-separated numbers, got {text!r}")
    v = np.asarray(parts, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ValueError("direction must be nonzero")
    return tuple(v / norm)


def _read_config_file(path):
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected key = value")
                key, _, val = line.partition("=")
                key = key.strip()
                if key not in _DEFAULTS:
                    raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
                values[key] = val.strip()
    except OSError as exc:
        raise ValueError(f"cannot read config file {path}: {exc}") from exc
    return values


def _merge(args):
    file_values = _read_config_file(args.config) if args.config else {}

    def pick(key, flag_value, cast):
        if flag_value is not None:
            return flag_value
        if key in file_values:
            return cast(file_values[key])
        return _DEFAULTS[key]

    params = PhysicalParams(
        k=float(pick("k", args.k, float)),
        r1=float(pick("r1", args.r1, float)),
        eta0=float(pick("eta0", args.eta0, float)),
        tau0=float(pick("tau0", args.tau0, float)),
        d=_parse_direction(pick("d", args.d, str)),
    )
    eps_raw = pick("eps", args.eps, str)
    eps = eps_list = None
    if eps_raw is not None:
        vals = [float(p) for p in str(eps_raw).split(",")]
        if len(vals) == 1:
            eps = vals[0]
        else:
            eps_list = vals
    points = pick("points", args.points, int)
    nmax = pick("nmax", args.nmax, int)
    return RunConfig(
        params=params,
        eps=eps,
        eps_list=eps_list,
        eps_min=float(pick("eps-min", args.eps_min, float)),
        eps_max=float(pick("eps-max", args.eps_max, float)),
        points=int(points) if points is not None else None,
        nmax=int(nmax) if nmax is not None else None,
        out=pick("out", args.out, str),
        fmt=str(pick("format", args.format, str)),
        perturb_branch=bool(getattr(args, "perturb_branch", False)),
    )


def _write_output(path, text):
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _usage_error(message):
    print(f"error: {message}", file=sys.stderr)
    return 1


def _regime_error(exc):
    print(f"parameter-regime error: {exc}", file=sys.stderr)
    return 2


def cmd_sweep(config: RunConfig):
    if config.eps_list is not None:
        grid = sorted((float(e) for e in config.eps_list), reverse=True)
    elif config.eps is not None:
        grid = [config.eps]
    else:
        points = config.points if config.points is not None else 26
        if points < 1:
            return _usage_error("--points must be at least 1")
        if not (0.0 < config.eps_min <= config.eps_max):
            return _usage_error("need 0 < --eps-min <= --eps-max")
        grid = list(np.logspace(math.log10(config.eps_max),
                                math.log10(config.eps_min), points))
    if config.out is None:
        return _usage_error("sweep requires --out")

    try:
        records = harness.sweep(config.params, grid, n_max=config.nmax)
    except (ParameterRegimeError, DegenerateModeError) as exc:
        return _regime_error(exc)

    if config.fmt == "csv":
        text = harness.records_to_csv(records)
    elif config.fmt == "json":
        text = json.dumps([{
            "eps": r.eps, "D": r.D, "T": r.T,
            "bound_D": r.bound_D, "bound_T": r.bound_T,
            "max_trans_resid": r.max_transmission_residual,
            "flux_resid": r.flux_residual, "n_max": r.n_max_used,
        } for r in records], indent=2) + "\n"
    else:
        return _usage_error(f"unknown format {config.fmt!r}")

    try:
        _write_output(config.out, text)
    except OSError as exc:
        return _usage_error(f"cannot write {config.out}: {exc}")

    for quantity in ("D", "T"):
        try:
            report = harness.rate_report(config.params, records, quantity,
                                         eps_range=_RATE_WINDOW)
        except ValueError:
            try:
                report = harness.rate_report(
                    config.params, records, quantity,
                    eps_range=(min(grid), max(grid)))
            except ValueError:
                print(f"{quantity}(eps): rate fit skipped "
                      "(needs >= 5 positive values)")
                continue
        print(report["statement"])

    ok = all(r.satisfies_bounds() for r in records)
    print(f"wrote {len(records)} records to {config.out}; "
          f"sqrt(eps) bounds {'held' if ok else 'VIOLATED'}")
    return 0 if ok else 2


def cmd_farfield(config: RunConfig):
    if config.eps is None:
        return _usage_error("farfield requires --eps")
    if config.eps < 0:
        return _usage_error("--eps must be nonnegative")
    n_samples = config.points if config.points is not None else 361
    if n_samples < 1:
        return _usage_error("--points must be at least 1")
    if config.out is None:
        return _usage_error("farfield requires --out")

    params = config.params
    contrast = Contrast.make(config.eps, params)
    try:
        n_max = config.nmax if config.nmax is not None else truncation_order(params, contrast)
        soft = soft_sphere_coeffs(params, n_max)
        eff = effective_medium_coeffs(params, contrast, soft.n_max)
    except (ParameterRegimeError, DegenerateModeError) as exc:
        return _regime_error(exc)

    gammas = np.linspace(0.0, math.pi, n_samples)
    u_soft = observables.far_field(params, soft, gammas).values
    u_eff = observables.far_field(params, eff, gammas).values
    diff = np.abs(u_eff - u_soft)

    if config.fmt == "csv":
        lines = ["gamma_radians,re_u_inf,im_u_inf,re_u_eps_inf,im_u_eps_inf,abs_diff"]
        for i, g in enumerate(gammas):
            lines.append(",".join([
                _fmt(g), _fmt(u_soft[i].real), _fmt(u_soft[i].imag),
                _fmt(u_eff[i].real), _fmt(u_eff[i].imag), _fmt(diff[i]),
            ]))
        text = "\n".join(lines) + "\n"
    elif config.fmt == "json":
        text = json.dumps([{
            "gamma_radians": float(g),
            "re_u_inf": float(u_soft[i].real), "im_u_inf": float(u_soft[i].imag),
            "re_u_eps_inf": float(u_eff[i].real), "im_u_eps_inf": float(u_eff[i].imag),
            "abs_diff": float(diff[i]),
        } for i, g in enumerate(gammas)], indent=2) + "\n"
    else:
        return _usage_error(f"unknown format {config.fmt!r}")

    try:
        _write_output(config.out, text)
    except OSError as exc:
        return _usage_error(f"cannot write {config.out}: {exc}")
    return 0


def cmd_coeffs(config: RunConfig):
    eps = config.eps if config.eps is not None else 1e-3
    if eps < 0:
        return _usage_error("--eps must be nonnegative")
    params = config.params
    contrast = Contrast.make(eps, params)
    try:
        n_max = config.nmax if config.nmax is not None else truncation_order(params, contrast)
        soft = soft_sphere_coeffs(params, n_max)
        eff = effective_medium_coeffs(params, contrast, soft.n_max)
    except (ParameterRegimeError, DegenerateModeError) as exc:
        return _regime_error(exc)
    line1, line2 = transmission_residuals(params, contrast, eff)

    if config.fmt == "csv":
        lines = ["n,re_c,im_c,re_a,im_a,re_b,im_b,trans_resid_1,trans_resid_2"]
        for n in range(soft.n_max + 1):
            lines.append(",".join([
                str(n),
                _fmt(soft.c[n].real), _fmt(soft.c[n].imag),
                _fmt(eff.a[n].real), _fmt(eff.a[n].imag),
                _fmt(eff.b[n].real), _fmt(eff.b[n].imag),
                _fmt(line1[n]), _fmt(line2[n]),
            ]))
        text = "\n".join(lines) + "\n"
    elif config.fmt == "json":
        text = json.dumps([{
            "n": n,
            "re_c": float(soft.c[n].real), "im_c": float(soft.c[n].imag),
            "re_a": float(eff.a[n].real), "im_a": float(eff.a[n].imag),
            "re_b": float(eff.b[n].real), "im_b": float(eff.b[n].imag),
            "trans_resid_1": float(line1[n]), "trans_resid_2": float(line2[n]),
        } for n in range(soft.n_max + 1)], indent=2) + "\n"
    else:
        return _usage_error(f"unknown format {config.fmt!r}")

    try:
        _write_output(config.out, text)
    except OSError as exc:
        return _usage_error(f"cannot write {config.out}: {exc}")
    return 0


def cmd_check(config: RunConfig):
    eps = config.eps if config.eps is not None else 1e-3
    if eps < 0:
        return _usage_error("--eps must be nonnegative")
    params = config.params
    contrast = Contrast.make(eps, params)
    try:
        report = harness.run_identity_suite(
            params, contrast, n_max=config.nmax,
            perturb_branch=config.perturb_branch,
        )
    except (ParameterRegimeError, DegenerateModeError) as exc:
        return _regime_error(exc)
    try:
        _write_output(config.out, report.to_json())
    except OSError as exc:
        return _usage_error(f"cannot write {config.out}: {exc}")
    return 0 if report.all_pass else 2


def build_parser():
    parser = _Parser(
        prog="effsphere",
        description="Exact sphere scattering: lossy-medium stand-in vs sound-soft obstacle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--k", type=float, help="wavenumber (default 1)")
        p.add_argument("--r1", type=float, help="sphere radius (default 1)")
        p.add_argument("--eta0", type=float, help="interior refraction constant (default 1)")
        p.add_argument("--tau0", type=float, help="interior damping constant (default 1)")
        p.add_argument("--d", type=str, metavar="X,Y,Z",
                       help="incident direction, normalized internally (default 0,0,1)")
        p.add_argument("--eps", type=str,
                       help="contrast value, or comma-separated list for sweep")
        p.add_argument("--eps-min", type=float, help="smallest sweep eps (default 1e-6)")
        p.add_argument("--eps-max", type=float, help="largest sweep eps (default 1e-1)")
        p.add_argument("--points", type=int,
                       help="sweep grid size / far-field sample count")
        p.add_argument("--nmax", type=int, help="series truncation override")
        p.add_argument("--out", type=str, help="output path")
        p.add_argument("--format", type=str, choices=("csv", "json"),
                       help="output format (default csv)")
        p.add_argument("--config", type=str, help="flat key=value config file")

    p_sweep = sub.add_parser("sweep", help="eps sweep with bounds and residuals")
    add_common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_ff = sub.add_parser("farfield", help="far-field table at one eps")
    add_common(p_ff)
    p_ff.set_defaults(func=cmd_farfield)

    p_co = sub.add_parser("coeffs", help="per-mode coefficient dump")
    add_common(p_co)
    p_co.set_defaults(func=cmd_coeffs)

    p_ck = sub.add_parser("check", help="identity suite JSON report")
    add_common(p_ck)
    p_ck.add_argument("--perturb-branch", action="store_true",
                      help="debug: evaluate residuals on the wrong root branch")
    p_ck.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _merge(args)
    except (ValueError, TypeError) as exc:
        return _usage_error(str(exc))
    return args.func(config)


if __name__ == "__main__":
    sys.exit(main())
