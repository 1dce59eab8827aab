"""Command-line front-end: solve, phi0, convergence, mc, figures.

Every number printed comes from a library call; this module only parses
configuration and formats CSV.  Exit codes: 0 success, 2 configuration
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from .boundary import phi0
from .convergence import DEFAULT_LADDER, FIGURE_LADDER, figure_data, fmt, run_study, solve_ladder
from .errors import ConfigurationError, GerberShiuError
from .oracles import McConfig, exponential_ode_oracle, simulate_gs
from .risk_model import (
    PENALTIES,
    ClaimModel,
    CombinationOfExponentials,
    Erlang2,
    Exponential,
    RiskParams,
)
from .vie import DEFAULT_PARAMS

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

CLAIMS = {
    "exp": lambda: Exponential(1.0),
    "erlang2": lambda: Erlang2(2.0),
    "combexp": lambda: CombinationOfExponentials(),
}


@dataclass(frozen=True)
class RunConfig:
    claims: str = "exp"
    penalty: str = "ruin"
    m: int = 3
    params: tuple[float, ...] | None = None
    N: int = 2048
    T: float = 30.0
    c: float = 1.2
    lam: float = 1.0
    delta: float = 0.01
    u: tuple[float, ...] | None = None
    seed: int = 12345
    paths: int = 1_000_000
    out: str | None = None
    ladder: tuple[int, ...] | None = None
    error: str = "auto"
    reference: str = "auto"

    def __post_init__(self):
        if self.claims not in CLAIMS:
            raise ConfigurationError(f"unknown claims {self.claims!r}; choose from {sorted(CLAIMS)}")
        if self.penalty not in PENALTIES:
            raise ConfigurationError(f"unknown penalty {self.penalty!r}; choose from {sorted(PENALTIES)}")
        if self.error not in ("auto", "exact", "self"):
            raise ConfigurationError("error must be auto, exact or self")
        if self.reference not in ("auto", "oracle", "self"):
            raise ConfigurationError("reference must be auto, oracle or self")
        if self.T <= 0:
            raise ConfigurationError("T must be positive")

    def model(self) -> ClaimModel:
        return CLAIMS[self.claims]()

    def penalty_obj(self):
        return PENALTIES[self.penalty]()

    def risk(self) -> RiskParams:
        return RiskParams(c=self.c, lam=self.lam, delta=self.delta)

    def colloc(self) -> tuple[float, ...]:
        if self.params is not None:
            if len(self.params) != self.m:
                raise ConfigurationError(f"--params has {len(self.params)} values but --m is {self.m}")
            return self.params
        if self.m not in DEFAULT_PARAMS:
            raise ConfigurationError(f"no default collocation parameters for m={self.m}; pass --params")
        return DEFAULT_PARAMS[self.m]

    def u_points(self, default) -> np.ndarray:
        pts = np.asarray(default if self.u is None else self.u, dtype=float)
        if np.any(pts < 0) or np.any(pts > self.T):
            raise ConfigurationError(f"--u values must lie in [0, {self.T}]")
        return pts


# ----------------------------------------------------------------------------
# parsing


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigurationError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigurationError(f"expected comma-separated integers, got {text!r}") from exc


_CONVERTERS = {
    "m": int, "N": int, "seed": int, "paths": int,
    "T": float, "c": float, "lam": float, "delta": float,
    "params": _floats, "u": _floats, "ladder": _ints,
}
_ALIASES = {"lambda": "lam"}


def _convert(key: str, value: str):
    key = _ALIASES.get(key, key)
    if key not in {f.name for f in fields(RunConfig)}:
        raise ConfigurationError(f"unknown configuration key {key!r}")
    try:
        return key, _CONVERTERS.get(key, str)(value)
    except ValueError as exc:
        raise ConfigurationError(f"bad value for {key}: {value!r}") from exc


def read_config_file(path: str | Path) -> dict:
    """key=value lines; '#' starts a comment."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key, val = _convert(key.lstrip("-"), value)
        out[key] = val
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigurationError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key=value file; flags override it")
    common.add_argument("--claims", choices=sorted(CLAIMS))
    common.add_argument("--penalty", choices=sorted(PENALTIES))
    common.add_argument("--m", type=int)
    common.add_argument("--params", type=_floats, help="collocation parameters, e.g. 0.3333,0.6667")
    common.add_argument("--N", type=int)
    common.add_argument("--T", type=float)
    common.add_argument("--c", type=float)
    common.add_argument("--lambda", dest="lam", type=float)
    common.add_argument("--delta", type=float)
    common.add_argument("--u", type=_floats, help="evaluation point(s), comma-separated")
    common.add_argument("--seed", type=int)
    common.add_argument("--paths", type=int)
    common.add_argument("--out", help="output file (directory for figures); stdout if omitted")
    common.add_argument("--ladder", type=_ints, help="doubling N sequence, e.g. 64,128,256")
    common.add_argument("--error", choices=["auto", "exact", "self"],
                        help="convergence error: oracle sup error or self-difference")
    common.add_argument("--reference", choices=["auto", "oracle", "self"],
                        help="figure relative-error reference")

    parser = _Parser(prog="gerber-shiu", description="Gerber-Shiu functions by VIE collocation")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in [
        ("solve", "values of Phi_delta(u) on a grid"),
        ("phi0", "boundary value Phi_delta(0)"),
        ("convergence", "error and order table over an N ladder"),
        ("mc", "Monte Carlo estimate at u"),
        ("figures", "value and relative-error curves for N in 512..4096"),
    ]:
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def parse_config(argv: Sequence[str]) -> tuple[str, RunConfig]:
    args = build_parser().parse_args(argv)
    values = read_config_file(args.config) if args.config else {}
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    return args.command, RunConfig(**values)


# ----------------------------------------------------------------------------
# commands


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def cmd_solve(cfg: RunConfig) -> str:
    params, model, pen = cfg.risk(), cfg.model(), cfg.penalty_obj()
    u = cfg.u_points(np.round(np.linspace(0.0, cfg.T, int(round(cfg.T * 10)) + 1), 12))
    sol = solve_ladder(params, model, pen, cfg.m, cfg.colloc(), [cfg.N], cfg.T)[cfg.N]
    return _csv(["u", "value"], zip(u, np.atleast_1d(sol(u))))


def cmd_phi0(cfg: RunConfig) -> str:
    r = phi0(cfg.risk(), cfg.model(), cfg.penalty_obj())
    return _csv(["value", "kappa_delta", "truncation_point", "est_abs_error"],
                [(r.value, r.kappa_delta, r.truncation_point, r.est_abs_error)])


def cmd_convergence(cfg: RunConfig) -> str:
    params, model, pen = cfg.risk(), cfg.model(), cfg.penalty_obj()
    mode = cfg.error
    if mode == "auto":
        mode = "exact" if isinstance(model, Exponential) else "self"
    if mode == "exact" and not isinstance(model, Exponential):
        raise ConfigurationError("exact errors need exponential claims (ODE oracle)")
    exact = exponential_ode_oracle(params, model.rate, pen, cfg.T) if mode == "exact" else None
    u_eval = float(cfg.u[0]) if cfg.u else 5.0
    report = run_study(params, model, pen, cfg.m, cfg.colloc(), cfg.ladder or DEFAULT_LADDER,
                       u_eval, T=cfg.T, exact=exact)
    return report.to_csv()


def cmd_mc(cfg: RunConfig) -> str:
    u0 = float(cfg.u[0]) if cfg.u else 5.0
    est = simulate_gs(cfg.risk(), cfg.model(), cfg.penalty_obj(),
                      McConfig(paths=cfg.paths, seed=cfg.seed, u0=u0))
    return _csv(["mean", "std_error", "paths", "censored_fraction"],
                [(est.mean, est.std_error, est.paths, est.censored_fraction)])


def cmd_figures(cfg: RunConfig) -> dict[str, str]:
    ladder = cfg.ladder or FIGURE_LADDER
    u = cfg.u_points(np.round(np.linspace(0.0, cfg.T, int(round(cfg.T * 10)) + 1), 12))
    data = figure_data(cfg.risk(), cfg.model(), cfg.penalty_obj(), cfg.m, ladder, u,
                       cfg.reference, cfg.T)
    stem = f"{cfg.claims}_{cfg.penalty}_m{cfg.m}"
    values = _csv(["u"] + [f"value_N{N}" for N in ladder],
                  zip(u, *(data.values[N] for N in ladder)))
    relerr = _csv(["u"] + [f"relerr_N{N}" for N in ladder],
                  zip(u, *(data.relerr[N] for N in ladder)))
    return {f"{stem}_values.csv": values, f"{stem}_relerr_{data.reference}.csv": relerr}


COMMANDS = {
    "solve": cmd_solve,
    "phi0": cmd_phi0,
    "convergence": cmd_convergence,
    "mc": cmd_mc,
    "figures": cmd_figures,
}


def _emit(result, out: str | None, stdout) -> None:
    if isinstance(result, dict):
        if out is None:
            for name, text in result.items():
                stdout.write(f"# {name}\n{text}")
            return
        target = Path(out)
        target.mkdir(parents=True, exist_ok=True)
        for name, text in result.items():
            (target / name).write_text(text, encoding="utf-8", newline="\n")
        return
    if out is None:
        stdout.write(result)
    else:
        Path(out).write_text(result, encoding="utf-8", newline="\n")


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        command, cfg = parse_config(sys.argv[1:] if argv is None else list(argv))
        _emit(COMMANDS[command](cfg), cfg.out, stdout)
    except (ConfigurationError, ValueError, OSError) as exc:
        # ConfigurationError and DomainError are ValueErrors
        print(f"error: {exc}", file=stderr)
        return EXIT_CONFIG
    except (GerberShiuError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
