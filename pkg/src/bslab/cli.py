"""
Command-line front end.

    bslab gbm          GBM ensembles, one CSV per volatility
    bslab surface      finite-difference price surface as CSV
    bslab price        one call price (explicit | implicit | mc | closed-form)
    bslab implied-vol  volatility matching a target price

Settings come from built-in defaults, then a ``key = value`` config file
(``--config`` or the BS_LAB_CONFIG environment variable), then flags.

Exit codes: 0 ok, 2 usage, 3 stability, 4 domain/validation, 5 convergence.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from . import analytic, pricer, sde
from .errors import (
    BSLabError,
    ConvergenceError,
    DomainError,
    SingularSystemError,
    StabilityError,
    ValidationError,
)

EXIT_OK, EXIT_USAGE, EXIT_STABILITY, EXIT_DOMAIN, EXIT_CONVERGENCE = 0, 2, 3, 4, 5

COMMANDS = ("gbm", "surface", "price", "implied-vol")
CONFIG_ENV = "BS_LAB_CONFIG"


class UsageError(BSLabError):
    pass


def _float_list(text):
    try:
        return tuple(float(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise ValueError(f"not a comma-separated list of numbers: {text!r}") from None


# key -> (converter, default, commands that accept it as a flag).
# A dict default is keyed by command.
_MARKET = ("surface", "price", "implied-vol")
OPTIONS = {
    "r": (float, 0.05, _MARKET),
    "sigma": (float, 0.2, ("surface", "price")),
    "strike": (float, 100.0, _MARKET),
    "expiry": (float, 1.0, _MARKET),
    "s_max": (float, 500.0, ("surface", "price")),
    "n_space": (int, 200, ("surface", "price")),
    "n_time": (int, 2000, ("surface", "price")),
    "s_floor_ratio": (float, 1e-6, ("surface", "price")),
    "method": (str, "implicit", ("surface", "price")),
    "mu": (float, 1.0, ("gbm",)),
    # np.arange(0.8, 2, 0.2): 2.0 itself is excluded
    "sigmas": (_float_list, (0.8, 1.0, 1.2, 1.4, 1.6, 1.8), ("gbm",)),
    "s0": (float, 100.0, ("gbm",)),
    "n_steps": (int, 50, ("gbm",)),
    "dt": (float, 0.1, ("gbm",)),
    "n_paths": (int, {"gbm": 1, "price": 200_000}, ("gbm", "price")),
    "seed": (int, 1, ("gbm", "price")),
    "workers": (int, 1, ("gbm", "price")),
    "spot": (float, 100.0, ("price", "implied-vol")),
    "t": (float, 0.0, ("price",)),
    "target_price": (float, None, ("implied-vol",)),
    "output": (str, {"gbm": "gbm_paths.csv", "surface": "price_surface.csv"}, COMMANDS),
    "format": (str, "csv", ("gbm", "surface")),
}

PRICE_METHODS = ("explicit", "implicit", "mc", "closed-form")


@dataclass(frozen=True)
class Numerics:
    n_space: int = 200
    n_time: int = 2000
    s_max: float = 500.0
    s_floor_ratio: float = 1e-6
    method: str = "implicit"


@dataclass(frozen=True)
class SimConfig:
    mu: float = 1.0
    sigma_list: tuple = (0.8, 1.0, 1.2, 1.4, 1.6, 1.8)
    s0: float = 100.0
    n_steps: int = 50
    dt: float = 0.1
    n_paths: int = 1
    seed: int = 1
    workers: int = 1


@dataclass(frozen=True)
class RunConfig:
    command: str
    market: pricer.MarketParams
    contract: analytic.OptionContract
    numerics: Numerics = field(default_factory=Numerics)
    sim: SimConfig = field(default_factory=SimConfig)
    spot: float = 100.0
    t: float = 0.0
    target_price: float | None = None
    output: str | None = None
    format: str = "csv"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser():
    parser = _Parser(prog="bslab", description="Black-Scholes call pricing laboratory")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    for cmd in COMMANDS:
        p = sub.add_parser(cmd)
        p.add_argument("--config", default=None, help="key = value settings file")
        for key, (_, _, commands) in OPTIONS.items():
            if cmd in commands:
                # Raw strings; conversion happens after merging with the file.
                p.add_argument("--" + key.replace("_", "-"), dest=key, default=None)
    return parser


def read_config_file(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        if key not in OPTIONS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def _default(key, command):
    default = OPTIONS[key][1]
    return default.get(command) if isinstance(default, dict) else default


def parse_config(argv, config_path=None):
    """Merge defaults, config file and flags into a validated RunConfig."""
    ns = _build_parser().parse_args(list(argv))
    cmd = ns.command
    path = ns.config or config_path or os.environ.get(CONFIG_ENV)
    raw = read_config_file(path) if path else {}
    raw.update({k: v for k, v in vars(ns).items() if k in OPTIONS and v is not None})

    s = {}
    for key, (conv, _, _) in OPTIONS.items():
        if key in raw:
            try:
                s[key] = conv(raw[key])
            except ValueError:
                raise UsageError(f"bad value for {key}: {raw[key]!r}") from None
        else:
            s[key] = _default(key, cmd)

    try:
        return _validated(cmd, s)
    except (ValidationError, DomainError) as exc:
        raise UsageError(str(exc)) from None


def _validated(cmd, s):
    market = pricer.MarketParams(r=s["r"], sigma=s["sigma"])
    contract = analytic.OptionContract(strike=s["strike"], expiry=s["expiry"])
    numerics = Numerics(s["n_space"], s["n_time"], s["s_max"], s["s_floor_ratio"], s["method"])
    sim = SimConfig(
        s["mu"], s["sigmas"], s["s0"], s["n_steps"], s["dt"],
        s["n_paths"], s["seed"], s["workers"],
    )

    if cmd == "gbm":
        if not sim.sigma_list:
            raise ValidationError("sigmas must list at least one volatility")
        for sig in sim.sigma_list:
            sde.GbmParams(sim.mu, sig, sim.s0)
        if sim.n_steps < 1 or sim.n_paths < 1 or not sim.dt > 0:
            raise ValidationError("n_steps, n_paths and dt must be positive")
    if cmd in ("gbm", "price"):
        if sim.seed < 0 or sim.workers < 1:
            raise ValidationError("seed must be >= 0 and workers >= 1")
    if cmd in ("surface", "price"):
        allowed = PRICE_METHODS if cmd == "price" else ("explicit", "implicit")
        if numerics.method not in allowed:
            raise ValidationError(f"method must be one of {allowed}")
        if numerics.method in ("explicit", "implicit"):
            if numerics.n_space < 3 or numerics.n_time < 1:
                raise ValidationError("n_space must be >= 3 and n_time >= 1")
            if not numerics.s_max > contract.strike:
                raise ValidationError("s_max must exceed the strike")
            if not 0 < numerics.s_floor_ratio < numerics.s_max / contract.strike:
                raise ValidationError("s_floor_ratio must lie in (0, s_max/strike)")
    if cmd in ("price", "implied-vol") and not s["spot"] > 0:
        raise ValidationError("spot must be > 0")
    if cmd == "price":
        if not 0 <= s["t"] < contract.expiry:
            raise ValidationError("t must lie in [0, expiry)")
        if numerics.method == "mc" and sim.n_paths < 100:
            raise ValidationError("mc pricing needs n_paths >= 100")
    if cmd == "implied-vol" and s["target_price"] is None:
        raise ValidationError("implied-vol needs --target-price")
    if cmd in ("gbm", "surface") and s["format"] != "csv":
        raise ValidationError("csv is the only output format")

    return RunConfig(
        command=cmd,
        market=market,
        contract=contract,
        numerics=numerics,
        sim=sim,
        spot=s["spot"],
        t=s["t"],
        target_price=s["target_price"],
        output=s["output"],
        format=s["format"],
    )


def _write_atomic(targets):
    """Write {path: writer(fh)} to temporaries, then rename all of them."""
    staged = []
    try:
        for path, writer in targets.items():
            path = Path(path)
            fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
            staged.append((tmp, path))
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                writer(fh)
        for tmp, path in staged:
            os.replace(tmp, path)
    except BaseException:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.remove(tmp)
        raise


def _sigma_paths(output, sigmas):
    if len(sigmas) == 1:
        return [Path(output)]
    out = Path(output)
    return [out.with_name(f"{out.stem}_sigma{sig:.2f}{out.suffix}") for sig in sigmas]


def run(config, stdout=None):
    """Execute a validated config; return the process exit status."""
    stdout = stdout or sys.stdout
    cmd, num, sim = config.command, config.numerics, config.sim

    if cmd == "gbm":
        targets = {}
        for path, sig in zip(_sigma_paths(config.output, sim.sigma_list), sim.sigma_list):
            params = sde.GbmParams(sim.mu, sig, sim.s0)
            ps = sde.simulate_gbm(params, sim.n_steps, sim.dt, sim.n_paths, sim.seed, sim.workers)
            targets[path] = lambda fh, ps=ps: sde.write_paths_csv(ps, fh)
        _write_atomic(targets)
        for path in targets:
            print(path, file=stdout)
        return EXIT_OK

    if cmd == "surface":
        surface = pricer.price_surface_fd(
            config.market, config.contract, num.s_max, num.n_space, num.n_time,
            num.method, num.s_floor_ratio,
        )
        _write_atomic({config.output: lambda fh: pricer.write_surface_csv(surface, fh)})
        print(config.output, file=stdout)
        return EXIT_OK

    if cmd == "price":
        if num.method == "closed-form":
            text = repr(analytic.closed_form_call(
                config.spot, config.t, config.contract, config.market.r, config.market.sigma
            ))
        elif num.method == "mc":
            tail = analytic.OptionContract(config.contract.strike, config.contract.expiry - config.t)
            est = pricer.price_mc(config.market, tail, config.spot, sim.n_paths, sim.seed, sim.workers)
            text = f"{est.price!r} {est.std_err!r}"
        else:
            surface = pricer.price_surface_fd(
                config.market, config.contract, num.s_max, num.n_space, num.n_time,
                num.method, num.s_floor_ratio,
            )
            text = repr(pricer.price_at(surface, config.spot, config.t))
    else:
        text = repr(analytic.implied_vol(
            config.target_price, config.spot, config.contract, config.market.r
        ))

    if config.output:
        _write_atomic({config.output: lambda fh: fh.write(text + "\n")})
    print(text, file=stdout)
    return EXIT_OK


def exit_code(exc):
    if isinstance(exc, UsageError):
        return EXIT_USAGE
    if isinstance(exc, StabilityError):
        return EXIT_STABILITY
    if isinstance(exc, ConvergenceError):
        return EXIT_CONVERGENCE
    if isinstance(exc, (DomainError, ValidationError, SingularSystemError)):
        return EXIT_DOMAIN
    return 1


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        return run(parse_config(argv))
    except BSLabError as exc:
        print(f"bslab: error: {exc}", file=sys.stderr)
        return exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
