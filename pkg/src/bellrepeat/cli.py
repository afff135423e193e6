"""Command-line experiments.

Every output embeds the config, seed, package version and timings.  JSON
payloads are written with sorted keys so reruns with the same config and
seed differ only in the ``timings`` field.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import __version__
from .discriminator import (
    MAX_EXACT_N,
    chi_report,
    code_search,
    failure_bound,
    game_simulate,
    resolve_seed,
)
from .ensemble_stats import (
    ProbVec4,
    classify_phase,
    entropy,
    gamma1_single,
    gamma_upper_bound,
    simplex_grid,
    typical_set_bound,
)
from .symplectic_codes import (
    MAX_ENUMERATE_N,
    CodeError,
    SelfDualCode,
    containing_ratio,
    count_containing,
    count_self_dual,
    enumerate_all,
    sample_uniform,
)

log = logging.getLogger("bellrepeat")

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 2, 3
DEFAULT_EPS_GRID = (0.05, 0.1, 0.2, 0.3, 0.5)


class ConfigError(ValueError):
    pass


class InvariantViolation(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    subcommand: str
    p: tuple[float, ...] | None = None
    st: tuple[float, float] | None = None
    n_lo: int = 1
    n_hi: int = 1
    trials: int = 100
    n_samples: int = 1000
    final_samples: int | None = None
    seed: int | None = None
    eps_grid: tuple[float, ...] = DEFAULT_EPS_GRID
    grid_resolution: float = 0.01
    out: str | None = None
    format: str = "json"
    threads: int = 1
    action: str | None = None
    code_file: str | None = None
    rank_by: str = "auto"
    extra: dict = field(default_factory=dict)

    def prob(self) -> ProbVec4:
        if self.p is not None and self.st is not None:
            raise ConfigError("give either --p or --st, not both")
        try:
            if self.st is not None:
                return ProbVec4.from_st(*self.st)
            if self.p is not None:
                return ProbVec4(tuple(self.p))
        except ValueError as e:
            raise ConfigError(str(e)) from e
        raise ConfigError("a probability vector is required (--p or --st)")

    @property
    def n_values(self) -> range:
        return range(self.n_lo, self.n_hi + 1)

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("out")
        return d


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _n_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}")
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return lo, hi


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--p", type=_floats, help="single-copy probabilities p00,p01,p10,p11")
    common.add_argument("--st", type=_floats, help="s,t for p = (s, t, 1-s-t, 0)")
    common.add_argument("--n", type=int, help="number of copies N")
    common.add_argument("--n-range", type=_n_range, help="inclusive range lo:hi of N")
    common.add_argument("--trials", type=int, default=100)
    common.add_argument("--samples", type=int, default=1000, help="Monte-Carlo samples per evaluation")
    common.add_argument("--final-samples", type=int, help="samples for re-scoring the winning code")
    common.add_argument("--rank-by", choices=("auto", "exact", "mc", "bracket"), default="auto")
    common.add_argument("--seed", type=int)
    common.add_argument("--eps-grid", type=_floats, default=DEFAULT_EPS_GRID)
    common.add_argument("--grid-res", type=float, default=0.01)
    common.add_argument("--code", dest="code_file", help="JSON code file")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="bellrepeat", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    sub.add_parser("bound", parents=[common], help="upper bounds on LOCC success versus N")
    sub.add_parser("converge", parents=[common], help="best random stabilizer protocol versus N")
    sub.add_parser("phase", parents=[common], help="phase diagram over p = (s, t, 1-s-t, 0)")
    codes = sub.add_parser("codes", parents=[common], help="count, sample or enumerate self-dual codes")
    codes.add_argument("action", choices=("count", "sample", "enumerate"))
    sub.add_parser("game", parents=[common], help="repeated-game report for one N")
    sub.add_parser("verify", parents=[common], help="dense-simulation and counting self-checks")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    if args.n is not None and args.n_range is not None:
        raise ConfigError("give either --n or --n-range")
    if args.n_range is not None:
        lo, hi = args.n_range
    elif args.n is not None:
        if args.n < 1:
            raise ConfigError("--n must be >= 1")
        lo = hi = args.n
    else:
        lo = hi = None
    default_fmt = "csv" if args.subcommand in ("bound", "converge", "phase") else "json"
    if args.trials < 1 or args.samples < 1 or args.threads < 1:
        raise ConfigError("--trials, --samples and --threads must be >= 1")
    if any(e <= 0 for e in args.eps_grid):
        raise ConfigError("--eps-grid values must be positive")
    if args.p is not None and len(args.p) != 4:
        raise ConfigError("--p needs four numbers")
    if args.st is not None and len(args.st) != 2:
        raise ConfigError("--st needs two numbers")
    cfg = ExperimentConfig(
        subcommand=args.subcommand,
        p=args.p,
        st=args.st,
        trials=args.trials,
        n_samples=args.samples,
        final_samples=args.final_samples,
        seed=resolve_seed(args.seed),
        eps_grid=tuple(args.eps_grid),
        grid_resolution=args.grid_res,
        out=args.out,
        format=args.format or default_fmt,
        threads=args.threads,
        action=getattr(args, "action", None),
        code_file=args.code_file,
        rank_by=args.rank_by,
    )
    if lo is not None:
        cfg.n_lo, cfg.n_hi = lo, hi
    else:
        cfg.n_lo, cfg.n_hi = {"bound": (1, 10), "converge": (1, 8), "codes": (1, 3), "verify": (1, 3)}.get(
            args.subcommand, (1, 1)
        )
    return cfg


# each command returns (rows or payload, csv column names or None)
CommandResult = tuple[object, list[str] | None]


def cmd_bound(cfg: ExperimentConfig) -> CommandResult:
    p = cfg.prob()
    H = entropy(p)
    rows = []
    for N in cfg.n_values:
        t1 = min(typical_set_bound(p, N, eps) for eps in cfg.eps_grid)
        rows.append(
            {"N": N, "gamma_upper_bound": gamma_upper_bound(p, N), "theorem1_bound": t1,
             "entropy": H, "gamma1": gamma1_single(p)}
        )
    return rows, ["N", "gamma_upper_bound", "theorem1_bound", "entropy", "gamma1"]


def _min_failure_bound(p: ProbVec4, N: int, eps_grid) -> float | None:
    if len(p.support) < 2:
        return None
    return min(failure_bound(p, N, eps) for eps in eps_grid)


def cmd_converge(cfg: ExperimentConfig) -> CommandResult:
    p = cfg.prob()
    g1 = gamma1_single(p)
    rows = []
    for i, N in enumerate(cfg.n_values):
        res = code_search(
            p, N, cfg.trials, seed=cfg.seed + i, eval_budget=cfg.n_samples,
            rank_by=cfg.rank_by, final_samples=cfg.final_samples, threads=cfg.threads,
        )
        log.info("N=%d eta=%.6f (%s, %.1fs)", N, res.eta, res.method, res.elapsed)
        rows.append(
            {"N": N, "eta_best": res.eta, "stderr": res.stderr, "gamma1": g1,
             "failure_bound": _min_failure_bound(p, N, cfg.eps_grid),
             "counterexample_flag": bool(res.eta > g1 and g1 < 1 - 1e-9), "method": res.method}
        )
    return rows, ["N", "eta_best", "stderr", "gamma1", "failure_bound", "counterexample_flag", "method"]


def cmd_phase(cfg: ExperimentConfig) -> CommandResult:
    try:
        grid = simplex_grid(cfg.grid_resolution)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    rows = []
    for s, t in grid:
        ph = classify_phase(s, t)
        rows.append({"s": s, "t": t, "H": ph.entropy, "separable": ph.separable, "label": ph.label.value})
    return rows, ["s", "t", "H", "separable", "label"]


def cmd_codes(cfg: ExperimentConfig) -> CommandResult:
    if cfg.action == "count":
        rows = []
        for N in cfg.n_values:
            r = containing_ratio(N)
            rows.append(
                {"N": N, "count": str(count_self_dual(N)), "containing": str(count_containing(N)),
                 "ratio": f"{r.numerator}/{r.denominator}",
                 "ratio_matches": r.numerator == 1 and r.denominator == 2**N + 1}
            )
        return rows, ["N", "count", "containing", "ratio", "ratio_matches"]
    if cfg.action == "sample":
        rng = np.random.default_rng(cfg.seed)
        codes = [sample_uniform(N, rng).to_dict() for N in cfg.n_values]
        return {"codes": codes}, None
    if cfg.n_hi > MAX_ENUMERATE_N:
        raise ConfigError(f"enumerate supports N <= {MAX_ENUMERATE_N}")
    out = {}
    for N in cfg.n_values:
        codes = enumerate_all(N)
        out[str(N)] = {"count": len(codes), "codes": [c.to_dict() for c in codes]}
    return {"enumerated": out}, None


def _load_code(path: str) -> SelfDualCode:
    try:
        with open(path) as fh:
            return SelfDualCode.from_dict(json.load(fh))
    except (OSError, KeyError, ValueError) as e:
        raise ConfigError(f"cannot load code file {path}: {e}") from e


def cmd_game(cfg: ExperimentConfig) -> CommandResult:
    p = cfg.prob()
    if cfg.n_lo != cfg.n_hi:
        raise ConfigError("game takes a single --n")
    N = cfg.n_lo
    if cfg.code_file:
        code = _load_code(cfg.code_file)
        if code.n_qubits != N:
            raise ConfigError("code file size does not match --n")
        game = game_simulate(p, N, code, cfg.n_samples, cfg.seed)
        return {"game": {"wins": game.wins, "trials": game.trials, "win_rate": game.win_rate,
                         "stderr": game.stderr, "seed": game.seed}, "code": code.to_dict(),
                "gamma1": gamma1_single(p), "upper_bound": gamma_upper_bound(p, N)}, None
    rep = chi_report(
        p, N, cfg.trials, cfg.seed, eval_budget=cfg.n_samples, final_samples=cfg.final_samples,
        game_trials=cfg.n_samples if N <= MAX_EXACT_N else 0, rank_by=cfg.rank_by,
        threads=cfg.threads,
    )
    if rep.counterexample_flag != (rep.eta_best > rep.gamma1 and rep.gamma1 < 1 - 1e-9):
        raise InvariantViolation("counterexample flag inconsistent")
    return {"report": rep.to_dict()}, None


def cmd_verify(cfg: ExperimentConfig) -> CommandResult:
    from . import quantum_verify as qv
    from .discriminator import eta_exact

    if cfg.n_hi > qv.MAX_CHECK_N:
        raise ConfigError(f"quantum checks support N <= {qv.MAX_CHECK_N}")
    checks = []

    def record(name, ok, **info):
        checks.append({"check": name, "pass": bool(ok), **info})

    rng = np.random.default_rng(cfg.seed)
    if cfg.code_file:
        codes = [_load_code(cfg.code_file)]
        if codes[0].n_qubits > qv.MAX_CHECK_N:
            raise ConfigError(f"quantum checks support N <= {qv.MAX_CHECK_N}")
    else:
        codes = [sample_uniform(N, rng) for N in cfg.n_values]
    for code in codes:
        N = code.n_qubits
        p = cfg.prob() if (cfg.p or cfg.st) else ProbVec4(tuple(rng.dirichlet(np.ones(4))))
        record("lemma1", qv.verify_lemma1(code), N=N)
        record("bell_reduction", qv.bell_reduction_check(code, p), N=N)
        eta = eta_exact(code, p).eta
        quantum = qv.optimal_success_quantum(code, p)
        record("quantum_equals_exact", abs(quantum - eta) <= 1e-9, N=N, eta=eta, quantum=quantum)
    for N in range(1, MAX_ENUMERATE_N + 1):
        n_enum = len(enumerate_all(N))
        record("count_matches_enumeration", n_enum == count_self_dual(N), N=N, count=n_enum)
        r = containing_ratio(N)
        record("containing_ratio", r.numerator == 1 and r.denominator == 2**N + 1, N=N, ratio=str(r))
    return {"checks": checks, "all_pass": all(c["pass"] for c in checks)}, None


COMMANDS: dict[str, Callable[[ExperimentConfig], CommandResult]] = {
    "bound": cmd_bound,
    "converge": cmd_converge,
    "phase": cmd_phase,
    "codes": cmd_codes,
    "game": cmd_game,
    "verify": cmd_verify,
}


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    return x


def render(cfg: ExperimentConfig, result, columns, timings: dict) -> str:
    meta = {"version": __version__, "config": cfg.echo(), "seed": cfg.seed, "timings": timings}
    if cfg.format == "json":
        payload = dict(meta, result=result)
        return json.dumps(_clean(payload), sort_keys=True, indent=2) + "\n"
    if columns is None:
        raise ConfigError(f"{cfg.subcommand} output is not tabular; use --format json")
    buf = io.StringIO()
    for key in ("version", "seed", "config", "timings"):
        buf.write(f"# {key}: {json.dumps(_clean(meta[key]), sort_keys=True)}\n")
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for row in result:
        w.writerow({k: ("" if row[k] is None else row[k]) for k in columns})
    return buf.getvalue()


def run(cfg: ExperimentConfig) -> str:
    t0 = time.perf_counter()
    result, columns = COMMANDS[cfg.subcommand](cfg)
    timings = {"wall_seconds": round(time.perf_counter() - t0, 6)}
    return render(cfg, result, columns, timings)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        cfg = config_from_args(args)
        text = run(cfg)
    except (ConfigError, CodeError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvariantViolation, AssertionError) as e:
        print(f"invariant violation: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
