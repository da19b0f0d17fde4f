"""Command-line front end: configuration, run orchestration and output."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .cpo import CpoConfig, run_cpo
from .export import DesignReport, load_report, write_alist, write_report
from .lifting import (
    CirculantPowers,
    assemble_parity_matrix,
    build_window,
    count_f_sc,
    enumerate_candidates,
    lifted_census,
    scb_powers,
)
from .oo_optimizer import (
    DEFAULT_GUARD,
    independent_labels,
    search_space_size,
    solve_exhaustive,
    solve_local,
)
from .pattern_census import pattern_census
from .protograph import (
    CodeParams,
    PartitionMatrix,
    all_cutting_vectors,
    cv_partition,
    overlap_params,
    uncoupled_partition,
)

log = logging.getLogger("scforge")

CONFIG_SCHEMA = 1
MODES = ("oo", "cpo", "full", "census", "uncoupled", "cv-baseline")
FORMATS = ("alist", "report-json", "report-table")

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_GUARD = 3
EXIT_IO = 4


class ConfigError(ValueError):
    pass


class GuardError(RuntimeError):
    pass


@dataclass
class RunConfig:
    params: CodeParams
    mode: str
    seed: int = 0
    oo_strategy: str = "auto"          # auto | exhaustive | local
    oo_guard: int = DEFAULT_GUARD
    oo_restarts: int = 8
    oo_budget: int | None = None
    cpo: CpoConfig = field(default_factory=CpoConfig)
    partition: list[list[int]] | None = None
    cutting_vector: list[int] | None = None
    powers: list[list[int]] | None = None
    cv_guard: int = 5000
    out_dir: str | None = None
    formats: tuple[str, ...] = ("report-table",)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.oo_strategy not in ("auto", "exhaustive", "local"):
            raise ConfigError(f"unknown solver strategy {self.oo_strategy!r}")
        bad = [f for f in self.formats if f not in FORMATS]
        if bad:
            raise ConfigError(f"unknown output format(s) {bad}")
        if self.mode == "cpo" and self.partition is None and self.cutting_vector is None:
            raise ConfigError("mode 'cpo' needs a partition source: set 'partition' or 'cutting_vector'")
        if self.partition is not None and self.cutting_vector is not None:
            raise ConfigError("give either 'partition' or 'cutting_vector', not both")
        if self.mode == "cv-baseline" and self.params.m != 1:
            raise ConfigError("cutting vectors are defined for m = 1 only")

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        version = data.pop("schema_version", None)
        if version != CONFIG_SCHEMA:
            raise ConfigError(f"config schema_version must be {CONFIG_SCHEMA}, got {version!r}")
        allowed = {"code", "mode", "seed", "oo", "cpo", "partition", "cutting_vector",
                   "powers", "cv_guard", "output"}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            params = CodeParams(**data.get("code", {}))
        except TypeError as exc:
            raise ConfigError(f"bad 'code' section: {exc}") from None
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        oo = dict(data.get("oo", {}))
        out = dict(data.get("output", {}))
        try:
            cpo = CpoConfig(**{"seed": data.get("seed", 0), **data.get("cpo", {})})
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad 'cpo' section: {exc}") from None
        kw = dict(
            params=params,
            mode=data.get("mode", "full"),
            seed=int(data.get("seed", 0)),
            oo_strategy=oo.pop("strategy", "auto"),
            oo_guard=int(oo.pop("guard", DEFAULT_GUARD)),
            oo_restarts=int(oo.pop("restarts", 8)),
            oo_budget=oo.pop("budget", None),
            cpo=cpo,
            partition=data.get("partition"),
            cutting_vector=data.get("cutting_vector"),
            powers=data.get("powers"),
            cv_guard=int(data.get("cv_guard", 5000)),
            out_dir=out.pop("out_dir", None),
            formats=tuple(out.pop("formats", ("report-table",))),
        )
        if oo or out:
            raise ConfigError(f"unknown keys in 'oo'/'output': {sorted(oo) + sorted(out)}")
        return cls(**kw)


def threads_from_env() -> int:
    raw = os.environ.get("SCFORGE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"SCFORGE_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"SCFORGE_THREADS must be a positive integer, got {raw!r}")
    return n


# -- orchestration -----------------------------------------------------------

def _partition_source(cfg: RunConfig) -> PartitionMatrix | None:
    p = cfg.params
    try:
        if cfg.partition is not None:
            part = PartitionMatrix(np.array(cfg.partition), p.m)
            if part.assign.shape != (p.gamma, p.kappa) or part.assign.min() < 0 or part.assign.max() > p.m:
                raise ConfigError(f"partition must be {p.gamma}x{p.kappa} with entries in 0..{p.m}")
            return part
        if cfg.cutting_vector is not None:
            return cv_partition(cfg.cutting_vector, p)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return None


def _powers_source(cfg: RunConfig) -> CirculantPowers:
    p = cfg.params
    if cfg.powers is None:
        return scb_powers(p)
    arr = np.array(cfg.powers)
    if arr.shape != (p.gamma, p.kappa):
        raise ConfigError(f"powers must be {p.gamma}x{p.kappa}")
    return CirculantPowers(arr, p.z)


def _params_dict(p: CodeParams) -> dict:
    return dict(gamma=p.gamma, kappa=p.kappa, z=p.z, m=p.m, L=p.L)


def _census_fields(part: PartitionMatrix, params: CodeParams) -> dict:
    census = pattern_census(overlap_params(part), params.L, clamp=True)
    return dict(f_sum=census.f_sum, per_pattern=dict(census.totals))


def _solve_oo(cfg: RunConfig):
    p = cfg.params
    strategy = cfg.oo_strategy
    if strategy == "auto":
        strategy = "exhaustive" if search_space_size(p) <= cfg.oo_guard else "local"
    if strategy == "exhaustive":
        size = search_space_size(p)
        if size > cfg.oo_guard:
            raise GuardError(
                f"exhaustive search would visit {size} distributions (guard {cfg.oo_guard}); "
                "raise oo.guard or use oo.strategy = 'local'"
            )
        return solve_exhaustive(p, guard=cfg.oo_guard)
    return solve_local(p, seed=cfg.seed, restarts=cfg.oo_restarts, budget=cfg.oo_budget)


def _cv_count(args):
    zeta, params = args
    part = cv_partition(zeta, params)
    return count_f_sc(part, scb_powers(params), params), list(zeta)


def _cv_scan(params: CodeParams, guard: int, threads: int):
    vectors = list(all_cutting_vectors(params))
    if len(vectors) > guard:
        raise GuardError(
            f"{len(vectors)} cutting vectors exceed cv_guard={guard}; raise cv_guard in the config"
        )
    jobs = [(z, params) for z in vectors]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(_cv_count, jobs, chunksize=8))
    else:
        results = [_cv_count(j) for j in jobs]
    # smallest count, ties to the lexicographically least vector
    return min(results, key=lambda r: (r[0], r[1])), len(results)


def run(cfg: RunConfig, *, threads: int = 1) -> tuple[DesignReport, object]:
    """Execute one configured run; returns the report and the lifted code."""
    p = cfg.params
    times = {}
    t0 = time.perf_counter()
    report = DesignReport(mode=cfg.mode, params=_params_dict(p), seed=cfg.seed, partition=[])
    part = _partition_source(cfg)
    powers = _powers_source(cfg)

    if cfg.mode in ("oo", "full") and part is None:
        sol = _solve_oo(cfg)
        part = sol.partition
        report.t_star = sol.t_star
        report.t_labels = independent_labels(p.gamma, p.m)
        report.solver = dict(strategy=sol.strategy, visited=sol.visited,
                             co_optimal=sol.co_optimal, restarts=sol.restarts)
        times["oo"] = time.perf_counter() - t0
    elif cfg.mode == "uncoupled":
        part = uncoupled_partition(p)
    elif cfg.mode == "cv-baseline":
        (best, zeta), n = _cv_scan(p, cfg.cv_guard, threads)
        part = cv_partition(zeta, p)
        report.cutting_vector = zeta
        report.solver = dict(strategy="cutting-vector scan", visited=n)
    elif part is None:
        part = uncoupled_partition(p)
    if cfg.cutting_vector is not None:
        report.cutting_vector = list(cfg.cutting_vector)

    report.partition = part.to_list()
    if report.t_star is None:
        report.t_star = overlap_params(part).independent_vector()
        report.t_labels = independent_labels(p.gamma, p.m)
    for k, v in _census_fields(part, p).items():
        setattr(report, k, v)

    t1 = time.perf_counter()
    cs = enumerate_candidates(build_window(part, p))
    if not cs.girth_ok(powers):
        raise ConfigError("the starting powers lift a 4-cycle; choose different powers")
    report.f_sc_initial = lifted_census(cs, powers, p.L).f_sc

    if cfg.mode in ("cpo", "full"):
        state = run_cpo(part, p, cfg.cpo, initial=powers, candidates=cs)
        powers = state.powers
        report.f_sc_final = state.f_sc
        report.cpo = dict(config=cfg.cpo.to_dict(), iterations=state.iterations,
                          accepted=len(state.accepted()), stop_reason=state.stop_reason)
        times["cpo"] = time.perf_counter() - t1
    report.powers = powers.to_list()
    lifted = lifted_census(cs, powers, p.L).per_pattern()
    report.lifted_per_pattern = {ell: lifted.get(ell, 0)
                                 for ell in sorted(set(report.per_pattern) | set(lifted))}
    times["total"] = time.perf_counter() - t0
    report.wall_times = {k: round(v, 3) for k, v in times.items()}
    code = assemble_parity_matrix(part, powers, p)
    return report, code


def verify_report(report: DesignReport) -> list[str]:
    """Recompute every count from the embedded partition and powers."""
    p = CodeParams(**report.params)
    part = PartitionMatrix(np.array(report.partition), p.m)
    problems = []
    census = _census_fields(part, p)
    if report.f_sum is not None and census["f_sum"] != report.f_sum:
        problems.append(f"f_sum {report.f_sum} != recomputed {census['f_sum']}")
    if report.per_pattern is not None and census["per_pattern"] != report.per_pattern:
        problems.append("per-pattern counts differ from recomputation")
    if report.powers is not None:
        final = count_f_sc(part, CirculantPowers(np.array(report.powers), p.z), p)
        expected = report.f_sc_final if report.f_sc_final is not None else report.f_sc_initial
        if expected is not None and final != expected:
            problems.append(f"F_SC {expected} != recomputed {final}")
    return problems


def write_outputs(report: DesignReport, code, out_dir, formats) -> list[Path]:
    out = Path(out_dir)
    written = []
    for fmt in formats:
        if fmt == "alist":
            written.append(write_alist(code.H, out / "code.alist"))
        elif fmt == "report-json":
            written.append(write_report(report, out / "report.json", fmt))
        else:
            written.append(write_report(report, out / "report.txt", fmt))
    return written


# -- argument parsing --------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--seed", type=int, help="seed for every random choice")
    common.add_argument("--budget", type=int, help="iteration budget for the searches")
    common.add_argument("--out-dir", help="directory for written artifacts")
    common.add_argument("--format", action="append", choices=FORMATS, dest="formats",
                        help="output format (repeatable)")
    common.add_argument("-v", "--verbose", action="store_true")
    code = argparse.ArgumentParser(add_help=False)
    for name in ("gamma", "kappa", "z", "m", "L"):
        code.add_argument(f"--{name}", type=int)
    code.add_argument("--partition", help="partition as a JSON matrix")
    code.add_argument("--cutting-vector", help="comma-separated cutting vector")
    code.add_argument("--powers", help="circulant powers as a JSON matrix")

    parser = argparse.ArgumentParser(prog="scforge", description=(
        "Partition and lift spatially coupled LDPC codes while keeping "
        "length-8 cycle objects rare."))
    parser.add_argument("--version", action="version", version=f"scforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "oo": "optimize the partition",
        "cpo": "optimize circulant powers for a given partition",
        "full": "partition search followed by power search",
        "census": "pattern and lifted-object counts of a partition",
        "uncoupled": "counts of the uncoupled code",
        "cv-baseline": "best cutting-vector partition under the starting powers",
    }
    for mode, text in helps.items():
        sub.add_parser(mode, parents=[common, code], help=text)
    exp = sub.add_parser("export", parents=[common], help="re-export a saved JSON report")
    exp.add_argument("--report", required=True, help="report.json written by an earlier run")
    return parser


def _config_from_args(args) -> RunConfig:
    data: dict = {"schema_version": CONFIG_SCHEMA}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}: invalid JSON ({exc})") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    data["mode"] = args.command
    code = dict(data.get("code", {}))
    for name in ("gamma", "kappa", "z", "m", "L"):
        v = getattr(args, name)
        if v is not None:
            code[name] = v
    missing = [n for n in ("gamma", "kappa", "z", "m", "L") if n not in code]
    if missing:
        raise ConfigError(f"missing code parameters: {', '.join(missing)}")
    data["code"] = code
    try:
        if args.partition:
            data["partition"] = json.loads(args.partition)
        if args.powers:
            data["powers"] = json.loads(args.powers)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"bad matrix argument: {exc}") from None
    if args.cutting_vector:
        try:
            data["cutting_vector"] = [int(x) for x in args.cutting_vector.split(",")]
        except ValueError:
            raise ConfigError("cutting vector must be comma-separated integers") from None
    if args.seed is not None:
        data["seed"] = args.seed
    cfg = RunConfig.from_dict(data)
    if args.seed is not None:
        cfg.cpo = replace(cfg.cpo, seed=args.seed)
    if args.budget is not None:
        if args.budget < 0:
            raise ConfigError("budget must be non-negative")
        cfg.cpo = replace(cfg.cpo, budget=args.budget)
        cfg.oo_budget = args.budget
    if args.out_dir:
        cfg.out_dir = args.out_dir
    if args.formats:
        cfg.formats = tuple(args.formats)
    elif cfg.mode == "full" and cfg.out_dir and not args.config:
        cfg.formats = FORMATS
    return cfg


def _export(args) -> int:
    report = load_report(args.report)
    p = CodeParams(**report.params)
    part = PartitionMatrix(np.array(report.partition), p.m)
    powers = CirculantPowers(np.array(report.powers), p.z) if report.powers else scb_powers(p)
    code = assemble_parity_matrix(part, powers, p)
    formats = tuple(args.formats or ("alist",))
    if args.out_dir:
        for path in write_outputs(report, code, args.out_dir, formats):
            print(path)
    else:
        from .export import alist_text
        for fmt in formats:
            sys.stdout.write(alist_text(code.H) if fmt == "alist" else
                             report.to_json() if fmt == "report-json" else report.to_table())
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        threads = threads_from_env()
        if args.command == "export":
            return _export(args)
        cfg = _config_from_args(args)
        report, code = run(cfg, threads=threads)
        if cfg.out_dir:
            for path in write_outputs(report, code, cfg.out_dir, cfg.formats):
                print(path)
        else:
            for fmt in cfg.formats:
                if fmt == "report-json":
                    sys.stdout.write(report.to_json())
                elif fmt == "report-table":
                    sys.stdout.write(report.to_table())
                else:
                    raise ConfigError("alist output needs --out-dir")
        log.info("wall times: %s", report.wall_times)
        return EXIT_OK
    except ConfigError as exc:
        print(f"scforge: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GuardError as exc:
        print(f"scforge: size guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except OSError as exc:
        print(f"scforge: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # remaining validation failures come from user-supplied data
        print(f"scforge: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
