"""``gapsolve run --config cfg.json [--out DIR]``.

Exit codes: 0 success, 2 configuration error, 3 no gap eigenvalue / shift
below lambda0, 4 numerical failure (including non-convergence).
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import dirac_radial as dr
from . import gap_engine as ge
from . import pollution_bench as pb
from .errors import GapSolveError, InvalidConfig, NoGap, ShiftBelowLambda0

log = logging.getLogger("gapsolve")

MODES = ("solve", "scan", "bench", "toy")
RESULT_HEADER = ["k", "lambda", "exact", "abs_error", "iterations", "residual", "multiplicity"]


@dataclass
class SolverConfig:
    e0: float | None = None
    tol: float | None = None
    maxit: int = ge.MAXIT
    gap_edge: float | None = None


@dataclass
class ScanConfig:
    e_min: float
    e_max: float
    n_points: int
    kmax: int


@dataclass
class BenchConfig:
    sizes: list[int]
    gap: tuple[float, float]
    k_max: int


@dataclass
class RunConfig:
    mode: str
    channel: dr.ChannelSpec | None = None
    toy: dict | None = None
    targets: list[int] = field(default_factory=list)
    solver: SolverConfig = field(default_factory=SolverConfig)
    scan: ScanConfig | None = None
    bench: BenchConfig | None = None
    out_dir: Path = Path(".")
    formats: tuple[str, ...] = ("csv", "json")
    seed: int = 0


def _req(d: dict, key: str, where: str):
    if not isinstance(d, dict) or key not in d:
        raise InvalidConfig(f"missing key {key!r} in {where}")
    return d[key]


def parse_channel(d: dict) -> dr.ChannelSpec:
    terms = []
    for t in d.get("potential", []):
        terms.append(dr.PotentialTerm(_req(t, "kind", "potential term"), float(_req(t, "strength", "potential term")),
                                      float(t.get("mu", 0.0))))
    b = d.get("basis", {})
    basis = dr.BasisConfig(
        int(b.get("order", 7)), int(b.get("n_intervals", 40)),
        float(b.get("rmax", 60.0)), float(b.get("grading", 1.15)),
    )
    return dr.ChannelSpec(int(_req(d, "kappa", "channel")), tuple(terms), basis, d.get("splitting", "talman"))


def parse_config(raw: dict, out_override: str | None = None) -> RunConfig:
    """Validate a decoded JSON document; any problem raises InvalidConfig."""
    if not isinstance(raw, dict):
        raise InvalidConfig("config must be a JSON object")
    try:
        mode = _req(raw, "mode", "config")
        if mode not in MODES:
            raise InvalidConfig(f"mode must be one of {MODES}, got {mode!r}")
        cfg = RunConfig(mode=mode, seed=int(raw.get("seed", 0)))
        if "channel" in raw:
            cfg.channel = parse_channel(raw["channel"])
        if "toy" in raw:
            toy = raw["toy"]
            cfg.toy = {"n": int(_req(toy, "n", "toy")), "length": float(_req(toy, "length", "toy"))}
            if cfg.toy["n"] < 1 or not cfg.toy["length"] > 0:
                raise InvalidConfig("toy needs n >= 1 and length > 0")
        if mode == "toy" and cfg.toy is None:
            raise InvalidConfig("toy mode needs a 'toy' section")
        if mode in ("solve", "scan") and cfg.channel is None and cfg.toy is None:
            raise InvalidConfig(f"{mode} mode needs a 'channel' or 'toy' section")
        if mode == "bench" and cfg.channel is None:
            raise InvalidConfig("bench mode needs a 'channel' section")

        cfg.targets = [int(k) for k in raw.get("targets", [])]
        if any(k < 1 for k in cfg.targets):
            raise InvalidConfig("targets are 1-based indices")
        if mode in ("solve", "toy") and not cfg.targets:
            raise InvalidConfig("targets must be nonempty")

        s = raw.get("solver", {})
        e0 = s.get("e0")
        cfg.solver = SolverConfig(
            None if e0 is None else float(e0),
            None if s.get("tol") is None else float(s["tol"]),
            int(s.get("maxit", ge.MAXIT)),
            None if s.get("gap_edge") is None else float(s["gap_edge"]),
        )
        if cfg.solver.tol is not None and not cfg.solver.tol > 0:
            raise InvalidConfig("solver.tol must be > 0")
        if cfg.solver.maxit < 1:
            raise InvalidConfig("solver.maxit must be >= 1")

        if mode == "scan":
            sc = _req(raw, "scan", "config")
            cfg.scan = ScanConfig(float(_req(sc, "e_min", "scan")), float(_req(sc, "e_max", "scan")),
                                  int(_req(sc, "n_points", "scan")), int(_req(sc, "kmax", "scan")))
            if cfg.scan.n_points < 1 or cfg.scan.kmax < 1 or not cfg.scan.e_min <= cfg.scan.e_max:
                raise InvalidConfig("bad scan section")
        if mode == "bench":
            bc = _req(raw, "bench", "config")
            gap = _req(bc, "gap", "bench")
            if len(gap) != 2:
                raise InvalidConfig("bench.gap must be [lo, hi]")
            cfg.bench = BenchConfig([int(x) for x in _req(bc, "sizes", "bench")],
                                    (float(gap[0]), float(gap[1])), int(_req(bc, "k_max", "bench")))

        out = raw.get("output", {})
        cfg.out_dir = Path(out_override or out.get("dir", "."))
        formats = tuple(out.get("formats", ["csv", "json"]))
        if not set(formats) <= {"csv", "json"}:
            raise InvalidConfig("output.formats must be a subset of {csv, json}")
        cfg.formats = formats
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidConfig):
            raise
        raise InvalidConfig(str(exc)) from None
    return cfg


def build_operator(cfg: RunConfig) -> ge.BlockOperator:
    if cfg.mode == "toy" or cfg.channel is None:
        return ge.toy_laplacian_block(cfg.toy["n"], cfg.toy["length"])
    return dr.assemble(cfg.channel)


def oracle_value(cfg: RunConfig, k: int) -> float | None:
    if cfg.mode == "toy" or cfg.channel is None:
        n, length = cfg.toy["n"], cfg.toy["length"]
        if k > n:
            return None
        h = length / (n + 1)
        return 4.0 / h**2 * math.sin(k * math.pi / (2.0 * (n + 1))) ** 2
    nu = dr.oracle_nu(cfg.channel)
    if nu is None:
        return None
    try:
        return dr.exact_level(nu, cfg.channel.kappa, k)
    except GapSolveError:
        return None


def fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def solve_targets(cfg: RunConfig, op: ge.BlockOperator) -> list[ge.SolveTrace]:
    s = cfg.solver
    return [ge.minmax_iterate(op, k, E0=s.e0, tol=s.tol, maxit=s.maxit, gap_edge=s.gap_edge)
            for k in cfg.targets]


def result_rows(cfg: RunConfig, traces: Sequence[ge.SolveTrace]) -> list[list[str]]:
    rows = []
    for tr in traces:
        exact = oracle_value(cfg, tr.k)
        err = None if exact is None else abs(tr.lam - exact)
        rows.append([fmt(tr.k), fmt(tr.lam), fmt(exact), fmt(err), fmt(tr.iterations),
                     fmt(tr.residual), fmt(tr.multiplicity)])
    return rows


def emit_scan(op: ge.BlockOperator, e_grid: Sequence[float], kmax: int) -> list[list[float | None]]:
    """Rows ``[E, l_1(E), ..., l_kmax(E)]``; levels are ``None`` where ``E <= lambda0``."""
    lam0 = ge.lambda0(op)
    floor = lam0 + ge.GAP_EPS * op.scale
    rows = []
    for E in e_grid:
        E = float(E)
        if E <= floor:
            rows.append([E] + [None] * kmax)
        else:
            rows.append([E] + [float(x) for x in ge.levels(op, E, kmax)])
    return rows


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_json(path: Path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, allow_nan=True)
        fh.write("\n")


def execute(cfg: RunConfig, raw: dict | None = None) -> int:
    """Run a parsed config, writing outputs into ``cfg.out_dir``. Returns the exit code."""
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    code = 0
    if cfg.mode in ("solve", "toy"):
        op = build_operator(cfg)
        traces = solve_targets(cfg, op)
        if "csv" in cfg.formats:
            _write_csv(out / "results.csv", RESULT_HEADER, result_rows(cfg, traces))
        if "json" in cfg.formats:
            _write_json(out / "trace.json", {"config": raw, "traces": [t.to_dict() for t in traces]})
        if not all(t.converged for t in traces):
            log.error("some targets did not converge")
            code = 4
    elif cfg.mode == "scan":
        op = build_operator(cfg)
        sc = cfg.scan
        grid = np.linspace(sc.e_min, sc.e_max, sc.n_points)
        kmax = min(sc.kmax, op.n_plus)
        rows = emit_scan(op, grid, kmax)
        header = ["E"] + [f"l{k}" for k in range(1, kmax + 1)]
        _write_csv(out / "scan.csv", header, [[fmt(x) for x in r] for r in rows])
    elif cfg.mode == "bench":
        b = cfg.bench
        rep = pb.pollution_report(cfg.channel, b.sizes, b.gap, b.k_max)
        _write_json(out / "pollution.json", rep.to_dict())
    return code


def replay(trace_path: str | Path, k: int) -> float:
    """Re-run target ``k`` from a ``trace.json`` (its embedded config and first iterate)."""
    data = json.loads(Path(trace_path).read_text())
    cfg = parse_config(data["config"])
    tr = next(t for t in data["traces"] if t["k"] == k)
    op = build_operator(cfg)
    s = cfg.solver
    return ge.minmax_iterate(op, k, E0=tr["iterates"][0]["E"], tol=s.tol, maxit=s.maxit,
                             gap_edge=s.gap_edge).lam


def run(config_path: str | Path, out: str | None = None) -> int:
    try:
        raw = json.loads(Path(config_path).read_text())
        cfg = parse_config(raw, out)
    except (OSError, json.JSONDecodeError, InvalidConfig) as exc:
        print(f"gapsolve: config error: {exc}", file=sys.stderr)
        return 2
    try:
        return execute(cfg, raw)
    except (NoGap, ShiftBelowLambda0) as exc:
        print(f"gapsolve: solver failure: {exc}", file=sys.stderr)
        return 3
    except InvalidConfig as exc:
        print(f"gapsolve: config error: {exc}", file=sys.stderr)
        return 2
    except (GapSolveError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"gapsolve: numerical failure: {exc}", file=sys.stderr)
        return 4


def main(argv: Sequence[str] | None = None) -> int:
    p = argparse.ArgumentParser(prog="gapsolve", description="Eigenvalues in spectral gaps via min-max levels")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a JSON configuration")
    r.add_argument("--config", required=True, help="path to the JSON config")
    r.add_argument("--out", default=None, help="output directory (overrides output.dir)")
    r.add_argument("-v", "--verbose", action="store_true")
    args = p.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return run(args.config, args.out)


if __name__ == "__main__":
    sys.exit(main())
