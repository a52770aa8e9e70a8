"""Command-line front end: ``minimize``, ``denoise``, ``certify`` and ``sweep``.

Settings come from built-in defaults, then an optional flat ``key = value`` file
(``--config``), then command-line flags; later sources win.  All outputs of a run
are computed before anything is written, and every file is written to a temporary
name and renamed into place.

Exit codes::

    0   success (certified gap within tolerance)
    1   certificate above tolerance (certify) or uncertified dual point
    2   iteration or evaluation budget exhausted before the tolerance was met
    64  malformed configuration or command line (nothing is written)
    65  input files with mismatched block sizes
    70  oracle or internal numerical failure
    73  output directory cannot be created or written
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import platform
import sys
import tempfile
from pathlib import Path
from typing import Optional

import numpy as np
import scipy

from . import __version__
from .duality import GapReport, certify_gap
from .domain import ProductDomain
from .errors import (BudgetExceededError, MonotonicityError, NonFiniteValueError,
                     ShapeMismatchError, SweepMonotonicityError)
from .extension import greedy_vertex
from .functions import (EXAMPLES, FIGURE1_K51_MINIMUM, UnknownExampleError, coupling,
                        denoise, figure1, make_example, modular, random_submodular)
from .plots import gap_svg, signal_svg
from .solvers import (SeparableQuadratic, SolverConfig, minimize_frankwolfe,
                      minimize_subgradient, parametric_sweep)
from .vectors import DualPoint, Ordering

EXIT_OK, EXIT_GAP, EXIT_BUDGET = 0, 1, 2
EXIT_USAGE, EXIT_DATAERR, EXIT_SOFTWARE, EXIT_CANTCREAT = 64, 65, 70, 73

ENV_OUT = "PRODSUBMOD_OUT"
SOLVER_NAMES = ("subgrad", "fw", "pfw")
SWEEP_MAX_POINTS = 200_000

# denoising settings with no published value; echoed in the report
DENOISE_DEFAULTS = {"n": 50, "k": 50, "alpha": 0.125, "lambda": 0.25, "mu": 2.0,
                    "sigma": 0.2, "iters": 1000, "tol": 0.0}
PLATEAUS = ((0.1, 0.35, 0.9), (0.45, 0.65, -0.8), (0.75, 0.9, 0.7))


class ConfigError(Exception):
    pass


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _solvers(text) -> list:
    items = text if isinstance(text, list) else [text]
    out = []
    for item in items:
        out.extend(s.strip() for s in str(item).split(",") if s.strip())
    if not out:
        raise ValueError("no solver given")
    bad = [s for s in out if s not in SOLVER_NAMES]
    if bad:
        raise ValueError(f"unknown solver(s) {bad}; choose from {SOLVER_NAMES}")
    return list(dict.fromkeys(out))


KEYS = {
    "example": str, "k": int, "n": int, "solver": _solvers, "iters": int, "tol": float,
    "seed": int, "alpha": float, "lambda": float, "mu": float, "sigma": float, "out": str,
    "budget": int, "step": str, "precondition": _bool, "timing": _bool, "phi": str,
    "rho": str, "w": str, "tmin": float, "tmax": float, "steps": int,
}


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_").lstrip("_")
        if key not in KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        raw[key] = value
    return raw


def _convert(raw: dict) -> dict:
    out = {}
    for key, value in raw.items():
        try:
            out[key] = KEYS[key](value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from None
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    S = argparse.SUPPRESS
    common.add_argument("--config", default=S, help="flat key = value settings file")
    common.add_argument("--example", default=S, help=f"one of {', '.join(EXAMPLES)}")
    common.add_argument("--k", type=str, default=S, help="grid points per variable")
    common.add_argument("--n", type=str, default=S, help="number of variables")
    common.add_argument("--solver", action="append", default=S,
                        help="subgrad, fw (classic Frank-Wolfe) or pfw (pairwise); repeatable")
    common.add_argument("--iters", default=S, help="iteration cap")
    common.add_argument("--tol", default=S, help="gap tolerance")
    common.add_argument("--seed", default=S)
    common.add_argument("--budget", default=S, help="oracle evaluation budget")
    common.add_argument("--step", default=S, help="subgradient step rule: polyak, fixed, decaying")
    common.add_argument("--precondition", default=S, help="block preconditioning (true/false)")
    common.add_argument("--phi", default=S, help="coupling potential: square, abs, huber")
    common.add_argument("--out", default=S, help=f"output directory (default ${ENV_OUT} or ./out)")
    common.add_argument("--timing", action="store_const", const="true", default=S,
                        help="record wall-clock times (outputs are then not reproducible)")

    parser = _Parser(prog="prodsubmod", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("minimize", parents=[common], help="minimize an example function")
    den = sub.add_parser("denoise", parents=[common], help="1-D signal denoising experiment")
    for flag in ("alpha", "lambda", "mu", "sigma"):
        den.add_argument(f"--{flag}", dest=flag, default=S)
    cert = sub.add_parser("certify", parents=[common], help="check a (rho, w) certificate")
    cert.add_argument("--rho", default=S, help="rho.csv from a previous run")
    cert.add_argument("--w", default=S, help="w.json (with provenance) or a raw w.csv")
    sw = sub.add_parser("sweep", parents=[common], help="threshold sweep of the prox problem")
    sw.add_argument("--tmin", default=S)
    sw.add_argument("--tmax", default=S)
    sw.add_argument("--steps", default=S)
    return parser


COMMAND_DEFAULTS = {
    "minimize": {"example": "figure1", "solver": ["subgrad"], "iters": 5000, "tol": 1e-6},
    "denoise": dict(DENOISE_DEFAULTS, example="denoise", solver=list(SOLVER_NAMES)),
    "certify": {"example": "figure1", "tol": 1e-6},
    "sweep": {"example": "figure1", "k": 21, "tmin": -3.0, "tmax": 3.0, "steps": 61},
}
SHARED_DEFAULTS = {"n": 2, "seed": 0, "budget": 10**9, "step": "polyak",
                   "precondition": False, "timing": False, "phi": "square"}


def resolve_config(argv) -> dict:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    cfg = dict(SHARED_DEFAULTS)
    cfg.update(COMMAND_DEFAULTS[command])
    if "config" in args:
        cfg.update(_convert(read_config(args.pop("config"))))
    cfg.update(_convert(args))
    cfg.setdefault("k", 51 if cfg["example"] == "figure1" else 5)
    cfg.setdefault("out", os.environ.get(ENV_OUT) or "out")
    cfg["command"] = command
    _validate(cfg)
    return cfg


def _validate(cfg: dict) -> None:
    if cfg["example"] not in EXAMPLES:
        raise ConfigError(f"unknown example {cfg['example']!r}; choose from {EXAMPLES}")
    if cfg["k"] < 2 or cfg["n"] < 1:
        raise ConfigError("need k >= 2 and n >= 1")
    if cfg.get("iters", 1) < 1 or cfg["budget"] < 1:
        raise ConfigError("iters and budget must be positive")
    if cfg.get("tol", 0.0) < 0:
        raise ConfigError("tol must be nonnegative")
    if cfg["step"] not in ("polyak", "fixed", "decaying") or cfg["step"] == "fixed":
        raise ConfigError("step must be polyak or decaying on the command line")
    for key in ("lambda", "mu", "sigma"):
        if cfg.get(key, 0.0) < 0:
            raise ConfigError(f"{key} must be nonnegative")
    if cfg.get("alpha", 1.0) <= 0:
        raise ConfigError("alpha must be positive")
    if cfg["command"] == "certify" and ("rho" not in cfg or "w" not in cfg):
        raise ConfigError("certify needs --rho and --w")
    if cfg["command"] == "sweep" and (cfg["steps"] < 2 or cfg["tmax"] <= cfg["tmin"]):
        raise ConfigError("sweep needs steps >= 2 and tmax > tmin")


# -- instances -------------------------------------------------------------------

def make_signal(n: int, sigma: float, seed: int):
    """Sparse piecewise-constant signal (three plateaus on a zero background) plus noise."""
    clean = np.zeros(n)
    for a, b, v in PLATEAUS:
        clean[int(a * n):int(b * n)] = v
    rng = np.random.default_rng(seed)
    return clean, clean + sigma * rng.standard_normal(n)


def build_instance(cfg: dict):
    """``(oracle, domain, extras)`` for the configured example."""
    name, n, k, seed = cfg["example"], cfg["n"], cfg["k"], cfg["seed"]
    extras = {}
    try:
        if name == "figure1":
            oracle, domain = figure1(k)
        elif name == "modular":
            coef = np.random.default_rng(seed).standard_normal(n)
            oracle, domain = modular(coef, k)
        elif name == "coupling":
            oracle, domain = coupling(n, k, phi=cfg["phi"], unary_scale=1.0, seed=seed)
        elif name == "random":
            oracle, domain = random_submodular(n, k, seed)
        elif name == "denoise":
            clean, z = make_signal(n, cfg.get("sigma", DENOISE_DEFAULTS["sigma"]), seed)
            oracle, domain = denoise(z, lam=cfg.get("lambda", DENOISE_DEFAULTS["lambda"]),
                                     mu=cfg.get("mu", DENOISE_DEFAULTS["mu"]),
                                     alpha=cfg.get("alpha", DENOISE_DEFAULTS["alpha"]), k=k)
            extras = {"clean": clean, "z": z}
        else:
            oracle, domain = make_example(name, {"n": n, "k": k, "seed": seed})
    except (ValueError, UnknownExampleError, BudgetExceededError) as exc:
        raise ConfigError(f"cannot build example {name!r}: {exc}") from None
    return oracle, domain, extras


def solver_config(cfg: dict, name: str) -> SolverConfig:
    return SolverConfig(max_iter=cfg["iters"], tol=cfg["tol"], step_rule=cfg["step"],
                        precondition=cfg["precondition"], seed=cfg["seed"],
                        eval_budget=cfg["budget"],
                        fw_variant="classic" if name == "fw" else "pairwise")


def run_solver(name: str, oracle, cfg: dict):
    oracle.reset_counter()
    if name == "subgrad":
        return minimize_subgradient(oracle, solver_config(cfg, name))
    return minimize_frankwolfe(oracle, solver_config(cfg, name))


# -- serialization ---------------------------------------------------------------

def _csv(rows, header) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def rho_csv(domain: ProductDomain, flat) -> str:
    """Rows ``block, index, value`` with 0-based blocks and 1-based levels."""
    rows = [(int(domain.block_of[e]), int(domain.level_of[e]), repr(float(v)))
            for e, v in enumerate(flat)]
    return _csv(rows, ("block", "index", "value"))


def solution_csv(oracle, point) -> str:
    """One row per variable: grid index, real coordinate and the value ``H(point)``."""
    value = oracle(point)
    coords = oracle.domain.coordinates(np.asarray(point)[None, :])[0]
    rows = [(int(j), repr(float(c)), repr(value)) for j, c in zip(point, coords)]
    return _csv(rows, ("index", "coordinate", "value"))


def w_json(w: DualPoint) -> str:
    data = {
        "k": list(w.domain.k),
        "w": [float(v) for v in w.flat],
        "vertices": [{"weight": float(a), "order": [int(e) for e in o.entries]}
                     for a, o in (w.provenance or [])],
    }
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def read_rho(path, domain: ProductDomain) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    try:
        entries = sorted((int(r["block"]), int(r["index"]), float(r["value"])) for r in rows)
    except (KeyError, TypeError, ValueError) as exc:
        raise ShapeMismatchError(f"{path}: cannot parse block,index,value rows ({exc})") from None
    expected = [(int(b), int(j)) for b, j in zip(domain.block_of, domain.level_of)]
    if [(b, j) for b, j, _ in entries] != expected:
        raise ShapeMismatchError(f"{path}: block sizes do not match k = {list(domain.k)}")
    return np.array([v for _, _, v in entries])


def read_w(path, oracle) -> DualPoint:
    """Dual point from ``w.json`` (provenance recomputed from the orderings) or a raw CSV."""
    domain = oracle.domain
    if str(path).endswith(".json"):
        with open(path) as fh:
            data = json.load(fh)
        if list(data.get("k", [])) != list(domain.k):
            raise ShapeMismatchError(f"{path}: k = {data.get('k')} but domain has {list(domain.k)}")
        prov = []
        for vert in data.get("vertices", []):
            entries = np.asarray(vert["order"], dtype=np.int64)
            if sorted(entries.tolist()) != list(range(domain.r)):
                raise ShapeMismatchError(f"{path}: an ordering is not a permutation of the entries")
            order = Ordering(entries, domain.block_of[entries], domain.level_of[entries],
                             np.full(domain.r, np.nan))
            prov.append((float(vert["weight"]), order))
        if not prov:
            flat = np.asarray(data.get("w", []), dtype=float)
            if flat.shape != (domain.r,):
                raise ShapeMismatchError(f"{path}: w has the wrong length")
            return DualPoint(domain, flat, None)
        weights = np.array([a for a, _ in prov])
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
            raise ShapeMismatchError(f"{path}: vertex weights must be a probability vector")
        flat = sum(a * greedy_vertex(oracle, o) for a, o in prov)
        return DualPoint(domain, flat, prov)
    return DualPoint(domain, read_rho(path, domain), None)


def environment() -> dict:
    return {"python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__, "machine": platform.machine(),
            "system": platform.system(), "prodsubmod": __version__}


def gap_report(result, timing: bool) -> GapReport:
    last = result.log.last
    return GapReport(primal_best=last["primal"], dual_value=last["dual"], gap=last["gap"],
                     evals=last["evals"], wallclock_ms=last["ms"] if timing else 0.0,
                     best_point=result.point, certified=result.w.certified)


def _regression(cfg: dict, results: dict) -> dict:
    if cfg["example"] != "figure1" or cfg["k"] != 51:
        return {}
    ref = FIGURE1_K51_MINIMUM
    return {"figure1-k51": {
        "point": list(ref["point"]), "value": ref["value"],
        "matches": {name: bool(abs(r.value - ref["value"]) <= 1e-9) for name, r in results.items()},
    }}


def write_outputs(out: Path, files: dict) -> None:
    """Write ``{relative path: text}`` atomically (temporary file plus rename)."""
    try:
        for rel, text in files.items():
            path = out / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            try:
                with os.fdopen(fd, "w", newline="") as fh:
                    fh.write(text)
                os.replace(tmp, path)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
    except OSError as exc:
        raise OutputError(str(exc)) from exc


class OutputError(Exception):
    pass


def _solver_files(prefix: str, oracle, result, timing: bool) -> dict:
    return {
        f"{prefix}gaps.csv": result.log.to_csv(timing=timing),
        f"{prefix}rho.csv": rho_csv(oracle.domain, result.rho),
        f"{prefix}solution.csv": solution_csv(oracle, result.point),
        f"{prefix}w.json": w_json(result.w),
    }


def _report_text(cfg, results, timing, extra=None) -> str:
    report = {
        "command": cfg["command"],
        "config": {k: v for k, v in sorted(cfg.items()) if k not in ("out",)},
        "environment": environment(),
        "regression": _regression(cfg, results),
        "solvers": {name: dict(gap_report(r, timing).as_dict(), status=r.status,
                               iterations=len(r.log))
                    for name, r in results.items()},
    }
    report.update(extra or {})
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


# -- commands --------------------------------------------------------------------

def cmd_minimize(cfg: dict) -> int:
    oracle, _, _ = build_instance(cfg)
    results = {name: run_solver(name, oracle, cfg) for name in cfg["solver"]}
    timing = cfg["timing"]
    files = {}
    single = len(results) == 1
    for name, res in results.items():
        files.update(_solver_files("" if single else f"{name}/", oracle, res, timing))
    files["gaps.svg"] = gap_svg({n: r.log.gap for n, r in results.items()})
    files["report.json"] = _report_text(cfg, results, timing)
    write_outputs(Path(cfg["out"]), files)
    for name, res in results.items():
        print(f"{name}: value={res.value!r} gap={res.gap:.3e} status={res.status} "
              f"point={res.point.tolist()}")
    if all(r.status == "converged" for r in results.values()):
        return EXIT_OK
    return EXIT_BUDGET


def cmd_denoise(cfg: dict) -> int:
    oracle, domain, extras = build_instance(dict(cfg, example="denoise"))
    results = {name: run_solver(name, oracle, cfg) for name in cfg["solver"]}
    timing = cfg["timing"]
    files = {}
    signals = {}
    for name, res in results.items():
        files.update(_solver_files(f"{name}/", oracle, res, timing))
        signals[name] = domain.coordinates(np.asarray(res.point)[None, :])[0]
    rows = [[i, repr(float(extras["clean"][i])), repr(float(extras["z"][i]))]
            + [repr(float(signals[s][i])) for s in signals] for i in range(domain.n)]
    files["signal.csv"] = _csv(rows, ["index", "clean", "observed"] + list(signals))
    files["gaps.svg"] = gap_svg({n: r.log.gap for n, r in results.items()})
    files["signal.svg"] = signal_svg(extras["z"], signals, extras["clean"])
    non_paper = {k: cfg[k] for k in ("lambda", "mu", "sigma")}
    non_paper["plateaus"] = [list(p) for p in PLATEAUS]
    files["report.json"] = _report_text(cfg, results, timing,
                                        {"non_paper_defaults": non_paper})
    write_outputs(Path(cfg["out"]), files)
    for name, res in results.items():
        print(f"{name}: value={res.value!r} gap={res.gap:.3e} iterations={len(res.log)}")
    return EXIT_BUDGET if any(r.budget_exhausted for r in results.values()) else EXIT_OK


def cmd_certify(cfg: dict) -> int:
    oracle, domain, _ = build_instance(cfg)
    try:
        rho = read_rho(cfg["rho"], domain)
        w = read_w(cfg["w"], oracle)
    except OSError as exc:
        raise ConfigError(f"cannot read input: {exc}") from None
    report = certify_gap(oracle, rho, w)
    if not cfg["timing"]:
        report.wallclock_ms = 0.0
    print(json.dumps(report.as_dict(), indent=2, sort_keys=True))
    return EXIT_OK if report.certified and report.gap <= cfg["tol"] else EXIT_GAP


def cmd_sweep(cfg: dict) -> int:
    oracle, domain, _ = build_instance(cfg)
    if domain.size > SWEEP_MAX_POINTS:
        raise ConfigError(f"sweep enumerates the domain; {domain.size} points is too many")
    grid = np.linspace(cfg["tmin"], cfg["tmax"], cfg["steps"])
    res = parametric_sweep(oracle, SeparableQuadratic.unit(domain), grid)
    rows = [[repr(float(t))] + [int(v) for v in x] for t, x in zip(res.t_grid, res.points)]
    files = {"sweep.csv": _csv(rows, ["t"] + [f"x{i}" for i in range(domain.n)]),
             "rho.csv": rho_csv(domain, res.rho)}
    write_outputs(Path(cfg["out"]), files)
    print(f"sweep: {len(grid)} thresholds, {domain.r} entries reconstructed")
    return EXIT_OK


COMMANDS = {"minimize": cmd_minimize, "denoise": cmd_denoise, "certify": cmd_certify,
            "sweep": cmd_sweep}


def main(argv: Optional[list] = None) -> int:
    try:
        cfg = resolve_config(sys.argv[1:] if argv is None else argv)
        return COMMANDS[cfg["command"]](cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ShapeMismatchError as exc:
        print(f"shape mismatch: {exc}", file=sys.stderr)
        return EXIT_DATAERR
    except (NonFiniteValueError, MonotonicityError, SweepMonotonicityError) as exc:
        print(f"oracle error: {exc}", file=sys.stderr)
        return EXIT_SOFTWARE
    except OutputError as exc:
        print(f"cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_CANTCREAT


if __name__ == "__main__":
    sys.exit(main())
