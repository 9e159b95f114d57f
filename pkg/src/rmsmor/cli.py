"""Run configuration, artifact files and the ``rmsmor`` command line.

A run writes, for every method and order, a directory ``<method>/r<order>``
holding the reduced matrices (Matrix Market), ``sweep.csv`` with the full
and reduced responses on the metric grid, and ``errors.csv``.  The run
directory also gets ``summary.csv`` (one row per method and order) and
``manifest.json``.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import pathlib
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from rmsmor import __version__
from rmsmor.benchmark import Absorber, BenchmarkSpec, default_spec, generate_benchmark
from rmsmor.interpolation import (
    METHODS,
    averaged_basis,
    check_theorem1,
    greedy_select,
    lqo_irka,
    presample,
)
from rmsmor.metrics import h2_relerr, hinf_relerr, pointwise_relerr
from rmsmor.mmio import MatrixMarketError, load_matrix, load_vector, save_matrix
from rmsmor.projection import EmptyBasisError, ReducedModel
from rmsmor.system import InvalidSystemError, QuadraticOutputSystem, SecondOrderSystem, lift_second_order
from rmsmor.transfer import PencilError, eval_bivariate_tf, sweep

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "RMSMOR_OUTPUT_DIR"

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3

SWEEP_COLUMNS = ("omega_hz", "full_re", "full_im", "reduced_re", "reduced_im", "relerr")
ERROR_COLUMNS = ("method", "r", "rank", "h2_approx_relerr", "hinf_approx_relerr")
FIRST_ORDER_ROLES = ("E", "A", "b", "Q")
SECOND_ORDER_ROLES = ("M", "D", "K", "g", "C")

#: residual thresholds used by :func:`verify`
VERIFY_TOL = {"lagrange": 1e-6, "hermite": 1e-5, "bivariate": 1e-6, "replay": 1e-8, "metric": 1e-12}


class ConfigError(ValueError):
    """Invalid run configuration or missing input files."""


class ReductionError(RuntimeError):
    """Numerical failure inside a method, tagged with method and order."""

    def __init__(self, method: str, r: int, cause: Exception):
        self.method, self.r, self.cause = method, r, cause
        super().__init__(f"{method} at r={r}: {type(cause).__name__}: {cause}")


def _fmt(x: float) -> str:
    return f"{x:.17e}"


@dataclass
class RunConfig:
    """Everything that determines a run.

    ``system`` selects the source: ``{"kind": "benchmark", ...}`` with
    :func:`~rmsmor.benchmark.default_spec` keyword arguments (absorbers may
    also be listed explicitly), ``{"kind": "files", "E": path, ...}`` with
    either the first-order roles E/A/b/Q or the second-order roles
    M/D/K/g/C, or ``{"kind": "scalar"}`` for ``E = 1, A = -1, b = 1, Q = 1``.
    ``presample`` is ``(count, omega_low, omega_high)`` in rad/s and
    ``grid`` is ``(count, f_low, f_high)`` in Hz.
    """

    system: dict = field(default_factory=lambda: {"kind": "benchmark"})
    methods: tuple = METHODS
    orders: tuple = (25, 50, 75, 100)
    presample: tuple = (250, 1.0, 2 * np.pi * 251)
    grid: tuple = (500, 0.0, 250.0)
    deflation_tol: float = 1e-10
    irka_tol: float = 1e-6
    irka_max_iter: int = 100
    output_dir: str = "rmsmor-out"
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        self.methods = tuple(self.methods)
        self.orders = tuple(int(r) for r in self.orders)
        self.presample = tuple(self.presample)
        self.grid = tuple(self.grid)
        self.validate()

    def validate(self):
        if not self.methods:
            raise ConfigError("no methods given")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ConfigError(f"unknown method(s) {bad}; choose from {list(METHODS)}")
        if not self.orders or min(self.orders) < 1:
            raise ConfigError("orders must be positive")
        if any(b < a for a, b in zip(self.orders, self.orders[1:])):
            raise ConfigError("orders must be nondecreasing")
        for name, spec in (("presample", self.presample), ("grid", self.grid)):
            if len(spec) != 3 or int(spec[0]) < 1 or not spec[2] >= spec[1]:
                raise ConfigError(f"{name} must be (count >= 1, low, high >= low), got {spec}")
            if int(spec[0]) > 1 and spec[2] == spec[1]:
                raise ConfigError(f"{name} with several points needs high > low")
        if self.deflation_tol <= 0 or self.irka_tol <= 0 or self.irka_max_iter < 1:
            raise ConfigError("tolerances must be positive and irka_max_iter >= 1")
        kind = self.system.get("kind")
        if kind not in ("benchmark", "files", "scalar"):
            raise ConfigError(f"unknown system kind {kind!r}")
        if kind == "files":
            roles = set(self.system) - {"kind", "name"}
            if roles != set(FIRST_ORDER_ROLES) and roles != set(SECOND_ORDER_ROLES):
                raise ConfigError(
                    f"file roles must be exactly {'/'.join(FIRST_ORDER_ROLES)} or {'/'.join(SECOND_ORDER_ROLES)}, got {sorted(roles)}"
                )

    def presample_omegas(self) -> np.ndarray:
        count, lo, hi = self.presample
        return np.linspace(float(lo), float(hi), int(count))

    def grid_hz(self) -> np.ndarray:
        count, lo, hi = self.grid
        return np.linspace(float(lo), float(hi), int(count))

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["methods"], d["orders"] = list(self.methods), list(self.orders)
        d["presample"], d["grid"] = [float(x) for x in self.presample], [float(x) for x in self.grid]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        return cls(**d)


# system loading -------------------------------------------------------------


def benchmark_spec(params: dict) -> BenchmarkSpec:
    """:class:`BenchmarkSpec` from a ``{"kind": "benchmark", ...}`` dictionary."""
    kw = {k: v for k, v in params.items() if k not in ("kind",)}
    try:
        if "absorbers" in kw:
            kw["absorbers"] = tuple(Absorber(**a) for a in kw["absorbers"])
            for key in ("observed", "weights"):
                if kw.get(key) is not None:
                    kw[key] = tuple(kw[key])
            return BenchmarkSpec(**kw)
        return default_spec(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid benchmark parameters: {exc}") from None


def load_system(source: dict) -> QuadraticOutputSystem:
    """Build or read the system described by ``RunConfig.system``."""
    kind = source.get("kind")
    try:
        if kind == "scalar":
            return QuadraticOutputSystem(np.eye(1), -np.eye(1), np.ones(1), np.eye(1), name="scalar")
        if kind == "benchmark":
            spec = benchmark_spec(source)
            return lift_second_order(generate_benchmark(spec))
        if kind == "files":
            paths = {k: pathlib.Path(v) for k, v in source.items() if k not in ("kind", "name")}
            missing = [str(p) for p in paths.values() if not p.is_file()]
            if missing:
                raise ConfigError(f"missing system file(s): {missing}")
            name = source.get("name", "files")
            if set(paths) == set(FIRST_ORDER_ROLES):
                return QuadraticOutputSystem(
                    load_matrix(paths["E"]), load_matrix(paths["A"]), load_vector(paths["b"]),
                    load_matrix(paths["Q"]), name=name,
                )
            so = SecondOrderSystem(
                load_matrix(paths["M"]), load_matrix(paths["D"]), load_matrix(paths["K"]),
                load_vector(paths["g"]), load_matrix(paths["C"]), name=name,
            )
            return lift_second_order(so)
    except (MatrixMarketError, InvalidSystemError, OSError) as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown system kind {kind!r}")


# artifacts ------------------------------------------------------------------


def write_sweep_csv(path, grid, full, reduced) -> None:
    rel = pointwise_relerr(full, reduced)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(SWEEP_COLUMNS) + "\n")
        for f, h, hr, e in zip(grid, full, reduced, rel):
            fh.write(",".join(_fmt(x) for x in (f, h.real, h.imag, hr.real, hr.imag, e)) + "\n")


def read_sweep_csv(path):
    """``(grid, full, reduced)`` arrays from a sweep CSV."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or tuple(rows[0].keys()) != SWEEP_COLUMNS:
        raise ConfigError(f"{path}: not a sweep CSV with columns {SWEEP_COLUMNS}")
    col = {c: np.array([float(r[c]) for r in rows]) for c in SWEEP_COLUMNS}
    return col["omega_hz"], col["full_re"] + 1j * col["full_im"], col["reduced_re"] + 1j * col["reduced_im"]


def write_rom(directory: pathlib.Path, rom: ReducedModel) -> None:
    for nm in FIRST_ORDER_ROLES:
        save_matrix(directory / f"{nm}.mtx", getattr(rom, nm), comment=f"reduced {nm}, method {rom.method}, r = {rom.r}")


def read_rom(directory: pathlib.Path, method: str = "") -> ReducedModel:
    try:
        mats = {nm: load_matrix(directory / f"{nm}.mtx").toarray() for nm in ("E", "A", "Q")}
        b = load_vector(directory / "b.mtx")
    except (OSError, MatrixMarketError) as exc:
        raise ConfigError(f"cannot read reduced model in {directory}: {exc}") from None
    return ReducedModel(mats["E"], mats["A"], b, mats["Q"], method=method)


def _build(sys_, method, r, config, basis):
    if method == "irka":
        rom, state = lqo_irka(sys_, r, tol=config.irka_tol, max_iter=config.irka_max_iter,
                              basis_tol=config.deflation_tol)
        extra = {
            "converged": state.converged,
            "iterations": state.iterations,
            "shifts": [[float(s.real), float(s.imag)] for s in state.shifts],
            "pole_change_history": [float(c) for c in state.history],
        }
        return rom, extra
    petrov = method.endswith("vw")
    if method.startswith("greedy"):
        rom, trace = greedy_select(sys_, basis, r, petrov=petrov, tol=config.deflation_tol)
        extra = {
            "converged": True,
            "selected_omegas": [float(w) for w in trace.omegas],
            "max_errors": [float(e) for e in trace.max_errors],
        }
        return rom, extra
    rom = averaged_basis(sys_, basis, r, petrov=petrov, tol=config.deflation_tol)
    return rom, {"converged": True, "pivot_omegas": [float(w) for w in rom.info["pivot_omegas"]]}


def run(config: RunConfig) -> dict:
    """Execute ``config`` and write all artifacts; returns the manifest."""
    out = pathlib.Path(os.environ.get(OUTPUT_DIR_ENV) or config.output_dir)
    t_start = time.perf_counter()
    timings = {}

    t0 = time.perf_counter()
    sys_ = load_system(config.system)
    timings["load"] = time.perf_counter() - t0
    out.mkdir(parents=True, exist_ok=True)
    grid = config.grid_hz()
    t0 = time.perf_counter()
    full = sweep(sys_, grid, workers=config.workers)
    timings["full_sweep"] = time.perf_counter() - t0
    if full.failures:
        raise PencilError(2j * np.pi * full.failures[0][1], f"{len(full.failures)} metric grid point(s) singular")

    basis = None
    if any(m != "irka" for m in config.methods):
        t0 = time.perf_counter()
        with_w = any(m.endswith("vw") for m in config.methods)
        try:
            basis = presample(sys_, config.presample_omegas(), with_w=with_w, workers=config.workers)
        except PencilError as exc:
            raise ReductionError("presample", 0, exc) from exc
        timings["presample"] = time.perf_counter() - t0

    manifest = {
        "version": __version__,
        "config": config.to_dict(),
        "system": {"name": sys_.name, "n": sys_.n},
        "presample_dropped": [] if basis is None else [om for om, _ in basis.dropped],
        "runs": [],
        "timings": timings,
    }
    summary = []
    for method in config.methods:
        for r in config.orders:
            t0 = time.perf_counter()
            try:
                rom, extra = _build(sys_, method, r, config, basis)
            except (PencilError, EmptyBasisError, np.linalg.LinAlgError, ValueError) as exc:
                raise ReductionError(method, r, exc) from exc
            seconds = time.perf_counter() - t0
            reduced = rom.tf_imag(2 * np.pi * grid)
            h2, hinf = h2_relerr(full.values, reduced), hinf_relerr(full.values, reduced)
            d = out / method / f"r{r}"
            d.mkdir(parents=True, exist_ok=True)
            write_rom(d, rom)
            write_sweep_csv(d / "sweep.csv", grid, full.values, reduced)
            with open(d / "errors.csv", "w") as fh:
                fh.write(",".join(ERROR_COLUMNS) + "\n")
                fh.write(f"{method},{r},{rom.r},{_fmt(h2)},{_fmt(hinf)}\n")
            summary.append((method, r, rom.r, h2, hinf))
            manifest["runs"].append({
                "method": method, "r": r, "rank": rom.r, "dir": f"{method}/r{r}",
                "h2_approx_relerr": h2, "hinf_approx_relerr": hinf,
                "seconds": seconds, "warnings": list(rom.warnings), **extra,
            })
            logger.info("%s r=%d: h2 %.3e hinf %.3e (%.1fs)", method, r, h2, hinf, seconds)
    with open(out / "summary.csv", "w") as fh:
        fh.write(",".join(ERROR_COLUMNS) + "\n")
        for method, r, rank, h2, hinf in summary:
            fh.write(f"{method},{r},{rank},{_fmt(h2)},{_fmt(hinf)}\n")
    timings["total"] = time.perf_counter() - t_start
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest


# verification ---------------------------------------------------------------


def _check(name, residual, tol, **extra):
    residual = float(residual)
    return {"check": name, "residual": residual, "tol": tol, "pass": bool(np.isfinite(residual) and residual <= tol), **extra}


def verify(run_dir) -> dict:
    """Re-check a finished run directory.

    For every method and order: the stored reduced response reproduces
    from the stored matrices, the stored metrics reproduce from the sweep,
    greedy models interpolate at their selected points (Petrov-Galerkin
    ones also in the derivative) and IRKA models satisfy the bivariate
    interpolation conditions at their final shifts.  Returns a report with
    one entry per check and an overall ``pass``.
    """
    run_dir = pathlib.Path(run_dir)
    mpath = run_dir / "manifest.json"
    if not mpath.is_file():
        raise ConfigError(f"{mpath} not found")
    manifest = json.loads(mpath.read_text())
    config = RunConfig.from_dict(manifest["config"])
    sys_ = load_system(config.system)
    checks = []
    for entry in manifest["runs"]:
        method, r = entry["method"], entry["r"]
        tag = {"method": method, "r": r}
        d = run_dir / entry["dir"]
        rom = read_rom(d, method)
        grid, full, reduced = read_sweep_csv(d / "sweep.csv")
        replay = rom.tf_imag(2 * np.pi * grid)
        scale = max(np.max(np.abs(reduced)), np.finfo(float).tiny)
        checks.append(_check("reduced_sweep_replay", np.max(np.abs(replay - reduced)) / scale, VERIFY_TOL["replay"], **tag))
        with open(d / "errors.csv", newline="") as fh:
            row = next(csv.DictReader(fh))
        for key, fn in (("h2_approx_relerr", h2_relerr), ("hinf_approx_relerr", hinf_relerr)):
            stored, again = float(row[key]), fn(full, reduced)
            checks.append(_check(f"{key}_replay", abs(stored - again) / max(abs(again), 1e-300), VERIFY_TOL["metric"], **tag))
        if method.startswith("greedy"):
            rep = check_theorem1(sys_, rom, entry["selected_omegas"])
            checks.append(_check("lagrange", np.max(rep.value_relerr), VERIFY_TOL["lagrange"], **tag))
            if method.endswith("vw"):
                derr = np.abs(rep.dH - rep.dHr) / np.abs(rep.dH)
                checks.append(_check("hermite", np.max(derr), VERIFY_TOL["hermite"], **tag))
        if method == "irka":
            shifts = [complex(a, b) for a, b in entry["shifts"]]
            errs = []
            for s1 in shifts:
                for s2 in shifts:
                    h = eval_bivariate_tf(sys_, s1, s2)
                    errs.append(abs(h - eval_bivariate_tf(rom, s1, s2)) / max(abs(h), 1e-300))
            checks.append(_check("bivariate_lagrange", max(errs), VERIFY_TOL["bivariate"], **tag,
                                 converged=entry["converged"]))
    return {"run_dir": str(run_dir), "pass": all(c["pass"] for c in checks), "checks": checks}


# command line ---------------------------------------------------------------


def _csv_list(text, conv=str):
    return tuple(conv(t) for t in text.split(",") if t.strip())


def _add_system_args(p):
    g = p.add_argument_group("system source (default: synthetic benchmark)")
    g.add_argument("--config", help="JSON file with RunConfig fields; command-line flags override it")
    g.add_argument("--scalar", action="store_true", help="use the scalar system E=1, A=-1, b=1, Q=1")
    for role in FIRST_ORDER_ROLES + SECOND_ORDER_ROLES:
        g.add_argument(f"--{role}", metavar="PATH", help=f"Matrix Market file for {role}")
    _add_benchmark_args(g)


def _add_benchmark_args(g):
    g.add_argument("--n-chain", type=int, help="chain length of the benchmark")
    g.add_argument("--absorbers", type=int, help="number of 48 Hz absorbers")
    g.add_argument("--tuned-mode", type=int, help="chain mode placed at 48 Hz")
    g.add_argument("--alpha", type=float, help="Rayleigh mass coefficient")
    g.add_argument("--beta", type=float, help="Rayleigh stiffness coefficient")
    g.add_argument("--jitter", type=float, help="relative random perturbation of masses and springs")


def _benchmark_params(a) -> dict:
    params = {"kind": "benchmark"}
    for flag, key in (("n_chain", "n_chain"), ("absorbers", "n_absorbers"), ("tuned_mode", "tuned_mode"),
                      ("alpha", "alpha"), ("beta", "beta"), ("jitter", "jitter")):
        if getattr(a, flag, None) is not None:
            params[key] = getattr(a, flag)
    if getattr(a, "seed", None) is not None and params.get("jitter"):
        params["seed"] = a.seed
    return params


def _config_from_args(a) -> RunConfig:
    base = {}
    if a.config:
        try:
            base = json.loads(pathlib.Path(a.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {a.config}: {exc}") from None
    roles = {r: getattr(a, r) for r in FIRST_ORDER_ROLES + SECOND_ORDER_ROLES if getattr(a, r)}
    if a.scalar:
        base["system"] = {"kind": "scalar"}
    elif roles:
        base["system"] = {"kind": "files", **roles}
    elif "system" not in base or len(_benchmark_params(a)) > 1:
        base["system"] = {**base.get("system", {"kind": "benchmark"}), **_benchmark_params(a)}
    if getattr(a, "method", None):
        base["methods"] = METHODS if a.method == "all" else _csv_list(a.method)
    if getattr(a, "orders", None):
        base["orders"] = _csv_list(a.orders, int)
    for key in ("presample", "grid"):
        if getattr(a, key, None):
            base[key] = _csv_list(getattr(a, key), float)
    for key in ("deflation_tol", "irka_tol", "irka_max_iter", "seed", "workers"):
        if getattr(a, key, None) is not None:
            base[key] = getattr(a, key)
    if getattr(a, "out", None):
        base["output_dir"] = a.out
    return RunConfig.from_dict(base)


def _output_dir(a) -> pathlib.Path:
    d = pathlib.Path(os.environ.get(OUTPUT_DIR_ENV) or a.out or "rmsmor-out")
    d.mkdir(parents=True, exist_ok=True)
    return d


def cmd_generate(a) -> int:
    spec = benchmark_spec(_benchmark_params(a))
    so = generate_benchmark(spec)
    out = _output_dir(a)
    for role in SECOND_ORDER_ROLES:
        save_matrix(out / f"{role}.mtx", getattr(so, role), comment=f"chain benchmark {role}")
    print(json.dumps({"output_dir": str(out), "n_so": so.n_so, "n": 2 * so.n_so, "outputs": so.C.shape[0]}))
    return EXIT_OK


def cmd_reduce(a) -> int:
    config = _config_from_args(a)
    manifest = run(config)
    for e in manifest["runs"]:
        flag = "" if e["converged"] else "  (not converged)"
        print(f"{e['method']:>10} r={e['r']:<4d} h2-approx {e['h2_approx_relerr']:.3e}  "
              f"hinf-approx {e['hinf_approx_relerr']:.3e}{flag}")
    return EXIT_OK


def cmd_sweep(a) -> int:
    config = _config_from_args(a)
    sys_ = load_system(config.system)
    grid = config.grid_hz()
    res = sweep(sys_, grid, workers=config.workers)
    if a.rom:
        reduced = read_rom(pathlib.Path(a.rom)).tf_imag(2 * np.pi * grid)
    else:
        reduced = np.zeros_like(res.values)
    out = _output_dir(a)
    write_sweep_csv(out / "sweep.csv", grid, res.values, reduced)
    print(json.dumps({"sweep": str(out / "sweep.csv"), "failures": len(res.failures)}))
    return EXIT_NUMERICAL if res.failures else EXIT_OK


def cmd_metrics(a) -> int:
    grid, full, reduced = read_sweep_csv(a.sweep_csv)
    print(json.dumps({"points": int(grid.size), "h2_approx_relerr": h2_relerr(full, reduced),
                      "hinf_approx_relerr": hinf_relerr(full, reduced)}))
    return EXIT_OK


def cmd_verify(a) -> int:
    report = verify(a.run_dir)
    print(json.dumps(report, indent=2))
    return EXIT_OK if report["pass"] else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rmsmor", description="Interpolatory reduction of quadratic-output (RMS) systems.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write the synthetic chain benchmark as M/D/K/g/C files")
    _add_benchmark_args(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("reduce", help="build reduced models and write all artifacts")
    _add_system_args(p)
    p.add_argument("--method", help=f"comma list of {', '.join(METHODS)} or 'all'")
    p.add_argument("--orders", help="comma list of reduced orders")
    p.add_argument("--presample", help="count,omega_low,omega_high in rad/s")
    p.add_argument("--grid", help="count,f_low,f_high in Hz")
    p.add_argument("--deflation-tol", type=float)
    p.add_argument("--irka-tol", type=float)
    p.add_argument("--irka-max-iter", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("sweep", help="frequency sweep of the full model, optionally against a stored ROM")
    _add_system_args(p)
    p.add_argument("--grid", help="count,f_low,f_high in Hz")
    p.add_argument("--rom", help="directory holding E/A/b/Q.mtx of a reduced model")
    p.add_argument("--workers", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("metrics", help="error measures of a sweep CSV")
    p.add_argument("sweep_csv")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("verify", help="re-check the interpolation properties of a run directory")
    p.add_argument("run_dir")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(a.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        return a.func(a)
    except ConfigError as exc:
        print(f"rmsmor: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ReductionError, PencilError, EmptyBasisError, np.linalg.LinAlgError) as exc:
        print(f"rmsmor: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
