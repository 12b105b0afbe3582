"""Command-line scenario runner.

    ssclab steady --config scenario.json --out steady.csv

Every table is written as CSV with ``#``-prefixed metadata lines, plus a JSON
sidecar (``<out>.json``) holding the fully resolved config; the sidecar is
itself a valid config, so ``--config steady.csv.json`` reproduces the run.

Exit codes: 0 success, 1 validation failure, 2 config error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import math
import subprocess
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import equilibration as eq
from . import quad as q
from . import steady, tcl2, validation
from .spectral import BathSpec, WeakCouplingWarning, make_bath

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("steady", "trajectory", "equilibration", "strong-coupling", "max-coherence", "validate")
SWEEP_COLUMN = {"temperature": "T", "cutoff": "Omega", "ohmicity": "s"}


class ConfigError(ValueError):
    pass


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[list[float]]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError("ragged result table")

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.metadata.items():
            buf.write(f"# {k}: {json.dumps(v, sort_keys=True)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([repr(float(x)) for x in r])
        return buf.getvalue()


def load_schema() -> dict:
    return json.loads(resources.files("ssclab").joinpath("scenario.schema.json").read_text())


def _line_of(text: str, path) -> int | None:
    """Best-effort line number of a JSON path inside the config text."""
    pos = 0
    for key in path:
        if isinstance(key, int):
            continue
        i = text.find(json.dumps(key), pos)
        if i < 0:
            return None
        pos = i
    return text.count("\n", 0, pos) + 1


def _fill_defaults(node: dict, schema: dict, root: dict):
    if "$ref" in schema:
        schema = root["$defs"][schema["$ref"].split("/")[-1]]
    for key, sub in schema.get("properties", {}).items():
        if "$ref" in sub:
            sub = root["$defs"][sub["$ref"].split("/")[-1]]
        if key in node and isinstance(node[key], dict) and sub.get("type") == "object":
            _fill_defaults(node[key], sub, root)
        elif key not in node and "default" in sub:
            node[key] = sub["default"]


def parse_config(text: str | None, command: str) -> dict:
    """Validate a config text against the schema and return it with defaults filled in."""
    schema = load_schema()
    if text is None:
        cfg = {"schema_version": 1}
    else:
        try:
            cfg = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    errors = sorted(jsonschema.Draft202012Validator(schema).iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        msgs = []
        for e in errors:
            line = _line_of(text or "", list(e.absolute_path)) if text else None
            where = "/".join(str(p) for p in e.absolute_path) or "<root>"
            msgs.append(f"{'line ' + str(line) + ': ' if line else ''}{where}: {e.message}")
        raise ConfigError("\n".join(msgs))
    if cfg.get("command", command) != command:
        raise ConfigError(f"config is for '{cfg['command']}', not '{command}'")
    cfg = copy.deepcopy(cfg)
    cfg.pop("metadata", None)
    cfg["command"] = command
    for block in ("bath", "coupling", "quadrature", {"steady": "steady", "trajectory": "trajectory",
                                                     "equilibration": "equilibration",
                                                     "strong-coupling": "strong_coupling",
                                                     "max-coherence": "max_coherence",
                                                     "validate": "validate"}[command]):
        cfg.setdefault(block, {})
    _fill_defaults(cfg, schema, schema)
    if "second_bath" in cfg["coupling"]:
        _fill_defaults(cfg["coupling"]["second_bath"], schema["$defs"]["bath"], schema)
    return cfg


# config -> domain objects

def _bath(block: dict) -> BathSpec:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WeakCouplingWarning)
        return make_bath(block["lam"], block["cutoff"], block["ohmicity"], block["temperature"])


def _quad_cfg(cfg: dict) -> q.QuadConfig:
    return q.QuadConfig(**cfg["quadrature"])


def _scheme(cfg: dict):
    c = cfg["coupling"]
    second = _bath(c["second_bath"]) if "second_bath" in c else None
    return {
        "composite": lambda: tcl2.Composite(c["f1"], c["f2"]),
        "rwa": lambda: tcl2.RWAComposite(c["f1"], c["f2"]),
        "split": lambda: tcl2.SplitTwoBaths(c["f1"], c["f2"], second),
        "dephasing": lambda: tcl2.CompositePlusDephasing(c["f1"], c["f2"], c["f3"], second),
    }[c["scheme"]]()


def sweep_points(cfg: dict) -> tuple[str, list[float]]:
    sw = cfg.get("sweep")
    if sw is None:
        return "temperature", [float(cfg["bath"]["temperature"])]
    if "values" in sw:
        vals = [float(v) for v in sw["values"]]
    elif sw.get("spacing", "linear") == "log":
        if sw["start"] <= 0 or sw["stop"] <= 0:
            raise ConfigError("sweep: log spacing needs positive start and stop")
        vals = np.geomspace(sw["start"], sw["stop"], sw["num"]).tolist()
    else:
        vals = np.linspace(sw["start"], sw["stop"], sw["num"]).tolist()
    if sw["parameter"] in ("cutoff", "ohmicity") and min(vals) <= 0:
        raise ConfigError(f"sweep: {sw['parameter']} values must be positive")
    return sw["parameter"], vals


def _bath_at(cfg: dict, parameter: str, value: float) -> BathSpec:
    block = dict(cfg["bath"])
    block[parameter] = value
    return _bath(block)


def _map(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# runners

def run_steady(cfg: dict, threads: int = 1) -> ResultTable:
    par, vals = sweep_points(cfg)
    st, c = cfg["steady"], cfg["coupling"]
    omega0 = cfg["omega0"]
    qc = _quad_cfg(cfg)
    model = st["model"]

    def one(x):
        b = _bath_at(cfg, par, x)
        if st["method"] == "dynamical":
            r = steady.dynamical_steady_state(_scheme(cfg), b, omega0)
        else:
            co = steady.longtime_coeffs(model, b, omega0, qc)
            fn = steady.steady_state_model1 if model == 1 else steady.steady_state_model2
            r = fn(c["f1"], c["f2"], b, omega0, co)
        row = [x, *r.v, r.coherence, r.theta]
        if st["optimize_f2"]:
            row.append(steady.max_coherence_over_f2(model, c["f1"] or 1.0, b, omega0).f2_opt)
        return row

    cols = [SWEEP_COLUMN[par], "v1", "v2", "v3", "C", "theta"] + (["f2_opt"] if st["optimize_f2"] else [])
    return ResultTable(cols, _map(one, vals, threads))


def run_trajectory(cfg: dict, seed: int | None = None) -> ResultTable:
    tr = cfg["trajectory"]
    b = _bath(cfg["bath"])
    scheme = _scheme(cfg)
    omega0 = cfg["omega0"]
    if "v0" in tr:
        v0 = np.array(tr["v0"], dtype=float)
        if np.linalg.norm(v0) > 1 + 1e-12:
            raise ConfigError("trajectory/v0: Bloch vector norm exceeds 1")
    else:
        v0 = tcl2.random_bloch_vector(np.random.default_rng(seed)).as_array()
        tr["v0"] = v0.tolist()
    t_end = tr.get("t_end") or tcl2.default_horizon(scheme, b, omega0)
    tr["t_end"] = float(t_end)
    t_eval = np.linspace(0.0, t_end, tr["n_eval"])
    traj = tcl2.integrate_bloch(scheme, b, v0, (0.0, t_end), t_eval, omega0, tr.get("memory_time"))
    rows = [[t, *v] for t, v in zip(traj.times, traj.v)]
    return ResultTable(["t", "v1", "v2", "v3"], rows,
                       {"converged": traj.converged, "memory_window": traj.table_window, "max_norm": traj.max_norm})


def run_equilibration(cfg: dict, threads: int = 1) -> ResultTable:
    par, vals = sweep_points(cfg)
    c = cfg["coupling"]
    if c["scheme"] != "composite":
        raise ConfigError("equilibration: the Gibbs expansion is implemented for the composite scheme only")
    form = cfg["equilibration"]["form"]
    omega0, qc = cfg["omega0"], _quad_cfg(cfg)

    def one(x):
        b = _bath_at(cfg, par, x)
        if b.temperature <= 0:
            raise ConfigError("equilibration: temperature must be positive")
        v1 = eq.perturbative_v1(c["f1"], c["f2"], b, omega0, form=form, cfg=qc)
        v3, corr = eq.perturbative_v3(c["f1"], c["f2"], b, omega0, form=form, cfg=qc)
        C = abs(v1)
        return [x, v1, eq.perturbative_v2(), v3, corr, C, steady.deviation_angle(C, v3)]

    return ResultTable([SWEEP_COLUMN[par], "v1", "v2", "v3", "correction", "C", "theta"], _map(one, vals, threads))


def run_strong_coupling(cfg: dict, threads: int = 1) -> ResultTable:
    par, vals = sweep_points(cfg)
    if par != "temperature":
        raise ConfigError("strong-coupling: only temperature sweeps are supported")
    sc = cfg["strong_coupling"]
    omega0 = cfg["omega0"]
    sc.setdefault("omega1", omega0)
    model = eq.StrongCouplingModel(sc["kind"], omega0, sc["omega1"], sc["kappa1"], sc["kappa2"], sc["fock_cutoff"])
    if min(vals) <= 0:
        raise ConfigError("strong-coupling: temperatures must be positive")

    def one(T):
        r = eq.strong_coupling_sweep(model, [T], tol=sc["tolerance"])[0]
        return [r.temperature, r.coherence, r.v3, r.theta]

    return ResultTable(["T", "C", "v3", "theta"], _map(one, vals, threads))


def run_max_coherence(cfg: dict, threads: int = 1) -> ResultTable:
    par, vals = sweep_points(cfg)
    mc = cfg["max_coherence"]
    omega0, qc = cfg["omega0"], _quad_cfg(cfg)
    kw = {"numeric": mc["numeric"]}
    if "bounds" in mc:
        lo, hi = mc["bounds"]
        if not lo < hi:
            raise ConfigError("max_coherence/bounds: lower bound must be below the upper bound")
        kw["bounds"] = (lo, hi)

    def one(x):
        b = _bath_at(cfg, par, x)
        co = steady.longtime_coeffs(mc["model"], b, omega0, qc)
        opt = steady.max_coherence_over_f2(mc["model"], mc["f1"], b, omega0, coeffs=co, **kw)
        v3 = -math.tanh(omega0 / (2 * b.temperature)) if b.temperature > 0 else -1.0
        C = mc["f1"] * opt.c_max_over_f1
        return [x, opt.f2_opt, opt.c_max_over_f1, v3, steady.deviation_angle(C, v3)]

    return ResultTable([SWEEP_COLUMN[par], "f2_opt", "C_max_over_f1", "v3", "theta"], _map(one, vals, threads))


def run_validate(cfg: dict) -> dict:
    v = cfg["validate"]
    try:
        results = validation.run_checks(v.get("only"), v.get("tolerances"))
    except KeyError as exc:
        raise ConfigError(f"validate: {exc.args[0]}") from None
    return validation.report(results)


# plumbing

def _git_describe() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"], capture_output=True, text=True, timeout=5,
                             cwd=Path(__file__).resolve().parent)
        return out.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"


def _config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]


def _emit(table: ResultTable, cfg: dict, out: str | None, wall: float):
    meta = {"build": _git_describe(), "command": cfg["command"], "config_sha256": _config_hash(cfg),
            **table.metadata, "wall_time_s": round(wall, 3)}
    table.metadata = meta
    text = table.to_csv()
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).write_text(text)
    sidecar = dict(cfg, metadata=meta)
    Path(out + ".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ssclab", description="Steady-state coherence laboratory.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", metavar="PATH", help="JSON scenario (see schema/scenario.schema.json)")
        s.add_argument("--out", metavar="PATH", help="output CSV (report JSON for validate); stdout if omitted")
        s.add_argument("--threads", metavar="N", type=int, default=1, help="worker threads for sweeps")
        s.add_argument("--seed", metavar="U64", type=int, default=None, help="seed for random initial states")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        if args.seed is not None and not 0 <= args.seed < 2 ** 64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        text = None
        if args.config:
            try:
                text = Path(args.config).read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc}") from None
        cfg = parse_config(text, args.command)
        if args.command == "validate":
            rep = run_validate(cfg)
            for c in rep["checks"]:
                print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}: residual={c['residual']:.3e} "
                      f"tol={c['tolerance']:.1e}")
            if args.out:
                Path(args.out).write_text(json.dumps(rep, indent=2) + "\n")
            return EXIT_OK if rep["passed"] else EXIT_VALIDATION
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", WeakCouplingWarning)
            if args.command == "trajectory":
                table = run_trajectory(cfg, args.seed)
            else:
                runner = {"steady": run_steady, "equilibration": run_equilibration,
                          "strong-coupling": run_strong_coupling, "max-coherence": run_max_coherence}[args.command]
                table = runner(cfg, args.threads)
        if any(not math.isfinite(x) for r in table.rows for x in r):
            raise ArithmeticError("non-finite value in result table")
        _emit(table, cfg, args.out, time.perf_counter() - t0)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numeric error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # domain checks inside the library (e.g. T = 0 where beta is needed)
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
