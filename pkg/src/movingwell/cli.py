"""Command-line front end.

Every subcommand resolves its flags (optionally merged over a JSON ``--config``
file) into a :class:`RunConfig`, validates it, then writes one table as CSV with
``#`` metadata lines or as a JSON object ``{"config", "summary", "rows"}``.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .acceptance import run_all
from .bessel import bessel_j1_zero
from .errors import ConfigurationError, DomainError, MovingWellError
from .mapped import expansion_parameter, first_order_amplitude
from .regularized import RegularizedWell, bound_levels, bound_overlap_sum, count_bound_states
from .sudden import overlap_amplitude, probability_deficit, total_probability_closed_form
from .tdse import evolve_lab, evolve_mapped
from .well import MotionLaw, Units, WellGeometry, eigen_energy

UNITS_NOTE = "natural units: lengths in b, energies in hbar^2/(m b^2) scaled by --hbar/--mass; T in hbar/E_1"


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"command": self.command, **self.params}

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        return cls(data.pop("command"), data)

    def __getattr__(self, name):
        if name == "params":
            raise AttributeError(name)
        try:
            return self.params[name]
        except KeyError:
            raise AttributeError(name) from None


@dataclass
class Table:
    columns: list
    rows: list
    summary: dict = field(default_factory=dict)
    ok: bool = True


# -- argument parsing --------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    # usage errors become one machine-readable stderr line like every other failure
    def error(self, message):
        raise ConfigurationError(message)

def _int_list(text) -> list[int]:
    """'3', '1-4' or '1,3,5' -> list of ints."""
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    if isinstance(text, int):
        return [text]
    out = []
    for part in str(text).split(","):
        if "-" in part.strip()[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file with default values for any flag")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o", default="-", help="output path ('-' for stdout)")
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--width", type=float, default=1.0, help="initial well width b")
    p.add_argument("--seed", type=int, default=0, help="recorded for reproducibility; no sampling is random")


def _evolution_flags(p, n_default="1"):
    p.add_argument("--n", default=n_default)
    p.add_argument("--law", choices=("linear", "table"), default="linear")
    p.add_argument("--alpha-final", type=float, default=0.5)
    p.add_argument("--T", type=float, default=1.0, help="duration in units of hbar/E_1")
    p.add_argument("--table", default=None, help="table law samples 't:alpha,...' (t in hbar/E_1)")
    p.add_argument("--grid", type=int, default=2048)
    p.add_argument("--dtau", type=float, default=None, help="mapped-frame step")
    p.add_argument("--dt", type=float, default=None, help="lab-frame step")
    p.add_argument("--kmax", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="movingwell", description="Quantum particle in a well with moving walls.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sudden", help="sudden-change transition matrix")
    _common(p)
    p.add_argument("--n", default="1-4", help="initial levels, e.g. 1 or 1-4")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--a", type=float, default=0.0, help="left edge of the final well")
    p.add_argument("--kmax", type=int, default=64)

    p = sub.add_parser("bessel", help="J_1 zeros and u_n - 1")
    _common(p)
    p.add_argument("--nmax", type=int, default=10)
    p.add_argument("--digits", type=int, default=None, help="also print u_n - 1 rounded to this many decimals")

    p = sub.add_parser("evolve", help="finite-time wall motion")
    _common(p)
    _evolution_flags(p)
    p.add_argument("--frames", choices=("mapped", "lab", "both"), default="mapped")
    p.add_argument("--V", type=float, default=1e5, help="wall height for the lab frame")
    p.add_argument("--series", default=None, help="path for the (t, alpha, tau, W_nn) time series")

    p = sub.add_parser("regularized", help="finite-wall sudden change")
    _common(p)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--V", type=float, nargs="+", default=[1e3, 1e4, 1e5, 1e6])
    p.add_argument("--levels", action="store_true", help="list the bound levels instead of the leakage sweep")

    p = sub.add_parser("perturb", help="first-order theory against the grid solver")
    _common(p)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--alpha-final", type=float, default=1.1)
    p.add_argument("--T", type=float, default=10.0, help="longest duration in units of hbar/E_1")
    p.add_argument("--halvings", type=int, default=3, help="number of durations T, T/2, T/4, ...")
    p.add_argument("--operator", choices=("dilation", "bessel"), default="dilation")
    p.add_argument("--grid", type=int, default=2048)

    p = sub.add_parser("sweep", help="cartesian product of runs over alpha, T and V")
    _common(p)
    p.add_argument("--run", choices=("sudden", "evolve", "regularized"), default="evolve")
    p.add_argument("--alpha", type=float, nargs="+", default=[0.5])
    p.add_argument("--T", type=float, nargs="+", default=[1.0])
    p.add_argument("--V", type=float, nargs="+", default=[1e5])
    p.add_argument("--n", default="1")
    p.add_argument("--kmax", type=int, default=None)
    p.add_argument("--grid", type=int, default=2048)
    p.add_argument("--frames", choices=("mapped", "lab", "both"), default="mapped")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--config", help=argparse.SUPPRESS)
    return parser


def resolve_config(argv) -> RunConfig:
    """Parse ``argv``; values from ``--config`` act as defaults that flags override."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ConfigurationError("config file must hold a JSON object")
        data = {k.replace("-", "_"): v for k, v in data.items()}
        data.pop("command", None)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
        sub.set_defaults(**data)
        args = parser.parse_args(argv)
    params = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    return RunConfig(args.command, params)


# -- shared helpers ----------------------------------------------------------------

def _units(cfg) -> Units:
    return Units(cfg.hbar, cfg.mass)


def _level_time(cfg) -> float:
    return cfg.hbar / eigen_energy(1, WellGeometry(0.0, cfg.width), _units(cfg))


def _law(cfg, T=None, alpha_final=None) -> MotionLaw:
    tau1 = _level_time(cfg)
    if cfg.params.get("law", "linear") == "table":
        if not cfg.table:
            raise ConfigurationError("--law table needs --table 't:alpha,...'")
        pairs = [tuple(float(v) for v in item.split(":")) for item in cfg.table.split(",")]
        return MotionLaw.table([(t * tau1, a) for t, a in pairs])
    T = cfg.T if T is None else T
    alpha_final = cfg.alpha_final if alpha_final is None else alpha_final
    return MotionLaw.linear(alpha_final, T * tau1)


def _num(x):
    """JSON/CSV-friendly scalar."""
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def render(table: Table, cfg: RunConfig, fmt: str) -> str:
    rows = [[_num(v) for v in row] for row in table.rows]
    summary = {k: _num(v) for k, v in table.summary.items()}
    if fmt == "json":
        payload = {"config": dict(sorted(cfg.to_dict().items())), "units": UNITS_NOTE, "summary": summary,
                   "rows": [dict(zip(table.columns, r)) for r in rows]}
        return json.dumps(payload, indent=1, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write(f"# movingwell {__version__}\n")
    buf.write(f"# config: {json.dumps(cfg.to_dict(), sort_keys=True)}\n")
    buf.write(f"# units: {UNITS_NOTE}\n")
    for k, v in summary.items():
        buf.write(f"# {k}: {v}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for r in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _write(text: str, path: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


# -- subcommands -------------------------------------------------------------------

def cmd_sudden(cfg: RunConfig) -> Table:
    ns = _int_list(cfg.n)
    if min(ns) < 1 or cfg.kmax < 1:
        raise DomainError("quantum numbers must be >= 1")
    gi = WellGeometry(0.0, cfg.width)
    gf = WellGeometry(cfg.a, cfg.alpha * cfg.width)
    ks = np.arange(1, cfg.kmax + 1)
    rows = []
    for n in ns:
        M = overlap_amplitude(n, ks, gi, gf)
        W = M**2
        total = float(W.sum())
        if cfg.a == 0.0:
            closed = total_probability_closed_form(n, cfg.alpha)
        else:
            closed = 1.0 - probability_deficit(n, gi, gf)
        deficit = probability_deficit(n, gi, gf)
        rows.extend([n, int(k), float(m), float(w), total, closed, deficit] for k, m, w in zip(ks, M, W))
    return Table(["n", "k", "M", "W", "row_total", "closed_form", "deficit"], rows)


def cmd_bessel(cfg: RunConfig) -> Table:
    if cfg.nmax < 1:
        raise DomainError("--nmax must be >= 1")
    rows, violations = [], 0
    for n in range(1, cfg.nmax + 1):
        zero = bessel_j1_zero(n)
        u1 = zero.u - 1.0
        bound = 1.0 / (4 * n)
        ok = u1 < bound
        violations += not ok
        row = [n, zero.z, u1, bound, ok]
        if cfg.digits is not None:
            row.append(f"{u1:.{cfg.digits}f}")
        rows.append(row)
    cols = ["n", "z_n", "u_minus_1", "bound", "within_bound"] + (["u_minus_1_rounded"] if cfg.digits is not None else [])
    return Table(cols, rows, {"bound_violations": violations}, ok=violations == 0)


def cmd_evolve(cfg: RunConfig) -> Table:
    units = _units(cfg)
    geom = WellGeometry(0.0, cfg.width)
    law = _law(cfg)
    n = _int_list(cfg.n)[0]
    reports = {}
    if cfg.frames in ("mapped", "both"):
        reports["mapped"] = evolve_mapped(n, law, cfg.grid, cfg.dtau, units, geom, cfg.kmax)
    if cfg.frames in ("lab", "both"):
        reports["lab"] = evolve_lab(n, law, cfg.V, None, cfg.grid, cfg.dt, units, geom, cfg.kmax)
    k_max = max(r.W_table.size for r in reports.values())
    cols, summary = ["k"], {}
    for frame, rep in reports.items():
        cols.append(f"W_{frame}")
        summary[f"norm_drift_{frame}"] = rep.norm_drift
        summary[f"steps_{frame}"] = rep.step_count
        summary[f"residual_{frame}"] = rep.residual
        if rep.continuum is not None:
            summary["continuum_lab"] = rep.continuum
    if len(reports) == 2:
        cols.append("relative_difference")
    rows = []
    for k in range(1, k_max + 1):
        ws = [float(r.W_table[k - 1]) if k <= r.W_table.size else 0.0 for r in reports.values()]
        row = [k, *ws]
        if len(ws) == 2:
            row.append(abs(ws[0] - ws[1]) / ws[0] if ws[0] > 0 else math.inf)
        rows.append(row)
    if cfg.series:
        series_rows = []
        for frame, rep in reports.items():
            s = rep.series
            series_rows.extend([frame, *vals] for vals in zip(s["t"], s["alpha"], s["tau"], s["W_nn"]))
        _write(render(Table(["frame", "t", "alpha", "tau", "W_nn"], series_rows), cfg, cfg.format), cfg.series)
    return Table(cols, rows, summary)


def cmd_regularized(cfg: RunConfig) -> Table:
    units = _units(cfg)
    wells = [(V, RegularizedWell(V, cfg.width, 0.0, units), RegularizedWell(V, cfg.alpha * cfg.width, 0.0, units))
             for V in cfg.V]
    if cfg.levels:
        rows = []
        for V, wi, _ in wells:
            for lev in bound_levels(wi):
                e_inf = eigen_energy(lev.n, wi.geometry, units)
                rows.append([V, lev.n, lev.energy, lev.xi, lev.energy / e_inf - 1.0])
        return Table(["V", "n", "energy", "xi", "relative_shift"], rows)
    closed_leak = 1.0 - total_probability_closed_form(cfg.n, cfg.alpha)
    rows = []
    for V, wi, wf in wells:
        s = bound_overlap_sum(cfg.n, wi, wf)
        xi = bound_levels(wi)[cfg.n - 1].xi
        rows.append([V, count_bound_states(wi), count_bound_states(wf), xi, s, 1.0 - s, closed_leak,
                     abs(1.0 - s - closed_leak)])
    return Table(["V", "bound_initial", "bound_final", "xi_n", "bound_overlap_sum", "leakage",
                  "closed_form_leakage", "deviation"], rows)


def cmd_perturb(cfg: RunConfig) -> Table:
    units = _units(cfg)
    if cfg.n == cfg.m:
        raise DomainError("--n and --m must differ")
    rows = []
    for j in range(cfg.halvings):
        T = cfg.T / 2**j
        law = _law(cfg, T=T)
        delta = expansion_parameter(cfg.m, cfg.n, 1.0, law.alpha_prime, cfg.width, units)
        exact = float(evolve_mapped(cfg.n, law, cfg.grid, None, units, WellGeometry(0.0, cfg.width),
                                    max(4 * max(cfg.n, cfg.m), 8)).W_table[cfg.m - 1])
        approx = abs(first_order_amplitude(cfg.n, cfg.m, law, units, cfg.width, cfg.operator)) ** 2
        rows.append([T, delta, approx, exact, abs(approx - exact) / exact])
    return Table(["T", "delta", "W_first_order", "W_exact", "relative_error"], rows)


def _sweep_point(args):
    command, params = args
    cfg = RunConfig(command, params)
    return HANDLERS[command](cfg)


def _point_config(cfg: RunConfig, alpha, T, V) -> RunConfig:
    base = {k: cfg.params[k] for k in ("format", "output", "hbar", "mass", "width", "seed")}
    base["output"] = "-"
    if cfg.run == "sudden":
        p = dict(base, n=cfg.n, alpha=alpha, a=0.0, kmax=cfg.kmax or 64)
    elif cfg.run == "regularized":
        p = dict(base, n=_int_list(cfg.n)[0], alpha=alpha, V=[V], levels=False)
    else:
        p = dict(base, n=cfg.n, law="linear", alpha_final=alpha, T=T, table=None, grid=cfg.grid,
                 dtau=None, dt=None, kmax=cfg.kmax, frames=cfg.frames, V=V, series=None)
    return RunConfig(cfg.run, p)


def cmd_sweep(cfg: RunConfig) -> tuple[Table, RunConfig]:
    points = list(itertools.product(cfg.alpha, cfg.T, cfg.V))
    configs = [_point_config(cfg, *pt) for pt in points]
    for c in configs:
        # fail on a bad point before any run starts
        if c.command == "evolve":
            _law(c)
        elif c.command == "regularized":
            RegularizedWell(c.V[0], c.width * c.alpha, 0.0, _units(c))
        elif not 0 < c.alpha:
            raise DomainError(f"alpha must be positive, got {c.alpha}")
    if len(configs) == 1:
        return HANDLERS[cfg.run](configs[0]), configs[0]
    jobs = [(c.command, c.params) for c in configs]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            tables = list(pool.map(_sweep_point, jobs))
    else:
        tables = [_sweep_point(j) for j in jobs]
    rows, ok = [], True
    for idx, ((alpha, T, V), t) in enumerate(zip(points, tables)):
        ok &= t.ok
        rows.extend([idx, alpha, T, V, *r] for r in t.rows)
    return Table(["point", "alpha", "T", "V", *tables[0].columns], rows, ok=ok), cfg


HANDLERS = {"sudden": cmd_sudden, "bessel": cmd_bessel, "evolve": cmd_evolve,
            "regularized": cmd_regularized, "perturb": cmd_perturb}


def cmd_selftest(cfg: RunConfig) -> int:
    results = run_all(lambda line: print(line, flush=True))
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return 0 if passed == len(results) else 1


def main(argv=None) -> int:
    try:
        cfg = resolve_config(argv)
        if cfg.command == "selftest":
            return cmd_selftest(cfg)
        if cfg.command == "sweep":
            table, out_cfg = cmd_sweep(cfg)
        else:
            table, out_cfg = HANDLERS[cfg.command](cfg), cfg
        _write(render(table, out_cfg, cfg.format), cfg.output)
        return 0 if table.ok else 1
    except (MovingWellError, ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {' '.join(str(exc).split())}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
