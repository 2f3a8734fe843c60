"""Command-line front end: run experiments, emit CSV/JSON data files.

Subcommands: evolve, spectrum, modes, correlation, gap, quasicrystal,
oracle, sweep.  Outputs are deterministic (17-significant-digit floats,
LF endings, sorted JSON keys), so identical configs give byte-identical
files.  Exit codes: 0 success, 1 usage error, 2 numeric failure, 3 oracle
mismatch.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .evolve import (
    TimeSeries,
    analytic_sum,
    correlation_fN,
    eigensystem,
    observable_series,
    projected_init,
    projected_solution,
    ProjectedMode,
)
from .model import LmgParams, build_hamiltonian, ground_M, trial_localized_state
from .oracle import MAX_CORRELATION_N, OracleMismatchError, sector_vs_full_checks
from .spectra import (
    classify_mode,
    cut_and_project_sequence,
    find_peaks,
    intrinsic_frequencies,
    line_spectrum,
    periodogram,
    quasicrystal_h,
)
from .spinspace import build_sector, collective_operators
from .ssb import default_kick, gamma0_gap_scan, localize_ground_state, newman_alpha
from .tridiag import NumericError

SERIES_HEADER = "t,mx_exact,my_exact,mx_analytic,my_analytic"
SPECTRUM_HEADER = "freq_over_nu,magnitude"
CUT_PROJECT_LENGTH = 1000
ORACLE_TOLERANCE = 1e-9

_FLAG_KEYS = (
    "n", "h", "gamma", "g", "phi-n", "tmax", "samples", "cutoff-k",
    "kappa", "window", "threshold", "trial", "out", "format", "jobs", "run",
)


@dataclass
class RunConfig:
    command: str
    # empty n/h lists mean "not given"; commands fill their own defaults
    n: list[int] = field(default_factory=list)
    h: list[float] = field(default_factory=list)
    gamma: float = 1.0
    g: list[float] | None = None
    phi_n: float = 0.0
    tmax: float | None = None
    samples: int = 4096
    cutoff_k: int = 3
    kappa: float = 0.6180339887498949
    window: str = "hann"
    threshold: float | None = None
    trial: bool = False
    out: str = "."
    format: str = "csv"
    jobs: int | None = None
    run: str | None = None

    def single_n(self) -> int:
        if not self.n:
            return 100
        if len(self.n) != 1:
            raise ValueError("this subcommand takes exactly one --n value")
        return self.n[0]

    def single_h(self) -> float:
        if not self.h:
            return 0.716
        if len(self.h) != 1:
            raise ValueError("this subcommand takes exactly one --h value")
        return self.h[0]

    def peak_threshold(self) -> float:
        return 0.01 if self.threshold is None else self.threshold

    def kick_values(self, N: int) -> list[float]:
        return [default_kick(N)] if self.g is None else self.g


def _parse_int_list(text: str) -> list[int]:
    return [int(part) for part in str(text).split(",") if part != ""]


def _parse_float_list(text: str) -> list[float]:
    return [float(part) for part in str(text).split(",") if part != ""]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lmglab",
        description="Finite-size LMG symmetry-breaking dynamics laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("evolve", "evolve a localized state and write m_x, m_y time series"),
        ("spectrum", "time series plus periodogram, exact lines, and peaks"),
        ("modes", "mode classification table over an h grid"),
        ("correlation", "ground-state correlation function f_N(t)"),
        ("gap", "perturbative splittings and the gamma=0 gap scan"),
        ("quasicrystal", "h(kappa) table, two-tone waveform, symbol sequence"),
        ("oracle", "sector vs full 2^N comparisons (exit 3 on mismatch)"),
        ("sweep", "run a subcommand over an N x h grid in parallel"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--n", type=_parse_int_list, default=None)
        p.add_argument("--h", type=_parse_float_list, default=None)
        p.add_argument("--gamma", type=float, default=None)
        p.add_argument("--g", type=_parse_float_list, default=None)
        p.add_argument("--phi-n", dest="phi_n", type=float, default=None)
        p.add_argument("--tmax", type=float, default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--cutoff-k", dest="cutoff_k", type=int, default=None)
        p.add_argument("--kappa", type=float, default=None)
        p.add_argument("--window", choices=("hann", "none"), default=None)
        p.add_argument("--threshold", type=float, default=None)
        p.add_argument("--trial", action="store_const", const=True, default=None)
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--config", type=str, default=None)
        p.add_argument("--jobs", type=int, default=None)
        if name == "sweep":
            p.add_argument("--run", type=str, default=None)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command)
    file_values = {}
    if args.config is not None:
        with open(args.config, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        unknown = set(raw) - set(_FLAG_KEYS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        file_values = raw
    merged = {}
    for key in _FLAG_KEYS:
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            continue
        flag_value = getattr(args, attr)
        if flag_value is not None:
            merged[attr] = flag_value
        elif key in file_values:
            merged[attr] = file_values[key]
    if "n" in merged and not isinstance(merged["n"], list):
        merged["n"] = _parse_int_list(merged["n"])
    if "h" in merged and not isinstance(merged["h"], list):
        merged["h"] = _parse_float_list(merged["h"])
    if "g" in merged and not isinstance(merged["g"], list):
        merged["g"] = _parse_float_list(merged["g"])
    for attr, value in merged.items():
        setattr(cfg, attr, value)
    return cfg


def validate_config(cfg: RunConfig) -> None:
    if any(n < 1 for n in cfg.n):
        raise ValueError("N must be >= 1")
    if any(h < 0.0 for h in cfg.h):
        raise ValueError("h must be >= 0")
    if not 0.0 <= cfg.gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    if cfg.samples < 16:
        raise ValueError("samples must be >= 16")
    if cfg.cutoff_k < 0:
        raise ValueError("cutoff-k must be >= 0")
    if cfg.tmax is not None and cfg.tmax <= 0.0:
        raise ValueError("tmax must be positive")
    if cfg.window not in ("hann", "none"):
        raise ValueError("window must be hann or none")
    if cfg.format not in ("csv", "json"):
        raise ValueError("format must be csv or json")
    if cfg.jobs is not None and cfg.jobs < 1:
        raise ValueError("jobs must be >= 1")


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _write_table(path: str, header: str, rows) -> str:
    if path.endswith(".json"):
        columns = header.split(",")
        payload = {
            col: [_fmt(row[i]) for row in rows] for i, col in enumerate(columns)
        }
        _write_json(path, payload)
        return path
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def _write_json(path: str, payload) -> str:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _table_ext(cfg: RunConfig) -> str:
    return "json" if cfg.format == "json" else "csv"


def _time_grid(cfg: RunConfig, N: int) -> np.ndarray:
    t_max = cfg.tmax if cfg.tmax is not None else 40.0 * math.pi * N
    return np.arange(cfg.samples) * (t_max / cfg.samples)


def _prepare_state(cfg: RunConfig, N: int, h: float, g: float):
    """Localized state plus bookkeeping: (state, delta_e, label)."""
    params = LmgParams(N=N, h=h, gamma=cfg.gamma)
    if cfg.trial:
        trial = trial_localized_state(build_sector(N), h)
        return trial.state, trial.delta_e, "trial"
    localized = localize_ground_state(params, g=g, phi_n=cfg.phi_n)
    return localized.state, localized.delta_e, "kicked"


def _evolve_tables(cfg: RunConfig, N: int, h: float, g: float):
    sector = build_sector(N)
    ops = collective_operators(sector)
    params = LmgParams(N=N, h=h, gamma=cfg.gamma)
    state, delta_e, prep = _prepare_state(cfg, N, h, g)
    tgrid = _time_grid(cfg, N)
    eig0 = eigensystem(build_hamiltonian(params, sector))
    mx = observable_series(eig0, state, ops.sx, tgrid)
    my = observable_series(eig0, state, ops.sy, tgrid)
    modes = projected_init(state, sector, h)
    ax, ay = analytic_sum(modes, min(cfg.cutoff_k, N), tgrid)
    scale = 2.0 / N
    rows = np.column_stack(
        [
            tgrid,
            mx.values.real * scale,
            my.values.real * scale,
            ax.values.real * scale,
            ay.values.real * scale,
        ]
    )
    mx_series = TimeSeries(t=tgrid, values=mx.values * scale, label="mx")
    return rows, mx_series, delta_e, prep, eig0, state


def _base_summary(cfg: RunConfig, N: int, h: float, g: float) -> dict:
    freqs = intrinsic_frequencies(N, h) if h < 1.0 else None
    ground = ground_M(N, h)
    return {
        "n": N,
        "h": h,
        "gamma": cfg.gamma,
        "g": g,
        "m0": list(ground.levels) if ground.degenerate else ground.m0,
        "nu": 1.0 / N,
        "omega0": None if freqs is None else freqs.omega0,
        "mode": classify_mode(N, h).label if h < 1.0 else "symmetric",
        "delta_e": None,
        "peaks": [],
        "files": [],
    }


def cmd_evolve(cfg: RunConfig) -> dict:
    N, h = cfg.single_n(), cfg.single_h()
    g = cfg.kick_values(N)[0]
    rows, _, delta_e, prep, _, _ = _evolve_tables(cfg, N, h, g)
    path = os.path.join(cfg.out, f"series.{_table_ext(cfg)}")
    _write_table(path, SERIES_HEADER, rows)
    summary = _base_summary(cfg, N, h, g)
    summary["delta_e"] = delta_e
    summary["preparation"] = prep
    summary["files"] = [path]
    return summary


def cmd_spectrum(cfg: RunConfig) -> dict:
    N, h = cfg.single_n(), cfg.single_h()
    g = cfg.kick_values(N)[0]
    rows, mx_series, delta_e, prep, eig0, state = _evolve_tables(cfg, N, h, g)
    sector = build_sector(N)
    ops = collective_operators(sector)
    spec = periodogram(mx_series, N, window=cfg.window)
    peaks = find_peaks(spec, cfg.peak_threshold())
    lines = line_spectrum(eig0, state, ops.sx, threshold=1e-8 * N)
    ext = _table_ext(cfg)
    files = []
    files.append(
        _write_table(
            os.path.join(cfg.out, f"series.{ext}"), SERIES_HEADER, rows
        )
    )
    files.append(
        _write_table(
            os.path.join(cfg.out, f"spectrum.{ext}"),
            SPECTRUM_HEADER,
            np.column_stack([spec.freq_over_nu, spec.magnitudes]),
        )
    )
    files.append(
        _write_json(
            os.path.join(cfg.out, "spectrum_peaks.json"),
            {
                "peaks": [
                    {"freq_over_nu": p.freq_over_nu, "height": p.height}
                    for p in peaks
                ]
            },
        )
    )
    nu = 1.0 / N
    files.append(
        _write_table(
            os.path.join(cfg.out, f"lines.{ext}"),
            "freq_over_nu,weight_abs,weight_re,weight_im",
            [
                (f / nu, abs(w), w.real, w.imag)
                for f, w in zip(lines.frequencies, lines.weights)
            ],
        )
    )
    summary = _base_summary(cfg, N, h, g)
    summary["delta_e"] = delta_e
    summary["preparation"] = prep
    summary["peaks"] = [
        {"freq_over_nu": p.freq_over_nu, "height": p.height} for p in peaks
    ]
    summary["files"] = files
    return summary


def cmd_modes(cfg: RunConfig) -> dict:
    N = cfg.single_n()
    h_grid = cfg.h if cfg.h else [0.710, 0.716, 0.720]
    ext = _table_ext(cfg)
    files = []
    table_rows = []
    tgrid = _time_grid(cfg, N)
    for h in h_grid:
        mode = classify_mode(N, h)
        freqs = intrinsic_frequencies(N, h)
        table_rows.append(
            (h, N * h, freqs.m0, freqs.omega0, 1.0 if mode.degenerate else 0.0)
        )
        ideal = ProjectedMode(
            k=0, Mk=freqs.m0, nu=1.0 / N, omega_k=freqs.omega0,
            sx0=N / 2.0, sy0=0.0,
        )
        wx, wy = projected_solution(ideal, tgrid)
        files.append(
            _write_table(
                os.path.join(cfg.out, f"mode_h{h:.10g}.{ext}"),
                "t,mx_ideal,my_ideal",
                np.column_stack(
                    [tgrid, wx.values.real * 2.0 / N, wy.values.real * 2.0 / N]
                ),
            )
        )
    mode_table = os.path.join(cfg.out, f"modes.{ext}")
    _write_table(mode_table, "h,nh,m0,omega0,degenerate", table_rows)
    files.insert(0, mode_table)
    summary = _base_summary(cfg, N, h_grid[0], 0.0)
    summary["modes"] = [
        {"h": h, "mode": classify_mode(N, h).label} for h in h_grid
    ]
    summary["files"] = files
    return summary


def cmd_correlation(cfg: RunConfig) -> dict:
    N, h = cfg.single_n(), cfg.single_h()
    sector = build_sector(N)
    tgrid = _time_grid(cfg, N)
    result = correlation_fN(sector, h, tgrid)
    oracle_members = None
    if N <= MAX_CORRELATION_N:
        from .oracle import full_space_correlation

        oracle_members = full_space_correlation(N, h, tgrid)
    ext = _table_ext(cfg)
    files = []
    for idx, member in enumerate(result.members):
        cols = [
            tgrid,
            member.direct.values.real,
            member.direct.values.imag,
            member.closed_form.values.real,
            member.closed_form.values.imag,
        ]
        header = "t,fn_direct_re,fn_direct_im,fn_closed_re,fn_closed_im"
        if oracle_members is not None:
            cols.append(oracle_members[idx][1].values.real)
            cols.append(oracle_members[idx][1].values.imag)
            header += ",fn_oracle_re,fn_oracle_im"
        files.append(
            _write_table(
                os.path.join(cfg.out, f"correlation_m{member.m0:.10g}.{ext}"),
                header,
                np.column_stack(cols),
            )
        )
    summary = _base_summary(cfg, N, h, 0.0)
    summary["frequencies"] = [
        list(member.frequencies) for member in result.members
    ]
    summary["files"] = files
    return summary


def cmd_gap(cfg: RunConfig) -> dict:
    # first --n value drives the degenerate-PT part; the list drives the scan
    N = cfg.n[0] if cfg.n else 100
    h = cfg.single_h()
    ext = _table_ext(cfg)
    files = []
    summary = _base_summary(cfg, N, h, 0.0)

    ground = ground_M(N, h)
    if ground.degenerate:
        from .ssb import degenerate_pt_gap
        from .spinspace import build_sector as _bs

        sector = _bs(N)
        kicks = cfg.g if cfg.g is not None else [1e-6, 1e-5, 1e-4]
        rows = []
        for g in kicks:
            pt = degenerate_pt_gap(sector, h, g)
            params = LmgParams(N=N, h=h, gamma=cfg.gamma)
            w = eigensystem(build_hamiltonian(params, sector, g=g)).energies
            rows.append((g, float(w[1] - w[0]), pt.splitting))
        files.append(
            _write_table(
                os.path.join(cfg.out, f"gap_pt.{ext}"),
                "g,splitting_numeric,splitting_pt",
                rows,
            )
        )

    n_values = cfg.n if len(cfg.n) > 1 else list(range(20, 61, 4))
    scan = gamma0_gap_scan(n_values, h)
    rows = []
    for n_val, splitting in scan:
        rows.append((n_val, splitting, newman_alpha(n_val, h).gap))
    files.append(
        _write_table(
            os.path.join(cfg.out, f"gap_gamma0.{ext}"),
            "n,splitting,tunneling_gap_estimate",
            rows,
        )
    )
    resolvable = [(n_val, s) for n_val, s in scan if s > 1e-13]
    if len(resolvable) >= 3:
        ns = np.array([n_val for n_val, _ in resolvable], dtype=float)
        ss = np.array([s for _, s in resolvable])
        rate = -float(np.polyfit(ns, np.log(ss), 1)[0])
        summary["gamma0_fitted_rate"] = rate
    summary["c_h"] = -math.log(h) if h > 0 else None
    summary["files"] = files
    return summary


def cmd_quasicrystal(cfg: RunConfig) -> dict:
    N = cfg.single_n()
    kappa = cfg.kappa
    fields = quasicrystal_h(N, kappa)
    ext = _table_ext(cfg)
    files = []
    files.append(
        _write_table(
            os.path.join(cfg.out, f"quasicrystal_h.{ext}"),
            "index,h",
            list(enumerate(fields)),
        )
    )
    # two-tone waveform: the ground-mode component of an actual kicked run
    h_pick = cfg.h[0] if cfg.h else float(fields[len(fields) // 2])
    tgrid = _time_grid(cfg, N)
    params = LmgParams(N=N, h=h_pick, gamma=cfg.gamma)
    localized = localize_ground_state(
        params, g=cfg.kick_values(N)[0], phi_n=cfg.phi_n
    )
    sector = build_sector(N)
    ground_mode = projected_init(localized.state, sector, h_pick)[0]
    wx, wy = projected_solution(ground_mode, tgrid)
    files.append(
        _write_table(
            os.path.join(cfg.out, f"waveform.{ext}"),
            "t,mx_mode,my_mode",
            np.column_stack(
                [tgrid, wx.values.real * 2.0 / N, wy.values.real * 2.0 / N]
            ),
        )
    )
    word = cut_and_project_sequence(kappa, CUT_PROJECT_LENGTH)
    word_path = os.path.join(cfg.out, "cut_project.txt")
    with open(word_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(word + "\n")
    files.append(word_path)
    summary = _base_summary(cfg, N, h_pick, 0.0)
    summary["kappa"] = kappa
    summary["h_values"] = [float(v) for v in fields]
    summary["files"] = files
    return summary


def cmd_oracle(cfg: RunConfig) -> dict:
    tolerance = ORACLE_TOLERANCE if cfg.threshold is None else cfg.threshold
    n_values = cfg.n if cfg.n else [4, 6, 8]
    h_values = cfg.h if cfg.h else [0.3, 0.5, 0.7]
    rows = []
    worst = 0.0
    for n_val in n_values:
        for h_val in h_values:
            report = sector_vs_full_checks(n_val, h_val)
            worst = max(worst, report.worst())
            rows.append(
                (
                    n_val,
                    h_val,
                    report.ground_energy,
                    report.ground_sz,
                    report.correlation,
                    report.localized_mx,
                    report.worst(),
                )
            )
    path = _write_table(
        os.path.join(cfg.out, f"oracle.{_table_ext(cfg)}"),
        "n,h,ground_energy_dev,ground_sz_dev,correlation_dev,localized_mx_dev,worst",
        rows,
    )
    summary = _base_summary(cfg, n_values[0], h_values[0], 0.0)
    summary["worst_deviation"] = worst
    summary["tolerance"] = tolerance
    summary["files"] = [path]
    if worst > tolerance:
        _write_json(os.path.join(cfg.out, "summary.json"), summary)
        raise OracleMismatchError(
            f"sector vs full-space deviation {worst:.3e} exceeds {tolerance:.3e}"
        )
    return summary


_SWEEPABLE = (
    "evolve", "spectrum", "correlation", "gap", "quasicrystal", "modes", "oracle",
)


def _sweep_point(payload: dict) -> dict:
    cfg = RunConfig(**payload)
    os.makedirs(cfg.out, exist_ok=True)
    summary = _COMMANDS[cfg.command](cfg)
    _write_json(os.path.join(cfg.out, "summary.json"), summary)
    return summary


def cmd_sweep(cfg: RunConfig) -> dict:
    if cfg.run is None or cfg.run not in _SWEEPABLE:
        raise ValueError(f"--run must be one of {_SWEEPABLE}")
    if not cfg.n or not cfg.h:
        raise ValueError("sweep needs explicit --n and --h lists")
    jobs = cfg.jobs
    if jobs is None:
        env = os.environ.get("LMGLAB_JOBS")
        jobs = int(env) if env else (os.cpu_count() or 1)
    payloads = []
    for n_val in cfg.n:
        for h_val in cfg.h:
            point = replace(
                cfg,
                command=cfg.run,
                n=[n_val],
                h=[h_val],
                out=os.path.join(cfg.out, f"n{n_val}_h{h_val:.10g}"),
                run=None,
                jobs=None,
            )
            payloads.append(vars(point))
    if jobs == 1 or len(payloads) == 1:
        summaries = [_sweep_point(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            summaries = list(pool.map(_sweep_point, payloads))
    summary = {
        "command": cfg.run,
        "points": [
            {"n": s["n"], "h": s["h"], "files": s["files"]} for s in summaries
        ],
        "jobs": jobs,
        "files": [],
    }
    return summary


_COMMANDS = {
    "evolve": cmd_evolve,
    "spectrum": cmd_spectrum,
    "modes": cmd_modes,
    "correlation": cmd_correlation,
    "gap": cmd_gap,
    "quasicrystal": cmd_quasicrystal,
    "oracle": cmd_oracle,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        cfg = _config_from_args(args)
        validate_config(cfg)
        os.makedirs(cfg.out, exist_ok=True)
        summary = _COMMANDS[cfg.command](cfg)
        _write_json(os.path.join(cfg.out, "summary.json"), summary)
    except OracleMismatchError as exc:
        print(f"oracle mismatch: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
