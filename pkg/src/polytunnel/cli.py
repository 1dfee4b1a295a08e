"""
Command-line front end.

    polytunnel --mode sweep --N-min 8 --N-max 120 --out sweep.csv
    polytunnel --mode scatter --N 10 --format json
    polytunnel --config run.cfg --E-ev 6.0

Settings are resolved as command line > config file > defaults. The config
file is flat ``key = value`` text using the ExperimentConfig field names.
Exit codes: 0 ok, 2 config error, 3 validation error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .dispersion import compute_dispersion
from .errors import ConfigError, EnergyCutoffViolation, InvariantViolation, PolyTunnelError
from .oracle import SiteConvention, continuum_transmission, lattice_recursion_scatter
from .scattering import compare_methods, paper_coefficients, solve_boundary_system
from .units import ELECTRON_MASS, validate_params
from .zeno import Normalization, sweep_mu0, tunneling_time

log = logging.getLogger("polytunnel")

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION, EXIT_IO = 0, 2, 3, 4
MODES = ("scatter", "compare", "sweep", "time")
FORMATS = ("csv", "json")
SWEEP_COLUMNS = ("N", "mu0_nm", "T", "R", "time_fs", "region")
CONSERVATION_TOL = 1e-10


@dataclass
class ExperimentConfig:
    particle: str = "electron"
    mass: float = ELECTRON_MASS
    E: float = 5.5
    V0: float = 9.7
    L: float = 1.0
    N: int = 10
    N_min: int = 8
    N_max: int = 120
    mode: str = "sweep"
    out: str | None = None
    format: str = "csv"
    fs_window_lo: float = 0.1
    fs_window_hi: float = 10.0
    use_paper_coefficients: bool = False
    time_normalization: str = "incident"

    # scattering amplitudes are always solved with c1 = 1
    @property
    def c1(self) -> int:
        return 1

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.particle not in ("electron", "custom"):
            raise ConfigError(f"particle must be 'electron' or 'custom', got {self.particle!r}")
        if self.N_min > self.N_max:
            raise ConfigError(f"N_min={self.N_min} exceeds N_max={self.N_max}")
        if not self.fs_window_lo <= self.fs_window_hi:
            raise ConfigError("fs window lower bound exceeds upper bound")
        try:
            Normalization(self.time_normalization)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            lines.append(f"{f.name} = {_format_value(value)}")
        lines.append(f"# c1 = {self.c1} (fixed)")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, base: "ExperimentConfig | None" = None) -> "ExperimentConfig":
        values = dataclasses.asdict(base or cls())
        seen: set[str] = set()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            values[key] = value
            if key == "mass" and "particle" not in seen:
                values["particle"] = "custom"
            seen.add(key)
        return cls.from_mapping(values)

    @classmethod
    def from_mapping(cls, values: dict[str, Any]) -> "ExperimentConfig":
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        unknown = set(values) - set(types)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        for key, value in values.items():
            try:
                kwargs[key] = _coerce(value, types[key])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from None
        return cls(**kwargs)


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _coerce(value: Any, type_name: str) -> Any:
    if not isinstance(value, str):
        return value
    if type_name == "bool":
        low = value.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError("not a boolean")
    if type_name == "int":
        return int(value)
    if type_name == "float":
        return float(value)
    if type_name == "str | None":
        return None if value.lower() in ("", "none") else value
    return value


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="polytunnel",
        description="Tunneling through a rectangular barrier on a polymer lattice.",
    )
    ap.add_argument("--config", help="flat key = value config file")
    ap.add_argument("--mode", choices=MODES)
    ap.add_argument("--E-ev", dest="E", type=float, help="particle energy [eV]")
    ap.add_argument("--V0-ev", dest="V0", type=float, help="barrier height [eV]")
    ap.add_argument("--L-nm", dest="L", type=float, help="barrier width [nm]")
    ap.add_argument("--N", dest="N", type=int, help="lattice steps across the barrier")
    ap.add_argument("--N-min", dest="N_min", type=int)
    ap.add_argument("--N-max", dest="N_max", type=int)
    ap.add_argument("--mass-evfs2nm2", dest="mass", type=float, help="particle mass [eV fs^2 / nm^2]")
    ap.add_argument("--fs-window-lo", dest="fs_window_lo", type=float, help="[fs]")
    ap.add_argument("--fs-window-hi", dest="fs_window_hi", type=float, help="[fs]")
    ap.add_argument("--out", help="output path (default: stdout)")
    ap.add_argument("--format", choices=FORMATS)
    ap.add_argument(
        "--use-paper-coefficients",
        dest="use_paper_coefficients",
        action="store_true",
        default=None,
        help="take b1, b2 from the closed-form expressions instead of the linear solve",
    )
    ap.add_argument(
        "--time-normalization",
        dest="time_normalization",
        choices=[n.value for n in Normalization],
    )
    ap.add_argument("-v", "--verbose", action="count", default=0)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return ap


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        cfg = ExperimentConfig.from_text(text, cfg)
    overrides = {
        f.name: getattr(args, f.name)
        for f in dataclasses.fields(ExperimentConfig)
        if getattr(args, f.name, None) is not None
    }
    if "mass" in overrides:
        overrides["particle"] = "custom"
    cfg = dataclasses.replace(cfg, **overrides)
    if cfg.particle == "electron":
        cfg.mass = ELECTRON_MASS
    cfg.validate()
    return cfg


def _fmt(x: Any) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _cjson(z: complex) -> list[float]:
    return [z.real, z.imag]


def _raw(cfg: ExperimentConfig, N: int) -> dict:
    return {"mass": cfg.mass, "E": cfg.E, "V0": cfg.V0, "L": cfg.L, "N": N}


def _check_conservation(T: float, R: float, where: str) -> None:
    if not (0.0 <= T <= 1.0 + CONSERVATION_TOL and abs(T + R - 1.0) < CONSERVATION_TOL):
        raise InvariantViolation(f"{where}: T={T!r}, R={R!r} violate T + R = 1")


def run_scatter(cfg: ExperimentConfig) -> tuple[list[str], list[list[Any]], dict]:
    p = validate_params(_raw(cfg, cfg.N))
    d = compute_dispersion(p)
    lin = solve_boundary_system(d, p.num_steps)
    closed = paper_coefficients(d, p.num_steps)
    _check_conservation(lin.T, lin.R, "LinearSolve")
    report = compare_methods(d, p.num_steps)
    oracle = lattice_recursion_scatter(d, p.num_steps)
    t_cont = continuum_transmission(p)

    def sol_dict(s):
        return {
            "method": s.method.value,
            **{k: _cjson(v) for k, v in s.amplitudes().items()},
            "T": s.T,
            "R": s.R,
            "T_plus_R_minus_1": s.T + s.R - 1.0,
        }

    doc = {
        "mode": "scatter",
        "params": {**p.as_raw(), "mu0_nm": p.mu0, "c1": cfg.c1},
        "dispersion": {"epsilon": d.epsilon, "theta": d.theta, "lam": d.lam, "phi": d.phi},
        "solutions": [sol_dict(lin), sol_dict(closed)],
        "comparison": report.to_dict(),
        "oracle": {
            "convention": oracle.convention.value,
            "T_oracle": oracle.T_oracle,
            "R_oracle": oracle.R_oracle,
        },
        "T_continuum": t_cont,
    }
    header = ["method", "N", "mu0_nm", "T", "R", "T_plus_R_minus_1"]
    rows = [[s.method.value, p.num_steps, p.mu0, s.T, s.R, s.T + s.R - 1.0] for s in (lin, closed)]
    return header, rows, doc


def run_compare(cfg: ExperimentConfig) -> tuple[list[str], list[list[Any]], dict]:
    header = [
        "N",
        "mu0_nm",
        "T_linear",
        "T_closed_form",
        "T_oracle_half",
        "T_oracle_exclusive",
        "T_oracle_inclusive",
        "T_oracle_matched",
        "T_continuum",
        "closed_form_max_dev",
        "rel_dev_linear_oracle",
        "rel_dev_linear_continuum",
        "rel_dev_oracle_continuum",
    ]
    rows, skipped = [], []
    for N in range(cfg.N_min, cfg.N_max + 1):
        try:
            p = validate_params(_raw(cfg, N))
        except EnergyCutoffViolation as exc:
            skipped.append(N)
            log.warning("N=%d skipped: %s", N, exc)
            continue
        d = compute_dispersion(p)
        rep = compare_methods(d, N)
        lin = solve_boundary_system(d, N, check_condition=False)
        _check_conservation(lin.T, lin.R, f"LinearSolve N={N}")
        ors = {c: lattice_recursion_scatter(d, N, c).T_oracle for c in SiteConvention}
        tc = continuum_transmission(p)
        t_or = ors[SiteConvention.HALF]
        rows.append(
            [
                N,
                p.mu0,
                lin.T,
                rep.T_closed_form,
                t_or,
                ors[SiteConvention.EXCLUSIVE],
                ors[SiteConvention.INCLUSIVE],
                ors[SiteConvention.MATCHED],
                tc,
                rep.max_deviation,
                abs(lin.T - t_or) / t_or,
                abs(lin.T - tc) / tc,
                abs(t_or - tc) / tc,
            ]
        )
    doc = {
        "mode": "compare",
        "params": {"mass": cfg.mass, "E": cfg.E, "V0": cfg.V0, "L": cfg.L, "c1": cfg.c1},
        "columns": header,
        "rows": rows,
        "skipped_N": skipped,
    }
    return header, rows, doc


def run_sweep(cfg: ExperimentConfig) -> tuple[list[str], list[list[Any]], dict]:
    base = {"mass": cfg.mass, "E": cfg.E, "V0": cfg.V0, "L": cfg.L}
    analysis = sweep_mu0(
        base,
        (cfg.N_min, cfg.N_max),
        fs_window=(cfg.fs_window_lo, cfg.fs_window_hi),
        use_paper_coefficients=cfg.use_paper_coefficients,
        normalization=cfg.time_normalization,
    )
    rows = []
    for r in analysis.records:
        _check_conservation(r.T_coef, r.R_coef, f"sweep N={r.N}")
        if not (math.isfinite(r.time) and r.time >= 0.0):
            raise InvariantViolation(f"sweep N={r.N}: time {r.time!r} not finite and nonnegative")
        if r.mu0 != cfg.L / r.N:
            raise InvariantViolation(f"sweep N={r.N}: mu0 != L / N")
        rows.append([r.N, r.mu0, r.T_coef, r.R_coef, r.time, r.region.value])
    summary = {
        "mode": "sweep",
        "params": {**base, "c1": cfg.c1, "time_normalization": cfg.time_normalization},
        **analysis.summary(),
    }
    doc = {**summary, "records": [dict(zip(SWEEP_COLUMNS, row)) for row in rows]}
    return list(SWEEP_COLUMNS), rows, doc


def run_time(cfg: ExperimentConfig) -> tuple[list[str], list[list[Any]], dict]:
    p = validate_params(_raw(cfg, cfg.N))
    res = tunneling_time(
        p, use_paper_coefficients=cfg.use_paper_coefficients, normalization=cfg.time_normalization
    )
    _check_conservation(res.T, res.R, "time")
    doc = {"mode": "time", "c1": cfg.c1, **res.to_dict()}
    header = ["N", "mu0_nm", "T", "R", "time_fs"]
    rows = [[p.num_steps, p.mu0, res.T, res.R, res.time]]
    return header, rows, doc


RUNNERS = {"scatter": run_scatter, "compare": run_compare, "sweep": run_sweep, "time": run_time}


def render_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def render_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def summary_path(out: Path) -> Path:
    return out.with_name(out.stem + ".summary.json")


def run(cfg: ExperimentConfig, stdout=None, stderr=None) -> int:
    """Execute one configured run and emit its artifacts; returns the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    header, rows, doc = RUNNERS[cfg.mode](cfg)
    if cfg.format == "json":
        payload = render_json(doc)
        sidecar = None
    else:
        payload = render_csv(header, rows)
        sidecar = None
        if cfg.mode == "sweep":
            sidecar = render_json({k: v for k, v in doc.items() if k != "records"})
    if cfg.out is None:
        stdout.write(payload)
        if sidecar:
            stderr.write(sidecar)
    else:
        out = Path(cfg.out)
        write_atomic(out, payload)
        if sidecar:
            write_atomic(summary_path(out), sidecar)
    return EXIT_OK


def _emit_error(stderr, code: str, message: str) -> None:
    stderr.write(json.dumps({"error": code, "message": message}) + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        _emit_error(sys.stderr, exc.code, str(exc))
        return EXIT_CONFIG
    try:
        return run(cfg)
    except PolyTunnelError as exc:
        _emit_error(sys.stderr, exc.code, str(exc))
        return EXIT_VALIDATION
    except OSError as exc:
        _emit_error(sys.stderr, "IOError", str(exc))
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
