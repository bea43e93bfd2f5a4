"""Command-line drivers: evolve | sweep | density | spectrum | validate.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 numerical-accuracy error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import evolve, prepare_state
from .errors import ConfigError, NumericalAccuracyError
from .expansion import DEFAULT_EPS_TRUNC, DEFAULT_P0, DEFAULT_Z0, PacketSpec, expand_packet
from .observables import GridSpec, density_grid, state_series, time_grid, zb_spectrum

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2, 3

_ANGLE = re.compile(r"^\s*([+-])?\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$")
# options whose values may legitimately start with '-' (e.g. a grid "-6:6:-6:6:121:121")
_DASH_VALUE_OPTIONS = ("--grid", "--times", "--sweep", "--theta-sigma", "--phi-sigma", "--z0", "--p0")


def parse_angle(value) -> float:
    """Float, or expressions like 'pi', 'pi/4', '3pi/4', '0.5*pi'."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    text = str(value).strip()
    m = _ANGLE.match(text)
    if m:
        sign, factor, divisor = m.groups()
        value = (float(factor) if factor else 1.0) * math.pi / (float(divisor) if divisor else 1.0)
        return -value if sign == "-" else value
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse angle/time {value!r}") from None


def zb_dt_bound(r: float) -> float:
    """Largest time step that still resolves 2 mc^2 with margin."""
    return math.pi * r / 20.0


@dataclass
class RunConfig:
    r: float = 0.01
    z0: float = DEFAULT_Z0
    p0: float = DEFAULT_P0
    theta_sigma: float = 0.0
    phi_sigma: float = 0.0
    eps_trunc: float = DEFAULT_EPS_TRUNC
    prep: str = "dirac"
    frame: str = "dirac"
    t_max: float = 2.0 * math.pi
    dt: float | None = None
    sweep: list = field(default_factory=lambda: [0.0, math.pi / 4, math.pi / 2])
    grid: str = "-6:6:-6:6:121:121"
    select: list = field(default_factory=lambda: ["all,both"])
    times: list = field(default_factory=lambda: [0.0, math.pi / 2, math.pi])
    window: str = "none"
    out: str = "out"

    def packet(self, theta_sigma: float | None = None) -> PacketSpec:
        return PacketSpec(r=self.r, z0=self.z0, p0=self.p0,
                          theta_sigma=self.theta_sigma if theta_sigma is None else theta_sigma,
                          phi_sigma=self.phi_sigma, eps_trunc=self.eps_trunc, preparation=self.prep)

    def selectors(self) -> list[tuple[str, str]]:
        out = []
        for item in self.select:
            parts = [p.strip() for p in item.split(",")]
            if len(parts) != 2 or parts[0] not in ("large", "small", "all") or parts[1] not in ("+", "-", "both"):
                raise ConfigError(f"selector must be '<large|small|all>,<+|-|both>', got {item!r}")
            out.append((parts[0], parts[1]))
        return out

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_FIELDS = {f.name for f in dataclasses.fields(RunConfig)}


def _finalise(cfg: RunConfig) -> RunConfig:
    try:
        cfg.packet()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if cfg.frame not in ("dirac", "fw", "both"):
        raise ConfigError(f"frame must be dirac, fw or both, got {cfg.frame!r}")
    if cfg.window not in ("none", "hann"):
        raise ConfigError(f"window must be none or hann, got {cfg.window!r}")
    if cfg.t_max < 0:
        raise ConfigError("t_max must be >= 0")
    bound = zb_dt_bound(cfg.r)
    if cfg.dt is None:
        cfg.dt = min(0.01, bound)
    if cfg.dt <= 0:
        raise ConfigError("dt must be > 0")
    if cfg.prep == "dirac" and cfg.dt > bound:
        raise ConfigError(f"dt={cfg.dt!r} does not resolve Zitterbewegung at r={cfg.r!r}: "
                          f"need dt <= pi*r/20 = {bound!r}")
    try:
        GridSpec.parse(cfg.grid)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    cfg.selectors()
    return cfg


def _coerce(key, value):
    if key in ("theta_sigma", "phi_sigma", "t_max"):
        return parse_angle(value)
    if key in ("sweep", "times"):
        items = value.split(",") if isinstance(value, str) else value
        return [parse_angle(v) for v in items]
    if key == "select":
        return [value] if isinstance(value, str) else list(value)
    if key in ("r", "z0", "p0", "eps_trunc"):
        return float(value)
    if key == "dt":
        return None if value is None else float(value)
    return value


def parse_config(args: argparse.Namespace | None = None, config_file=None) -> RunConfig:
    """Defaults, then the JSON config file, then explicit command-line flags."""
    values = {}
    if config_file is not None:
        try:
            data = json.loads(Path(config_file).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {config_file}: {exc}") from None
        unknown = set(data) - _FIELDS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    if args is not None:
        for key in _FIELDS:
            v = getattr(args, key, None)
            if v is not None:
                values[key] = v
    try:
        cfg = RunConfig(**{k: _coerce(k, v) for k, v in values.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return _finalise(cfg)


def write_metadata(cfg: RunConfig, out: Path) -> Path:
    path = out / "run.json"
    path.write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")
    return path


def _header(cfg: RunConfig, extra=()) -> list[str]:
    return [f"config {json.dumps(cfg.to_dict(), sort_keys=True)}", *extra]


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    write_metadata(cfg, out)
    return out


def _series(cfg: RunConfig, theta_sigma=None, times=None):
    if cfg.frame == "both":
        raise ConfigError("frame 'both' is only meaningful for the density command")
    spec = cfg.packet(theta_sigma)
    state0 = prepare_state(spec, expand_packet(spec))
    grid = time_grid(cfg.t_max, cfg.dt) if times is None else times
    ts = state_series(state0, grid, spec.spin_direction, cfg.frame)
    return spec, state0, ts


def run_evolve(cfg: RunConfig) -> list[Path]:
    out = _out_dir(cfg)
    spec, state0, ts = _series(cfg)
    path = out / "series.csv"
    ts.to_csv(path, _header(cfg, [f"sectors {len(state0.layout)}", f"frame {cfg.frame}"]))
    return [path]


def sweep_summary(cfg: RunConfig, theta: float):
    """Series plus (collapse depth, min purity, revival fidelity at 2 pi, periodicity defect)."""
    spec, state0, ts = _series(cfg, theta)
    period = 2.0 * math.pi
    shifted = state_series(state0, ts.times + period, spec.spin_direction, cfg.frame)
    defect = float(np.max(np.abs(shifted["sigma_n"] - ts["sigma_n"])))
    revival = state_series(state0, [period], spec.spin_direction, cfg.frame)["fidelity"][0]
    first = ts.times <= period
    return ts, {
        "theta_sigma": theta,
        "collapse_depth": float(np.min(ts["sigma_n"][first])),
        "min_purity": float(np.min(ts["purity"][first])),
        "revival_fidelity_2pi": float(revival),
        "periodicity_defect": defect,
    }


def run_sweep(cfg: RunConfig) -> list[Path]:
    out = _out_dir(cfg)
    paths, rows = [], []
    for i, theta in enumerate(cfg.sweep):
        ts, row = sweep_summary(cfg, theta)
        path = out / f"series_{i:02d}_theta{theta:.6f}.csv"
        ts.to_csv(path, _header(cfg, [f"theta_sigma {theta!r}"]))
        paths.append(path)
        rows.append(row)
    summary = out / "summary.csv"
    with open(summary, "w") as fh:
        fh.write("# " + _header(cfg)[0] + "\n")
        fh.write("# periodicity_defect = max_t |sigma_n(t + 2pi) - sigma_n(t)| over the run grid\n")
        keys = list(rows[0]) if rows else []
        fh.write(",".join(keys) + "\n")
        for row in rows:
            fh.write(",".join(f"{row[k]:.15e}" for k in keys) + "\n")
    return paths + [summary]


def run_density(cfg: RunConfig) -> list[Path]:
    out = _out_dir(cfg)
    spec = cfg.packet()
    state0 = prepare_state(spec, expand_packet(spec))
    grid = GridSpec.parse(cfg.grid)
    frames = ("dirac", "fw") if cfg.frame == "both" else (cfg.frame,)
    paths = []
    for t in cfg.times:
        state = evolve(state0, t)
        for frame in frames:
            for component, sign in cfg.selectors():
                dg = density_grid(state, grid, component, sign, frame)
                tag = {"+": "pos", "-": "neg", "both": "both"}[sign]
                path = out / f"density_t{t:.6f}_{frame}_{component}_{tag}.dat"
                dg.to_text(path, _header(cfg, [f"mass {dg.mass():.12e} (cylindrical quadrature)"]))
                paths.append(path)
    return paths


def run_spectrum(cfg: RunConfig) -> list[Path]:
    out = _out_dir(cfg)
    spec, _, ts = _series(cfg)
    sp = zb_spectrum(ts["sigma_n"], ts.times, cfg.window)
    mc2 = 1.0 / cfg.r
    path = out / "spectrum.csv"
    with open(path, "w") as fh:
        fh.write("# " + _header(cfg)[0] + "\n")
        fh.write(f"# resolution {sp.resolution!r} window {sp.window} 2mc2 {2 * mc2!r}\n")
        fh.write("omega,magnitude\n")
        for w, m in zip(sp.omega, sp.magnitude):
            fh.write(f"{w:.15e},{m:.15e}\n")
    zb_w, zb_m = sp.band_peak(1.5 * mc2, 2.5 * mc2)
    print(f"resolution {sp.resolution:.6g}; top peaks: "
          + ", ".join(f"{w:.4f} ({m:.3e})" for w, m in sp.peaks(5)))
    print(f"Zitterbewegung band peak: omega={zb_w:.4f} magnitude={zb_m:.3e} "
          f"(2mc^2 = {2 * mc2:.4f}, relative {sp.relative_band_magnitude(1.5 * mc2, 2.5 * mc2):.3e})")
    return [path]


def run_validate(cfg: RunConfig) -> int:
    from .validation import run_checks

    results = run_checks(cfg)
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        failed += not res.passed
        print(f"{status}  {res.name:<40s} max deviation {res.deviation:.3e}  (tolerance {res.tolerance:.1e})")
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VALIDATION


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with RunConfig keys; flags override it")
    common.add_argument("--r", type=float, help="relativity parameter hbar*omega/mc^2 (default 0.01)")
    common.add_argument("--z0", type=float, help="initial displacement along z (default 0)")
    common.add_argument("--p0", type=float, help="initial momentum along z (default 3)")
    common.add_argument("--theta-sigma", dest="theta_sigma", help="initial spin polar angle, e.g. 'pi/4'")
    common.add_argument("--phi-sigma", dest="phi_sigma", help="initial spin azimuth")
    common.add_argument("--eps-trunc", dest="eps_trunc", type=float, help="truncation tolerance (default 1e-10)")
    common.add_argument("--prep", choices=("dirac", "fw"), help="prepared object (default dirac)")
    common.add_argument("--frame", choices=("dirac", "fw", "both"), help="representation of observables")
    common.add_argument("--t-max", dest="t_max", help="final time (default 2pi)")
    common.add_argument("--dt", type=float, help="sampling step (default min(0.01, pi*r/20))")
    common.add_argument("--sweep", help="comma-separated theta_sigma values for 'sweep'")
    common.add_argument("--grid", help="'ymin:ymax:zmin:zmax:ny:nz' for 'density'")
    common.add_argument("--select", action="append", help="'<large|small|all>,<+|-|both>', repeatable")
    common.add_argument("--times", help="comma-separated times for 'density'")
    common.add_argument("--window", choices=("none", "hann"), help="window for 'spectrum'")
    common.add_argument("--out", help="output directory (default ./out)")

    parser = _Parser(prog="dirac-pendulum", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in (("evolve", "time series of all observables"),
                       ("sweep", "time series per initial spin angle plus a summary"),
                       ("density", "probability-density grids on the zOy plane"),
                       ("spectrum", "Fourier spectrum of sigma_n (Zitterbewegung)"),
                       ("validate", "oracle and invariant checks")):
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def _join_dash_values(argv: list[str]) -> list[str]:
    """Turn '--grid -6:6:...' into '--grid=-6:6:...' so argparse does not read it as a flag."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _DASH_VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_join_dash_values(list(sys.argv[1:] if argv is None else argv)))
    try:
        cfg = parse_config(args, args.config)
        if args.command == "validate":
            return run_validate(cfg)
        runner = {"evolve": run_evolve, "sweep": run_sweep, "density": run_density,
                  "spectrum": run_spectrum}[args.command]
        for path in runner(cfg):
            print(path)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalAccuracyError as exc:
        print(f"numerical accuracy error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
