"""``fuzzybox`` command line: plot-ready CSV data for every figure and the oracle checks.

Exit codes: 0 success, 2 I/O failure, 3 invalid configuration, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import dynamics, operators, quantizer, states
from .errors import ConfigError, DomainError, NumericalError
from .grid import Grid
from .windowfn import Geometry, QuantizationParams, window_B, window_dB

EXIT_IO, EXIT_CONFIG, EXIT_NUMERICAL = 2, 3, 4

SUBCOMMANDS = ("window", "operator", "commutator", "uncertainty", "mass", "potentials", "force",
               "portrait", "quantize-check", "simulate", "limit-study", "figures")

# keys accepted in --config files and --params
_FLOAT_KEYS = ("a", "b", "ell", "hbar", "mass", "q0", "grid_h", "q_start", "p_start", "T", "dt")
_BOOL_KEYS = ("half_line",)
_LIST_KEYS = ("ells", "a_values", "momenta", "c_values")


@dataclass
class RunConfig:
    a: float | None = None
    b: float | None = None
    half_line: bool = False
    ell: float | None = None
    hbar: float = 1.0
    mass: float = 1.0
    q0: float = 1.0
    grid_h: float | None = None
    out: str = "fuzzybox-out"
    ells: list | None = None
    a_values: list | None = None
    momenta: list | None = None
    c_values: list | None = None
    q_start: float = 5.0
    p_start: float | None = None
    T: float | None = None
    dt: float | None = None
    length: float = 10.0

    def validate(self):
        for k in ("hbar", "mass", "q0", "length"):
            v = getattr(self, k)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"{k} must be a positive number, got {v}")
        for k in ("ell", "grid_h", "T", "dt"):
            v = getattr(self, k)
            if v is not None and not (math.isfinite(v) and v > 0):
                raise ConfigError(f"{k} must be a positive number, got {v}")
        for k in ("ells",):
            v = getattr(self, k)
            if v is not None and not all(math.isfinite(e) and e > 0 for e in v):
                raise ConfigError(f"{k} must all be positive")
        if self.a is not None and self.b is not None and not self.half_line and not self.a < self.b:
            raise ConfigError(f"need a < b, got a={self.a}, b={self.b}")
        for k in ("a", "b", "q_start", "p_start"):
            v = getattr(self, k)
            if v is not None and not math.isfinite(v):
                raise ConfigError(f"{k} must be finite")
        return self

    def metadata(self) -> dict:
        d = asdict(self)
        return {k: _fmt_meta(v) for k, v in sorted(d.items())}

    # helpers resolving figure defaults
    def ell_list(self, default):
        if self.ells is not None:
            return list(self.ells)
        return [self.ell] if self.ell is not None else list(default)

    def geometries(self, default_as=(0.0, 2.0, 4.0)):
        if self.half_line:
            return [Geometry.half_line(self.a if self.a is not None else 0.0)]
        if self.a_values is not None:
            return [Geometry.bounded(a, a + self.length) for a in self.a_values]
        if self.a is not None or self.b is not None:
            a = self.a if self.a is not None else (self.b - self.length)
            b = self.b if self.b is not None else a + self.length
            return [Geometry.bounded(a, b)]
        return [Geometry.bounded(a, a + self.length) for a in default_as]

    def params(self, ell):
        return QuantizationParams(ell, self.hbar, self.mass, self.q0)


def _fmt_meta(v):
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, list):
        return "[" + ", ".join(_fmt_meta(float(e)) for e in v) + "]"
    return str(v)


def _num(v):
    return format(float(v), ".17g")


def _tag(v):
    return format(float(v), "g").replace("-", "m")


# ---------------------------------------------------------------------------
# config parsing


def _coerce(key, raw):
    key = key.strip().replace("-", "_")
    raw = raw.strip()
    try:
        if key in _FLOAT_KEYS:
            return key, float(raw)
        if key in _BOOL_KEYS:
            if raw.lower() not in ("1", "0", "true", "false", "yes", "no"):
                raise ValueError(raw)
            return key, raw.lower() in ("1", "true", "yes")
        if key in _LIST_KEYS:
            return key, [float(t) for t in raw.replace(",", " ").split()]
        if key in ("out",):
            return key, raw
        if key == "length":
            return key, float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from None
    raise ConfigError(f"unknown configuration key {key!r}")


def read_config_file(path) -> dict:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        k, v = _coerce(*line.split("=", 1))
        out[k] = v
    return out


def parse_params(text: str) -> dict:
    out = {}
    for item in filter(None, (t.strip() for t in text.split(";"))):
        if "=" not in item:
            raise ConfigError(f"--params entry {item!r} is not key=value")
        k, v = _coerce(*item.split("=", 1))
        out[k] = v
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--a", type=float, help="left endpoint [q0]")
    g.add_argument("--b", type=float, help="right endpoint [q0]")
    g.add_argument("--half-line", action="store_const", const=True, default=None,
                   help="use the half-line (a, inf)")
    g.add_argument("--ell", type=float, help="coherent-state width [q0]")
    g.add_argument("--hbar", type=float)
    g.add_argument("--mass", type=float)
    g.add_argument("--grid-h", type=float, help="grid spacing [q0]")
    g.add_argument("--out", help="output directory")
    g.add_argument("--config", help="key=value configuration file")
    g.add_argument("--params", help="overrides as 'key=value; key=value'")
    s = common.add_argument_group("sweeps")
    s.add_argument("--ells", type=float, nargs="+")
    s.add_argument("--a-values", type=float, nargs="+")
    s.add_argument("--momenta", type=float, nargs="+", help="momenta [hbar/q0]")
    s.add_argument("--c-values", type=float, nargs="+", help="probe centres [q0]")
    d = common.add_argument_group("dynamics")
    d.add_argument("--q-start", type=float)
    d.add_argument("--p-start", type=float)
    d.add_argument("--T", type=float, dest="T")
    d.add_argument("--dt", type=float)

    parser = argparse.ArgumentParser(prog="fuzzybox", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "figures":
            p.add_argument("--all", action="store_true", help="regenerate every figure dataset")
    return parser


def resolve_config(ns) -> RunConfig:
    values = {}
    if ns.config:
        values.update(read_config_file(ns.config))
    if ns.params:
        values.update(parse_params(ns.params))
    for key in ("a", "b", "half_line", "ell", "hbar", "mass", "grid_h", "out", "ells", "a_values",
                "momenta", "c_values", "q_start", "p_start", "T", "dt"):
        v = getattr(ns, key, None)
        if v is not None:
            values[key] = v
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return cfg.validate()


# ---------------------------------------------------------------------------
# writers


def write_csv(path: Path, header, rows, meta: dict):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        for k, v in meta.items():
            fh.write(f"# {k} = {v}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([r if isinstance(r, str) else _num(r) for r in row])
    return path


def _meta(cfg, command, **curve):
    m = {"command": command}
    m.update(cfg.metadata())
    m.update({f"curve.{k}": _fmt_meta(v) if isinstance(v, float) else str(v) for k, v in curve.items()})
    return m


def _xs(geom, lo_pad, hi_pad, h):
    hi = geom.b if geom.is_bounded else geom.a + 10.0
    grid = Grid.from_spacing(geom.a - lo_pad, hi + hi_pad, h)
    return grid.x


def _geom_meta(geom):
    return {"a": geom.a, "b": geom.b if geom.is_bounded else "inf", "geometry": geom.kind}


# ---------------------------------------------------------------------------
# subcommands


def cmd_window(cfg, out):
    files = []
    h = min(cfg.grid_h or 0.01, 0.01)
    for ell in cfg.ell_list((0.5, 0.1)):
        for geom in cfg.geometries():
            x = _xs(geom, 2.0, 2.0, h)
            rows = zip(x, window_B(x, geom, ell), window_dB(1, x, geom, ell), window_dB(2, x, geom, ell))
            files.append(write_csv(out / f"window_a{_tag(geom.a)}_ell{_tag(ell)}.csv",
                                   ["x [q0]", "B [1]", "dB [1/q0]", "d2B [1/q0^2]"], rows,
                                   _meta(cfg, "window", ell=ell, **_geom_meta(geom))))
    return files


def cmd_operator(cfg, out):
    files = []
    h = cfg.grid_h or 0.01
    for ell in cfg.ell_list((0.1,)):
        p = cfg.params(ell)
        for geom in cfg.geometries():
            x = _xs(geom, 2.0, 2.0, h)
            rows = zip(x, operators.position_symbol(x, geom, p), operators.spectral_density(x, geom, p))
            files.append(write_csv(out / f"operator_a{_tag(geom.a)}_ell{_tag(ell)}.csv",
                                   ["x [q0]", "Q [q0]", "dQ/dx [1]"], rows,
                                   _meta(cfg, "operator", ell=ell, **_geom_meta(geom))))
    return files


def cmd_commutator(cfg, out):
    files = []
    h = cfg.grid_h or 0.005
    for ell in cfg.ell_list((0.1,)):
        p = cfg.params(ell)
        for geom in cfg.geometries():
            x = _xs(geom, 2.0, 5.0, h)
            C = operators.commutator_C(x, geom, p)
            rows = zip(x, C, np.abs(C) - 1.0)
            files.append(write_csv(out / f"commutator_a{_tag(geom.a)}_ell{_tag(ell)}.csv",
                                   ["x [q0]", "C_om [1]", "|C_om|-1 [1]"], rows,
                                   _meta(cfg, "commutator", ell=ell, **_geom_meta(geom))))
    return files


def cmd_uncertainty(cfg, out):
    files = []
    geoms = cfg.geometries(default_as=(0.0,))
    centers = cfg.c_values if cfg.c_values is not None else list(np.round(np.arange(-5.0, 15.0 + 1e-9, 0.05), 10))
    for ell in cfg.ell_list((0.1,)):
        p = cfg.params(ell)
        for geom in geoms:
            if not geom.is_bounded:
                raise ConfigError("uncertainty scan needs a bounded interval")
            grid = states.scan_grid(centers, geom, p, 1.0, cfg.grid_h or ell / 10)
            rows = []
            for c in centers:
                psi = states.GaussianProbe(c, 1.0).sample(grid)
                u = states.uncertainty_product(psi, geom, p)
                rows.append((c, states.mean_commutator(psi, geom, p), u.delta_q, u.delta_p, u.product, u.bound))
            files.append(write_csv(out / f"uncertainty_a{_tag(geom.a)}_ell{_tag(ell)}.csv",
                                   ["c_cen [q0]", "value [1]", "dq [q0]", "dp [hbar/q0]",
                                    "product [hbar]", "bound [hbar]"], rows,
                                   _meta(cfg, "uncertainty", ell=ell, **_geom_meta(geom))))
    return files


def cmd_mass(cfg, out):
    files = []
    h = cfg.grid_h or 0.01
    for ell in cfg.ell_list((0.1,)):
        p = cfg.params(ell)
        for geom in cfg.geometries():
            x = _xs(geom, 2.0, 2.0, h)
            inv = operators.mass_inverse(x, geom, p) * p.mass
            M = operators.mass(x, geom, p) / p.mass
            files.append(write_csv(out / f"mass_a{_tag(geom.a)}_ell{_tag(ell)}.csv",
                                   ["x [q0]", "M [m]", "1/M [1/m]"], zip(x, M, inv),
                                   _meta(cfg, "mass", ell=ell, **_geom_meta(geom))))
    return files


def cmd_potentials(cfg, out):
    files = []
    h = cfg.grid_h or 0.005
    for ell in cfg.ell_list((0.1, 0.3, 0.5)):
        p = cfg.params(ell)
        for geom in cfg.geometries(default_as=(0.0,)):
            x = _xs(geom, 2.0, 2.0, h)
            rows = zip(x, operators.potential("-", x, geom, p) / p.alpha, operators.potential("+", x, geom, p) / p.alpha)
            files.append(write_csv(out / f"potentials_a{_tag(geom.a)}_ell{_tag(ell)}.csv",
                                   ["x [q0]", "V- [alpha]", "V+ [alpha]"], rows,
                                   _meta(cfg, "potentials", ell=ell, **_geom_meta(geom))))
    return files


def cmd_force(cfg, out):
    files = []
    h = cfg.grid_h or 0.005
    momenta = cfg.momenta if cfg.momenta is not None else [0.0, 20.0]
    for mom in momenta:
        for ell in cfg.ell_list((0.1, 0.3, 0.5)):
            p = cfg.params(ell)
            for geom in cfg.geometries(default_as=(0.0,)):
                x = _xs(geom, 2.0, 2.0, h)
                pval = mom * p.hbar / p.q0
                F = dynamics.semiclassical_force(x, pval, geom, p) / p.force_unit
                files.append(write_csv(out / f"force_a{_tag(geom.a)}_ell{_tag(ell)}_p{_tag(mom)}.csv",
                                       ["x [q0]", "F [F0]"], zip(x, F),
                                       _meta(cfg, "force", ell=ell, p=mom, **_geom_meta(geom))))
    return files


def cmd_portrait(cfg, out):
    files = []
    h = cfg.grid_h or 0.01
    momenta = cfg.momenta if cfg.momenta is not None else [0.0, 20.0]
    kinds = [quantizer.ObservableSpec(k) for k in quantizer.KINDS]
    for mom in momenta:
        for ell in cfg.ell_list((0.1,)):
            p = cfg.params(ell)
            for geom in cfg.geometries(default_as=(0.0,)):
                rows = []
                for q in _xs(geom, 2.0, 2.0, h):
                    at = quantizer.PhaseState(float(q), mom * p.hbar / p.q0)
                    rows.append([q] + [quantizer.portrait(f, at, geom, p) for f in kinds]
                                + [operators.poisson_bracket_symbols(q, geom, p)])
                files.append(write_csv(out / f"portrait_a{_tag(geom.a)}_ell{_tag(ell)}_p{_tag(mom)}.csv",
                                       ["q [q0]", "B_check [1]", "q_check [q0]", "p_check [hbar/q0]",
                                        "H_check [alpha]", "poisson [1]"], rows,
                                       _meta(cfg, "portrait", ell=ell, p=mom, **_geom_meta(geom))))
    return files


# probe pairs (centre, width, boost) straddling the left wall, the interior and the right wall
CHECK_PAIRS = (
    ((0.3, 0.7, 1.0), (-0.2, 0.5, -2.0)),
    ((5.0, 1.0, 0.0), (5.5, 0.8, 1.5)),
    ((9.8, 0.6, 0.5), (10.1, 0.9, -1.0)),
)


def quantize_check_rows(geom: Geometry, params: QuantizationParams, h: float, tolerance: float = 1e-4):
    """Oracle-vs-matrix discrepancies |<phi|A|psi>_oracle - <phi|A|psi>_matrix| for each observable."""
    grid = Grid.covering(geom, params.ell, h, width=1.0)
    mats = {
        "window": ("unit", operators.window_matrix(grid, geom, params)),
        "position": ("position", operators.position_matrix(grid, geom, params)),
        "momentum": ("momentum", operators.momentum_matrix(grid, geom, params)),
        "kinetic[anticommutator_half]": ("kinetic", operators.hamiltonian_matrix("anticommutator_half", grid, geom, params)),
        "kinetic[p_sandwich]": ("kinetic", operators.hamiltonian_matrix("p_sandwich", grid, geom, params)),
    }
    rows = []
    for i, (bp, kp) in enumerate(CHECK_PAIRS):
        bra = states.GaussianProbe(*bp).sample(grid)
        ket = states.GaussianProbe(*kp).sample(grid)
        ident = quantizer.quantize_element(quantizer.ObservableSpec("unit", restricted=False), bra, ket, geom, params)
        rows.append(("identity", i, abs(ident - bra.inner(ket)), 1e-8))
        for name, (kind, M) in mats.items():
            oracle = quantizer.quantize_element(quantizer.ObservableSpec(kind), bra, ket, geom, params)
            matrix = grid.integrate(np.conj(bra.values) * M.apply(ket.values))
            rows.append((name, i, abs(oracle - matrix), tolerance))
    return rows


def cmd_quantize_check(cfg, out):
    ell = cfg.ell if cfg.ell is not None else 0.1
    p = cfg.params(ell)
    geom = cfg.geometries(default_as=(0.0,))[0]
    if not geom.is_bounded:
        raise ConfigError("quantize-check needs a bounded interval")
    h = cfg.grid_h or ell / 20
    rows = quantize_check_rows(geom, p, h)
    path = write_csv(out / "quantize_check.csv", ["observable", "pair", "discrepancy [1]", "tolerance [1]", "pass"],
                     [(n, str(i), d, t, "yes" if d < t else "no") for n, i, d, t in rows],
                     _meta(cfg, "quantize-check", ell=ell, h=h, **_geom_meta(geom)))
    failed = [r for r in rows if not r[2] < r[3]]
    if failed:
        raise NumericalError(f"{len(failed)} oracle discrepancies above tolerance (see {path})")
    return [path]


def cmd_simulate(cfg, out):
    ell = cfg.ell if cfg.ell is not None else 0.1
    p = cfg.params(ell)
    geom = cfg.geometries(default_as=(0.0,))[0]
    p0 = cfg.p_start if cfg.p_start is not None else 20.0
    T = cfg.T or 10.0 * p.mass * p.q0**2 / p.hbar
    dt = cfg.dt or 2.5e-4
    traj = dynamics.integrate(dynamics.semiclassical_system(geom, p), quantizer.PhaseState(cfg.q_start, p0), T, dt)
    meta = _meta(cfg, "simulate", ell=ell, dt=traj.dt, drift=traj.drift, truncated=traj.truncated, **_geom_meta(geom))
    path = out / f"trajectory_ell{_tag(ell)}_p{_tag(p0)}.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    traj.to_csv(path, meta, energy_unit=p.alpha, force_unit=p.force_unit)
    return [path]


def cmd_limit_study(cfg, out):
    geom = cfg.geometries(default_as=(0.0,))[0]
    p0 = cfg.p_start if cfg.p_start is not None else 1.0
    T = cfg.T or 8.0
    seq = dynamics.default_limit_sequence() if cfg.ells is None else [(e, e * e) for e in cfg.ells]
    rows = dynamics.classical_limit_study(quantizer.PhaseState(cfg.q_start, p0), geom, seq, T, cfg.mass)
    return [write_csv(out / "limit_study.csv",
                      ["n", "ell [q0]", "hbar [1]", "interior_deviation [q0]", "penetration_depth [q0]",
                       "max_abs_force [1]", "energy_drift [1]"],
                      [(str(r.n), r.ell, r.hbar, r.interior_deviation, r.penetration_depth, r.max_abs_force, r.drift)
                       for r in rows],
                      _meta(cfg, "limit-study", **_geom_meta(geom)))]


FIGURES = {
    "fig1": cmd_window, "fig2": cmd_operator, "fig3": cmd_commutator, "fig4": cmd_uncertainty,
    "fig5": cmd_mass, "fig6": cmd_potentials, "fig7": cmd_force,
}


def cmd_figures(cfg, out):
    files = []
    for name, fn in FIGURES.items():
        files += fn(cfg, out / name)
    return files


COMMANDS = {
    "window": cmd_window, "operator": cmd_operator, "commutator": cmd_commutator,
    "uncertainty": cmd_uncertainty, "mass": cmd_mass, "potentials": cmd_potentials, "force": cmd_force,
    "portrait": cmd_portrait, "quantize-check": cmd_quantize_check, "simulate": cmd_simulate,
    "limit-study": cmd_limit_study, "figures": cmd_figures,
}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = resolve_config(ns)
        if ns.command == "figures" and not ns.all:
            raise ConfigError("figures needs --all")
        files = COMMANDS[ns.command](cfg, Path(cfg.out))
    except (ConfigError, DomainError) as exc:
        print(f"fuzzybox: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"fuzzybox: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"fuzzybox: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    for f in files:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
