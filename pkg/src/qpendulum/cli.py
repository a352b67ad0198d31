"""Command-line front end: ``qpendulum <subcommand> [options]``.

Every output file starts with a schema line, then comment lines with the
package version, the resolved run configuration and its SHA-256. Floats are
written with 12 significant digits so identical inputs give identical bytes.

Exit codes: 0 success, 2 invalid input, 3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from . import __version__
from .basis import BasisSpec, assemble, default_jmax
from .grid import (EffectivePotentialSpec, GridSolverError, ThetaGrid, effective_potential, expectation,
                   solve_grid)
from .model import InteractionParams, MoleculeSpec, eta_from_molecule, zeta_from_molecule
from .spectral import (ConvergenceError, SolverError, alignment_cosine, orientation_cosine, solve,
                       spectrum)
from .susy import (SusyCase, SusyClass, analytic_wavefunction, partner_pair, partner_spectra,
                   susy_point)
from .topology import find_crossings, gap_map, scan

SUBCOMMANDS = ("spectrum", "scan", "gaps", "crossings", "susy", "grid", "convert", "table1",
               "fieldfree")
SCHEMA_VERSION = 1
FLOAT_FORMAT = ".12g"
# left out of the echo so that the worker count cannot change output bytes
_NOT_ECHOED = ("threads",)


class UsageError(ValueError):
    """Invalid option value; ``flag`` names the offending option."""

    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


@dataclass
class RunConfig:
    subcommand: str
    m: int = 0
    eta: str = "0"
    zeta: str = "0"
    n_states: Optional[int] = None
    method: str = "basis"
    j_max: str = "auto"
    grid_points: int = 512
    energy_cutoff: float = 1.0e4
    output: Optional[str] = None
    format: str = "csv"
    threads: Optional[int] = None
    k_max: int = 3
    pair: Optional[int] = None
    case: str = "1-"
    beta: float = 10.0
    potentials: Optional[str] = None
    dipole: float = 0.0
    rot_const: float = 1.0
    alpha_par: float = 0.0
    alpha_perp: float = 0.0
    field: Optional[float] = None
    intensity: Optional[float] = None

    def echo(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        for k in _NOT_ECHOED:
            d.pop(k)
        return d

    def digest(self) -> str:
        text = json.dumps(self.echo(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def parse_range(text: str, flag: str) -> np.ndarray:
    """``value`` or inclusive ``start:stop:count``."""
    parts = str(text).split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) == 3:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise UsageError(flag, f"count must be >= 1 in {text!r}")
            if count == 1 and start != stop:
                raise UsageError(flag, f"count 1 needs start == stop in {text!r}")
            if stop < start:
                raise UsageError(flag, f"stop < start in {text!r}")
            return np.linspace(start, stop, count)
    except ValueError as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(flag, f"cannot parse {text!r}") from exc
    raise UsageError(flag, f"expected value or start:stop:count, got {text!r}")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "0" if v == 0 else format(v, FLOAT_FORMAT)
    return "" if v is None else str(v)


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[list[Any]]
    notes: list[str] = dataclasses.field(default_factory=list)


def render(table: Table, config: RunConfig) -> str:
    schema = f"qpendulum.{table.name}/v{SCHEMA_VERSION}"
    echo = config.echo()
    if config.format == "json":
        doc = {"schema": schema, "version": __version__, "config": echo,
               "config_sha256": config.digest(), "notes": table.notes, "columns": table.columns,
               "rows": [[_json_value(v) for v in row] for row in table.rows]}
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(f"# schema: {schema}\n")
    buf.write(f"# version: {__version__}\n")
    buf.write(f"# config: {json.dumps(echo, sort_keys=True)}\n")
    buf.write(f"# config_sha256: {config.digest()}\n")
    for note in table.notes:
        buf.write(f"# {note}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        return float(_fmt(v)) if math.isfinite(v) else None
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


def read_header(text: str) -> dict[str, Any]:
    """Schema, version, config echo and digest from a file written by ``render``."""
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        return {k: doc[k] for k in ("schema", "version", "config", "config_sha256")}
    out = {}
    for line in text.splitlines():
        if not line.startswith("# "):
            break
        key, _, value = line[2:].partition(": ")
        if key in ("schema", "version", "config_sha256"):
            out[key] = value
        elif key == "config":
            out[key] = json.loads(value)
    return out


# subcommand bodies

def _params_grid(cfg: RunConfig):
    etas, zetas = parse_range(cfg.eta, "--eta"), parse_range(cfg.zeta, "--zeta")
    if np.any(zetas < 0):
        raise UsageError("--zeta", "must be >= 0")
    if np.any(etas < 0):
        warnings.warn("eta < 0: equivalent to the mirrored problem theta -> pi - theta")
    return etas, zetas


def _jmax(cfg: RunConfig) -> Optional[int]:
    if cfg.j_max == "auto":
        return None
    try:
        j = int(cfg.j_max)
    except ValueError:
        raise UsageError("--j-max", f"expected 'auto' or an integer, got {cfg.j_max!r}") from None
    if j < abs(cfg.m):
        raise UsageError("--j-max", f"{j} < |m|={abs(cfg.m)}")
    return j


def _n_states(cfg: RunConfig, default: int) -> int:
    n = cfg.n_states if cfg.n_states is not None else default
    if n < 1:
        raise UsageError("--n-states", "must be >= 1")
    return n


def _grid(cfg: RunConfig) -> ThetaGrid:
    try:
        return ThetaGrid(cfg.grid_points)
    except ValueError as exc:
        raise UsageError("--grid-points", str(exc)) from None


def _grid_cosines(wf):
    x = np.cos(wf.grid.nodes)
    return expectation(wf, x), expectation(wf, x * x)


def cmd_spectrum(cfg: RunConfig) -> Table:
    etas, zetas = _params_grid(cfg)
    n = _n_states(cfg, 10)
    j_max = _jmax(cfg)
    if cfg.method not in ("basis", "grid", "both"):
        raise UsageError("--method", f"expected basis, grid or both, got {cfg.method!r}")
    rows = []
    for eta in etas:
        for zeta in zetas:
            p = InteractionParams(float(eta), float(zeta))
            if cfg.method in ("basis", "both"):
                s = spectrum(cfg.m, p, n, j_max)
                for r, e in enumerate(s.energies):
                    if e <= cfg.energy_cutoff:
                        rows.append(["basis", s.m, eta, zeta, r, s.m + r, e,
                                     orientation_cosine(s, r), alignment_cosine(s, r)])
            if cfg.method in ("grid", "both"):
                es, wfs = solve_grid(EffectivePotentialSpec(abs(cfg.m), p), _grid(cfg), n)
                for r, (e, wf) in enumerate(zip(es, wfs)):
                    if e <= cfg.energy_cutoff:
                        rows.append(["grid", abs(cfg.m), eta, zeta, r, abs(cfg.m) + r, e,
                                     *_grid_cosines(wf)])
    return Table("spectrum", ["method", "m", "eta", "zeta", "rank", "J", "energy", "cos", "cos2"],
                 rows)


def _scan(cfg: RunConfig, default_states: int):
    etas, zetas = _params_grid(cfg)
    return scan(cfg.m, etas, zetas, _n_states(cfg, default_states), _jmax(cfg),
                threads=cfg.threads)


def cmd_scan(cfg: RunConfig) -> Table:
    s = _scan(cfg, 10)
    rows = [[s.m, eta, zeta, r, s.energies[r, i, j]]
            for i, eta in enumerate(s.eta_grid) for j, zeta in enumerate(s.zeta_grid)
            for r in range(s.n_states) if s.energies[r, i, j] <= cfg.energy_cutoff]
    return Table("scan", ["m", "eta", "zeta", "rank", "energy"], rows)


def cmd_gaps(cfg: RunConfig) -> Table:
    s = _scan(cfg, 10)
    if cfg.pair is not None and not 0 <= cfg.pair < s.n_states - 1:
        raise UsageError("--pair", f"lower rank must lie in [0, {s.n_states - 2}]")
    pairs = [cfg.pair] if cfg.pair is not None else range(s.n_states - 1)
    rows = []
    for r in pairs:
        g = gap_map(s, (r, r + 1))
        for i, eta in enumerate(s.eta_grid):
            for j, zeta in enumerate(s.zeta_grid):
                if s.energies[r + 1, i, j] <= cfg.energy_cutoff:
                    rows.append([s.m, eta, zeta, f"{r}-{r + 1}", g[i, j]])
    return Table("gaps", ["m", "eta", "zeta", "pair", "gap"], rows)


def cmd_crossings(cfg: RunConfig) -> Table:
    if cfg.k_max < 1:
        raise UsageError("--kmax", "must be >= 1")
    zetas = parse_range(cfg.zeta, "--zeta")
    if np.any(zetas < 0):
        raise UsageError("--zeta", "must be >= 0")
    rows = []
    n = _n_states(cfg, cfg.k_max + 2)
    for zeta in zetas:
        if cfg.eta != RunConfig.eta:
            etas = parse_range(cfg.eta, "--eta")
        else:
            top = 2.0 * (cfg.k_max + 0.5) * math.sqrt(zeta)
            etas = np.linspace(0.0, top, max(3, int(math.ceil(top / 0.05)) + 1))
        s = scan(cfg.m, etas, [zeta], n, _jmax(cfg), threads=cfg.threads)
        for c in find_crossings(s, float(zeta), cfg.k_max):
            rows.append([c.k, f"{c.pair[0]}-{c.pair[1]}", c.zeta, c.eta_star, c.predicted, c.gap])
    return Table("crossings", ["k", "pair", "zeta", "eta_star", "predicted_eta", "gap"], rows)


def _coeff(x: float) -> str:
    f = Fraction(x).limit_denominator(64)
    return str(f) if abs(float(f) - x) < 1e-12 else _fmt(x)


def format_potential(coefficients: dict[str, float]) -> str:
    """e.g. ``3/4 csc^2 - 40 cos - 100 cos^2 - 1/4``."""
    out = []
    for key, name in (("csc2", "csc^2"), ("cotcsc", "cot csc"), ("cos", "cos"),
                      ("cos2", "cos^2"), ("const", "")):
        c = coefficients[key]
        if c == 0:
            continue
        mag = _coeff(abs(c))
        term = mag if not name else (name if mag == "1" else f"{mag} {name}")
        out.append(("- " if c < 0 else "+ ") + term)
    if not out:
        return "0"
    text = " ".join(out)
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


def _susy_rows(m: int, case: SusyCase, beta: float, grid: ThetaGrid):
    pt = susy_point(m, case, beta)
    pair = partner_pair(pt)
    e1, e2 = partner_spectra(pair, grid, 1)
    cls = pair.classification
    ref = e2[0] if cls.susy_class is SusyClass.INVERTED else e1[0]
    return pt, pair, e1[0], e2[0], ref - pt.epsilon


def cmd_susy(cfg: RunConfig) -> Table:
    try:
        case = SusyCase.parse(cfg.case)
    except ValueError as exc:
        raise UsageError("--case", str(exc)) from None
    if not cfg.beta > 0:
        raise UsageError("--beta", "must be > 0")
    if cfg.m < 0:
        raise UsageError("--m", "must be >= 0")
    grid = _grid(cfg)
    pt, pair, e1, e2, dev = _susy_rows(cfg.m, case, cfg.beta, grid)
    if pt.eta < 0:
        warnings.warn("eta < 0: equivalent to the mirrored problem theta -> pi - theta")
    cls = pair.classification
    rows = [
        ["m", pt.m], ["case", pt.case.value], ["alpha", pt.alpha], ["beta", pt.beta],
        ["gamma", pt.gamma], ["eta", pt.eta], ["zeta", pt.zeta], ["k", pt.k],
        ["epsilon", pt.epsilon], ["V1", format_potential(pair.v1.coefficients)],
        ["V2", format_potential(pair.v2.coefficients)],
        ["m_tilde", pair.partner_labels[0] if pair.partner_labels else ""],
        ["k_tilde", pair.partner_labels[1] if pair.partner_labels else ""],
        ["class", cls.susy_class.value], ["p0", cls.psi_powers[0]], ["p_pi", cls.psi_powers[1]],
        ["inverse_p0", cls.inverse_powers[0]], ["inverse_p_pi", cls.inverse_powers[1]],
        ["psi_normalizable", cls.psi_normalizable],
        ["inverse_normalizable", cls.inverse_normalizable], ["marginal", cls.marginal],
        ["literature_class", cls.published_verdict.susy_class.value],
        ["agrees_with_literature", cls.agrees_with_published],
        ["E0_1", e1], ["E0_2", e2], ["E0_1_minus_epsilon", e1 - pt.epsilon],
        ["E0_2_minus_epsilon", e2 - pt.epsilon], ["deviation", dev],
    ]
    if cfg.potentials:
        th = grid.nodes
        pot = Table("susy_potentials", ["theta", "V1", "V2"],
                    [list(r) for r in zip(th, effective_potential(pair.v1, th),
                                          effective_potential(pair.v2, th))])
        with open(cfg.potentials, "w", newline="") as fh:
            fh.write(render(pot, dataclasses.replace(cfg, format="csv")))
    return Table("susy", ["key", "value"], rows)


def cmd_grid(cfg: RunConfig) -> Table:
    etas, zetas = _params_grid(cfg)
    if len(etas) != 1 or len(zetas) != 1:
        raise UsageError("--eta", "grid dumps take a single (eta, zeta) point")
    spec = EffectivePotentialSpec(abs(cfg.m), InteractionParams(float(etas[0]), float(zetas[0])))
    grid = _grid(cfg)
    es, wfs = solve_grid(spec, grid, _n_states(cfg, 5))
    keep = [i for i, e in enumerate(es) if e <= cfg.energy_cutoff]
    th = grid.nodes
    v = effective_potential(spec, th)
    rows = [[th[i], v[i], *(wfs[s].values[i] for s in keep)] for i in range(grid.n)]
    notes = ["energies: " + ",".join(_fmt(es[s]) for s in keep)]
    return Table("grid", ["theta", "V", *(f"psi_{s}" for s in keep)], rows, notes)


def cmd_convert(cfg: RunConfig) -> Table:
    try:
        mol = MoleculeSpec(cfg.dipole, cfg.rot_const, cfg.alpha_par, cfg.alpha_perp, cfg.field,
                           cfg.intensity)
    except ValueError as exc:
        raise UsageError("--rot-const/--alpha-par/--alpha-perp/--field/--intensity", str(exc)) from None
    rows = [["eta", eta_from_molecule(mol)]]
    if mol.intensity is not None or mol.field_static is not None:
        rows.append(["zeta", zeta_from_molecule(mol)])
        if rows[-1][1] > 0:
            p = InteractionParams(rows[0][1], rows[-1][1])
            rows.append(["topological_index", p.topological_index])
    rows.append(["rot_energy_joule", mol.rot_energy])
    return Table("convert", ["quantity", "value"], rows)


TABLE1_ROWS = ((0, "1-"), (1, "1+"), (1, "1-"), (1, "2+"), (1, "2-"),
               (2, "1+"), (2, "1-"), (2, "2+"), (2, "2-"))


def cmd_table1(cfg: RunConfig) -> Table:
    if not cfg.beta > 0:
        raise UsageError("--beta", "must be > 0")
    grid = _grid(cfg)
    rows = []
    for m, tag in TABLE1_ROWS:
        pt, pair, e1, e2, dev = _susy_rows(m, SusyCase.parse(tag), cfg.beta, grid)
        labels = pair.partner_labels or ("", "")
        rows.append([m, tag if m else "any", pair.classification.susy_class.value,
                     format_potential(pair.v1.coefficients), format_potential(pair.v2.coefficients),
                     labels[0], labels[1], pt.eta, pt.zeta, pt.epsilon, e1, e2, dev])
    notes = ["deviation: E0_2 - epsilon for inverted rows, E0_1 - epsilon otherwise"]
    return Table("table1", ["m", "case", "class", "V1", "V2", "m_tilde", "k_tilde", "eta", "zeta",
                            "epsilon", "E0_1", "E0_2", "deviation"], rows, notes)


def cmd_fieldfree(cfg: RunConfig) -> Table:
    n = _n_states(cfg, 6)
    m = abs(cfg.m)
    j_max = _jmax(cfg) or m + n + 10
    s = solve(assemble(BasisSpec(m, j_max), InteractionParams(0.0, 0.0)), n)
    es, _ = solve_grid(EffectivePotentialSpec(m, InteractionParams(0.0, 0.0)), _grid(cfg), n)
    rows = []
    for r in range(n):
        j = m + r
        rows.append([m, j, j * (j + 1), s.energies[r], es[r], 2 * j + 1])
    return Table("fieldfree", ["m", "J", "exact", "basis", "grid", "degeneracy"], rows)


COMMANDS = {"spectrum": cmd_spectrum, "scan": cmd_scan, "gaps": cmd_gaps,
            "crossings": cmd_crossings, "susy": cmd_susy, "grid": cmd_grid,
            "convert": cmd_convert, "table1": cmd_table1, "fieldfree": cmd_fieldfree}


def run(config: RunConfig, stdout=None) -> int:
    """Execute one subcommand; returns the process exit code."""
    stdout = stdout or sys.stdout
    try:
        if config.subcommand not in COMMANDS:
            raise UsageError("subcommand", f"unknown {config.subcommand!r}")
        if config.format not in ("csv", "json"):
            raise UsageError("--format", f"expected csv or json, got {config.format!r}")
        if config.threads is not None and config.threads < 1:
            raise UsageError("--threads", "must be >= 1")
        if not config.energy_cutoff > 0 and not math.isinf(config.energy_cutoff):
            raise UsageError("--energy-cutoff", "must be > 0")
        table = COMMANDS[config.subcommand](config)
        text = render(table, config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, GridSolverError, ConvergenceError, np.linalg.LinAlgError,
            OverflowError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if config.output:
        try:
            with open(config.output, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: --output: {exc}", file=sys.stderr)
            return 2
    else:
        stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    common.add_argument("--m", type=int)
    common.add_argument("--eta", help="value or start:stop:count")
    common.add_argument("--zeta", help="value or start:stop:count")
    common.add_argument("--n-states", dest="n_states", type=int)
    common.add_argument("--method", choices=("basis", "grid", "both"))
    common.add_argument("--j-max", dest="j_max", help="'auto' or an integer")
    common.add_argument("--grid-points", dest="grid_points", type=int)
    common.add_argument("--energy-cutoff", dest="energy_cutoff", type=float)
    common.add_argument("-o", "--output")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--threads", type=int, help="worker cap (default: QPENDULUM_THREADS or all cores)")

    p = argparse.ArgumentParser(prog="qpendulum", description="Spherical quantum pendulum spectra")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "crossings":
            sp.add_argument("--kmax", dest="k_max", type=int)
        if name == "gaps":
            sp.add_argument("--pair", type=int, help="lower rank r of the pair (r, r+1)")
        if name in ("susy", "table1"):
            sp.add_argument("--beta", type=float)
        if name == "susy":
            sp.add_argument("--case", help="1+, 1-, 2+ or 2-")
            sp.add_argument("--potentials", help="also write theta, V1, V2 to this CSV")
        if name == "convert":
            sp.add_argument("--dipole", type=float, help="debye")
            sp.add_argument("--rot-const", dest="rot_const", type=float, help="cm^-1")
            sp.add_argument("--alpha-par", dest="alpha_par", type=float, help="Angstrom^3")
            sp.add_argument("--alpha-perp", dest="alpha_perp", type=float, help="Angstrom^3")
            sp.add_argument("--field", type=float, help="static field, kV/cm")
            sp.add_argument("--intensity", type=float, help="laser intensity, W/cm^2")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    base: dict[str, Any] = {}
    if ns.config:
        try:
            with open(ns.config) as fh:
                base = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError("--config", str(exc)) from None
        names = {f.name for f in dataclasses.fields(RunConfig)}
        unknown = set(base) - names
        if unknown:
            raise UsageError("--config", f"unknown keys {sorted(unknown)}")
        if base.get("subcommand", ns.subcommand) != ns.subcommand:
            raise UsageError("--config", f"file is for {base['subcommand']!r}, not {ns.subcommand!r}")
    for key, value in vars(ns).items():
        if key != "config" and value is not None:
            base[key] = value
    base["subcommand"] = ns.subcommand
    for key in ("eta", "zeta", "j_max"):
        if key in base:
            base[key] = str(base[key])
    return RunConfig(**base)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except (UsageError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        warnings.showwarning = lambda msg, *a, **k: print(f"warning: {msg}", file=sys.stderr)
        return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
