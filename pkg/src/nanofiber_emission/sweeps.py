"""Parameter sweeps over atom/fiber configurations and their CSV/JSON tables.

Boundary units: lengths in nm, angles in units of pi, rates as gamma/gamma_0.
Config files are flat ``key = value`` text with ``#`` comments.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .atom import PhysicalConstants, QuantizationFrame
from .fiber import FiberGeometry, ModeId, cutoff_V
from .guided_modes import AtomPosition
from .rates import AtomConfiguration, RadiationQuadrature, rate_report

__all__ = [
    "SweepConfig",
    "SweepSpec",
    "SweepTable",
    "SweepError",
    "VARIABLES",
    "OUTPUTS",
    "parse_config_text",
    "load_config",
    "run_sweep",
    "write_table",
    "read_table",
]

VARIABLES = ("radial_distance", "fiber_radius", "phi_Q", "theta_Q")
OUTPUTS = (
    "modes", "modes_directional", "guided", "directional", "radiation", "total",
    "eta_modes", "eta", "eta_directional", "zeta_modes", "zeta",
)
_NEEDS_RADIATION = {"radiation", "total", "eta_modes", "eta", "eta_directional"}


class SweepError(ValueError):
    """Invalid sweep specification or configuration file."""


@dataclass(frozen=True)
class SweepConfig:
    """Fixed parameters of a sweep, in boundary units.

    ``radial_distance = None`` places the atom on the fiber surface and keeps
    it there while the radius varies.
    """

    fiber_radius: float = 400.0
    wavelength: float = 780.0
    n1: float = 1.4537
    n2: float = 1.0
    radial_distance: float | None = None
    atom_phi: float = 0.0
    theta_Q: float = 0.0
    phi_Q: float = 0.0
    F_excited: int = 3
    outputs: tuple[str, ...] = ("guided", "radiation", "total", "eta")
    coarse: bool = False

    def __post_init__(self):
        bad = [o for o in self.outputs if o not in OUTPUTS]
        if bad:
            raise SweepError(f"unknown outputs {bad}; choose from {', '.join(OUTPUTS)}")
        if self.F_excited not in (0, 1, 2, 3):
            raise SweepError("F_excited must be 0, 1, 2 or 3")
        if self.fiber_radius <= 0 or self.wavelength <= 0:
            raise SweepError("fiber_radius and wavelength must be positive")
        if self.radial_distance is not None and self.radial_distance < 0:
            raise SweepError("radial_distance must be non-negative")

    def with_value(self, variable: str, value: float) -> "SweepConfig":
        return replace(self, **{variable: value})

    @property
    def r_nm(self) -> float:
        return self.fiber_radius if self.radial_distance is None else self.radial_distance

    def atom_configuration(self) -> AtomConfiguration:
        nm = 1e-9
        return AtomConfiguration(
            geom=FiberGeometry(self.fiber_radius * nm, self.n1, self.n2),
            pos=AtomPosition(self.r_nm * nm, self.atom_phi * math.pi),
            frame=QuantizationFrame(self.theta_Q * math.pi, (self.phi_Q * math.pi) % (2 * math.pi)),
            constants=PhysicalConstants(wavelength0=self.wavelength * nm),
        )

    def quadrature(self) -> RadiationQuadrature:
        return RadiationQuadrature.coarse() if self.coarse else RadiationQuadrature()

    def as_metadata(self) -> dict[str, str]:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "radial_distance" and v is None:
                out[f.name] = "surface"
            elif isinstance(v, tuple):
                out[f.name] = ",".join(v)
            else:
                out[f.name] = str(v).lower() if isinstance(v, bool) else repr(v)
        return out


_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _coerce(key: str, raw: str):
    raw = raw.strip()
    try:
        if key == "radial_distance":
            return None if raw.lower() == "surface" else float(raw)
        if key == "outputs":
            return tuple(x.strip() for x in raw.split(",") if x.strip())
        if key == "coarse":
            return _BOOL[raw.lower()]
        if key == "F_excited":
            return int(raw)
        return float(raw)
    except (KeyError, ValueError):
        raise SweepError(f"bad value for {key}: {raw!r}") from None


_SPEC_KEYS = {"variable", "start", "stop", "points", "format"}


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines into typed values; unknown keys are errors."""
    known = {f.name for f in fields(SweepConfig)} | _SPEC_KEYS
    out: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SweepError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise SweepError(f"line {lineno}: unknown key {key!r}")
        if key in ("variable", "format"):
            out[key] = value
        elif key == "points":
            out[key] = int(value)
        elif key in ("start", "stop"):
            out[key] = float(value)
        else:
            out[key] = _coerce(key, value)
    return out


def load_config(path) -> dict:
    try:
        return parse_config_text(Path(path).read_text())
    except OSError as exc:
        raise SweepError(f"cannot read config {path}: {exc}") from None


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    points: int
    fixed: SweepConfig = field(default_factory=SweepConfig)
    format: str = "csv"

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise SweepError(f"variable must be one of {', '.join(VARIABLES)}")
        if self.points < 2:
            raise SweepError("a sweep needs at least 2 points")
        if not self.start < self.stop:
            raise SweepError("sweep start must be below stop")
        if self.format not in ("csv", "json"):
            raise SweepError("format must be csv or json")

    @classmethod
    def from_mapping(cls, values: dict) -> "SweepSpec":
        values = dict(values)
        spec_part = {k: values.pop(k) for k in list(values) if k in _SPEC_KEYS}
        missing = {"variable", "start", "stop", "points"} - set(spec_part)
        if missing:
            raise SweepError(f"sweep needs {', '.join(sorted(missing))}")
        return cls(fixed=SweepConfig(**values), **spec_part)

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)

    def metadata(self) -> dict[str, str]:
        meta = {"variable": self.variable, "range": f"{self.start!r} {self.stop!r} {self.points}"}
        meta.update(self.fixed.as_metadata())
        meta["units"] = "lengths nm; angles pi; rates gamma/gamma0"
        return meta


@dataclass(frozen=True)
class SweepTable:
    metadata: dict[str, str]
    columns: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]

    def column(self, name: str) -> np.ndarray:
        return np.array([row[self.columns.index(name)] for row in self.rows])

    def matching(self, prefix: str) -> list[str]:
        """Per-sublevel columns of one quantity, e.g. ``matching("gamma_g")``."""
        return [c for c in self.columns if c.startswith(prefix + "[")]


def _m_label(M) -> str:
    m = float(M)
    text = f"{m:+g}"
    return "0" if m == 0 else text


def _evaluate(args) -> tuple[dict[str, float], tuple[str, ...]]:
    cfg, variable, value = args
    config = cfg.atom_configuration()
    outputs = set(cfg.outputs)
    quad = cfg.quadrature() if outputs & _NEEDS_RADIATION else None
    rep = rate_report(config, quad)
    idx = rep.select_F(cfg.F_excited)
    row: dict[str, float] = {
        variable: float(value),
        "r_over_a": cfg.r_nm / cfg.fiber_radius,
    }

    def put(name, values):
        for i in idx:
            row[f"{name}[{_m_label(rep.sublevels[i].M)}]"] = float(values[i])

    names = rep.mode_names
    if "modes" in outputs:
        for n in names:
            put(f"gamma_{n}", rep.mode_rate(n))
    if "modes_directional" in outputs:
        for n in names:
            for f, s in ((1, "+"), (-1, "-")):
                put(f"gamma_{n}{s}", rep.per_mode_rates[(n, f)])
    if "guided" in outputs:
        put("gamma_g", rep.guided_total)
    if "directional" in outputs:
        for f, s in ((1, "+"), (-1, "-")):
            put(f"gamma_g{s}", rep.directional_guided[f])
    if "radiation" in outputs:
        put("gamma_r", rep.radiation_total)
    if "total" in outputs:
        put("gamma", rep.total)
    if "eta_modes" in outputs:
        for n in names:
            put(f"eta_{n}", rep.fractional_mode(n))
    if "eta" in outputs:
        put("eta", rep.fractional_guided)
    if "eta_directional" in outputs:
        for f, s in ((1, "+"), (-1, "-")):
            put(f"eta{s}", rep.fractional_directional(f))
    if "zeta_modes" in outputs:
        for n in names:
            put(f"zeta_{n}", rep.asymmetry_mode(n))
    if "zeta" in outputs:
        put("zeta", rep.asymmetry_total)
    return row, tuple(names)


def _mode_order(name: str, n1: float, n2: float) -> float:
    mode = ModeId.parse(name)
    return cutoff_V(FiberGeometry(1.0, n1, n2), mode.family, mode.l, mode.m)


def _column_order(rows: list[dict], modes: set[str], variable: str, cfg: SweepConfig) -> list[str]:
    """Deterministic columns: sweep variable, r/a, then quantities in a fixed order."""
    keys = {k for row in rows for k in row if k not in (variable, "r_over_a")}
    modes = sorted(modes, key=lambda n: _mode_order(n, cfg.n1, cfg.n2))
    quantity_order = []
    for out in cfg.outputs:
        if out == "modes":
            quantity_order += [f"gamma_{n}" for n in modes]
        elif out == "modes_directional":
            quantity_order += [f"gamma_{n}{s}" for n in modes for s in "+-"]
        elif out == "guided":
            quantity_order.append("gamma_g")
        elif out == "directional":
            quantity_order += ["gamma_g+", "gamma_g-"]
        elif out == "radiation":
            quantity_order.append("gamma_r")
        elif out == "total":
            quantity_order.append("gamma")
        elif out == "eta_modes":
            quantity_order += [f"eta_{n}" for n in modes]
        elif out == "eta":
            quantity_order.append("eta")
        elif out == "eta_directional":
            quantity_order += ["eta+", "eta-"]
        elif out == "zeta_modes":
            quantity_order += [f"zeta_{n}" for n in modes]
        elif out == "zeta":
            quantity_order.append("zeta")
    ordered = []
    for q in quantity_order:
        ordered += sorted((k for k in keys if k.split("[")[0] == q),
                          key=lambda k: -float(k.split("[")[1].rstrip("]")))
    return [variable, "r_over_a"] + ordered


def run_sweep(spec: SweepSpec, path=None, threads: int = 1, timestamp: str | None = None) -> SweepTable:
    """Evaluate the sweep grid (in grid order) and optionally write it to ``path``.

    Modes that are not guided at some grid points get rate 0 there.
    """
    if path is not None and not Path(path).parent.is_dir():
        raise SweepError(f"cannot write {path}: directory does not exist")
    grid = spec.grid()
    tasks = [(spec.fixed.with_value(spec.variable, float(v)), spec.variable, float(v)) for v in grid]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_evaluate, tasks))
    else:
        results = [_evaluate(t) for t in tasks]
    rows = [row for row, _ in results]
    modes = {n for _, names in results for n in names}
    columns = _column_order(rows, modes, spec.variable, spec.fixed)
    meta = {"created": timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds")}
    meta.update(spec.metadata())
    table = SweepTable(meta, tuple(columns),
                       tuple(tuple(float(row.get(c, 0.0)) for c in columns) for row in rows))
    if path is not None:
        write_table(table, path, spec.format)
    return table


def write_table(table: SweepTable, path, fmt: str | None = None) -> Path:
    path = Path(path)
    fmt = fmt or ("json" if path.suffix == ".json" else "csv")
    if fmt == "json":
        text = json.dumps({"metadata": table.metadata, "columns": list(table.columns),
                           "rows": [list(r) for r in table.rows]}, indent=1)
    else:
        buf = io.StringIO()
        for key, value in table.metadata.items():
            buf.write(f"# {key} = {value}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([repr(v) for v in row])
        text = buf.getvalue()
    try:
        path.write_text(text)
    except OSError as exc:
        raise SweepError(f"cannot write {path}: {exc}") from None
    return path


def read_table(path) -> SweepTable:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        data = json.loads(text)
        return SweepTable(dict(data["metadata"]), tuple(data["columns"]),
                          tuple(tuple(float(v) for v in r) for r in data["rows"]))
    meta: dict[str, str] = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            meta[key.strip()] = value.strip()
        elif line:
            body.append(line)
    reader = csv.reader(body)
    columns = tuple(next(reader))
    rows = tuple(tuple(float(v) for v in r) for r in reader)
    return SweepTable(meta, columns, rows)
