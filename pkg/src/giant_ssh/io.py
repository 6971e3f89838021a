"""Run configuration and deterministic table serialization."""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Sequence

import yaml

from giant_ssh.errors import InputError
from giant_ssh.lattice import AtomCoupling, ProbeConfig, SshParams

_PI = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*\*?\s*pi\s*$")


def parse_angle(value: Any) -> float:
    """Accept plain numbers or strings such as ``"0.8pi"`` / ``"pi"``."""
    if isinstance(value, (int, float)):
        return float(value)
    s = str(value).strip()
    m = _PI.match(s)
    if m:
        return float(m.group(1) or 1.0) * math.pi
    try:
        return float(s)
    except ValueError:
        raise InputError(f"cannot parse angle {value!r}") from None


@dataclass
class RunConfig:
    # waveguide
    L: int = 100
    q: float = 1.0
    delta: float = 0.5
    theta: float = 0.8 * math.pi
    boundary: str = "periodic"
    # giant atom
    kind: str = "AA"
    n: int = 50
    m: int = 51
    g: float = 1.0
    d_list: list[int] | None = None
    # probe atom
    probe_enabled: bool = False
    probe_sublattice: str = "B"
    probe_cell: int | None = None
    gp: float = 0.1
    probe_frequency: float = 0.0
    # sweeps
    theta_min: float = 0.0
    theta_max: float = 2 * math.pi
    theta_points: int = 201
    k_list: list[float] = field(default_factory=lambda: [1.1, 1.3, 1.5])
    # distribution / dynamics
    target: str = "zero"
    t_max: float | None = None
    t_points: int = 2001
    # output and numerics
    output_dir: str = "out"
    output_format: str = "csv"
    absolute_units: bool = False
    eps: float = 1e-6
    workers: int = 1
    t2_scale: float = 1.0

    _angles = ("theta", "theta_min", "theta_max")

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InputError(f"unknown config key(s): {', '.join(unknown)}")
        cfg = cls()
        for key, value in data.items():
            if value is None:
                continue
            setattr(cfg, key, value)
        cfg.normalize()
        return cfg

    @classmethod
    def load(cls, path: str | Path | None, overrides: dict | None = None) -> "RunConfig":
        data: dict = {}
        if path is not None:
            text = Path(path).read_text(encoding="utf-8")
            loaded = yaml.safe_load(text) or {}
            if not isinstance(loaded, dict) or any(isinstance(v, dict) for v in loaded.values()):
                raise InputError(f"{path}: config must be a flat key-value mapping")
            data.update(loaded)
        data.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.from_mapping(data)

    def normalize(self) -> None:
        for name in self._angles:
            setattr(self, name, parse_angle(getattr(self, name)))
        self.k_list = [float(parse_angle(k) / math.pi) if isinstance(k, str) else float(k) for k in self.k_list]
        self.validate()

    def validate(self) -> None:
        def bad(name, why):
            raise InputError(f"config field '{name}': {why}")

        for name in ("L", "n", "m", "theta_points", "t_points", "workers"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                bad(name, f"expected an integer, got {v!r}")
        if self.L < 2:
            bad("L", "must be >= 2")
        for name in ("n", "m"):
            if not 1 <= getattr(self, name) <= self.L:
                bad(name, f"must lie in [1, {self.L}]")
        if self.probe_cell is not None and not 1 <= self.probe_cell <= self.L:
            bad("probe_cell", f"must lie in [1, {self.L}]")
        if self.d_list is not None:
            for d in self.d_list:
                if not isinstance(d, int) or d < 0 or self.n + d > self.L:
                    bad("d_list", f"entry {d!r} puts the second leg outside [1, {self.L}]")
        if self.theta_points < 2:
            bad("theta_points", "sweeps need at least 2 points")
        if not self.theta_max > self.theta_min:
            bad("theta_max", "empty theta range (theta_max must exceed theta_min)")
        if self.output_format not in ("csv", "json"):
            bad("output_format", "must be 'csv' or 'json'")
        if self.kind not in ("AA", "AB"):
            bad("kind", "must be 'AA' or 'AB'")
        if self.boundary not in ("periodic", "open"):
            bad("boundary", "must be 'periodic' or 'open'")
        if not self.eps > 0:
            bad("eps", "must be positive")
        try:
            self.params()
            self.atom()
            self.probe()
        except InputError as exc:
            raise InputError(f"config: {exc}") from None

    def params(self, theta: float | None = None) -> SshParams:
        return SshParams(self.L, self.q, self.delta, self.theta if theta is None else theta, self.boundary)

    def atom(self, m: int | None = None) -> AtomCoupling:
        return AtomCoupling(self.kind, self.n, self.m if m is None else m, self.g)

    def probe(self) -> ProbeConfig:
        cell = self.probe_cell if self.probe_cell is not None else max(1, self.n - 5)
        return ProbeConfig(self.probe_enabled, self.probe_sublattice, cell, self.gp, self.probe_frequency)

    def energy_unit(self) -> float:
        return 1.0 if self.absolute_units else self.q


# --- tables ------------------------------------------------------------------


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        out = f"{value:.14e}"
        return "0.00000000000000e+00" if out.startswith("-0.0") and float(out) == 0 else out
    return str(value)


_PARSERS = {"float": float, "int": int, "str": str, "bool": lambda s: s == "true"}

# schema name -> (columns, sort keys)
SCHEMAS: dict[str, tuple[list[tuple[str, str]], tuple[str, ...]]] = {
    "spectrum": ([("theta", "float"), ("level_index", "int"), ("energy", "float"), ("class", "str")], ("theta", "level_index")),
    "distribution": (
        [("cell", "int"), ("A_amplitude", "float"), ("B_amplitude", "float"), ("A_prob", "float"),
         ("B_prob", "float"), ("source", "str")],
        ("source", "cell"),
    ),
    "g_couplings": ([("k", "float"), ("sigma", "int"), ("re_g", "float"), ("im_g", "float"), ("abs_g", "float")], ("sigma", "k")),
    "G_matrix": (
        [("k", "float"), ("k_prime", "float"), ("sigma", "int"), ("sigma_prime", "int"), ("abs_G", "float"),
         ("re_G", "float"), ("im_G", "float")],
        ("sigma", "sigma_prime", "k", "k_prime"),
    ),
    "G_vs_theta": ([("theta", "float"), ("k", "float"), ("abs_G", "float")], ("k", "theta")),
    "rabi": ([("time", "float"), ("probe_population", "float"), ("atom_population", "float"), ("zero_mode_overlap", "float")], ("time",)),
    "validation": ([("check", "str"), ("passed", "bool"), ("residual", "float"), ("tolerance", "float")], ()),
}


@dataclass
class OutputTable:
    name: str
    schema: str
    rows: list[tuple]
    footer: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.schema not in SCHEMAS:
            raise InputError(f"unknown table schema {self.schema!r}")
        width = len(self.columns)
        for row in self.rows:
            if len(row) != width:
                raise InputError(f"table {self.name}: row {row!r} does not match {width} columns")
        if self.keys:
            pos = [self.column_names.index(k) for k in self.keys]
            self.rows.sort(key=lambda r: tuple(r[i] for i in pos))

    @property
    def columns(self) -> list[tuple[str, str]]:
        return SCHEMAS[self.schema][0]

    @property
    def keys(self) -> tuple[str, ...]:
        return SCHEMAS[self.schema][1]

    @property
    def column_names(self) -> list[str]:
        return [c for c, _ in self.columns]

    def column(self, name: str) -> list:
        i = self.column_names.index(name)
        return [r[i] for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.column_names)
        for row in self.rows:
            w.writerow([format_value(v) for v in row])
        for key in sorted(self.footer):
            buf.write(f"# {key}={format_value(self.footer[key])}\n")
        return buf.getvalue()

    def to_json(self) -> str:
        def clean(v):
            return float(format_value(v)) if isinstance(v, float) else v

        doc = {
            "name": self.name,
            "schema": self.schema,
            "columns": self.column_names,
            "rows": [[clean(v) for v in r] for r in self.rows],
            "footer": {k: clean(v) for k, v in sorted(self.footer.items())},
        }
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"

    def write(self, directory: str | Path, fmt: str = "csv") -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{self.name}.{fmt}"
        text = self.to_csv() if fmt == "csv" else self.to_json()
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        return path


def schema_for(name: str) -> str:
    """Schema of a table from its file stem, e.g. ``spectrum_AB_d3`` -> ``spectrum``."""
    for schema in sorted(SCHEMAS, key=len, reverse=True):
        if name == schema or name.startswith(schema + "_"):
            return schema
    raise InputError(f"no schema matches table name {name!r}")


def _parse_value(text: str, typ: str):
    if typ == "float" and text == "nan":
        return float("nan")
    return _PARSERS[typ](text)


def parse_csv(text: str, name: str, schema: str | None = None) -> OutputTable:
    """Inverse of ``OutputTable.to_csv``; validates the header against the schema."""
    schema = schema or schema_for(name)
    columns = SCHEMAS[schema][0]
    lines = text.split("\n")
    body = [ln for ln in lines if ln and not ln.startswith("# ")]
    reader = csv.reader(body)
    header = next(reader)
    if header != [c for c, _ in columns]:
        raise InputError(f"{name}: header {header} does not match schema {schema!r}")
    rows = [tuple(_parse_value(v, t) for (_, t), v in zip(columns, r)) for r in reader]
    footer: dict[str, Any] = {}
    for ln in lines:
        if ln.startswith("# "):
            key, _, val = ln[2:].partition("=")
            try:
                footer[key] = float(val)
            except ValueError:
                footer[key] = val
    return OutputTable(name, schema, rows, footer)


def parse_json(text: str) -> OutputTable:
    doc = json.loads(text)
    columns = SCHEMAS[doc["schema"]][0]
    if doc["columns"] != [c for c, _ in columns]:
        raise InputError(f"{doc['name']}: columns do not match schema {doc['schema']!r}")
    rows = [tuple(_PARSERS[t](v) if v is not None else float("nan") for (_, t), v in zip(columns, r)) for r in doc["rows"]]
    return OutputTable(doc["name"], doc["schema"], rows, doc["footer"])


def read_table(path: str | Path) -> OutputTable:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        return parse_json(text)
    return parse_csv(text, path.stem)


def write_tables(tables: Sequence[OutputTable], directory: str | Path, fmt: str) -> list[Path]:
    return [t.write(directory, fmt) for t in tables]
