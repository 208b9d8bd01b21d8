"""CSV and JSON output with an embedded run configuration.

Every CSV starts with '#' lines holding the run configuration as one JSON
object, followed by a header row and data rows.  Numbers are written with
12 significant digits in the C locale, so a file produced from the same
configuration is byte-identical whatever the thread count.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import ParseError

CONFIG_PREFIX = "# config: "

# parameters that must not influence the bytes of a data file
VOLATILE_KEYS = frozenset({"threads", "plot", "cache_dir", "out", "out_dir", "json"})


@dataclass
class RunConfig:
    """The parameters of one command invocation."""

    command: str
    params: dict = field(default_factory=dict)
    version: str = __version__

    def stable_params(self) -> dict:
        return {k: v for k, v in sorted(self.params.items()) if k not in VOLATILE_KEYS}

    def to_dict(self, stable: bool = True) -> dict:
        params = self.stable_params() if stable else dict(sorted(self.params.items()))
        return {"command": self.command, "version": self.version, "params": _jsonable(params)}

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        try:
            return cls(command=str(d["command"]), params=dict(d.get("params", {})), version=str(d.get("version", "")))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed run configuration: {exc}") from None


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        x = float(x)
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, os.PathLike):
        return os.fspath(x)
    return x


def fmt(x) -> str:
    """One CSV cell: 12 significant digits for reals, plain text otherwise."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if v == 0.0:
            return "0"  # folds -0.0 as well
        return f"{v:.12g}"
    return str(x)


def csv_text(config: RunConfig, header, rows) -> str:
    buf = io.StringIO()
    buf.write(CONFIG_PREFIX + json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":")) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(header))
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, config: RunConfig, header, rows) -> str:
    text = csv_text(config, header, rows)
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(text)
    return text


def write_metadata(path, config: RunConfig, **extra) -> dict:
    """JSON sidecar: full configuration (volatile keys included) plus budgets and provenance."""
    doc = {"config": config.to_dict(stable=False), **_jsonable(extra)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return doc


def sidecar_path(csv_path) -> str:
    root, _ = os.path.splitext(os.fspath(csv_path))
    return root + ".json"


def read_csv(path):
    """(config, header, rows) from a file written by :func:`write_csv`; cells stay strings."""
    with open(path, encoding="ascii") as fh:
        first = fh.readline()
        if not first.startswith(CONFIG_PREFIX):
            raise ParseError("missing configuration line", 1)
        try:
            config = RunConfig.from_dict(json.loads(first[len(CONFIG_PREFIX):]))
        except json.JSONDecodeError as exc:
            raise ParseError(f"configuration is not JSON: {exc}", 1) from None
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError("missing header row", 2)
        return config, header, [row for row in reader]
