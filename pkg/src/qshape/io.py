"""Point-file parsing and result documents.

Point files are CSV (``x,y`` per line, optional header, ``#`` comments, or
``index,x,y`` with contiguous 1-based indices) or JSON (an array of
``[x, y]`` pairs). Result documents are JSON with every float written to
17 significant digits so they round-trip exactly.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, TooFewPoints
from .shape_core import PointConfig


def _float(tok: str, line: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"not a number: {tok.strip()!r}", line) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite coordinate {tok.strip()!r}", line)
    return v


def _parse_csv(text: str) -> list:
    rows = []
    seen_data = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = [t.strip() for t in line.split(",")]
        if not seen_data and not rows:
            try:
                [float(t) for t in toks]
            except ValueError:
                seen_data = True  # header line
                continue
        seen_data = True
        if len(toks) not in (2, 3):
            raise ParseError(f"expected 2 or 3 fields, got {len(toks)}", lineno)
        vals = [_float(t, lineno) for t in toks]
        rows.append((lineno, vals))

    if rows and all(len(v) == 3 for _, v in rows):
        for pos, (lineno, v) in enumerate(rows, start=1):
            if v[0] != pos:
                raise ParseError(f"index {v[0]:g} out of sequence, expected {pos}", lineno)
        return [(v[1], v[2]) for _, v in rows]
    if any(len(v) == 3 for _, v in rows):
        lineno = next(ln for ln, v in rows if len(v) != len(rows[0][1]))
        raise ParseError("mixed 2- and 3-column rows", lineno)
    return [tuple(v) for _, v in rows]


def _parse_json(text: str) -> list:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if not isinstance(data, list):
        raise ParseError("expected a JSON array of [x, y] pairs")
    out = []
    for i, pair in enumerate(data):
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)):
            raise ParseError(f"element {i} is not an [x, y] pair of numbers")
        if not all(math.isfinite(v) for v in pair):
            raise ParseError(f"element {i} has a non-finite coordinate")
        out.append((float(pair[0]), float(pair[1])))
    return out


def guess_format(path) -> str:
    return "json" if str(path).lower().endswith(".json") else "csv"


def parse_points(data, format: str = "csv") -> PointConfig:
    """Parse point-file bytes (or text) into a PointConfig, keeping file order."""
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not UTF-8: {exc}") from None
    if format == "csv":
        pairs = _parse_csv(data)
    elif format == "json":
        pairs = _parse_json(data)
    else:
        raise ValueError(f"unknown point format {format!r}")
    if len(pairs) < 3:
        raise TooFewPoints(f"need at least 3 points, got {len(pairs)}")
    return PointConfig.from_xy(np.array(pairs, dtype=float))


def load_points(path, format: str | None = None) -> PointConfig:
    path = Path(path)
    return parse_points(path.read_bytes(), format or guess_format(path))


def serialize_points(config: PointConfig, format: str = "csv") -> str:
    xy = config.xy
    if format == "csv":
        return "".join(f"{fmt_float(x)},{fmt_float(y)}\n" for x, y in xy)
    if format == "json":
        return dumps([[float(x), float(y)] for x, y in xy]) + "\n"
    raise ValueError(f"unknown point format {format!r}")


def fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite value {x!r}")
    s = "%.17g" % x
    if "." not in s and "e" not in s and "n" not in s:
        s += ".0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON encoder writing floats with 17 significant digits, keys sorted."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps([obj.real, obj.imag], indent, _level)
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent, _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}"
                 for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, (bool, complex)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def complex_pairs(values) -> list:
    """Complex numbers as [re, im] pairs."""
    return [[float(v.real), float(v.imag)] for v in np.asarray(values, dtype=complex).ravel()]


def digest(blobs) -> str:
    h = hashlib.sha256()
    for b in blobs:
        h.update(hashlib.sha256(b).digest())
    return h.hexdigest()


@dataclass
class ResultDocument:
    command: list
    input_digest: str
    payload: dict
    version: str
    seed: int = 0
    error: dict | None = field(default=None)

    def to_dict(self) -> dict:
        d = {
            "command": list(self.command),
            "input_digest": self.input_digest,
            "payload": self.payload,
            "version": self.version,
            "seed": self.seed,
        }
        if self.error is not None:
            d["error"] = self.error
        return d

    def to_json(self) -> str:
        return dumps(self.to_dict()) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ResultDocument":
        d = json.loads(text)
        return cls(
            command=d["command"],
            input_digest=d["input_digest"],
            payload=d["payload"],
            version=d["version"],
            seed=d["seed"],
            error=d.get("error"),
        )
