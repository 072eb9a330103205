"""Report container and lossless text formats (JSON, CSV) with 17-digit floats."""
import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

FLOAT_FORMAT = ".17g"


def _float(x):
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, FLOAT_FORMAT)
    # keep floats recognizable as floats when read back
    return s if any(c in s for c in ".en") else s + ".0"


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, tuple):
        return list(obj)
    return obj


def dumps(obj, indent=2, _level=0):
    """JSON text with every float written to 17 significant digits."""
    obj = _plain(obj)
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if isinstance(obj, float):
        return _float(obj)
    if obj is None or isinstance(obj, (bool, str, int)):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(_plain(v), (dict, list)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [inner + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def loads(text):
    return json.loads(text)


@dataclass
class Report:
    request: dict
    results: dict
    wall_time: float
    version: str
    exit_code: int = 0
    error: dict = field(default_factory=dict)

    def to_dict(self):
        out = {"request": self.request, "results": self.results, "wall_time": self.wall_time,
               "version": self.version, "exit_code": self.exit_code}
        if self.error:
            out["error"] = self.error
        return out

    @classmethod
    def from_dict(cls, d):
        return cls(d["request"], d["results"], d["wall_time"], d["version"], d.get("exit_code", 0),
                   d.get("error", {}))

    def to_json(self):
        return dumps(self.to_dict()) + "\n"

    def to_csv(self):
        """Flatten an orbit or an estimate into a table; other results become key/value rows."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        res = self.results
        fmt = lambda v: format(float(v), FLOAT_FORMAT)  # noqa: E731
        if "orbit" in res:
            pts = res["orbit"]["points"]
            d = len(pts[0]) if pts else 0
            w.writerow(["iteration"] + [f"x{i + 1}" for i in range(d)])
            for i, p in enumerate(pts):
                w.writerow([i] + [fmt(v) for v in p])
        elif "estimate" in res:
            e = res["estimate"]
            wit = e.get("witness") or [[], []]
            w.writerow(["quantity", "direction", "value", "samples_used", "seed"]
                       + [f"x{i + 1}" for i in range(len(wit[0]))] + [f"y{i + 1}" for i in range(len(wit[1]))])
            w.writerow([e["quantity"], e["direction"], fmt(e["value"]), e["samples_used"], e["seed"]]
                       + [fmt(v) for v in wit[0]] + [fmt(v) for v in wit[1]])
        else:
            w.writerow(["key", "value"])
            for k, v in _flatten(res):
                w.writerow([k, fmt(v) if isinstance(v, float) else v])
        return buf.getvalue()


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj
