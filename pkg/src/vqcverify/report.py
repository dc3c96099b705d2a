"""Machine-readable verification reports."""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import TextIO

from .circuit import class_label
from .verifier import MaxEpsilonResult, RefinementConfig, Status, Verdict

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": [
        "status",
        "class",
        "epsilon",
        "regions_explored",
        "max_depth_reached",
        "mode",
        "clip",
        "runtime_ms",
        "per_class_intervals",
    ],
    "properties": {
        "status": {"enum": [s.value for s in Status]},
        "class": {"type": "string", "pattern": "^[01]+$"},
        "epsilon": {"type": "number", "minimum": 0},
        "max_epsilon": {"type": "number", "minimum": 0},
        "bracket": {"type": "array", "items": {"type": ["number", "null"]}, "minItems": 2, "maxItems": 2},
        "witness": {"type": "object", "additionalProperties": {"type": "number"}},
        "regions_explored": {"type": "integer", "minimum": 0},
        "max_depth_reached": {"type": "integer", "minimum": 0},
        "undecided": {"type": "integer", "minimum": 0},
        "mode": {"enum": ["stepwise", "symbolic"]},
        "clip": {"type": "boolean"},
        "strict": {"type": "boolean"},
        "runtime_ms": {"type": "number", "minimum": 0},
        "per_class_intervals": {
            "type": "object",
            "propertyNames": {"pattern": "^[01]+$"},
            "additionalProperties": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        },
    },
}


class ReportError(OSError):
    pass


def verdict_report(v: Verdict, eps: float, cfg: RefinementConfig) -> dict:
    d = {
        "status": v.status.value,
        "class": class_label(v.target_class),
        "epsilon": float(eps),
        "regions_explored": v.regions_explored,
        "max_depth_reached": v.max_depth_reached,
        "undecided": v.undecided,
        "mode": cfg.mode,
        "clip": cfg.clipped,
        "strict": cfg.strict,
        "runtime_ms": v.runtime_ms,
        "per_class_intervals": {k: [lo, hi] for k, (lo, hi) in v.class_intervals.items()},
    }
    if v.witness is not None:
        d["witness"] = dict(v.witness)
    return d


def max_eps_report(r: MaxEpsilonResult, cfg: RefinementConfig) -> dict:
    if r.verdict is None:
        raise ValueError("max-epsilon result carries no verdict")
    d = verdict_report(r.verdict, r.epsilon, cfg)
    d["max_epsilon"] = r.epsilon
    d["bracket"] = [r.lower, r.upper]
    d["evaluations"] = r.evaluations
    d["runtime_ms"] = r.runtime_ms
    if r.epsilon == 0:
        d["diagnostic"] = r.diagnostic
    return d


def summary_line(d: dict) -> str:
    s = f"{d['status'].upper()}: class {d['class']} at eps={d['epsilon']:g}"
    if "max_epsilon" in d:
        lo, hi = d["bracket"]
        hi = "none" if hi is None else f"{hi:g}"
        s = f"max eps {d['max_epsilon']:g} (class {d['class']}, bracket [{lo:g}, {hi}])"
    s += f", {d['regions_explored']} regions, depth {d['max_depth_reached']}, {d['runtime_ms']:.1f} ms"
    if "witness" in d:
        s += f", witness {d['witness']}"
    return s


_STDOUT = object()


def emit_report(report: dict | Verdict, path=None, stream: TextIO | None = _STDOUT, **kw) -> dict:
    """Write ``report`` as JSON to ``path`` and a one-line summary to ``stream``.

    ``stream`` defaults to the current ``sys.stdout``; ``None`` silences it.
    A bare :class:`Verdict` needs ``eps=`` and ``cfg=`` keywords.
    """
    if stream is _STDOUT:
        stream = sys.stdout
    if isinstance(report, Verdict):
        report = verdict_report(report, kw["eps"], kw.get("cfg", RefinementConfig()))
    elif isinstance(report, MaxEpsilonResult):
        report = max_eps_report(report, kw.get("cfg", RefinementConfig()))
    if path is not None:
        try:
            Path(path).write_text(json.dumps(report, indent=2) + "\n")
        except OSError as e:
            raise ReportError(f"cannot write report to {path}: {e.strerror or e}") from None
    if stream is not None:
        print(summary_line(report), file=stream)
    return report


def load_report(path) -> dict:
    return json.loads(Path(path).read_text())


def verdict_from_report(d: dict) -> Verdict:
    return Verdict(
        status=Status(d["status"]),
        target_class=tuple(int(b) for b in d["class"]),
        witness=dict(d["witness"]) if "witness" in d else None,
        regions_explored=d["regions_explored"],
        max_depth_reached=d["max_depth_reached"],
        class_intervals={k: (v[0], v[1]) for k, v in d["per_class_intervals"].items()},
        undecided=d.get("undecided", 0),
        runtime_ms=d["runtime_ms"],
    )
