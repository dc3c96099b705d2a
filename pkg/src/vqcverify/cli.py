"""Command-line front end: ``vqcverify {run,verify,max-eps,model,dataset}``.

Exit codes: 0 robust/success, 1 falsified, 2 unknown, 64 usage error,
65 bad input data, 66 missing input file, 70 internal error, 73 cannot
write output.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .abstract import SoundnessError
from .circuit import Circuit, CircuitError, basis_label, class_label, load_circuit, print_circuit
from .concrete import UnboundVariable, class_probabilities, run_concrete
from .datasets import (
    DatasetError,
    DatasetSample,
    amplitude_samples,
    data_path,
    load_digits_4x4,
    load_iris,
    load_mnist_4x4,
)
from .models import MODEL_ARITY, ModelError
from .report import ReportError, emit_report, max_eps_report, verdict_report
from .verifier import RefinementConfig, Status, VerificationProblem, max_epsilon, verify_robust
from .weights import WeightsError, WeightsFileMissing, load_weights

EX_USAGE, EX_DATAERR, EX_NOINPUT, EX_SOFTWARE, EX_CANTCREAT = 64, 65, 66, 70, 73


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would read as "unknown"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _on_off(s: str) -> bool:
    if s.lower() in ("on", "true", "1", "yes"):
        return True
    if s.lower() in ("off", "false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected on/off, got {s!r}")


def _positive(s: str) -> float:
    v = float(s)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s!r}")
    return v


def _non_negative(s: str) -> float:
    v = float(s)
    if not (v >= 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {s!r}")
    return v


def load_source(args) -> Circuit:
    if args.weights:
        return load_weights(args.weights).circuit()
    source = args.circuit
    if source.startswith("builtin:"):
        path = data_path(source[len("builtin:"):] + ".vqc")
        if not path.exists():
            raise UsageError(f"no builtin circuit named {source[8:]!r}")
        return load_circuit(path)
    return load_circuit(source)


def parse_inputs(text: str, c: Circuit) -> dict[str, float]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    try:
        if parts and all("=" in p for p in parts):
            env = {k.strip(): float(v) for k, v in (p.split("=", 1) for p in parts)}
            missing = [v for v in c.input_vars if v not in env]
            extra = [k for k in env if k not in c.input_vars]
            if missing or extra:
                raise UsageError(f"inputs must bind exactly {list(c.input_vars)}")
            return env
        vals = [float(p) for p in parts]
    except ValueError as e:
        raise UsageError(f"bad input values {text!r}: {e}") from None
    if len(vals) != len(c.input_vars):
        raise UsageError(f"circuit takes {len(c.input_vars)} inputs {list(c.input_vars)}, got {len(vals)}")
    if not all(math.isfinite(v) for v in vals):
        raise UsageError("input values must be finite")
    return dict(zip(c.input_vars, vals))


def load_samples(path) -> list[DatasetSample]:
    try:
        doc = json.loads(Path(path).read_text())
        return [DatasetSample.from_json(s) for s in doc["samples"]]
    except FileNotFoundError:
        raise
    except (ValueError, KeyError, TypeError) as e:
        raise DatasetError(f"{path}: not a samples file ({e})") from None


def _config(args) -> RefinementConfig:
    return RefinementConfig(
        max_depth=args.max_depth,
        min_width=args.min_width,
        mode=args.mode,
        clipped=args.clip,
        parallel=args.parallel,
        strict=args.strict,
        max_regions=args.max_regions,
    )


def _centers(args, c: Circuit):
    """(tag, center) pairs from ``-i`` or ``--samples``."""
    if args.samples:
        samples = load_samples(args.samples)
        if args.limit is not None:
            samples = samples[: args.limit]
        for k, s in enumerate(samples):
            yield {"sample": k, "label": s.label}, s.env(c.input_vars)
    elif args.inputs is not None:
        yield {}, parse_inputs(args.inputs, c)
    else:
        raise UsageError("give -i/--inputs or --samples")


def _finish(reports: list[dict], out) -> int:
    if out is not None:
        doc = reports[0] if len(reports) == 1 and "sample" not in reports[0] else {"reports": reports}
        try:
            Path(out).write_text(json.dumps(doc, indent=2) + "\n")
        except OSError as e:
            raise ReportError(f"cannot write report to {out}: {e.strerror or e}") from None
    statuses = {r["status"] for r in reports}
    if Status.FALSIFIED.value in statuses:
        return 1
    if Status.UNKNOWN.value in statuses:
        return 2
    return 0


def cmd_run(args) -> int:
    c = load_source(args)
    env = parse_inputs(args.inputs, c)
    dist, cls = run_concrete(c, env)
    for e, p in enumerate(dist):
        print(f"{basis_label(e, c.n_qubits)}: {p:.6f}")
    probs = class_probabilities(dist, c.observed)
    print(f"class {class_label(cls)} (p={probs.max():.6f})")
    return 0


def cmd_verify(args) -> int:
    c = load_source(args)
    cfg = _config(args)
    reports = []
    for tag, center in _centers(args, c):
        v = verify_robust(VerificationProblem(c, center, args.eps, None, cfg))
        report = verdict_report(v, args.eps, cfg)
        report.update(tag)
        prefix = f"[sample {tag['sample']}] " if tag else ""
        print(prefix, end="")
        emit_report(report, None)
        reports.append(report)
    return _finish(reports, args.out)


def cmd_max_eps(args) -> int:
    if args.eps_min > args.eps_max:
        raise UsageError("--eps-min must not exceed --eps-max")
    c = load_source(args)
    cfg = _config(args)
    reports = []
    for tag, center in _centers(args, c):
        r = max_epsilon(c, center, None, args.eps_min, args.eps_max, args.tau, cfg)
        report = max_eps_report(r, cfg)
        # the search itself succeeded even when the radius is 0
        report["status"] = Status.ROBUST.value if r.epsilon > 0 else r.verdict.status.value
        report.update(tag)
        print(f"[sample {tag['sample']}] " if tag else "", end="")
        emit_report(report, None)
        if r.diagnostic and r.epsilon == 0:
            print(f"  note: {r.diagnostic}", file=sys.stderr)
        reports.append(report)
    return _finish(reports, args.out)


def cmd_model(args) -> int:
    wf = load_weights(args.weights)
    if args.kind != wf.model:
        raise UsageError(f"weights file is for model {wf.model!r}, not {args.kind!r}")
    text = print_circuit(wf.circuit())
    if args.emit:
        try:
            Path(args.emit).write_text(text)
        except OSError as e:
            raise ReportError(f"cannot write {args.emit}: {e.strerror or e}") from None
        print(f"wrote {args.kind} circuit to {args.emit}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_dataset(args) -> int:
    classes = [s.strip() for s in args.classes.split(",")] if args.classes else None
    if args.name == "iris":
        if len(args.paths) > 1:
            raise UsageError("iris takes at most one CSV path")
        samples = load_iris(args.paths[0] if args.paths else None, classes or ("setosa", "versicolor"))
    else:
        try:
            digits = [int(d) for d in classes] if classes else [0, 1]
        except ValueError:
            raise UsageError("--classes must be two digits for image datasets") from None
        if args.name == "mnist":
            if len(args.paths) != 2:
                raise UsageError("mnist needs <images.idx> <labels.idx>")
            samples = load_mnist_4x4(args.paths[0], args.paths[1], digits)
        else:
            samples = load_digits_4x4(args.paths[0] if args.paths else None, digits)
        classes = [str(d) for d in digits]
    if args.encode == "amplitude":
        samples = amplitude_samples(samples)
    doc = {
        "dataset": args.name,
        "classes": list(classes or ("setosa", "versicolor")),
        "encoding": args.encode,
        "samples": [s.to_json() for s in samples],
    }
    text = json.dumps(doc) + "\n"
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as e:
            raise ReportError(f"cannot write {args.out}: {e.strerror or e}") from None
        print(f"wrote {len(samples)} samples to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _add_source(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("-c", "--circuit", help="circuit file, or builtin:NAME (e.g. builtin:two_qubit)")
    g.add_argument("-w", "--weights", help="weights JSON naming a model")


def _add_verify_flags(p):
    p.add_argument("-i", "--inputs", help="comma-separated values, or name=value pairs")
    p.add_argument("--samples", help="samples JSON from `vqcverify dataset`")
    p.add_argument("--limit", type=int, help="only the first N samples")
    p.add_argument("--mode", choices=["stepwise", "symbolic"], default="symbolic")
    p.add_argument("--clip", type=_on_off, default=True, metavar="on|off")
    p.add_argument("--strict", type=_on_off, default=True, metavar="on|off", help="outward rounding (default on)")
    p.add_argument("--max-depth", type=int, default=20)
    p.add_argument("--min-width", type=_positive, default=1e-6)
    p.add_argument("--max-regions", type=int, default=4096)
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--out", help="write the JSON report here")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vqcverify", description="Interval-based robustness verification of variational quantum classifiers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="concrete execution")
    _add_source(p)
    p.add_argument("-i", "--inputs", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="verify robustness in an eps-ball")
    _add_source(p)
    p.add_argument("-e", "--eps", type=_non_negative, required=True)
    _add_verify_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("max-eps", help="search the largest verified radius")
    _add_source(p)
    p.add_argument("--eps-min", type=_positive, default=1e-3)
    p.add_argument("--eps-max", type=_positive, default=math.pi)
    p.add_argument("--tau", type=_positive, default=1e-3)
    _add_verify_flags(p)
    p.set_defaults(func=cmd_max_eps)

    p = sub.add_parser("model", help="materialize a model as circuit text")
    p.add_argument("-k", "--kind", choices=sorted(MODEL_ARITY), required=True)
    p.add_argument("-w", "--weights", required=True)
    p.add_argument("--emit", help="output circuit path (default stdout)")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("dataset", help="convert a dataset to a samples JSON")
    p.add_argument("name", choices=["iris", "mnist", "digits"])
    p.add_argument("paths", nargs="*", help="data files (default: bundled copy where available)")
    p.add_argument("--classes", help="two class names or digits, comma-separated")
    p.add_argument("--encode", choices=["angle", "amplitude"], default="angle",
                   help="amplitude: convert 4 features to preparation angles (for ccqc)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_dataset)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"vqcverify: error: {e}", file=sys.stderr)
        return EX_USAGE
    except (WeightsFileMissing, FileNotFoundError) as e:
        print(f"vqcverify: error: {e}", file=sys.stderr)
        return EX_NOINPUT
    except ReportError as e:
        print(f"vqcverify: error: {e}", file=sys.stderr)
        return EX_CANTCREAT
    except (CircuitError, WeightsError, DatasetError, ModelError, UnboundVariable) as e:
        print(f"vqcverify: error: {e}", file=sys.stderr)
        return EX_DATAERR
    except SoundnessError as e:
        print(f"vqcverify: internal error: {e}", file=sys.stderr)
        return EX_SOFTWARE


if __name__ == "__main__":
    sys.exit(main())
