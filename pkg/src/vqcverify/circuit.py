"""Circuit AST, the line-oriented circuit language, and basis-label helpers.

Text format (``#`` starts a comment; ``;`` may separate statements)::

    qubits 2
    inputs x0 x1
    rx q0 $x0          # encoding rotation, angle read from input x0
    ry q0 -0.5         # parametric rotation, constant angle in radians
    cx q0 q1           # control, target
    h q1
    x q0
    measure q0         # observed qubits, in class-bit order

``qubits`` and ``inputs`` may be omitted, in which case they are inferred
from the gates (inputs in order of first use).

Qubit 0 is the least significant bit of a basis index, and basis labels are
printed as ``q_{n-1} ... q_0``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable

MAX_QUBITS = 24


class Gate(enum.Enum):
    ENC_RX = "rx$"
    ENC_RY = "ry$"
    ENC_RZ = "rz$"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    CX = "cx"
    H = "h"
    X = "x"

    @property
    def is_encoding(self) -> bool:
        return self in (Gate.ENC_RX, Gate.ENC_RY, Gate.ENC_RZ)

    @property
    def is_rotation(self) -> bool:
        return self.value[:2] in ("rx", "ry", "rz")

    @property
    def axis(self) -> str | None:
        return self.value[1] if self.is_rotation else None

    @property
    def mnemonic(self) -> str:
        return self.value.rstrip("$")


_ENCODING = {"x": Gate.ENC_RX, "y": Gate.ENC_RY, "z": Gate.ENC_RZ}
_PARAMETRIC = {"x": Gate.RX, "y": Gate.RY, "z": Gate.RZ}


@dataclass(frozen=True)
class GateOp:
    """One gate application.

    ``qubit`` is the target. Encoding rotations carry ``angle_var``,
    parametric rotations carry ``angle_const``; ``control`` is set for CX only.
    """

    kind: Gate
    qubit: int
    control: int | None = None
    angle_var: str | None = None
    angle_const: float | None = None

    @classmethod
    def encoding(cls, axis: str, qubit: int, var: str) -> GateOp:
        return cls(_ENCODING[axis], qubit, angle_var=var)

    @classmethod
    def rotation(cls, axis: str, qubit: int, angle: float) -> GateOp:
        return cls(_PARAMETRIC[axis], qubit, angle_const=float(angle))

    @classmethod
    def cx(cls, control: int, target: int) -> GateOp:
        return cls(Gate.CX, target, control=control)

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,) if self.control is None else (self.control, self.qubit)

    def problems(self) -> list[str]:
        out = []
        if self.kind.is_encoding:
            if self.angle_var is None:
                out.append("encoding gate without input variable")
            if self.angle_const is not None:
                out.append("encoding gate with constant angle")
        elif self.kind.is_rotation:
            if self.angle_const is None:
                out.append("parametric gate without angle")
            if self.angle_var is not None:
                out.append("parametric gate with input variable")
        elif self.angle_var is not None or self.angle_const is not None:
            out.append(f"{self.kind.mnemonic} gate takes no angle")
        if self.kind is Gate.CX:
            if self.control is None:
                out.append("cx without control qubit")
            elif self.control == self.qubit:
                out.append("cx control equals target")
        elif self.control is not None:
            out.append(f"{self.kind.mnemonic} gate takes no control qubit")
        return out


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    input_vars: tuple[str, ...]
    ops: tuple[GateOp, ...]
    observed: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "input_vars", tuple(self.input_vars))
        object.__setattr__(self, "ops", tuple(self.ops))
        object.__setattr__(self, "observed", tuple(self.observed))

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    @property
    def n_classes(self) -> int:
        return 1 << len(self.observed)

    def var_index(self, name: str) -> int:
        return self.input_vars.index(name)

    def with_observed(self, observed: Iterable[int]) -> Circuit:
        return Circuit(self.n_qubits, self.input_vars, self.ops, tuple(observed))

    def __str__(self) -> str:
        return print_circuit(self)


class CircuitError(ValueError):
    """Base class for circuit syntax and validation failures."""

    kind = "invalid circuit"


class CircuitSyntaxError(CircuitError):
    kind = "syntax error"

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {self.kind}: {message}")
        self.line = line
        self.column = column
        self.detail = message


class UnknownGateError(CircuitSyntaxError):
    kind = "unknown gate"


class UndeclaredVariableError(CircuitSyntaxError):
    kind = "undeclared variable"


class QubitRangeError(CircuitSyntaxError):
    kind = "qubit out of range"


class CircuitValidationError(CircuitError):
    def __init__(self, diagnostics: list[str]):
        super().__init__("; ".join(diagnostics))
        self.diagnostics = diagnostics


def validate_circuit(c: Circuit) -> list[str]:
    """Every violated circuit invariant, one message each. Empty means valid."""
    diags = []
    if not isinstance(c.n_qubits, int) or c.n_qubits < 1:
        diags.append("circuit needs at least one qubit")
    elif c.n_qubits > MAX_QUBITS:
        diags.append(f"too many qubits ({c.n_qubits} > {MAX_QUBITS})")
    if len(set(c.input_vars)) != len(c.input_vars):
        diags.append("duplicate input variable")
    declared = set(c.input_vars)
    for i, op in enumerate(c.ops):
        for p in op.problems():
            diags.append(p)
        for q in op.qubits:
            if not 0 <= q < c.n_qubits:
                diags.append(f"qubit out of range: q{q} in gate {i}")
        if op.angle_var is not None and op.angle_var not in declared:
            diags.append(f"undeclared variable: {op.angle_var}")
    if not c.observed:
        diags.append("no observed qubits")
    if len(set(c.observed)) != len(c.observed):
        diags.append("duplicate observed qubit")
    for q in c.observed:
        if not 0 <= q < c.n_qubits:
            diags.append(f"qubit out of range: observed q{q}")
    return diags


def check_circuit(c: Circuit) -> Circuit:
    diags = validate_circuit(c)
    if diags:
        raise CircuitValidationError(diags)
    return c


# ---------------------------------------------------------------------------
# parsing and printing

_TOKEN = re.compile(r"\S+")
_QUBIT = re.compile(r"q(\d+)$")
_VAR = re.compile(r"\$([A-Za-z_][A-Za-z0-9_]*)$")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
_FLOAT = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def _statements(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        start = 0
        for part in line.split(";"):
            toks = [(m.group(), start + m.start() + 1) for m in _TOKEN.finditer(part)]
            if toks:
                yield lineno, toks
            start += len(part) + 1


def parse_circuit(text: str) -> Circuit:
    n_qubits = None
    inputs: list[str] | None = None
    used_vars: list[str] = []
    ops: list[GateOp] = []
    observed = None
    qubit_refs = []  # (qubit, line, col) checked once n_qubits is known

    def qubit(tok, col, line):
        m = _QUBIT.match(tok)
        if not m:
            raise CircuitSyntaxError(f"expected qubit like 'q0', got {tok!r}", line, col)
        q = int(m.group(1))
        qubit_refs.append((q, line, col))
        return q

    def arity(toks, n, line):
        if len(toks) != n:
            head, col = toks[0]
            raise CircuitSyntaxError(f"'{head}' takes {n - 1} operand(s), got {len(toks) - 1}", line, col)

    for line, toks in _statements(text):
        head, col = toks[0]
        word = head.lower()
        if observed is not None:
            raise CircuitSyntaxError("statements after 'measure'", line, col)
        if word == "qubits":
            arity(toks, 2, line)
            if n_qubits is not None:
                raise CircuitSyntaxError("'qubits' declared twice", line, col)
            if not toks[1][0].isdigit():
                raise CircuitSyntaxError(f"expected qubit count, got {toks[1][0]!r}", line, toks[1][1])
            n_qubits = int(toks[1][0])
            if n_qubits < 1:
                raise CircuitSyntaxError("need at least one qubit", line, toks[1][1])
        elif word == "inputs":
            if inputs is not None:
                raise CircuitSyntaxError("'inputs' declared twice", line, col)
            inputs = []
            for tok, tcol in toks[1:]:
                if not _NAME.match(tok):
                    raise CircuitSyntaxError(f"bad variable name {tok!r}", line, tcol)
                if tok in inputs:
                    raise CircuitSyntaxError(f"variable {tok!r} declared twice", line, tcol)
                inputs.append(tok)
        elif word in ("rx", "ry", "rz"):
            arity(toks, 3, line)
            q = qubit(*toks[1], line)
            arg, acol = toks[2]
            m = _VAR.match(arg)
            if m:
                name = m.group(1)
                if inputs is not None and name not in inputs:
                    raise UndeclaredVariableError(name, line, acol)
                if name not in used_vars:
                    used_vars.append(name)
                ops.append(GateOp.encoding(word[1], q, name))
            elif _FLOAT.match(arg):
                ops.append(GateOp.rotation(word[1], q, float(arg)))
            else:
                raise CircuitSyntaxError(f"expected '$var' or a number, got {arg!r}", line, acol)
        elif word == "cx":
            arity(toks, 3, line)
            c, t = qubit(*toks[1], line), qubit(*toks[2], line)
            if c == t:
                raise CircuitSyntaxError("cx control equals target", line, toks[2][1])
            ops.append(GateOp.cx(c, t))
        elif word in ("h", "x"):
            arity(toks, 2, line)
            ops.append(GateOp(Gate.H if word == "h" else Gate.X, qubit(*toks[1], line)))
        elif word == "measure":
            if len(toks) < 2:
                raise CircuitSyntaxError("'measure' needs at least one qubit", line, col)
            observed = tuple(qubit(tok, tcol, line) for tok, tcol in toks[1:])
            if len(set(observed)) != len(observed):
                raise CircuitSyntaxError("duplicate observed qubit", line, col)
        else:
            raise UnknownGateError(head, line, col)

    if observed is None:
        raise CircuitSyntaxError("missing 'measure' statement", max(1, len(text.splitlines())), 1)
    if n_qubits is None:
        n_qubits = 1 + max(q for q, _, _ in qubit_refs)
    for q, line, col in qubit_refs:
        if q >= n_qubits:
            raise QubitRangeError(f"q{q} with {n_qubits} qubit(s)", line, col)
    return check_circuit(Circuit(n_qubits, tuple(inputs if inputs is not None else used_vars), ops, observed))


def _format_op(op: GateOp) -> str:
    if op.kind.is_encoding:
        return f"{op.kind.mnemonic} q{op.qubit} ${op.angle_var}"
    if op.kind.is_rotation:
        return f"{op.kind.mnemonic} q{op.qubit} {op.angle_const!r}"
    if op.kind is Gate.CX:
        return f"cx q{op.control} q{op.qubit}"
    return f"{op.kind.mnemonic} q{op.qubit}"


def print_circuit(c: Circuit) -> str:
    lines = [f"qubits {c.n_qubits}"]
    lines.append("inputs " + " ".join(c.input_vars) if c.input_vars else "inputs")
    lines += [_format_op(op) for op in c.ops]
    lines.append("measure " + " ".join(f"q{q}" for q in c.observed))
    return "\n".join(lines) + "\n"


def load_circuit(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse_circuit(fh.read())


# ---------------------------------------------------------------------------
# basis labels


def basis_label(index: int, n_qubits: int) -> str:
    """Render a basis index as ``q_{n-1} ... q_0``."""
    if not 0 <= index < (1 << n_qubits):
        raise ValueError(f"basis index {index} out of range for {n_qubits} qubit(s)")
    return format(index, f"0{n_qubits}b")


def parse_basis(label: str) -> int:
    if not label or set(label) - {"0", "1"}:
        raise ValueError(f"not a basis label: {label!r}")
    return int(label, 2)


def bit(index: int, qubit: int) -> int:
    return (index >> qubit) & 1


def project(index: int, observed: tuple[int, ...]) -> tuple[int, ...]:
    """The bits of a basis index at the observed qubits, in tuple order."""
    return tuple(bit(index, q) for q in observed)


def class_value(bits: tuple[int, ...]) -> int:
    """Unsigned value of a class bit tuple, first bit most significant."""
    v = 0
    for b in bits:
        v = (v << 1) | b
    return v


def class_bits(value: int, width: int) -> tuple[int, ...]:
    value = int(value)
    return tuple((value >> (width - 1 - k)) & 1 for k in range(width))


def class_label(bits: tuple[int, ...]) -> str:
    return "".join(str(b) for b in bits)
