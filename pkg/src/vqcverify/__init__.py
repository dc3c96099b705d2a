"""Robustness verification of variational quantum classifiers by interval
abstract interpretation."""

from __future__ import annotations

__version__ = "0.1.0"

from .abstract import (
    AbstractDistribution,
    AbstractEnvironment,
    AbstractState,
    SoundnessError,
    ball_env,
    classify_abstract,
    run_abstract,
)
from .circuit import Circuit, Gate, GateOp, load_circuit, parse_circuit, print_circuit
from .concrete import run_batch, run_concrete
from .models import build_model
from .verifier import (
    MaxEpsilonResult,
    RefinementConfig,
    Status,
    Verdict,
    VerificationProblem,
    max_epsilon,
    verify_robust,
)
