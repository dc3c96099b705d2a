"""Fit demo weights for the qcl, ccqc and pv classifiers.

These are NOT published weights: they are fitted here, with a plain
cross-entropy loss and scipy's optimizer, so that the verification demos
have sensible classifiers to work on. Results are written into the package
data directory.

    python3 demos/make_demo_weights.py
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

from vqcverify.concrete import class_probabilities, measure, simulate
from vqcverify.datasets import amplitude_samples, load_digits_4x4, load_iris
from vqcverify.models import MODEL_ARITY, build_model

OUT = Path(__file__).resolve().parents[1] / "src" / "vqcverify" / "data"


def loss(weights, kind, x, y):
    c = build_model(kind, weights)
    p = class_probabilities(measure(simulate(c, x)), c.observed)
    return -np.mean(np.log(p[np.arange(len(y)), y] + 1e-9))


def accuracy(weights, kind, x, y):
    c = build_model(kind, weights)
    p = class_probabilities(measure(simulate(c, x)), c.observed)
    return float(np.mean(p.argmax(axis=1) == y))


def fit(kind, samples, seed=0, restarts=4):
    x = np.array([s.features for s in samples])
    y = np.array([s.label for s in samples])
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        w0 = rng.uniform(-np.pi, np.pi, MODEL_ARITY[kind])
        res = minimize(loss, w0, args=(kind, x, y), method="L-BFGS-B")
        if best is None or res.fun < best.fun:
            best = res
    acc = accuracy(best.x, kind, x, y)
    print(f"{kind}: loss {best.fun:.4f}, training accuracy {acc:.2%} on {len(y)} samples")
    return [round(float(w), 6) for w in best.x], acc


def main():
    iris = load_iris()
    digits = load_digits_4x4(digits=(0, 1))
    jobs = {
        "qcl": iris,
        "ccqc": amplitude_samples(iris),
        "pv": digits,
    }
    for kind, samples in jobs.items():
        weights, acc = fit(kind, samples)
        doc = {
            "model": kind,
            "weights": weights,
            "note": f"demo weights fitted by demos/make_demo_weights.py (training accuracy {acc:.2f}); not published weights",
        }
        (OUT / f"{kind}_demo_weights.json").write_text(json.dumps(doc, indent=1) + "\n")


if __name__ == "__main__":
    main()
