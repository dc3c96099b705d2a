"""Accuracy and certified radius of the demo classifiers.

For each model (qcl and ccqc on Iris, pv on the 4x4 digits) this prints
the accuracy over the whole dataset and the mean largest certified radius
over an evenly spaced subset. The weights are the demo weights bundled with
the package, so the numbers describe those classifiers only.

    python3 demos/dataset_robustness.py --per-model 10
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from vqcverify.concrete import run_batch
from vqcverify.datasets import amplitude_samples, data_path, load_digits_4x4, load_iris
from vqcverify.verifier import max_epsilon
from vqcverify.weights import load_weights


def datasets():
    iris = load_iris()
    return {"qcl": iris, "ccqc": amplitude_samples(iris), "pv": load_digits_4x4(digits=(0, 1))}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--per-model", type=int, default=10, help="samples used for the radius column")
    ap.add_argument("--tau", type=float, default=1e-3)
    args = ap.parse_args(argv)

    print(f"{'model':6} {'accuracy':>9} {'mean max-eps':>13} {'samples':>8} {'seconds':>8}")
    for kind, samples in datasets().items():
        c = load_weights(data_path(f"{kind}_demo_weights.json")).circuit()
        x = np.array([s.features for s in samples])
        y = np.array([s.label for s in samples])
        _, cls = run_batch(c, x)
        acc = float(np.mean(cls == y))
        step = max(1, len(samples) // args.per_model)
        subset = samples[::step][: args.per_model]
        t0 = time.perf_counter()
        radii = [max_epsilon(c, s.env(c.input_vars), tau=args.tau).epsilon for s in subset]
        dt = time.perf_counter() - t0
        print(f"{kind:6} {acc:9.2%} {np.mean(radii):13.4f} {len(subset):8d} {dt:8.1f}")


if __name__ == "__main__":
    main()
