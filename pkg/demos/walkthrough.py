"""A guided tour of the two-qubit classifier.

Runs one input through the circuit, then pushes a whole box of inputs
through the interval analysis, tightens it with the symbolic mode and a
single split, and finally asks for a robustness verdict and the largest
certified radius.

    python3 demos/walkthrough.py
"""

from __future__ import annotations

import numpy as np

from vqcverify.abstract import REFERENCE_SETTINGS, ball_env, classify_abstract, run_abstract
from vqcverify.circuit import print_circuit
from vqcverify.concrete import class_probabilities, run_concrete
from vqcverify.models import two_qubit_example
from vqcverify.verifier import RefinementConfig, VerificationProblem, max_epsilon, split_union, verify_robust

CENTER = {"x0": 6.0, "x1": 2.7}


def show(title, d):
    print(title)
    for e in range(len(d.lo)):
        print(f"  {e:02b}: [{d.lo[e]:.3f}, {d.hi[e]:.3f}]")


def main():
    c = two_qubit_example()
    print(print_circuit(c))

    p, cls = run_concrete(c, CENTER)
    print("concrete run at", CENTER)
    for e, v in enumerate(p):
        print(f"  {e:02b}: {v:.4f}")
    print(f"  class {cls[0]} with probability {class_probabilities(p, c.observed)[cls[0]]:.3f}\n")

    box = ball_env(CENTER, 0.5)
    rho = run_abstract(c, box, **REFERENCE_SETTINGS)
    show("stepwise intervals over the box of radius 0.5", rho)
    print("  possible classes:", sorted(classify_abstract(rho, c.observed)), "\n")

    sym = run_abstract(c, box, mode="symbolic", clipped=False, strict=False)
    show("symbolic mode, constant gates composed first", sym)
    print("  possible classes:", sorted(classify_abstract(sym, c.observed)), "\n")

    cfg = RefinementConfig(mode="symbolic", clipped=False, strict=False)
    u, _ = split_union(c, box, "x0", cfg)
    show("after splitting x0 at its midpoint", u)
    print("  possible classes:", sorted(classify_abstract(u, c.observed)), "\n")

    v = verify_robust(VerificationProblem(c, CENTER, 0.5))
    print(f"verify_robust at eps=0.5: {v.status.value}, {v.regions_explored} regions")
    r = max_epsilon(c, CENTER)
    print(f"largest certified radius: {r.epsilon:.4f} (first failure at {r.upper:.4f}, {r.evaluations} verifier calls)")
    assert np.isfinite(r.epsilon)


if __name__ == "__main__":
    main()
