"""Records that are decision lists, queried on every input assignment.

Each record is a small classifier; query ``y`` asks what fraction of the
classifiers output 1 on input ``y``.  Run with
``python3 demos/decision_list_records.py``.
"""

import itertools
import math

import numpy as np

from polyrelease import PrivacyBudget, answer, make_family, sanitize
from polyrelease.dataio import parse_declists
from polyrelease.harness import exact_answers

records = parse_declists(
    """
    x1:1;!x2:0;default:1
    !x3:1;default:0
    x2:0;x3:1;default:0
    default:1
    """,
    m=3,
    k=2,
)
family = make_family("declist", k=2, gamma=0.1, m=3)
print(f"helper degree {family.t}, T={family.T:g}, {family.space.size} released coefficients")

summary = sanitize(family, records * 250, PrivacyBudget(math.inf))
truth = exact_answers(family, records * 250)
for y in itertools.product((0, 1), repeat=3):
    print(f"  y={''.join(map(str, y))}: {answer(summary, y):.4f} (exact {truth[y]:.4f})")

noisy = sanitize(family, records * 250, PrivacyBudget(5.0), seed=1)
errs = [abs(answer(noisy, y) - truth[y]) for y in truth]
print(f"with epsilon=5 the worst error is {max(errs):.3f}; small n makes the noise dominate")
print("coefficient noise scale", f"{noisy.noise_scale:.3g}", "mean |noise|", f"{np.mean(np.abs(noisy.coeffs.coeffs - summary.coeffs.coeffs)):.3g}")
