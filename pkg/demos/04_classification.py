"""Deciding special-space membership and verifying the theorem suite.

Each classifier returns pass / fail / inapplicable with a residual;
"inapplicable" appears exactly when a definition's hypothesis (non-zero
Ricci tensor, non-zero base tensor) fails at the point.  Theorem checks are
hypothesis-gated: vacuous at points where the hypotheses fail, and checked
on manufactured tensor-level data for the branches no concrete metric
realizes.
"""

import numpy as np

from finslerc import builtin_family, classify_point
from finslerc.classify import (dimension_fixture,
                               projective_equivalence_fixture,
                               recurrence_transfer_fixture,
                               ricci_recurrent_alpha_fixture,
                               semi_isotropic_fixture)
from finslerc.report import sample_points


def show(spec, label):
    pt = sample_points(spec, seed=3, count=1)[0]
    pc = classify_point(spec, pt, rng=np.random.default_rng(0))
    print(f"\n{label}:")
    for name, v in pc.verdicts.items():
        extra = ""
        if "alpha" in v.extracted:
            extra = f"  alpha={v.extracted['alpha']:.6g}"
        if v.extracted.get("symmetric"):
            extra += "  (symmetric: A = 0)"
        print(f"  {name:28s} {v.status:13s} residual {v.residual:.1e}{extra}")
    holds = [k for k, t in pc.theorems.items() if t.status == "holds"]
    vacuous = [k for k, t in pc.theorems.items() if t.status == "vacuous"]
    print(f"  theorems holding here: {', '.join(holds) if holds else 'none'}")
    print(f"  vacuous at this point: {', '.join(vacuous) if vacuous else 'none'}")


show(builtin_family("euclidean", 3), "Euclidean (flat, zero Ricci)")
show(builtin_family("riemannian_constant_curvature", 3, K=1.0),
     "space form K=1 (generalized Ricci with alpha = 2)")

# -- tensor-level fixtures for the remaining theorem branches ------------

print("\nmanufactured fixtures:")
fx = semi_isotropic_fixture(n=3, k=2)
print(f"  semi-isotropic with A = Ric:  alpha = {fx['alpha']:.12f}, "
      f"r - 1 = {fx['r'] - 1.0:.12f}")
rt = recurrence_transfer_fixture(n=3)
print(f"  Ricci-rec + m-proj-rec => recurrent, same form: "
      f"max |A error| = {rt['max_error']:.2e}")
pe = projective_equivalence_fixture(n=3)
print(f"  projective <-> m-projective equivalence:        "
      f"max |A error| = {pe['max_error']:.2e}")
ra = ricci_recurrent_alpha_fixture(n=3, alpha=2.5)
print(f"  horizontally integrable Ricci-recurrent:        "
      f"alpha - r/2 = {ra['alpha_equals_r_half']:.2e}")
print("  dimension constraint solvable only for n = 3:",
      [(n, dimension_fixture(n)["consistent"]) for n in (3, 4, 5)])
