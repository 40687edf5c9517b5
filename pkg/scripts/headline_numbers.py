#!/usr/bin/env python3
"""Print the efficiency/confidence numbers quoted for the detector comparison."""
from fractions import Fraction

from photocascade.povm import (
    INF,
    cascade_confidence_closed,
    maximal_ensemble,
    required_efficiency,
    spr_confidence_first_principles,
    spr_confidence_paper_form,
)

eta = 0.88
bench = maximal_ensemble()
print(f"resolving detector, printed form, eta^2={eta}: C = {spr_confidence_paper_form(eta):.4f}")
print(f"resolving detector, beam-splitter model:       C = "
      f"{float(spr_confidence_first_principles(eta, bench).confidence):.4f}")
print(f"infinite cascade, same efficiency:             C = {cascade_confidence_closed(INF, 1, eta):.4f}")
for N in (4, INF):
    need = required_efficiency(N, 1, Fraction(65, 100))
    print(f"cascade N={N}: C = 0.65 needs eta^2 = {float(need):.4f}")
