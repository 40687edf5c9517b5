#!/usr/bin/env python3
"""Heralded single photon from a weak down-converter, one unit-efficiency detector."""
import sys
from fractions import Fraction

from photocascade.povm import build_cascade_povm, confidence, downconverter_ensemble

xi = Fraction(sys.argv[1]) if len(sys.argv) > 1 else Fraction(1, 10)
ens = downconverter_ensemble(xi)
rep = confidence(ens, build_cascade_povm(1, 1, 2)[1], 1)
print(f"xi = {xi}: weights {[float(t.weight) for t in ens.terms]}")
print(f"P(click) = {float(rep.conditioning_probability):.6g}, C = {float(rep.confidence):.9f} "
      f"(1/(1+xi^2) = {float(1 / (1 + xi**2)):.9f})")
