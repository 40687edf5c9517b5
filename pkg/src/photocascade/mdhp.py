"""Multi-dimensional Hermite polynomials at zero and Fock output probabilities.

H^R_{k n}(0) is the mixed derivative of exp(-x R x^T / 2) at x = 0, one derivative
per photon: input mode 1 contributes ``k`` copies of variable 1, output mode j
contributes ``n_j`` copies of variable dim + j. By Wick's theorem the derivative is
a sum over perfect matchings of that index multiset of prod(-R[a, b]).

Each pair (a, b) with a < b reads R[a, b], i.e. input-to-output couplings come from
the upper-right block -U^dag. For the DFT matrix R is symmetric and this is the
plain derivative. For the lossy 2N-port R is not symmetric (the -sqrt(1 - eta^2)
block breaks it); a quadratic form only sees the symmetric part of R, which would
cancel detected/loss cross terms, so the upper triangle is the one that reproduces
the Fock amplitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from photocascade.combinatorics import OccupationVector, _as_vector
from photocascade.errors import InvalidArgumentError, PhotonNumberMismatchError
from photocascade.nport import InterferometerMatrix


@dataclass(frozen=True, eq=False)
class HermiteCouplingMatrix:
    """Block matrix [[0, -U^dag], [-U^dag, 0]] generated by an interferometer."""

    entries: np.ndarray
    source: InterferometerMatrix

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def asymmetry(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.T)))


def build_coupling(M: InterferometerMatrix) -> HermiteCouplingMatrix:
    d = M.dim
    u_dag = M.entries.conj().T
    zero = np.zeros((d, d), dtype=complex)
    R = np.block([[zero, -u_dag], [-u_dag, zero]])
    R.setflags(write=False)
    return HermiteCouplingMatrix(R, M)


def _matching_sum(A: np.ndarray, multiplicities: tuple[int, ...]) -> complex:
    """Sum over perfect matchings of the multiset where index i appears multiplicities[i] times.

    Each matching contributes the product of A[i, j], i <= j, over its pairs. Copies
    of one index are distinguishable (they are separate derivatives), hence the
    count factors.
    """
    n = len(multiplicities)
    if sum(multiplicities) % 2:
        return 0j

    @lru_cache(maxsize=None)
    def rec(mult: tuple[int, ...]) -> complex:
        try:
            i = next(idx for idx, c in enumerate(mult) if c)
        except StopIteration:
            return 1 + 0j
        rest = list(mult)
        rest[i] -= 1
        total = 0j
        for j in range(i, n):
            c = rest[j]
            if not c or A[i, j] == 0:
                continue
            rest[j] -= 1
            total += c * A[i, j] * rec(tuple(rest))
            rest[j] += 1
        return total

    return rec(tuple(multiplicities))


def mdhp_at_zero(
    R: HermiteCouplingMatrix,
    input: OccupationVector | Sequence[int],
    output: OccupationVector | Sequence[int],
) -> complex:
    """H^R_{input, output}(0) by Wick expansion.

    ``input`` and ``output`` each have one entry per mode of the generating
    interferometer. The (-1)^{2k} prefactor is 1 and dropped.
    """
    inp, out = _as_vector(input), _as_vector(output)
    d = R.source.dim
    if len(inp) != d or len(out) != d:
        raise InvalidArgumentError(f"occupation vectors must have {d} modes")
    if inp.total() != out.total():
        raise PhotonNumberMismatchError(
            f"input carries {inp.total()} photons but output carries {out.total()}"
        )
    mult = inp.counts + out.counts
    active = [i for i, c in enumerate(mult) if c]
    if not active:
        return 1 + 0j
    # restrict to variables that are actually differentiated
    A = -R.entries[np.ix_(active, active)]
    return _matching_sum(A, tuple(mult[i] for i in active))


def output_prob_mdhp(
    M: InterferometerMatrix, k: int, output: OccupationVector | Sequence[int]
) -> float:
    """Probability of ``output`` when ``k`` photons enter mode 1 of ``M``.

    |H(0)|^2 / (n_1! ... n_dim! k!). For a lossy matrix ``output`` spans all 2N
    modes, detected first.
    """
    if k < 0:
        raise InvalidArgumentError(f"k must be >= 0, got {k}")
    return fock_prob(build_coupling(M), k, output)


def fock_prob(R: HermiteCouplingMatrix, k: int, output: OccupationVector | Sequence[int]) -> float:
    """As :func:`output_prob_mdhp`, reusing a prebuilt coupling matrix."""
    out = _as_vector(output)
    H = mdhp_at_zero(R, OccupationVector.single_mode(k, R.source.dim), out)
    denom = math.factorial(k) * math.prod(math.factorial(c) for c in out)
    return float(abs(H) ** 2 / denom)
