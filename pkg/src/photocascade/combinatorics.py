"""Occupation vectors and exact counting over multi-mode photon patterns.

Probabilities here are carried as :class:`fractions.Fraction` so that identities
rational in the efficiency hold exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from photocascade.errors import InvalidArgumentError


@dataclass(frozen=True)
class OccupationVector:
    """Photon count per mode. Mode labels are 1-based in docs, 0-based in ``counts``."""

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise InvalidArgumentError(f"negative occupation in {counts}")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def single_mode(cls, photons: int, modes: int) -> "OccupationVector":
        """All ``photons`` in mode 1, vacuum elsewhere."""
        if modes < 1:
            raise InvalidArgumentError("need at least one mode")
        return cls((photons,) + (0,) * (modes - 1))

    def __len__(self) -> int:
        return len(self.counts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.counts)

    def __getitem__(self, i: int) -> int:
        return self.counts[i]

    def total(self) -> int:
        return sum(self.counts)

    def nonzero_count(self) -> int:
        return sum(1 for c in self.counts if c)


def _as_vector(n: OccupationVector | Sequence[int]) -> OccupationVector:
    return n if isinstance(n, OccupationVector) else OccupationVector(tuple(n))


def _check_sizes(total_photons: int, modes: int) -> None:
    if total_photons < 0:
        raise InvalidArgumentError(f"total_photons must be >= 0, got {total_photons}")
    if modes < 1:
        raise InvalidArgumentError(f"modes must be >= 1, got {modes}")


def _compositions(total: int, modes: int, nonzero: Optional[int]) -> Iterator[tuple[int, ...]]:
    # lexicographic ascending, first mode varies slowest
    if nonzero is not None and not (
        (total == 0 and nonzero == 0) or 1 <= nonzero <= min(modes, total)
    ):
        return
    counts = [0] * modes
    counts[-1] = total
    while True:
        if nonzero is None or modes - counts.count(0) == nonzero:
            yield tuple(counts)
        # successor: move one photon from the last occupied mode p into p-1,
        # and the rest of mode p's photons to the final mode
        p = modes - 1
        while p > 0 and counts[p] == 0:
            p -= 1
        if p == 0:
            return
        mass = counts[p]
        counts[p] = 0
        counts[p - 1] += 1
        counts[-1] = mass - 1


def iter_compositions(
    total_photons: int, modes: int, exact_nonzero: Optional[int] = None
) -> Iterator[OccupationVector]:
    """Lazy version of :func:`enumerate_compositions`."""
    _check_sizes(total_photons, modes)
    if exact_nonzero is not None and exact_nonzero < 0:
        raise InvalidArgumentError(f"exact_nonzero must be >= 0, got {exact_nonzero}")
    for counts in _compositions(total_photons, modes, exact_nonzero):
        yield OccupationVector(counts)


def enumerate_compositions(
    total_photons: int, modes: int, exact_nonzero: Optional[int] = None
) -> list[OccupationVector]:
    """Every way to place ``total_photons`` photons into ``modes`` modes.

    With ``exact_nonzero`` set, only patterns with exactly that many occupied modes
    are kept. Output is in lexicographic ascending order. Unsatisfiable but
    well-formed constraints give an empty list.

    >>> [v.counts for v in enumerate_compositions(2, 2)]
    [(0, 2), (1, 1), (2, 0)]
    """
    return list(iter_compositions(total_photons, modes, exact_nonzero))


def count_compositions(total_photons: int, modes: int) -> int:
    _check_sizes(total_photons, modes)
    return math.comb(total_photons + modes - 1, modes - 1)


def count_exact_nonzero(total_photons: int, modes: int, k: int) -> int:
    """Number of compositions of ``total_photons`` into ``modes`` parts with ``k`` nonzero."""
    _check_sizes(total_photons, modes)
    if k < 0:
        raise InvalidArgumentError(f"k must be >= 0, got {k}")
    if total_photons == 0:
        return 1 if k == 0 else 0
    if k == 0:
        return 0
    return math.comb(modes, k) * math.comb(total_photons - 1, k - 1)


def multinomial_weight(n: OccupationVector | Sequence[int]) -> Fraction:
    """total()! / prod(n_j!), as an exact integer-valued Fraction."""
    n = _as_vector(n)
    denom = math.prod(math.factorial(c) for c in n)
    return Fraction(math.factorial(n.total()), denom)
