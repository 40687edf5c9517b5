"""Click statistics p_N(k|m) of a detector cascade.

Four independent routes produce the same table:

* ``multinomial``: exact rationals; a single-mode Fock input through an N-port
  splits multinomially with the squared couplings as cell probabilities.
* ``mdhp``: floating point, Hermite-polynomial amplitudes of every output pattern.
* ``closed``: the printed closed forms (k = m diagonal and the two-photon table).
* ``montecarlo``: photons sampled one at a time.

``N = inf`` is served by :func:`limit_click_distribution`, the binomial law of a
detector that resolves every photon it registers.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from photocascade.combinatorics import (
    OccupationVector,
    _as_vector,
    count_compositions,
    iter_compositions,
)
from photocascade.errors import InvalidArgumentError, ResourceLimitError
from photocascade.mdhp import build_coupling, fock_prob
from photocascade.nport import build_symmetric_nport, extend_with_loss

Number = Fraction | float

METHODS = ("closed", "multinomial", "mdhp", "montecarlo")
DEFAULT_COMPOSITION_CAP = 10**7
MC_BATCH = 1 << 18


def as_fraction(x: Number | int | str) -> Fraction:
    """Exact rational from a number or a "p/q" / decimal string.

    Floats go through their shortest repr, so 0.88 becomes 22/25 rather than the
    binary expansion.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            raise InvalidArgumentError(f"not a finite number: {x}")
        return Fraction(repr(x))
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InvalidArgumentError(f"cannot read {x!r} as a rational") from exc


def _check_eta(eta_sq: Number) -> None:
    if not 0 <= eta_sq <= 1:
        raise InvalidArgumentError(f"eta_sq must lie in [0, 1], got {eta_sq}")


def format_number(x: Number, precision: int = 10, exact: bool = False) -> str:
    if exact and isinstance(x, Fraction):
        return str(x)
    return format(float(x), f".{precision}g")


@dataclass
class ClickDistribution:
    """Table of p_N(k|m) keyed by (k, m).

    Only k <= min(m, N) is stored; :meth:`prob` answers 0 for k > m and refuses k > N.
    ``modes`` is ``math.inf`` for the resolving-detector limit.
    """

    modes: int | float
    efficiency: Number
    max_photons: int
    table: dict[tuple[int, int], Number]
    method: str
    trials: Optional[int] = None
    seed: Optional[int] = None
    photon_numbers: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.photon_numbers:
            self.photon_numbers = tuple(range(self.max_photons + 1))

    @property
    def exact(self) -> bool:
        return all(isinstance(p, Fraction) for p in self.table.values())

    def prob(self, k: int, m: int) -> Number:
        if k < 0 or m < 0:
            raise InvalidArgumentError("k and m must be non-negative")
        if k > self.modes:
            raise InvalidArgumentError(f"a cascade of {self.modes} detectors cannot give {k} clicks")
        if m not in self.photon_numbers:
            raise InvalidArgumentError(f"m={m} not tabulated")
        if k > m:
            return Fraction(0) if self.exact else 0.0
        return self.table[(k, m)]

    def row(self, m: int) -> list[Number]:
        """[p(0|m), ..., p(min(m, N)|m)]."""
        return [self.prob(k, m) for k in range(int(min(m, self.modes)) + 1)]

    def row_sum_deviation(self) -> Number:
        return max(abs(sum(self.row(m)) - 1) for m in self.photon_numbers)

    def records(self) -> list[dict]:
        out = []
        for m in self.photon_numbers:
            for k, p in enumerate(self.row(m)):
                out.append({"N": self.modes, "eta_sq": self.efficiency, "m": m, "k": k,
                            "probability": p, "method": self.method})
        return out

    def to_csv(self, precision: int = 10, exact: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "eta_sq", "m", "k", "probability", "method"])
        for r in self.records():
            w.writerow([
                _format_modes(r["N"]),
                format_number(r["eta_sq"], precision, exact),
                r["m"],
                r["k"],
                format_number(r["probability"], precision, exact),
                r["method"],
            ])
        return buf.getvalue()

    def to_dict(self, exact: bool = False) -> dict:
        def enc(x: Number):
            return str(x) if exact and isinstance(x, Fraction) else float(x)

        doc = {
            "modes": _format_modes(self.modes) if self.modes == math.inf else self.modes,
            "efficiency": enc(self.efficiency),
            "max_photons": self.max_photons,
            "method": self.method,
            "table": [{"k": k, "m": m, "probability": enc(p)} for (k, m), p in sorted(
                self.table.items(), key=lambda kv: (kv[0][1], kv[0][0]))],
        }
        if self.method == "montecarlo":
            doc["trials"] = self.trials
            doc["seed"] = self.seed
        return doc

    def to_json(self, exact: bool = False, **kwargs) -> str:
        return json.dumps(self.to_dict(exact), **kwargs)


def _format_modes(N: int | float) -> str | int:
    return "inf" if N == math.inf else int(N)


def outcome_prob_multinomial(
    intensities: Sequence[Number], m: int, n: OccupationVector | Sequence[int]
) -> Number:
    """m! prod(I_j^n_j) / prod(n_j!) for ``m`` photons spread over cells with probabilities I_j."""
    n = _as_vector(n)
    if len(intensities) != len(n):
        raise InvalidArgumentError("intensities and occupation vector differ in length")
    if n.total() != m:
        raise InvalidArgumentError(f"occupation vector holds {n.total()} photons, expected {m}")
    _check_intensities(intensities)
    return _multinomial_term(intensities, n.counts)


def _check_intensities(intensities: Sequence[Number]) -> None:
    total = sum(intensities)
    exact = all(isinstance(c, (Fraction, int)) for c in intensities)
    if (total != 1) if exact else abs(total - 1) > 1e-12:
        raise InvalidArgumentError(f"intensities must sum to 1, got {total}")
    if any(c < 0 for c in intensities):
        raise InvalidArgumentError("intensities must be non-negative")


def _multinomial_term(intensities: Sequence[Number], counts: Sequence[int]) -> Number:
    exact = isinstance(intensities[0], (Fraction, int))
    p = Fraction(math.factorial(sum(counts))) if exact else float(math.factorial(sum(counts)))
    for c, j in zip(intensities, counts):
        if j:
            p = p * c**j / math.factorial(j)
    return p


def cascade_intensities(N: int, eta_sq: Number) -> list[Number]:
    """Squared couplings of input mode 1 to the N detected then N loss modes."""
    return [eta_sq / N] * N + [(1 - eta_sq) / N] * N


def _aggregate(N: int, m_max: int, prob_of) -> dict[tuple[int, int], Number]:
    table: dict[tuple[int, int], Number] = {}
    for m in range(m_max + 1):
        for k in range(min(m, N) + 1):
            table[(k, m)] = 0
        for n in iter_compositions(m, 2 * N):
            k = sum(1 for c in n.counts[:N] if c)
            table[(k, m)] += prob_of(m, n)
    return table


def click_distribution(
    N: int,
    eta_sq: Number | str,
    m_max: int,
    method: str = "multinomial",
    *,
    trials: int = 10**6,
    seed: int = 0,
    composition_cap: int = DEFAULT_COMPOSITION_CAP,
) -> ClickDistribution:
    """Full table p_N(k|m) for 0 <= k <= min(m, N), 0 <= m <= m_max.

    A k-fold coincidence counts patterns with exactly k occupied detected modes;
    loss-mode occupations are unconstrained.
    """
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)) or N < 1:
        raise InvalidArgumentError(f"N must be a positive integer, got {N!r}")
    N = int(N)
    if m_max < 0:
        raise InvalidArgumentError(f"m_max must be >= 0, got {m_max}")
    if method not in METHODS:
        raise InvalidArgumentError(f"unknown method {method!r}; choose from {METHODS}")
    eta = as_fraction(eta_sq)
    _check_eta(eta)

    if method == "closed":
        if m_max > 2:
            raise InvalidArgumentError("closed forms are available only up to two photons")
        two = two_photon_table(N, eta)
        table = {km: p for km, p in two.items() if km[0] <= min(km[1], N)}
        return ClickDistribution(N, eta, m_max, {km: p for km, p in table.items() if km[1] <= m_max},
                                 "closed")

    if method == "montecarlo":
        table = {}
        for m in range(m_max + 1):
            row = monte_carlo_clicks(N, float(eta), m, trials, seed)
            table.update(row.table)
        return ClickDistribution(N, eta, m_max, table, "montecarlo", trials=trials, seed=seed)

    n_patterns = sum(count_compositions(m, 2 * N) for m in range(m_max + 1))
    if n_patterns > composition_cap:
        raise ResourceLimitError(
            f"{n_patterns} output patterns exceed the cap of {composition_cap}; "
            "use the montecarlo method instead"
        )

    if method == "multinomial":
        cells = cascade_intensities(N, eta)
        _check_intensities(cells)
        table = _aggregate(N, m_max, lambda m, n: _multinomial_term(cells, n.counts))
        return ClickDistribution(N, eta, m_max, {km: Fraction(p) for km, p in table.items()},
                                 "multinomial")

    U = extend_with_loss(build_symmetric_nport(N), eta)
    R = build_coupling(U)
    table = _aggregate(N, m_max, lambda m, n: fock_prob(R, m, n))
    return ClickDistribution(N, eta, m_max, {km: float(p) for km, p in table.items()}, "mdhp")


def limit_click_distribution(eta_sq: Number | str, m_max: int) -> ClickDistribution:
    """N -> inf limit: photons never share a detector, so k ~ Binomial(m, eta_sq)."""
    eta = as_fraction(eta_sq)
    _check_eta(eta)
    table = {
        (k, m): math.comb(m, k) * eta**k * (1 - eta) ** (m - k)
        for m in range(m_max + 1)
        for k in range(m + 1)
    }
    return ClickDistribution(math.inf, eta, m_max, table, "limit")


def closed_form_pkk(N: int, k: int, eta_sq: Number | str) -> Fraction:
    """p_N(k|k) = eta^{2k} N! / (N^k (N-k)!)."""
    if N < 1:
        raise InvalidArgumentError(f"N must be >= 1, got {N}")
    if k < 0 or k > N:
        raise InvalidArgumentError(f"need 0 <= k <= N, got k={k}, N={N}")
    eta = as_fraction(eta_sq)
    _check_eta(eta)
    return eta**k * Fraction(math.perm(N, k), N**k)


def two_photon_table(N: int, eta_sq: Number | str) -> dict[tuple[int, int], Fraction]:
    """The seven closed forms p_N(k|m) for m <= 2, keyed by (k, m)."""
    if N < 1:
        raise InvalidArgumentError(f"N must be >= 1, got {N}")
    e = as_fraction(eta_sq)
    _check_eta(e)
    return {
        (0, 0): Fraction(1),
        (1, 0): Fraction(0),
        (0, 1): 1 - e,
        (1, 1): e,
        (0, 2): (1 - e) ** 2,
        (1, 2): e**2 / N + 2 * e * (1 - e),
        (2, 2): Fraction(N - 1, N) * e**2,
    }


def monte_carlo_clicks(N: int, eta_sq: float, m: int, trials: int, seed: int) -> ClickDistribution:
    """Empirical p_N(k|m) for one photon number.

    Each photon is registered with probability ``eta_sq`` and lands on a uniformly
    chosen detector; k counts distinct detectors hit. The stream is numpy's
    ``default_rng(seed)`` consumed in fixed batches, so a seed maps to one result.
    """
    if N < 1 or m < 0 or trials < 1:
        raise InvalidArgumentError("need N >= 1, m >= 0, trials >= 1")
    _check_eta(eta_sq)
    counts = np.zeros(m + 1, dtype=np.int64)
    if m == 0:
        counts[0] = trials
    else:
        rng = np.random.default_rng(seed)
        done = 0
        while done < trials:
            b = min(MC_BATCH, trials - done)
            hits = rng.integers(0, N, size=(b, m))
            registered = rng.random((b, m)) < eta_sq
            hits = np.sort(np.where(registered, hits, -1), axis=1)
            fresh = np.ones_like(hits, dtype=bool)
            fresh[:, 1:] = hits[:, 1:] != hits[:, :-1]
            k = np.count_nonzero(fresh & (hits >= 0), axis=1)
            counts += np.bincount(k, minlength=m + 1)
            done += b
    table = {(k, m): float(counts[k] / trials) for k in range(min(m, N) + 1)}
    return ClickDistribution(N, float(eta_sq), m, table, "montecarlo", trials=trials, seed=seed,
                             photon_numbers=(m,))
