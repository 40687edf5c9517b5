"""Cross-route consistency checks behind ``photocascade validate``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

from photocascade.combinatorics import iter_compositions
from photocascade.mdhp import build_coupling, fock_prob
from photocascade.nport import build_symmetric_nport, extend_with_loss
from photocascade.povm import (
    INF,
    build_cascade_povm,
    cascade_confidence_closed,
    check_completeness,
    confidence,
    confinput_ensemble,
    maximal_ensemble,
    spr_confidence_first_principles,
)
from photocascade.statistics import (
    cascade_intensities,
    click_distribution,
    closed_form_pkk,
    monte_carlo_clicks,
    outcome_prob_multinomial,
    two_photon_table,
)

EXACT_ETAS = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(22, 25), Fraction(1))
MDHP_ETAS = (Fraction(1, 2), Fraction(22, 25), Fraction(1))
DELTAS = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2))
FLOAT_TOL = 1e-10
MC_SIGMAS = 4.0


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    cases: int = 0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}  [{self.cases} cases] {self.detail}"


def _run(name: str, body: Callable[[], Iterator[tuple[bool, str]]]) -> CheckResult:
    cases, failures = 0, []
    for ok, what in body():
        cases += 1
        if not ok:
            failures.append(what)
    if not cases:
        return CheckResult(name, True, "vacuous", 0)
    if failures:
        return CheckResult(name, False, f"first failure: {failures[0]} ({len(failures)} total)", cases)
    return CheckResult(name, True, "ok", cases)


def run_validation(
    max_modes: int = 5, max_photons: int = 4, trials: int = 200_000, seed: int = 0
) -> list[CheckResult]:
    """Run every invariant suite; each result records whether all its cases held."""
    modes = range(1, max_modes + 1)

    exact_tables = {
        (N, eta): click_distribution(N, eta, max_photons, "multinomial")
        for N in modes
        for eta in EXACT_ETAS
    }

    def row_normalization():
        for (N, eta), dist in exact_tables.items():
            for m in range(max_photons + 1):
                yield sum(dist.row(m)) == 1, f"N={N} eta_sq={eta} m={m}"

    def closed_pkk():
        for (N, eta), dist in exact_tables.items():
            for k in range(1, min(N, max_photons) + 1):
                got = closed_form_pkk(N, k, eta)
                yield got == dist.prob(k, k), f"p_{N}({k}|{k}) eta_sq={eta}: {got} vs {dist.prob(k, k)}"

    def two_photon():
        for (N, eta), dist in exact_tables.items():
            for (k, m), p in two_photon_table(N, eta).items():
                if m > max_photons or k > N:
                    continue
                yield p == dist.prob(k, m), f"p_{N}({k}|{m}) eta_sq={eta}"

    def mdhp_patterns():
        for N in modes:
            for eta in MDHP_ETAS:
                R = build_coupling(extend_with_loss(build_symmetric_nport(N), eta))
                cells = cascade_intensities(N, eta)
                for m in range(1, max_photons + 1):
                    for n in iter_compositions(m, 2 * N):
                        a = fock_prob(R, m, n)
                        b = outcome_prob_multinomial(cells, m, n)
                        yield abs(a - b) < FLOAT_TOL, f"N={N} eta_sq={eta} n={n.counts}: {a} vs {float(b)}"

    def mdhp_tables():
        for N in modes:
            for eta in MDHP_ETAS:
                dist = click_distribution(N, eta, max_photons, "mdhp")
                ref = exact_tables[(N, eta)]
                for (k, m), p in dist.table.items():
                    yield abs(p - ref.table[(k, m)]) < FLOAT_TOL, f"p_{N}({k}|{m}) eta_sq={eta}"

    def monte_carlo():
        for N in modes:
            for eta in MDHP_ETAS:
                ref = exact_tables[(N, eta)]
                for m in range(1, max_photons + 1):
                    row = monte_carlo_clicks(N, float(eta), m, trials, seed)
                    for (k, _), p_hat in row.table.items():
                        p = float(ref.prob(k, m))
                        sigma = math.sqrt(p * (1 - p) / trials)
                        ok = abs(p_hat - p) <= MC_SIGMAS * sigma
                        yield ok, f"p_{N}({k}|{m}) eta_sq={eta}: {p_hat} vs {p}"

    def pkk_monotone():
        for k in range(1, max_photons + 1):
            for eta in EXACT_ETAS[1:]:
                vals = [closed_form_pkk(N, k, eta) for N in range(k, 65)]
                yield all(a <= b for a, b in zip(vals, vals[1:])), f"k={k} eta_sq={eta}"

    def closed_confidence():
        if max_photons < 2:
            return
        for N in list(modes) + [16]:
            for eta in EXACT_ETAS[1:]:
                E1 = build_cascade_povm(N, eta, 2)[1]
                for delta in DELTAS:
                    got = confidence(confinput_ensemble(delta), E1, 1).confidence
                    want = cascade_confidence_closed(N, delta, eta)
                    yield got == want, f"N={N} delta={delta} eta_sq={eta}: {got} vs {want}"

    def infinite_cascade():
        if max_photons < 2:
            return
        bench = maximal_ensemble()
        for i in range(1, 101):
            eta = Fraction(i, 100)
            a = cascade_confidence_closed(INF, 1, eta)
            b = spr_confidence_first_principles(eta, bench).confidence
            yield abs(a - b) < 1e-12, f"eta_sq={eta}: {a} vs {b}"

    def completeness():
        for N in modes:
            for eta in EXACT_ETAS:
                dev = check_completeness(build_cascade_povm(N, eta, max_photons))
                yield dev == 0, f"N={N} eta_sq={eta} deviation={dev}"
                dev = check_completeness(build_cascade_povm(N, float(eta), max_photons, "mdhp"))
                yield dev < FLOAT_TOL, f"mdhp N={N} eta_sq={eta} deviation={dev}"

    suites = [
        ("row normalization (exact)", row_normalization),
        ("closed p_N(k|k) == multinomial", closed_pkk),
        ("two-photon table == multinomial", two_photon),
        ("mdhp == multinomial per pattern", mdhp_patterns),
        ("mdhp == multinomial per table entry", mdhp_tables),
        (f"monte carlo within {MC_SIGMAS:g} sigma", monte_carlo),
        ("p_N(k|k) non-decreasing in N", pkk_monotone),
        ("closed confidence == general confidence", closed_confidence),
        ("N=inf closed form == resolving-detector model", infinite_cascade),
        ("POVM completeness", completeness),
    ]
    return [_run(name, body) for name, body in suites]
