"""Detection POVMs, preparation ensembles and the confidence of preparation.

All POVMs here are diagonal in the Fock basis, E_k = sum_m p(k|m) |m><m|, and all
confidences depend on the ensemble only through the weights |gamma_m|^2.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from photocascade.errors import (
    InvalidArgumentError,
    UnachievableTargetError,
    ZeroProbabilityError,
)
from photocascade.statistics import (
    Number,
    as_fraction,
    click_distribution,
    format_number,
    limit_click_distribution,
)

INF = math.inf
COMPLETENESS_TOL = 1e-10


def parse_modes(N: int | float | str) -> int | float:
    """Cascade size as a positive int or ``math.inf`` (spelled "inf" on the command line)."""
    if isinstance(N, str):
        if N.strip().lower() in ("inf", "infinity", "∞"):
            return INF
        try:
            N = int(N)
        except ValueError as exc:
            raise InvalidArgumentError(f"bad cascade size {N!r}") from exc
    if N == INF:
        return INF
    if isinstance(N, float) and not N.is_integer():
        raise InvalidArgumentError(f"bad cascade size {N!r}")
    if N < 1:
        raise InvalidArgumentError(f"cascade size must be >= 1, got {N}")
    return int(N)


@dataclass(frozen=True)
class PovmElement:
    """Diagonal POVM element for reported click count ``outcome_label``.

    ``diagonal[m]`` is the probability that ``m`` photons produce this outcome,
    for m = 0 .. cutoff.
    """

    outcome_label: int
    cutoff: int
    diagonal: tuple[Number, ...]
    device: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "diagonal", tuple(self.diagonal))
        if len(self.diagonal) != self.cutoff + 1:
            raise InvalidArgumentError("diagonal length must be cutoff + 1")
        if any(p < -1e-12 or p > 1 + 1e-12 for p in self.diagonal):
            raise InvalidArgumentError("POVM diagonal entries must lie in [0, 1]")

    def to_dict(self, exact: bool = False) -> dict:
        enc = (lambda x: str(x) if exact and isinstance(x, Fraction) else float(x))
        return {"outcome": self.outcome_label, "cutoff": self.cutoff,
                "diagonal": [enc(p) for p in self.diagonal]}


def _povm_from_distribution(dist, device: str) -> list[PovmElement]:
    m_max = dist.max_photons
    top = int(min(dist.modes, m_max))
    return [
        PovmElement(k, m_max, [dist.prob(k, m) for m in range(m_max + 1)], device)
        for k in range(top + 1)
    ]


def build_cascade_povm(
    N: int | float | str, eta_sq: Number | str, m_max: int, method: str = "multinomial"
) -> list[PovmElement]:
    """E_0 .. E_min(N, m_max) of an N-detector cascade with efficiency ``eta_sq``.

    ``N = inf`` gives the collision-free limit (binomial thinning only).
    """
    N = parse_modes(N)
    if N == INF:
        dist = limit_click_distribution(eta_sq, m_max)
    else:
        dist = click_distribution(N, eta_sq, m_max, method)
    return _povm_from_distribution(dist, f"cascade:{'inf' if N == INF else N}")


def build_spr_povm(eta_sq: Number | str, m_max: int) -> list[PovmElement]:
    """Photon-number-resolving detector behind a beam splitter of transmission ``eta_sq``."""
    return _povm_from_distribution(limit_click_distribution(eta_sq, m_max), "spr-model")


def check_completeness(povm: Sequence[PovmElement]) -> Number:
    """max over m of |sum_k E_k[m] - 1|; exactly 0 for rational POVMs."""
    if not povm:
        raise InvalidArgumentError("empty POVM")
    cutoffs = {e.cutoff for e in povm}
    if len(cutoffs) != 1:
        raise InvalidArgumentError(f"POVM elements have mismatched cutoffs {sorted(cutoffs)}")
    cutoff = cutoffs.pop()
    return max(abs(sum(e.diagonal[m] for e in povm) - 1) for m in range(cutoff + 1))


@dataclass(frozen=True)
class EnsembleTerm:
    m: int
    weight: Number
    label: str


@dataclass(frozen=True)
class PreparationEnsemble:
    """Schmidt-form state sum_m gamma_m |m>|phi_m>, stored as weights |gamma_m|^2."""

    terms: tuple[EnsembleTerm, ...]
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(sorted(self.terms, key=lambda t: t.m)))
        ms = [t.m for t in self.terms]
        if len(set(ms)) != len(ms):
            raise InvalidArgumentError(f"photon numbers must be distinct, got {ms}")
        if any(m < 0 for m in ms):
            raise InvalidArgumentError("photon numbers must be non-negative")
        if any(t.weight < 0 for t in self.terms):
            raise InvalidArgumentError("weights must be non-negative")
        total = sum(t.weight for t in self.terms)
        if self.exact:
            if total != 1:
                raise InvalidArgumentError(f"weights sum to {total}, not 1")
        elif abs(total - 1) > 1e-12:
            raise InvalidArgumentError(f"weights sum to {total}, not 1")

    @classmethod
    def from_weights(
        cls,
        weights: Mapping[int, Number | str] | Sequence[Number | str],
        labels: Optional[Mapping[int, str]] = None,
        name: str = "",
    ) -> "PreparationEnsemble":
        """Build and normalize. Strings such as "1/3" are read as exact rationals."""
        if not isinstance(weights, Mapping):
            weights = dict(enumerate(weights))
        parsed = {int(m): _read_weight(w) for m, w in weights.items()}
        total = sum(parsed.values())
        if total <= 0 or any(w < 0 for w in parsed.values()):
            raise InvalidArgumentError("weights must be non-negative with a positive sum")
        labels = labels or {}
        terms = tuple(
            EnsembleTerm(m, w / total, labels.get(m, f"phi{m}")) for m, w in parsed.items()
        )
        return cls(terms, name)

    @classmethod
    def from_dict(cls, doc: Mapping) -> "PreparationEnsemble":
        try:
            raw = doc["terms"]
            weights = {int(t["m"]): t["weight"] for t in raw}
            labels = {int(t["m"]): str(t.get("label", f"phi{t['m']}")) for t in raw}
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"malformed ensemble document: {exc}") from exc
        if len(weights) != len(raw):
            raise InvalidArgumentError("photon numbers must be distinct")
        return cls.from_weights(weights, labels, doc.get("name", ""))

    @classmethod
    def load(cls, path: str | Path) -> "PreparationEnsemble":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    @property
    def exact(self) -> bool:
        return all(isinstance(t.weight, (Fraction, int)) for t in self.terms)

    @property
    def max_photons(self) -> int:
        return max(t.m for t in self.terms)

    def weight(self, m: int) -> Number:
        for t in self.terms:
            if t.m == m:
                return t.weight
        return Fraction(0) if self.exact else 0.0

    @property
    def delta(self) -> Number:
        """Two-photon to one-photon weight ratio."""
        w1 = self.weight(1)
        if w1 == 0:
            raise ZeroProbabilityError("ensemble has no one-photon weight")
        return self.weight(2) / w1

    def to_dict(self, exact: bool = True) -> dict:
        enc = (lambda x: str(x) if exact and isinstance(x, Fraction) else float(x))
        return {"name": self.name,
                "terms": [{"m": t.m, "weight": enc(t.weight), "label": t.label} for t in self.terms]}


def _read_weight(w: Number | str | int) -> Number:
    if isinstance(w, float):
        return w
    return as_fraction(w)


@dataclass(frozen=True)
class ConfidenceReport:
    confidence: Number
    conditioning_probability: Optional[Number]
    outcome_label: int
    device: str
    eta_sq: Optional[Number] = None
    target_m: int = 1
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in ("confidence", "conditioning_probability"):
            v = getattr(self, name)
            if v is not None and not -1e-12 <= v <= 1 + 1e-12:
                raise ValueError(f"{name}={v} outside [0, 1]")

    def to_dict(self, precision: int = 10, exact: bool = False) -> dict:
        def enc(x):
            if x is None:
                return None
            if exact and isinstance(x, Fraction):
                return str(x)
            return float(format_number(x, precision))

        return {
            "confidence": enc(self.confidence),
            "conditioning_probability": enc(self.conditioning_probability),
            "outcome": self.outcome_label,
            "target_m": self.target_m,
            "device": self.device,
            "eta_sq": enc(self.eta_sq),
            **self.extra,
        }

    def to_json(self, precision: int = 10, exact: bool = False, **kwargs) -> str:
        return json.dumps(self.to_dict(precision, exact), **kwargs)

    CSV_FIELDS = ("device", "eta_sq", "outcome", "target_m", "confidence", "conditioning_probability")

    def to_csv(self, precision: int = 10, exact: bool = False, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(self.CSV_FIELDS)
        fmt = lambda x: "" if x is None else format_number(x, precision, exact)  # noqa: E731
        w.writerow([self.device, fmt(self.eta_sq), self.outcome_label, self.target_m,
                    fmt(self.confidence), fmt(self.conditioning_probability)])
        return buf.getvalue()


def confidence(
    ensemble: PreparationEnsemble, povm_element: PovmElement, target_m: int = 1
) -> ConfidenceReport:
    """C = w(target) E[target] / sum_m w(m) E[m]: chance the prepared state is |phi_target>."""
    cutoff = povm_element.cutoff
    if not 0 <= target_m <= cutoff:
        raise InvalidArgumentError(f"target_m={target_m} outside POVM cutoff {cutoff}")
    if ensemble.max_photons > cutoff:
        raise InvalidArgumentError(
            f"ensemble reaches m={ensemble.max_photons} but the POVM stops at {cutoff}"
        )
    diag = povm_element.diagonal
    denom = sum(t.weight * diag[t.m] for t in ensemble.terms)
    if denom == 0:
        raise ZeroProbabilityError(
            f"outcome {povm_element.outcome_label} has probability zero for this ensemble"
        )
    num = ensemble.weight(target_m) * diag[target_m]
    return ConfidenceReport(num / denom, denom, povm_element.outcome_label,
                            povm_element.device, None, target_m)


def _closed_inputs(N, delta, eta_sq):
    N = parse_modes(N)
    exact = not any(isinstance(x, float) for x in (delta, eta_sq))
    if exact:
        delta, eta_sq = as_fraction(delta), as_fraction(eta_sq)
    if delta < 0:
        raise InvalidArgumentError(f"delta must be >= 0, got {delta}")
    return N, delta, eta_sq


def cascade_confidence_closed(N: int | float | str, delta: Number, eta_sq: Number) -> Number:
    """Single-click confidence of an N-cascade for weights alpha^2 : beta^2 : delta beta^2.

    C = N / (N + delta (eta_sq + 2N(1 - eta_sq))); for N = inf, 1 / (1 + 2 delta (1 - eta_sq)).
    Exact when ``delta`` and ``eta_sq`` are not floats.
    """
    N, delta, eta_sq = _closed_inputs(N, delta, eta_sq)
    if not 0 <= eta_sq <= 1:
        raise InvalidArgumentError(f"eta_sq must lie in [0, 1], got {eta_sq}")
    if eta_sq == 0:
        raise ZeroProbabilityError("a zero-efficiency cascade never clicks")
    if N == INF:
        return 1 / (1 + 2 * delta * (1 - eta_sq))
    return N / (N + delta * (eta_sq + 2 * N * (1 - eta_sq)))


def required_efficiency(N: int | float | str, delta: Number, target_confidence: Number) -> Number:
    """Efficiency at which :func:`cascade_confidence_closed` reaches ``target_confidence``.

    The closed form is linear in eta_sq after clearing denominators, so this is exact.
    """
    N, delta, C = _closed_inputs(N, delta, target_confidence)
    if not 0 < C < 1:
        raise InvalidArgumentError(f"target confidence must lie in (0, 1), got {C}")
    if delta == 0:
        raise UnachievableTargetError("with delta = 0 the confidence is 1 at every efficiency")
    odds = (1 / C - 1) / delta
    if N == INF:
        eta_sq = 1 - odds / 2
    else:
        eta_sq = (N * odds - 2 * N) / (1 - 2 * N)
    if not 0 < eta_sq <= 1:
        raise UnachievableTargetError(
            f"confidence {float(C):.4g} needs eta_sq = {float(eta_sq):.4g}, outside (0, 1]"
        )
    return eta_sq


def spr_confidence_paper_form(eta_sq: Number) -> Number:
    """eta^2 / (4 - 3 eta^2), the printed one-photon weight for the equal-weight state."""
    if not 0 < eta_sq <= 1:
        raise InvalidArgumentError(f"eta_sq must lie in (0, 1], got {eta_sq}")
    return eta_sq / (4 - 3 * eta_sq)


def _split_weight(m: int, j: int, eta_sq: Number) -> Number:
    # (eta b^+ + t c^+)^m / sqrt(m!) |0,0> has amplitude
    # C(m,j) eta^j t^(m-j) sqrt(j! (m-j)! / m!) on |j>_b |m-j>_c
    amp_sq_coeff = Fraction(math.comb(m, j) ** 2 * math.factorial(j) * math.factorial(m - j),
                            math.factorial(m))
    return amp_sq_coeff * eta_sq**j * (1 - eta_sq) ** (m - j)


def spr_confidence_first_principles(
    eta_sq: Number, ensemble: PreparationEnsemble, clicks: int = 1, target_m: int = 1
) -> ConfidenceReport:
    """Resolving detector modelled by a beam splitter and an ideal number projection.

    Every Fock term |m>_a is rewritten in the transmitted (b) and lost (c) modes, the
    state is projected onto exactly ``clicks`` photons in b, and c is traced out.
    """
    if not 0 <= eta_sq <= 1:
        raise InvalidArgumentError(f"eta_sq must lie in [0, 1], got {eta_sq}")
    if not isinstance(eta_sq, float) and not ensemble.exact:
        eta_sq = float(eta_sq)
    reduced = {
        t.m: t.weight * (_split_weight(t.m, clicks, eta_sq) if t.m >= clicks else 0)
        for t in ensemble.terms
    }
    norm = sum(reduced.values())
    if norm == 0:
        raise ZeroProbabilityError(f"no term can leave exactly {clicks} photon(s) in the detector")
    C = reduced.get(target_m, 0) / norm
    if isinstance(eta_sq, float):
        C, norm = float(C), float(norm)
    return ConfidenceReport(C, norm, clicks, "spr-model", eta_sq, target_m)


def maximal_ensemble() -> PreparationEnsemble:
    """Equal weights on 0, 1 and 2 photons (delta = 1)."""
    return PreparationEnsemble.from_weights(["1", "1", "1"], name="maximal")


def downconverter_ensemble(xi: Number | str) -> PreparationEnsemble:
    """Down-converter output kept to |00> + xi|11> + xi^2|22>, weights 1 : xi^2 : xi^4."""
    x2 = abs(xi) ** 2 if isinstance(xi, float) else as_fraction(xi) ** 2
    return PreparationEnsemble.from_weights([1, x2, x2**2], name=f"downconverter:{xi}")


def confinput_ensemble(delta: Number | str, alpha_sq: Number | str = Fraction(1, 3)) -> PreparationEnsemble:
    """Weights alpha^2, beta^2, delta beta^2 with beta^2 fixed by normalization."""
    if isinstance(delta, str):
        delta = as_fraction(delta)
    if isinstance(alpha_sq, str):
        alpha_sq = as_fraction(alpha_sq)
    if delta < 0 or not 0 <= alpha_sq < 1:
        raise InvalidArgumentError("need delta >= 0 and 0 <= alpha_sq < 1")
    beta_sq = (1 - alpha_sq) / (1 + delta)
    return PreparationEnsemble.from_weights([alpha_sq, beta_sq, delta * beta_sq],
                                            name=f"confinput:{delta}")


def benchmark_ensembles(xi: Number | str = "1/10", delta: Number | str = 1) -> dict[str, PreparationEnsemble]:
    return {
        "maximal": maximal_ensemble(),
        "downconverter": downconverter_ensemble(xi),
        "confinput": confinput_ensemble(delta),
    }


def device_confidence(
    ensemble: PreparationEnsemble,
    device: str,
    eta_sq: Number | str,
    clicks: int = 1,
    target_m: int = 1,
) -> ConfidenceReport:
    """Confidence for a device spec: ``cascade:N``, ``cascade:inf``, ``spr-model`` or ``spr-paper``."""
    eta = as_fraction(eta_sq) if isinstance(eta_sq, str) else eta_sq
    if device == "spr-paper":
        if clicks != 1 or target_m != 1 or not _is_maximal(ensemble):
            raise InvalidArgumentError(
                "spr-paper is a fixed formula for the equal-weight 0/1/2-photon state, "
                "one click, target m = 1"
            )
        # the printed form fixes only the ratio of the conditional weights
        return ConfidenceReport(spr_confidence_paper_form(eta), None, 1, "spr-paper", eta, 1)
    if device == "spr-model":
        return spr_confidence_first_principles(eta, ensemble, clicks, target_m)
    if not device.startswith("cascade:"):
        raise InvalidArgumentError(f"unknown device {device!r}")
    N = parse_modes(device.split(":", 1)[1])
    cutoff = max(ensemble.max_photons, target_m)
    if clicks > min(N, cutoff):
        raise InvalidArgumentError(f"{device} cannot report {clicks} clicks here")
    povm = build_cascade_povm(N, eta, cutoff)
    rep = confidence(ensemble, povm[clicks], target_m)
    return ConfidenceReport(rep.confidence, rep.conditioning_probability, clicks,
                            povm[clicks].device, eta, target_m)


def _is_maximal(ensemble: PreparationEnsemble) -> bool:
    return [t.m for t in ensemble.terms] == [0, 1, 2] and all(
        abs(t.weight - Fraction(1, 3)) < 1e-9 for t in ensemble.terms
    )


def iter_devices(spec: str | Iterable[str]) -> list[int | float]:
    items = spec.split(",") if isinstance(spec, str) else list(spec)
    return [parse_modes(s) for s in items]
