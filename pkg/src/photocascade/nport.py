"""Symmetric N-port unitaries and the beam-splitter loss model."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from photocascade.errors import InvalidArgumentError

UNITARITY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class InterferometerMatrix:
    """A unitary mode transformation.

    ``entries[j, k]`` is U_{jk} with 0-based storage; mode labels in docs and
    serialized output stay 1-based. For a lossy matrix the first ``detected_modes``
    outputs are read by detectors and output ``N + i`` is the loss mode of
    detector ``i``.
    """

    entries: np.ndarray
    detected_modes: int
    efficiency: Optional[Fraction | float] = None

    def __post_init__(self) -> None:
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidArgumentError(f"expected a square matrix, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)
        if self.detected_modes not in (m.shape[0], m.shape[0] / 2):
            raise InvalidArgumentError("detected_modes must be dim or dim/2")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def is_lossy(self) -> bool:
        return self.detected_modes != self.dim

    def unitarity_error(self) -> float:
        m = self.entries
        return float(np.max(np.abs(m.conj().T @ m - np.eye(self.dim))))

    def to_dict(self) -> dict:
        eff = self.efficiency
        return {
            "dim": self.dim,
            "detected_modes": self.detected_modes,
            "efficiency": None if eff is None else float(eff),
            "entries": [[[float(z.real), float(z.imag)] for z in row] for row in self.entries],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, doc: dict) -> "InterferometerMatrix":
        entries = np.array([[complex(re, im) for re, im in row] for row in doc["entries"]])
        if entries.shape[0] != doc["dim"]:
            raise InvalidArgumentError("dim does not match entries")
        return cls(entries, int(doc["detected_modes"]), doc.get("efficiency"))


def build_symmetric_nport(N: int) -> InterferometerMatrix:
    """The N x N discrete-Fourier unitary U_jk = exp(2 pi i (j-1)(k-1)/N)/sqrt(N)."""
    if N < 1:
        raise InvalidArgumentError(f"N must be >= 1, got {N}")
    j = np.arange(N)
    # reduce the exponent mod N before scaling so that e.g. N=4 gives exact i
    phase = np.outer(j, j) % N
    angles = 2 * np.pi * phase / N
    entries = (np.cos(angles) + 1j * np.sin(angles)) / np.sqrt(N)
    for exact, value in ((0, 1), (N / 2, -1), (N / 4, 1j), (3 * N / 4, -1j)):
        entries[phase == exact] = value / np.sqrt(N)
    return InterferometerMatrix(entries, N)


def extend_with_loss(U: InterferometerMatrix, eta_sq: Fraction | float) -> InterferometerMatrix:
    """Put a beam splitter of intensity transmission ``eta_sq`` before every detector.

    Returns the 2N x 2N unitary [[eta U, t U], [-t U, eta U]] with t = sqrt(1 - eta_sq).
    """
    if U.is_lossy:
        raise InvalidArgumentError("matrix already carries a loss model")
    if not 0 <= eta_sq <= 1:
        raise InvalidArgumentError(f"eta_sq must lie in [0, 1], got {eta_sq}")
    eta = np.sqrt(float(eta_sq))
    t = np.sqrt(float(1 - eta_sq))
    u = U.entries
    entries = np.block([[eta * u, t * u], [-t * u, eta * u]])
    return InterferometerMatrix(entries, U.dim, eta_sq)


def input_mode_intensities(M: InterferometerMatrix) -> list[float]:
    """|coupling of input mode 1 to each output mode|^2, in output-mode order."""
    return [float(abs(z) ** 2) for z in M.entries[:, 0]]
