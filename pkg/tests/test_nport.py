import cmath
import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from photocascade.errors import InvalidArgumentError
from photocascade.nport import (
    InterferometerMatrix,
    build_symmetric_nport,
    extend_with_loss,
    input_mode_intensities,
)


def test_trivial_port():
    assert np.array_equal(build_symmetric_nport(1).entries, [[1]])


def test_two_port_is_hadamard():
    U = build_symmetric_nport(2).entries
    np.testing.assert_allclose(U, np.array([[1, 1], [1, -1]]) / math.sqrt(2), atol=1e-15)


def test_four_port_entry():
    # 1-based (2, 2)
    assert build_symmetric_nport(4).entries[1, 1] == pytest.approx(0.5j, abs=1e-15)


@pytest.mark.parametrize("N", range(1, 9))
def test_matches_formula_and_is_unitary(N):
    M = build_symmetric_nport(N)
    want = np.array([[cmath.exp(2j * math.pi * j * k / N) / math.sqrt(N) for k in range(N)]
                     for j in range(N)])
    np.testing.assert_allclose(M.entries, want, atol=1e-14)
    assert M.unitarity_error() < 1e-12
    np.testing.assert_allclose(np.abs(M.entries), 1 / math.sqrt(N), atol=1e-14)
    assert M.detected_modes == N and not M.is_lossy


def test_rejects_empty_port():
    with pytest.raises(InvalidArgumentError):
        build_symmetric_nport(0)


def test_lossless_extension_keeps_detected_block():
    U = build_symmetric_nport(3)
    L = extend_with_loss(U, 1)
    assert np.array_equal(L.entries[:3, :3], U.entries)
    assert np.all(L.entries[:3, 3:] == 0) and np.all(L.entries[3:, :3] == 0)


def test_zero_efficiency_routes_everything_to_loss():
    L = extend_with_loss(build_symmetric_nport(3), 0)
    assert np.all(L.entries[:3, :3] == 0)
    assert input_mode_intensities(L)[:3] == [0, 0, 0]


def test_block_structure():
    U = build_symmetric_nport(3)
    L = extend_with_loss(U, Fraction(22, 25))
    eta, t = math.sqrt(0.88), math.sqrt(0.12)
    u = U.entries
    np.testing.assert_allclose(L.entries, np.block([[eta * u, t * u], [-t * u, eta * u]]), atol=1e-15)
    assert L.unitarity_error() < 1e-12
    assert L.detected_modes == 3 and L.dim == 6 and L.efficiency == Fraction(22, 25)


def test_bad_extensions():
    U = build_symmetric_nport(2)
    with pytest.raises(InvalidArgumentError):
        extend_with_loss(U, 1.5)
    with pytest.raises(InvalidArgumentError):
        extend_with_loss(extend_with_loss(U, 0.5), 0.5)


def test_intensities():
    assert input_mode_intensities(build_symmetric_nport(4)) == pytest.approx([0.25] * 4, abs=1e-15)
    got = input_mode_intensities(extend_with_loss(build_symmetric_nport(2), 0.88))
    assert got == pytest.approx([0.44, 0.44, 0.06, 0.06], abs=1e-14)
    assert input_mode_intensities(extend_with_loss(build_symmetric_nport(5), 1))[5:] == [0] * 5


@given(st.integers(1, 7), st.integers(0, 100))
def test_unitarity_on_grid(N, pct):
    L = extend_with_loss(build_symmetric_nport(N), Fraction(pct, 100))
    assert L.unitarity_error() < 1e-12
    col_sums = (np.abs(L.entries) ** 2).sum(axis=0)
    np.testing.assert_allclose(col_sums, 1, atol=1e-12)
    assert sum(input_mode_intensities(L)) == pytest.approx(1, abs=1e-12)


def test_json_round_trip():
    L = extend_with_loss(build_symmetric_nport(3), 0.5)
    doc = json.loads(L.to_json())
    assert set(doc) == {"dim", "detected_modes", "efficiency", "entries"}
    assert doc["dim"] == 6 and doc["detected_modes"] == 3 and doc["efficiency"] == 0.5
    back = InterferometerMatrix.from_dict(doc)
    np.testing.assert_allclose(back.entries, L.entries, atol=1e-15)
