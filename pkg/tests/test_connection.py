import numpy as np
import pytest

from optholo.config import TruncationError, ValidationError
from optholo.connection import (
    A_HAT, B_HAT, C_HAT, E_HAT, F_HAT, H_HAT, ConnectionComponents, connection_closed,
    connection_closed_n1, connection_closed_n2, connection_composed, connection_numeric,
    coordinate_labels, projector, vacuum_expectation, vacuum_frame, vacuum_moments,
)
from optholo.coords import ParameterPoint
from optholo.fock import bilinear, make_space
from optholo.ladder import a, adag
from optholo.verify import VACUUM_TABLES_N2, random_points

S1 = make_space(2, 24)
S2 = make_space(3, 12)


def test_frame_is_binary_counter():
    f = vacuum_frame(make_space(3, 4))
    assert f.m == 8
    assert f.labels[0] == (0, 0, 0) and f.labels[1] == (0, 0, 1) and f.labels[7] == (1, 1, 1)


def test_one_control_basis_from_moments():
    mom = vacuum_moments(make_space(2, 2))
    assert np.array_equal(mom.M[2, 1], E_HAT)
    assert np.array_equal(mom.M[1, 2], F_HAT)
    assert np.array_equal(0.5 * (mom.M[2, 2] - mom.M[1, 1]), H_HAT)
    assert np.array_equal(mom.N[1, 2], A_HAT)
    assert np.array_equal(mom.N[1, 2].T, C_HAT)
    assert np.array_equal(0.5 * (mom.M[1, 1] + mom.M[2, 2] + np.eye(4)), B_HAT)


def test_vacuum_tables_are_exact_zero_one():
    mom = vacuum_moments(make_space(3, 3))
    for (kind, i, j), ones in VACUUM_TABLES_N2.items():
        expected = np.zeros((8, 8))
        for r, c in ones:
            expected[r - 1, c - 1] = 1
        got = (mom.M if kind == "adag_a" else mom.N)[i, j]
        assert np.array_equal(got, expected), (kind, i, j)


def test_vacuum_expectation_space_mismatch():
    with pytest.raises(ValidationError):
        vacuum_expectation(bilinear(make_space(2, 3), 1, 2, "adag_a"), vacuum_frame(make_space(2, 4)))


def test_origin_values():
    c = connection_closed_n1(0, 0)
    assert np.array_equal(c.component("xi1"), F_HAT)
    assert np.array_equal(c.component("zeta1"), C_HAT)
    assert np.array_equal(c.component("xibar1"), -E_HAT)


@pytest.mark.parametrize("p", random_points(1, 4, 0.5, 3, min_magnitude=0.05))
def test_closed_n1_matches_composed_and_numeric(p):
    closed = connection_closed_n1(p.xi[0], p.zeta[0])
    assert closed.max_deviation(connection_composed(p)) < 1e-13
    assert closed.max_deviation(connection_numeric(S1, p)) < 1e-8


def test_connection_is_antihermitian_form():
    p = ParameterPoint((0.3 - 0.2j,), (0.25 + 0.1j,))
    c = connection_numeric(S1, p)
    for h, bar in (("xi1", "xibar1"), ("zeta1", "zetabar1")):
        assert np.max(np.abs(c.component(bar) + c.component(h).conj().T)) < 1e-14
    # contracting with a real tangent vector gives an anti-hermitian matrix
    d = ParameterPoint((0.4 + 0.1j,), (-0.3j,))
    m = c.contract(d)
    assert np.max(np.abs(m + m.conj().T)) < 1e-12


def test_published_h_sign_disagrees_with_numeric():
    p = ParameterPoint((0.4 + 0.2j,), (0.3,))
    numeric = connection_numeric(S1, p)
    assert connection_closed_n1(p.xi[0], p.zeta[0]).max_deviation(numeric) < 1e-8
    assert connection_closed_n1(p.xi[0], p.zeta[0], printed=True).max_deviation(numeric) > 0.1


@pytest.mark.parametrize("p", random_points(2, 3, 0.3, 9, min_magnitude=0.05))
def test_closed_n2_matches_composed_and_numeric(p):
    closed = connection_closed_n2(p)
    assert closed.max_deviation(connection_composed(p)) < 1e-13
    assert closed.max_deviation(connection_numeric(S2, p)) < 1e-5
    assert connection_closed_n2(p, printed=True).max_deviation(closed) > 1e-3


def test_composed_three_controls_against_numeric():
    p = ParameterPoint((0.2, -0.1j, 0.15), (0.1, 0.05j, 0.08))
    s = make_space(4, 7)
    assert connection_composed(p).max_deviation(connection_numeric(s, p)) < 1e-5
    with pytest.raises(ValidationError):
        connection_closed(p)


def test_richardson_gap_reported_and_bounds():
    p = ParameterPoint((0.1,), (0.2,))
    c = connection_numeric(S1, p)
    assert c.meta["richardson_ok"]
    with pytest.raises(TruncationError):
        connection_numeric(S1, ParameterPoint((0.1,), (0.7,)))
    with pytest.raises(ValidationError, match="point dimension mismatch"):
        connection_numeric(S2, p)


def test_projector_is_rank_m_projection():
    p = ParameterPoint((0.2,), (0.1j,))
    P = projector(S1, p, vacuum_frame(S1)).entries
    assert np.max(np.abs(P @ P - P)) < 1e-12
    assert abs(np.trace(P).real - 4) < 1e-12


def test_labels():
    assert coordinate_labels(1) == ["xi1", "zeta1", "xibar1", "zetabar1"]
    with pytest.raises(ValidationError):
        ConnectionComponents(ParameterPoint((0,), (0,)), (np.full((4, 4), np.nan),), (np.zeros((4, 4)),))
