import numpy as np
import pytest

from optholo.config import ValidationError
from optholo.fock import (
    annihilation, basis_index, basis_state, bilinear, creation, kerr_diagonal, low_block,
    make_space, number, occupations,
)


def test_dimension_and_ordering():
    s = make_space(3, 4)
    assert s.dim == 125
    # last mode varies fastest
    assert basis_index(s, (0, 0, 1)) == 1
    assert basis_index(s, (1, 0, 0)) == 25
    assert tuple(occupations(s)[basis_index(s, (2, 3, 1))]) == (2, 3, 1)


def test_ladder_action_and_truncation():
    s = make_space(2, 3)
    a1, a1d = annihilation(s, 1), creation(s, 1)
    v = basis_state(s, (2, 1)).amplitudes
    w = a1.entries @ v
    assert np.isclose(w[basis_index(s, (1, 1))], np.sqrt(2))
    # creation on the top level is truncated to zero
    top = basis_state(s, (3, 0)).amplitudes
    assert np.allclose(a1d.entries @ top, 0)
    # [a, a^dag] = 1 away from the top level
    comm = (a1 @ a1d - a1d @ a1).entries
    keep = low_block(s, 2)
    assert np.allclose(comm[np.ix_(keep, keep)], np.eye(len(keep)))
    assert np.allclose(np.diag(number(s, 1).entries), occupations(s)[:, 0])


def test_bilinear_hermiticity():
    s = make_space(3, 3)
    ab = bilinear(s, 1, 3, "adag_a")
    ba = bilinear(s, 3, 1, "adag_a")
    assert np.allclose(ab.dag.entries, ba.entries)
    assert (ab + ba).hermiticity_residual() < 1e-14


def test_kerr_ground_space_is_qubit_register():
    s = make_space(3, 4)
    zero = np.flatnonzero(np.isclose(kerr_diagonal(s), 0))
    assert len(zero) == 8
    assert set(map(tuple, occupations(s)[zero])) == {(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)}


@pytest.mark.parametrize("args", [(0, 4), (2, 0), (2, -1)])
def test_invalid_spaces(args):
    with pytest.raises(ValidationError):
        make_space(*args)


def test_memory_guard():
    with pytest.raises(ValidationError):
        make_space(6, 30)


def test_mode_index_checked():
    s = make_space(2, 3)
    with pytest.raises(ValidationError):
        annihilation(s, 3)
    with pytest.raises(ValidationError):
        basis_index(s, (4, 0))
