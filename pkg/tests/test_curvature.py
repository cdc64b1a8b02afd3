import numpy as np
import pytest

from optholo.config import ValidationError
from optholo.connection import H_HAT
from optholo.coords import ParameterPoint
from optholo.curvature import (
    CurvatureComponents, curvature_closed_n1, curvature_numeric, global_curvature_check,
    pair_label, parse_pair,
)
from optholo.fock import make_space
from optholo.verify import random_points

S1 = make_space(2, 24)
PTS = random_points(1, 3, 0.5, 21, min_magnitude=0.05)


@pytest.mark.parametrize("p", PTS)
def test_closed_matches_fd_of_closed_connection(p):
    closed = curvature_closed_n1(p.xi[0], p.zeta[0])
    fd = curvature_numeric(None, p, source="closed")
    assert set(closed.components) == set(fd.components)
    assert len(closed.components) == 6
    assert closed.max_deviation(fd) < 1e-6


def test_closed_matches_numeric_oracle():
    p = PTS[0]
    numeric = curvature_numeric(S1, p)
    assert curvature_closed_n1(p.xi[0], p.zeta[0]).max_deviation(numeric) < 1e-5


def test_published_xi_xibar_component():
    p = ParameterPoint((0.35 + 0.1j,), (0.3 - 0.2j,))
    printed = curvature_closed_n1(p.xi[0], p.zeta[0], printed=True)
    corrected = curvature_closed_n1(p.xi[0], p.zeta[0])
    # the published form is the curvature of the published connection
    assert printed.max_deviation(curvature_numeric(None, p, source="closed", printed=True)) < 1e-6
    # but not of the operator family itself
    assert np.max(np.abs(printed.get("xi1", "xibar1") - corrected.get("xi1", "xibar1"))) > 0.1
    for key in corrected.components:
        if key != "xi1^xibar1":
            assert np.max(np.abs(printed.components[key] - corrected.components[key])) < 1e-14


def test_xi_xibar_is_proportional_to_h():
    c = curvature_closed_n1(0.4, 0.3).get("xi1", "xibar1")
    coeff = np.sin(0.8) / 0.4 * (np.cosh(0.6) ** 2 - 1)
    assert np.max(np.abs(c - coeff * H_HAT)) < 1e-14


def test_zeta_zetabar_real_diagonal():
    c = curvature_closed_n1(0.2, 0.1).get("zeta1", "zetabar1")
    assert np.array_equal(c, np.diag(np.diag(c)))
    assert np.all(np.diag(c).imag == 0)
    plane = curvature_closed_n1(0, 0).real_plane("zeta1")
    assert np.max(np.abs(plane - 4j * np.diag([0, 1, 1, 2]))) < 1e-14


def test_antisymmetry_and_labels():
    c = curvature_closed_n1(0.2, 0.1)
    assert np.array_equal(c.get("zetabar1", "zeta1"), -c.get("zeta1", "zetabar1"))
    assert np.all(c.get("xi1", "xi1") == 0)
    mu, nu = parse_pair("dzeta1^dzetabar1")
    assert pair_label(mu, nu) == "zeta1^zetabar1"
    with pytest.raises(ValidationError):
        parse_pair("zeta1")
    with pytest.raises(ValidationError):
        CurvatureComponents(c.point, {"zetabar1^zeta1": np.zeros((4, 4))})


def test_global_identity_and_frozen_control():
    p = ParameterPoint((0.3 + 0.1j,), (0.2j,))
    assert global_curvature_check(S1, p) < 1e-4
    assert global_curvature_check(S1, p, frozen=True) == 0.0


def test_two_controls_numeric_vs_closed_source():
    p = ParameterPoint((0.2, 0.1j), (0.15, -0.1 + 0.05j))
    numeric = curvature_numeric(make_space(3, 14), p)
    closed_fd = curvature_numeric(None, p, source="closed")
    assert len(numeric.components) == 28
    assert numeric.meta["step"] == 1e-4 and numeric.meta["cutoff"] == 14
    assert numeric.max_deviation(closed_fd) < 1e-5


def test_bad_source():
    with pytest.raises(ValidationError):
        curvature_numeric(S1, PTS[0], source="magic")
