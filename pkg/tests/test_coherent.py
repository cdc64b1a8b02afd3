import numpy as np
import pytest

from optholo import coherent, two_control
from optholo.config import TruncationError, ValidationError
from optholo.coords import ParameterPoint
from optholo.fock import make_space, total_block
from optholo.ladder import a, adag
from optholo.linalg import unitarity_residual
from optholo.verify import conjugation_residuals, random_points


def test_products_are_exactly_unitary():
    s = make_space(3, 6)
    p = ParameterPoint((0.3 + 0.1j, -0.2j), (0.2, 0.1 - 0.3j))
    for which in ("U", "V", "W"):
        assert unitarity_residual(coherent.product_unitary(s, p, which).entries) < 1e-12
    w = coherent.product_unitary(s, p, "W").entries
    u = coherent.product_unitary(s, p, "U").entries
    v = coherent.product_unitary(s, p, "V").entries
    assert np.max(np.abs(w - u @ v)) < 1e-12
    x = np.eye(s.dim)[:, :5]
    back = coherent.apply_product(s, p, coherent.apply_product(s, p, x, "W"), "W", inverse=True)
    assert np.max(np.abs(back - x)) < 1e-12


def test_su2_disentangling_matches_exponential_on_full_sectors():
    s = make_space(2, 8)
    xi = 0.7 - 0.4j
    direct = coherent.su2_unitary(s, 1, xi).entries
    normal = coherent.disentangled_su2(s, 1, xi).entries
    blk = total_block(s, 8)
    assert np.max(np.abs((direct - normal)[np.ix_(blk, blk)])) < 1e-10
    with pytest.raises(ValidationError):
        coherent.disentangled_su2(s, 1, np.pi / 2)


def test_su11_disentangling_agrees_on_low_states():
    s = make_space(2, 24)
    zeta = 0.3 + 0.2j
    direct = coherent.su11_unitary(s, 1, zeta).entries
    normal = coherent.disentangled_su11(s, 1, zeta).entries
    blk = total_block(s, 2)
    assert np.max(np.abs((direct - normal)[:, blk][blk])) < 1e-8


def test_squeezing_bound():
    with pytest.raises(TruncationError):
        coherent.check_squeezing(ParameterPoint((0.0,), (0.6,)))
    coherent.check_squeezing(ParameterPoint((0.0,), (0.6,)), bound=1.0)


def test_adjoint_coefficients_empty_chain():
    p = ParameterPoint((0.1, 0.2), (0.3, 0.4))
    top = coherent.adjoint_coeffs(p, 2, coherent.SU_N1)
    assert top.c == 1.0 and top.d == {}
    chain = coherent.adjoint_coeffs(p, 0, coherent.SU_N_1)
    assert set(chain.f) == {1, 2}
    assert np.isclose(chain.e, np.cosh(0.3) * np.cosh(0.4))
    with pytest.raises(ValidationError):
        coherent.adjoint_coeffs(p, 3, coherent.SU_N1)


def test_mode_conjugation_one_control():
    pts = random_points(1, 3, 0.5, 11)
    worst = conjugation_residuals(1, 24, pts)
    assert max(worst.values()) < 1e-9


def test_mode_conjugation_three_controls_exercises_cross_terms():
    # the cross term between distinct squeezers first appears with three controls
    p = ParameterPoint((0.2, 0.1j, -0.15), (0.12, 0.1j, 0.08 - 0.05j))
    worst = conjugation_residuals(3, 7, [p], max_occ=1)
    assert max(worst.values()) < 1e-6


def test_two_control_bilinears_match_mode_substitution():
    for p in random_points(2, 3, 0.5, 5):
        for i, j in two_control.PAIRS:
            tab = two_control.conjugated_bilinear(p, i, j)
            comp = coherent.conjugate_expr_closed(p, adag(i) * a(j))
            assert tab.max_abs_difference(comp) < 1e-13


def test_published_two_control_forms_differ_from_substitution():
    p = ParameterPoint((0.2, 0.3j), (0.3 + 0.2j, 0.25 - 0.1j))
    bad12 = two_control.conjugated_bilinear(p, 1, 2, printed=True)
    bad13 = two_control.conjugated_bilinear(p, 1, 3, printed=True)
    ref12 = coherent.conjugate_expr_closed(p, adag(1) * a(2))
    ref13 = coherent.conjugate_expr_closed(p, adag(1) * a(3))
    assert bad12.max_abs_difference(ref12) > 1e-2
    assert bad13.max_abs_difference(ref13) > 1e-2


def test_two_control_conjugation_converges_in_cutoff():
    pts = random_points(2, 3, 0.4, 2024)
    r12 = max(conjugation_residuals(2, 12, pts).values())
    r16 = max(conjugation_residuals(2, 16, pts).values())
    assert r16 < r12
    assert r16 < 1e-6
