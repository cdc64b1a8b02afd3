"""Unitary coherent operators of su(n+1) and su(n,1) type on n + 1 oscillators.

``U_j(xi_j) = exp(xi_j a_j^dag a_{n+1} - conj(xi_j) a_{n+1}^dag a_j)`` (beam splitter)
``V_j(zeta_j) = exp(zeta_j a_j^dag a_{n+1}^dag - conj(zeta_j) a_{n+1} a_j)`` (two-mode squeezer)

Ordered products ``U = U_1 ... U_n``, ``V = V_1 ... V_n`` and ``W = U V``, the
closed-form adjoint actions on ladder operators, and the Maurer-Cartan
operators ``U^-1 dU/dxi_j`` and ``V^-1 dV/dzeta_j`` in closed and
finite-difference form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from . import special
from .config import DEFAULTS, TruncationError, ValidationError
from .coords import Coord, ParameterPoint, check_step, parse_coord, wirtinger
from .fock import ModeSystem, OperatorMatrix, bilinear_sparse, number
from .ladder import LadderExpr, a, adag
from .linalg import expm

SU_N1 = "su_n1"  # su(n+1), compact
SU_N_1 = "su_n_1"  # su(n,1), non-compact
ALGEBRAS = (SU_N1, SU_N_1)


def _check_control(space: ModeSystem, j: int) -> None:
    if not (1 <= j <= space.n):
        raise ValidationError(f"control index {j} out of range 1..{space.n}")


def _check_point(space: ModeSystem, point: ParameterPoint) -> None:
    if point.n != space.n:
        raise ValidationError(
            f"point dimension mismatch: point has n={point.n}, space has n={space.n}"
        )


def check_squeezing(point_or_zeta, bound: float | None = None) -> None:
    bound = DEFAULTS.squeeze_bound if bound is None else bound
    zetas = point_or_zeta.zeta if isinstance(point_or_zeta, ParameterPoint) else [point_or_zeta]
    for k, z in enumerate(zetas, 1):
        if abs(z) > bound + 1e-15:
            raise TruncationError(
                f"|zeta_{k}| = {abs(z):.4g} exceeds squeezing bound {bound:g}; "
                "truncated matrices lose accuracy"
            )


# -- generators ---------------------------------------------------------------

def su2_generator(space: ModeSystem, j: int, xi: complex) -> sp.csr_matrix:
    _check_control(space, j)
    last = space.n_modes
    return (xi * bilinear_sparse(space, j, last, "adag_a")
            - np.conj(xi) * bilinear_sparse(space, last, j, "adag_a")).tocsr()


def su11_generator(space: ModeSystem, j: int, zeta: complex) -> sp.csr_matrix:
    _check_control(space, j)
    last = space.n_modes
    return (zeta * bilinear_sparse(space, j, last, "adag_adag")
            - np.conj(zeta) * bilinear_sparse(space, last, j, "a_a")).tocsr()


@lru_cache(maxsize=None)
def _pair_structure(levels: int, kind: str):
    """Two-mode ladder matrices and conserved-charge sectors for one factor.

    The beam-splitter generator conserves N_j + N_{n+1}; the squeezer conserves
    N_j - N_{n+1}. Both stay block diagonal under hard truncation.
    """
    low = np.diag(np.sqrt(np.arange(1, levels, dtype=float)), 1)
    eye = np.eye(levels)
    a1, a2 = np.kron(low, eye), np.kron(eye, low)
    m1, m2 = np.divmod(np.arange(levels * levels), levels)
    if kind == "su2":
        raise_op, charge = a1.T @ a2, m1 + m2
    else:
        raise_op, charge = a1.T @ a2.T, m1 - m2
    sectors = [np.flatnonzero(charge == q) for q in np.unique(charge)]
    return raise_op, sectors


def pair_unitary(levels: int, kind: str, value: complex) -> np.ndarray:
    """exp(value R - conj(value) R^dag) on two truncated modes, sector by sector."""
    raise_op, sectors = _pair_structure(levels, kind)
    out = np.zeros((levels * levels,) * 2, dtype=complex)
    if value == 0:
        np.fill_diagonal(out, 1.0)
        return out
    for idx in sectors:
        r = raise_op[np.ix_(idx, idx)]
        g = value * r - np.conj(value) * r.T
        out[np.ix_(idx, idx)] = expm(g)
    return out


def apply_pair(space: ModeSystem, j: int, local: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Apply a two-mode operator on modes (j, n+1) to the columns of ``x``."""
    x = np.asarray(x, dtype=complex)
    vec = x.ndim == 1
    if vec:
        x = x[:, None]
    L, N = space.levels, space.n_modes
    k = x.shape[1]
    t = x.reshape((L,) * N + (k,))
    t = np.moveaxis(t, (j - 1, N - 1), (0, 1))
    shape = t.shape
    t = (local @ t.reshape(L * L, -1)).reshape(shape)
    t = np.moveaxis(t, (0, 1), (j - 1, N - 1)).reshape(space.dim, k)
    return t[:, 0] if vec else t


def _factor_list(space: ModeSystem, point: ParameterPoint, which: str):
    _check_point(space, point)
    if which not in ("U", "V", "W"):
        raise ValidationError(f"which must be U, V or W, got {which!r}")
    out = []
    if which in ("U", "W"):
        out += [("su2", j, point.xi[j - 1]) for j in range(1, space.n + 1)]
    if which in ("V", "W"):
        out += [("su11", j, point.zeta[j - 1]) for j in range(1, space.n + 1)]
    return out


def su2_unitary(space: ModeSystem, j: int, xi: complex) -> OperatorMatrix:
    _check_control(space, j)
    local = pair_unitary(space.levels, "su2", xi)
    return OperatorMatrix(space, apply_pair(space, j, local, np.eye(space.dim)))


def su11_unitary(
    space: ModeSystem, j: int, zeta: complex, squeeze_bound: float | None = None
) -> OperatorMatrix:
    _check_control(space, j)
    check_squeezing(zeta, squeeze_bound)
    local = pair_unitary(space.levels, "su11", zeta)
    return OperatorMatrix(space, apply_pair(space, j, local, np.eye(space.dim)))


def disentangled_su2(space: ModeSystem, j: int, xi: complex, margin: float = 1e-3) -> OperatorMatrix:
    """Normal-ordered form exp(eta J+) exp(log(1+|eta|^2) J3) exp(-conj(eta) J-).

    Agrees with :func:`su2_unitary` on every sector of fixed
    ``N_j + N_{n+1}`` that fits below the cutoff.
    """
    _check_control(space, j)
    r = abs(xi)
    if r >= math.pi / 2 - margin:
        raise ValidationError(f"|xi| = {r:.6g} too close to pi/2 for the tan-form factorization")
    eta = xi * math.tan(r) / r if r > 0 else 0j
    last = space.n_modes
    j_plus = bilinear_sparse(space, j, last, "adag_a").toarray()
    j_minus = bilinear_sparse(space, last, j, "adag_a").toarray()
    j3 = 0.5 * (np.diag(number(space, j).entries) - np.diag(number(space, last).entries))
    middle = np.exp(math.log1p(abs(eta) ** 2) * j3.real)
    m = sla.expm(eta * j_plus) @ (middle[:, None] * sla.expm(-np.conj(eta) * j_minus))
    return OperatorMatrix(space, m)


def disentangled_su11(
    space: ModeSystem, j: int, zeta: complex, squeeze_bound: float | None = None
) -> OperatorMatrix:
    """exp(kappa K+) exp(log(1-|kappa|^2) K3) exp(-conj(kappa) K-), kappa = zeta tanh|zeta|/|zeta|."""
    _check_control(space, j)
    check_squeezing(zeta, squeeze_bound)
    s = abs(zeta)
    kappa = zeta * math.tanh(s) / s if s > 0 else 0j
    last = space.n_modes
    k_plus = bilinear_sparse(space, j, last, "adag_adag").toarray()
    k_minus = bilinear_sparse(space, last, j, "a_a").toarray()
    k3 = 0.5 * (np.diag(number(space, j).entries) + np.diag(number(space, last).entries) + 1)
    middle = np.exp(math.log1p(-abs(kappa) ** 2) * k3.real)
    m = sla.expm(kappa * k_plus) @ (middle[:, None] * sla.expm(-np.conj(kappa) * k_minus))
    return OperatorMatrix(space, m)


# -- ordered products ------------------------------------------------------------

def apply_product(
    space: ModeSystem, point: ParameterPoint, vectors: np.ndarray, which: str = "W",
    inverse: bool = False,
) -> np.ndarray:
    """``X @ vectors`` (or ``X^-1 @ vectors``) for X in {U, V, W} without forming X."""
    factors = _factor_list(space, point, which)
    out = np.asarray(vectors, dtype=complex)
    if inverse:
        for kind, j, v in factors:
            out = apply_pair(space, j, pair_unitary(space.levels, kind, -v), out)
    else:
        for kind, j, v in reversed(factors):
            out = apply_pair(space, j, pair_unitary(space.levels, kind, v), out)
    return out


def product_unitary(
    space: ModeSystem, point: ParameterPoint, which: str = "W",
    squeeze_bound: float | None = None,
) -> OperatorMatrix:
    """U(xi) = U_1...U_n, V(zeta) = V_1...V_n or W = U V, multiplied in that order."""
    if which in ("V", "W"):
        check_squeezing(point, squeeze_bound)
    return OperatorMatrix(space, apply_product(space, point, np.eye(space.dim), which))


# -- closed-form adjoint actions ------------------------------------------------

@dataclass(frozen=True)
class AdjointCoefficients:
    """Coefficients of the chain conjugation of the shared mode.

    su(n+1): ``U_n^-1..U_{j+1}^-1 a_{n+1} U_{j+1}..U_n = c a_{n+1} - sum_l d_l a_l``
    su(n,1): ``V_n^-1..V_{j+1}^-1 a_{n+1}^dag V_{j+1}..V_n = e a_{n+1}^dag + sum_l f_l a_l``
    with l running over j+1..n.
    """

    algebra: str
    j: int
    scale: float
    mixing: Dict[int, complex]

    @property
    def c(self) -> float:
        return self.scale

    @property
    def d(self) -> Dict[int, complex]:
        return self.mixing

    e = c
    f = d


def adjoint_coeffs(point: ParameterPoint, j: int, algebra: str) -> AdjointCoefficients:
    n = point.n
    if not (0 <= j <= n):
        raise ValidationError(f"chain index j={j} out of range 0..{n}")
    if algebra == SU_N1:
        mags = [abs(v) for v in point.xi]
        head, ratio, params = math.cos, special.sinc, point.xi
    elif algebra == SU_N_1:
        mags = [abs(v) for v in point.zeta]
        head, ratio, params = math.cosh, special.sinhc, point.zeta
    else:
        raise ValidationError(f"unknown algebra {algebra!r}; expected one of {ALGEBRAS}")
    mixing = {}
    running = 1.0  # product of head(|.|) over k = j+1..l-1; empty product is 1
    for l in range(j + 1, n + 1):
        mixing[l] = np.conj(params[l - 1]) * ratio(mags[l - 1]) * running
        running *= head(mags[l - 1])
    return AdjointCoefficients(algebra, j, running, mixing)


def chain_conjugate_shared(point: ParameterPoint, j: int, algebra: str) -> LadderExpr:
    """The shared-mode conjugation of :class:`AdjointCoefficients` as an expression."""
    co = adjoint_coeffs(point, j, algebra)
    last = point.n + 1
    if algebra == SU_N1:
        out = co.c * a(last)
        for l, d in co.d.items():
            out = out - d * a(l)
    else:
        out = co.e * adag(last)
        for l, f in co.f.items():
            out = out + f * a(l)
    return out


def conjugate_mode_closed(point: ParameterPoint, mode: int) -> LadderExpr:
    """``V(zeta)^-1 a_mode V(zeta)`` as a linear combination of ladder operators."""
    n = point.n
    if not (1 <= mode <= n + 1):
        raise ValidationError(f"mode {mode} out of range 1..{n + 1}")
    mags = [abs(z) for z in point.zeta]
    ch = [math.cosh(s) for s in mags]
    # zeta_k sinh|zeta_k| / |zeta_k|
    sh = [point.zeta[k] * special.sinhc(mags[k]) for k in range(n)]
    if mode <= n:
        j = mode
        inner = LadderExpr()
        running = 1.0
        for l in range(j + 1, n + 1):
            inner = inner + running * np.conj(sh[l - 1]) * a(l)
            running *= ch[l - 1]
        inner = inner + running * adag(n + 1)
        return ch[j - 1] * a(j) + sh[j - 1] * inner
    out = LadderExpr()
    running = 1.0
    for k in range(1, n + 1):
        out = out + running * sh[k - 1] * adag(k)
        running *= ch[k - 1]
    return out + running * a(n + 1)


def conjugate_expr_closed(point: ParameterPoint, expr: LadderExpr) -> LadderExpr:
    """``V^-1 expr V`` by substituting the conjugated ladder operators factorwise."""
    images = {}
    for m in range(1, point.n + 2):
        images[(m, False)] = conjugate_mode_closed(point, m)
        images[(m, True)] = images[(m, False)].dag
    out = LadderExpr()
    for term, c in expr:
        piece = LadderExpr.const(c)
        for f in term:
            piece = piece * images[f]
        out = out + piece
    return out


# -- Maurer-Cartan operators ----------------------------------------------------

def local_maurer_cartan_expr(n: int, coord: Coord | str, value: complex, printed: bool = False) -> LadderExpr:
    """``U_j^-1 dU_j/dxi_j`` or ``V_j^-1 dV_j/dzeta_j`` for a single factor.

    ``printed=True`` reproduces the published sign of the su(2) J3 term, which
    disagrees with the finite-difference derivative; the default is the
    verified sign.
    """
    c = parse_coord(coord)
    j, last = c.index, n + 1
    r = abs(value)
    vb = np.conj(value)
    if c.family == "xi":
        p = 0.5 * (1.0 + special.sin2c(r))
        q = vb * special.one_minus_cos2_over(r)
        t = vb * vb * special.sin2c_minus_one_over(r)
        sign = 1.0 if printed else -1.0
        j3 = 0.5 * (adag(j) * a(j) - adag(last) * a(last))
        return p * adag(j) * a(last) + sign * q * j3 + t * adag(last) * a(j)
    p = 0.5 * (1.0 + special.sinh2c(r))
    q = vb * special.cosh2_minus_one_over(r)
    t = vb * vb * special.sinh2c_minus_one_over(r)
    k3 = 0.5 * (adag(j) * a(j) + adag(last) * a(last) + 1)
    return p * adag(j) * adag(last) + q * k3 + t * a(last) * a(j)


def maurer_cartan_expr(point: ParameterPoint, coord: Coord | str, printed: bool = False) -> LadderExpr:
    """``U^-1 dU/dxi_j`` (coord ``xi_j``) or ``V^-1 dV/dzeta_j`` (coord ``zeta_j``).

    Built term by term from the single-factor form and the chain coefficients.
    ``printed=True`` keeps two published slips: the sign of the J3-type term in
    the compact case and the coefficient order ``f_l conj(f_k)`` on
    ``a_l^dag a_k`` in the non-compact case (the latter only matters for n >= 3).
    """
    c = parse_coord(coord)
    if c.conj:
        raise ValidationError("Maurer-Cartan components are indexed by holomorphic coordinates")
    n = point.n
    j, last = c.index, n + 1
    if not 1 <= j <= n:
        raise ValidationError(f"coordinate {c.label} out of range for n={n}")
    value = point.value(c)
    r = abs(value)
    vb = np.conj(value)
    ls = range(j + 1, n + 1)
    if c.family == "xi":
        co = adjoint_coeffs(point, j, SU_N1)
        cc, d = co.c, co.d
        p = 0.5 * (1.0 + special.sin2c(r))
        q = vb * special.one_minus_cos2_over(r)
        t = vb * vb * special.sin2c_minus_one_over(r)
        first = cc * adag(j) * a(last)
        third = cc * adag(last) * a(j)
        inner = adag(j) * a(j) - cc * cc * adag(last) * a(last)
        for l in ls:
            first = first - d[l] * adag(j) * a(l)
            third = third - np.conj(d[l]) * adag(l) * a(j)
            inner = inner + cc * d[l] * adag(last) * a(l) + cc * np.conj(d[l]) * adag(l) * a(last)
            for k in ls:
                inner = inner - np.conj(d[l]) * d[k] * adag(l) * a(k)
        sign = 1.0 if printed else -1.0
        return p * first + sign * q * 0.5 * inner + t * third
    co = adjoint_coeffs(point, j, SU_N_1)
    e, f = co.e, co.f
    p = 0.5 * (1.0 + special.sinh2c(r))
    q = vb * special.cosh2_minus_one_over(r)
    t = vb * vb * special.sinh2c_minus_one_over(r)
    first = e * adag(j) * adag(last)
    third = e * a(last) * a(j)
    inner = adag(j) * a(j) + e * e * (adag(last) * a(last) + 1)
    for l in ls:
        first = first + f[l] * adag(j) * a(l)
        third = third + np.conj(f[l]) * adag(l) * a(j)
        inner = inner + e * np.conj(f[l]) * adag(l) * adag(last) + e * f[l] * a(last) * a(l)
        for k in ls:
            coeff = f[l] * np.conj(f[k]) if printed else f[k] * np.conj(f[l])
            inner = inner + coeff * adag(l) * a(k)
    return p * first + q * 0.5 * inner + t * third


def maurer_cartan_closed(
    space: ModeSystem, point: ParameterPoint, coord: Coord | str, printed: bool = False
) -> OperatorMatrix:
    _check_point(space, point)
    return OperatorMatrix(space, maurer_cartan_expr(point, coord, printed).to_matrix(space))


def maurer_cartan_numeric(
    space: ModeSystem, point: ParameterPoint, coord: Coord | str, step: float = DEFAULTS.fd_step,
    squeeze_bound: float | None = None,
) -> OperatorMatrix:
    """``W^-1 dW`` along ``coord`` from four real-offset evaluations of W.

    The truncated generators are exactly anti-hermitian, so W is unitary and its
    inverse is taken as the adjoint.
    """
    _check_point(space, point)
    check_step(step)
    c = parse_coord(coord)
    check_squeezing(point, squeeze_bound)
    bound = math.inf  # offsets may poke past the bound by one step

    def w(p):
        return product_unitary(space, p, "W", squeeze_bound=bound).entries

    dw = wirtinger(w, point, c, step)
    return OperatorMatrix(space, w(point).conj().T @ dw)
