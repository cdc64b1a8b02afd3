"""Degenerate vacuum frame and the non-abelian Berry connection.

The frame is the 2^(n+1) states with every occupation 0 or 1, in
binary-counter order (last mode is the lowest bit). The connection components
are ``A_mu = <vac| W^-1 dW/dmu |vac>`` for holomorphic coordinates ``mu``;
the anti-hermitian 1-form is completed by ``A_{mubar} = -A_mu^dag``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from . import special
from .coherent import (
    _check_point, apply_product, check_squeezing, conjugate_expr_closed, maurer_cartan_expr,
)
from .config import DEFAULTS, ValidationError
from .coords import Coord, ParameterPoint, check_step, coordinate_order, parse_coord, wirtinger
from .fock import ModeSystem, OperatorMatrix, basis_index, bilinear_sparse
from .ladder import LadderExpr
from . import two_control


# -- frame -----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class VacuumFrame:
    space: ModeSystem
    indices: np.ndarray = field(repr=False)  # basis index of each frame vector
    labels: Tuple[Tuple[int, ...], ...] = field(repr=False)  # occupation tuples

    @property
    def m(self) -> int:
        return len(self.indices)

    @property
    def columns(self) -> np.ndarray:
        out = np.zeros((self.space.dim, self.m), dtype=complex)
        out[self.indices, np.arange(self.m)] = 1.0
        return out


def vacuum_frame(space: ModeSystem) -> VacuumFrame:
    labels = tuple(itertools.product((0, 1), repeat=space.n_modes))
    idx = np.array([basis_index(space, occ) for occ in labels], dtype=int)
    idx.flags.writeable = False
    return VacuumFrame(space, idx, labels)


def vacuum_expectation(op, frame: VacuumFrame) -> np.ndarray:
    """Matrix of ``<frame_r| op |frame_c>`` (row = bra, column = ket)."""
    if isinstance(op, OperatorMatrix):
        if op.space != frame.space:
            raise ValidationError("operator and frame live on different spaces")
        entries = op.entries
    elif isinstance(op, LadderExpr):
        entries = op.to_sparse(frame.space)
    else:
        entries = op
        if entries.shape != (frame.space.dim, frame.space.dim):
            raise ValidationError(
                f"operator shape {entries.shape} does not match space dim {frame.space.dim}"
            )
    block = entries[frame.indices][:, frame.indices]
    return np.asarray(block.todense() if hasattr(block, "todense") else block, dtype=complex)


@dataclass(frozen=True, eq=False)
class VacuumMoments:
    """``M[i, j] = <vac|a_i^dag a_j|vac>`` and ``N[i, j] = <vac|a_i a_j|vac>`` (1-based keys)."""

    M: Dict[Tuple[int, int], np.ndarray]
    N: Dict[Tuple[int, int], np.ndarray]

    @property
    def m(self) -> int:
        return self.M[1, 1].shape[0]

    def expectation(self, expr: LadderExpr) -> np.ndarray:
        """Frame expectation of a polynomial of degree 0 or 2 in ladder operators."""
        m = self.m
        out = np.zeros((m, m), dtype=complex)
        for term, c in expr:
            if len(term) == 0:
                out += c * np.eye(m)
                continue
            if len(term) != 2:
                raise ValidationError(
                    f"moment expectation handles bilinears only, got degree {len(term)}"
                )
            (i, di), (j, dj) = term
            if di and not dj:
                out += c * self.M[i, j]
            elif not di and not dj:
                out += c * self.N[i, j]
            elif di and dj:
                out += c * self.N[j, i].conj().T
            else:  # a_i a_j^dag
                out += c * (self.M[j, i] + (np.eye(m) if i == j else 0))
        return out


def vacuum_moments(space: ModeSystem, frame: VacuumFrame | None = None) -> VacuumMoments:
    frame = vacuum_frame(space) if frame is None else frame
    M, N = {}, {}
    modes = range(1, space.n_modes + 1)
    for i in modes:
        for j in modes:
            M[i, j] = vacuum_expectation(bilinear_sparse(space, i, j, "adag_a"), frame).real
            N[i, j] = vacuum_expectation(bilinear_sparse(space, i, j, "a_a"), frame).real
            M[i, j].flags.writeable = False
            N[i, j].flags.writeable = False
    return VacuumMoments(M, N)


# -- components ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ConnectionComponents:
    point: ParameterPoint
    a_xi: Tuple[np.ndarray, ...]
    a_zeta: Tuple[np.ndarray, ...]
    meta: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        for mats in (self.a_xi, self.a_zeta):
            if len(mats) != self.point.n:
                raise ValidationError("connection needs one matrix per control mode")
            for mat in mats:
                if not np.all(np.isfinite(mat)):
                    raise ValidationError("connection matrices must be finite")
        object.__setattr__(self, "a_xi", tuple(np.asarray(x, dtype=complex) for x in self.a_xi))
        object.__setattr__(self, "a_zeta", tuple(np.asarray(x, dtype=complex) for x in self.a_zeta))

    @property
    def m(self) -> int:
        return self.a_xi[0].shape[0]

    def component(self, coord: Coord | str) -> np.ndarray:
        """Coefficient of ``d coord``; conjugate coordinates give ``-A^dag``."""
        c = parse_coord(coord)
        if not 1 <= c.index <= self.point.n:
            raise ValidationError(f"coordinate {c.label} out of range for n={self.point.n}")
        mat = (self.a_xi if c.family == "xi" else self.a_zeta)[c.index - 1]
        return -mat.conj().T if c.conj else mat

    def contract(self, displacement: ParameterPoint) -> np.ndarray:
        """``A`` evaluated on a displacement (dxi, dzeta); anti-hermitian."""
        out = np.zeros((self.m, self.m), dtype=complex)
        for j in range(self.point.n):
            for mat, d in ((self.a_xi[j], displacement.xi[j]), (self.a_zeta[j], displacement.zeta[j])):
                out += mat * d - mat.conj().T * np.conj(d)
        return out

    def items(self):
        for j in range(self.point.n):
            yield f"xi{j + 1}", self.a_xi[j]
        for j in range(self.point.n):
            yield f"zeta{j + 1}", self.a_zeta[j]

    def max_deviation(self, other: "ConnectionComponents") -> float:
        return max(
            float(np.max(np.abs(x - y)))
            for (_, x), (_, y) in zip(self.items(), other.items())
        )


# -- numeric ---------------------------------------------------------------------

def frame_image(space: ModeSystem, point: ParameterPoint, frame: VacuumFrame) -> np.ndarray:
    """Columns of ``W(point) |vac>``."""
    return apply_product(space, point, frame.columns, "W")


def connection_numeric(
    space: ModeSystem, point: ParameterPoint, frame: VacuumFrame | None = None,
    step: float = DEFAULTS.fd_step, squeeze_bound: float | None = None, order: int = 2,
    richardson: bool = True,
) -> ConnectionComponents:
    """``A_mu = Phi^dag dPhi/dmu`` with ``Phi = W|vac>`` by central differences.

    This equals the frame block of ``W^-1 dW`` because the truncated W is
    exactly unitary. With ``richardson`` the derivative is repeated at twice
    the step; the gap is reported in ``meta``.
    """
    _check_point(space, point)
    frame = vacuum_frame(space) if frame is None else frame
    if frame.space != space:
        raise ValidationError("frame belongs to a different space")
    check_step(step)
    check_squeezing(point, squeeze_bound)

    def phi(p):
        return frame_image(space, p, frame)

    base = phi(point).conj().T

    def components(h):
        xs = [base @ wirtinger(phi, point, f"xi{j}", h, order) for j in range(1, point.n + 1)]
        zs = [base @ wirtinger(phi, point, f"zeta{j}", h, order) for j in range(1, point.n + 1)]
        return xs, zs

    xs, zs = components(step)
    meta = {"step": step, "cutoff": space.cutoff, "stencil_order": order}
    if richardson:
        xs2, zs2 = components(2 * step)
        gap = max(float(np.max(np.abs(u - v))) for u, v in zip(xs + zs, xs2 + zs2))
        meta["richardson_gap"] = gap
        meta["richardson_ok"] = gap <= DEFAULTS.richardson_tol
    return ConnectionComponents(point, tuple(xs), tuple(zs), meta)


# -- closed form, n = 1 ---------------------------------------------------------

def _unit(i, j, v=1.0):
    m = np.zeros((4, 4))
    m[i, j] = v
    return m


E_HAT = _unit(1, 2)
F_HAT = _unit(2, 1)
H_HAT = np.diag([0.0, 0.5, -0.5, 0.0])
A_HAT = _unit(0, 3)
C_HAT = _unit(3, 0)
B_HAT = np.diag([0.5, 1.0, 1.0, 1.5])
for _m in (E_HAT, F_HAT, H_HAT, A_HAT, C_HAT, B_HAT):
    _m.flags.writeable = False
BASIS_N1 = {"E": E_HAT, "F": F_HAT, "H": H_HAT, "A": A_HAT, "B": B_HAT, "C": C_HAT}


def xi_coefficients(xi: complex) -> Tuple[float, complex, complex]:
    """(p, q, t) of ``U^-1 dU/dxi = p J+ -/+ q J3 + t J-``."""
    r = abs(xi)
    return (
        0.5 * (1.0 + special.sin2c(r)),
        np.conj(xi) * special.one_minus_cos2_over(r),
        np.conj(xi) ** 2 * special.sin2c_minus_one_over(r),
    )


def zeta_coefficients(zeta: complex) -> Tuple[float, complex, complex]:
    """(p, q, t) of ``V^-1 dV/dzeta = p K+ + q K3 + t K-``."""
    r = abs(zeta)
    return (
        0.5 * (1.0 + special.sinh2c(r)),
        np.conj(zeta) * special.cosh2_minus_one_over(r),
        np.conj(zeta) ** 2 * special.sinh2c_minus_one_over(r),
    )


def connection_closed_n1(xi: complex, zeta: complex, printed: bool = False) -> ConnectionComponents:
    """Closed-form n = 1 connection in the E, F, H, A, B, C basis.

    The H coefficient enters with a plus sign; ``printed=True`` uses the
    published minus sign, which disagrees with the numeric derivative.
    """
    point = ParameterPoint((xi,), (zeta,))
    p, q, t = xi_coefficients(xi)
    ch = math.cosh(2 * abs(zeta))
    sign = -1.0 if printed else 1.0
    a_xi = p * ch * F_HAT + sign * q * H_HAT + t * ch * E_HAT
    p, q, t = zeta_coefficients(zeta)
    a_zeta = p * C_HAT + q * B_HAT + t * A_HAT
    return ConnectionComponents(point, (a_xi,), (a_zeta,), {"source": "closed_n1", "printed": printed})


# -- closed form, n = 2 ---------------------------------------------------------

_MOMENTS_N2 = None


def _moments_n2() -> VacuumMoments:
    global _MOMENTS_N2
    if _MOMENTS_N2 is None:
        _MOMENTS_N2 = vacuum_moments(ModeSystem(3, 1))
    return _MOMENTS_N2


def connection_closed_n2(point: ParameterPoint, printed: bool = False) -> ConnectionComponents:
    """Closed-form n = 2 connection.

    The operator expressions for ``W^-1 dW`` are sandwiched with the tabulated
    vacuum expectations of ``V^-1 a_i^dag a_j V``. ``printed=True`` uses the
    published J3 sign and conjugation tables.
    """
    if point.n != 2:
        raise ValidationError(f"connection_closed_n2 needs n=2, got n={point.n}")
    mom = _moments_n2()
    M, N = mom.M, mom.N
    E = np.eye(8)
    T = two_control.vacuum_conjugated_bilinears(point, M, N, printed)
    sign = 1.0 if printed else -1.0

    xi1, xi2 = point.xi
    r2 = abs(xi2)
    cos2, d2 = math.cos(r2), np.conj(xi2) * special.sinc(r2)
    cd = np.conj(xi2) * special.sin2c(r2)  # cos|xi2| * d2
    p, q, t = xi_coefficients(xi1)
    a_xi1 = (
        p * (cos2 * T[1, 3] - d2 * T[1, 2])
        + sign * q * 0.5 * (T[1, 1] - cos2 ** 2 * T[3, 3] + cd * T[3, 2]
                            + np.conj(cd) * T[2, 3] - abs(d2) ** 2 * T[2, 2])
        + t * (cos2 * T[3, 1] - np.conj(d2) * T[2, 1])
    )
    p, q, t = xi_coefficients(xi2)
    a_xi2 = p * T[2, 3] + sign * q * 0.5 * (T[2, 2] - T[3, 3]) + t * T[3, 2]

    def Nd(i, j):
        return N[i, j].conj().T

    z1, z2 = point.zeta
    s2 = abs(z2)
    e, f = math.cosh(s2), np.conj(z2) * special.sinhc(s2)
    ef = np.conj(z2) * special.sinh2c(s2)  # e * f
    p, q, t = zeta_coefficients(z1)
    a_zeta1 = (
        p * (e * Nd(1, 3) + f * M[1, 2])
        + q * 0.5 * (M[1, 1] + e ** 2 * (M[3, 3] + E) + ef * N[2, 3]
                     + np.conj(ef) * Nd(2, 3) + abs(f) ** 2 * M[2, 2])
        + t * (e * N[1, 3] + np.conj(f) * M[2, 1])
    )
    p, q, t = zeta_coefficients(z2)
    a_zeta2 = p * Nd(2, 3) + q * 0.5 * (M[2, 2] + M[3, 3] + E) + t * N[2, 3]
    return ConnectionComponents(
        point, (a_xi1, a_xi2), (a_zeta1, a_zeta2), {"source": "closed_n2", "printed": printed}
    )


def connection_composed(point: ParameterPoint) -> ConnectionComponents:
    """Connection for any n from the general Maurer-Cartan expressions.

    Each ``U^-1 dU/dxi_j`` is conjugated by V mode by mode and reduced with
    the frame moments. Used as an independent cross-check of the n = 1, 2
    tables; it carries no truncation error.
    """
    mom = vacuum_moments(ModeSystem(point.n + 1, 1))
    xs, zs = [], []
    for j in range(1, point.n + 1):
        mc = maurer_cartan_expr(point, f"xi{j}")
        xs.append(mom.expectation(conjugate_expr_closed(point, mc).normal_ordered()))
        zs.append(mom.expectation(maurer_cartan_expr(point, f"zeta{j}")))
    return ConnectionComponents(point, tuple(xs), tuple(zs), {"source": "composed"})


def connection_closed(point: ParameterPoint, printed: bool = False) -> ConnectionComponents:
    if point.n == 1:
        return connection_closed_n1(point.xi[0], point.zeta[0], printed)
    if point.n == 2:
        return connection_closed_n2(point, printed)
    raise ValidationError(f"no closed form for n={point.n}; use the numeric connection")


# -- projector -------------------------------------------------------------------

def projector(
    space: ModeSystem, point: ParameterPoint, frame: VacuumFrame | None = None,
    squeeze_bound: float | None = None,
) -> OperatorMatrix:
    """``P = W (sum_j v_j v_j^dag) W^-1``, the rank-m projector onto W|vac>."""
    _check_point(space, point)
    check_squeezing(point, squeeze_bound)
    frame = vacuum_frame(space) if frame is None else frame
    phi = frame_image(space, point, frame)
    return OperatorMatrix(space, phi @ phi.conj().T)


def coordinate_labels(n: int) -> List[str]:
    return [c.label for c in coordinate_order(n)]
