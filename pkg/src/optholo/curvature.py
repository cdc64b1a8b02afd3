"""Curvature 2-form ``F = dA + A^A`` of the vacuum-bundle connection.

Components are stored for coordinate pairs ``mu < nu`` in the order
(xi_1..xi_n, zeta_1..zeta_n, xibar_1..xibar_n, zetabar_1..zetabar_n); the
coefficient of ``dmu ^ dnu`` is ``d_mu A_nu - d_nu A_mu + [A_mu, A_nu]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Tuple

import numpy as np

from . import special
from .coherent import _check_point, check_squeezing
from .config import DEFAULTS, ValidationError
from .connection import (
    B_HAT, E_HAT, F_HAT, H_HAT, ConnectionComponents, VacuumFrame, connection_closed,
    connection_numeric, frame_image, vacuum_frame, xi_coefficients,
)
from .coords import Coord, ParameterPoint, check_step, coordinate_order, parse_coord
from .fock import ModeSystem

_STENCIL = {2: ((1, 0.5), (-1, -0.5)), 4: ((2, -1 / 12), (1, 8 / 12), (-1, -8 / 12), (-2, 1 / 12))}


def pair_label(mu: Coord, nu: Coord) -> str:
    return f"{mu.label}^{nu.label}"


def parse_pair(label: str) -> Tuple[Coord, Coord]:
    parts = label.split("^")
    if len(parts) != 2:
        raise ValidationError(f"bad coordinate pair {label!r}; expected e.g. 'xi1^zetabar1'")
    return tuple(parse_coord(p.strip().removeprefix("d")) for p in parts)


@dataclass(frozen=True, eq=False)
class CurvatureComponents:
    point: ParameterPoint
    components: Dict[str, np.ndarray]
    meta: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        order = [c.label for c in coordinate_order(self.point.n)]
        for key, mat in self.components.items():
            mu, nu = parse_pair(key)
            if order.index(mu.label) >= order.index(nu.label):
                raise ValidationError(f"pair {key} not in canonical order")
            if not np.all(np.isfinite(mat)):
                raise ValidationError("curvature matrices must be finite")

    def get(self, mu: Coord | str, nu: Coord | str) -> np.ndarray:
        """Coefficient of ``dmu ^ dnu``, using antisymmetry for reversed pairs."""
        mu, nu = parse_coord(mu), parse_coord(nu)
        if mu == nu:
            return np.zeros_like(next(iter(self.components.values())))
        key = pair_label(mu, nu)
        if key in self.components:
            return self.components[key]
        return -self.components[pair_label(nu, mu)]

    def evaluate(self, X: Dict[str, complex], Y: Dict[str, complex]) -> np.ndarray:
        """``F(X, Y)`` for tangent vectors given by their coordinate components."""
        out = 0
        for key, c in self.components.items():
            mu, nu = parse_pair(key)
            w = X.get(mu.label, 0) * Y.get(nu.label, 0) - Y.get(mu.label, 0) * X.get(nu.label, 0)
            out = out + w * c
        return out

    def real_plane(self, coord: Coord | str, other: Coord | str | None = None) -> np.ndarray:
        """Anti-hermitian ``F(d/dx, d/dy)``.

        With one coordinate ``z = x + i y`` the plane is (Re z, Im z); with two
        it is (Re z1, Re z2).
        """
        c = parse_coord(coord).holomorphic
        bar = Coord(c.family, c.index, True)
        X = {c.label: 1.0, bar.label: 1.0}
        if other is None:
            Y = {c.label: 1j, bar.label: -1j}
        else:
            d = parse_coord(other).holomorphic
            Y = {d.label: 1.0, Coord(d.family, d.index, True).label: 1.0}
        return self.evaluate(X, Y)

    def max_deviation(self, other: "CurvatureComponents") -> float:
        return max(float(np.max(np.abs(self.components[k] - other.components[k])))
                   for k in self.components)


def _all_pairs(n: int):
    order = coordinate_order(n)
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            yield order[a], order[b]


def curvature_from_field(
    field_fn: Callable[[ParameterPoint], ConnectionComponents], point: ParameterPoint,
    step: float = DEFAULTS.curvature_step, order: int = 2,
) -> CurvatureComponents:
    """``dA + A^A`` by central differences of a connection field."""
    check_step(step)
    if order not in _STENCIL:
        raise ValidationError(f"stencil order must be one of {sorted(_STENCIL)}")
    base = field_fn(point)
    holo = coordinate_order(point.n)[: 2 * point.n]
    # real partials d/dx, d/dy of every component, for each holomorphic coordinate
    partials = {}
    for c in holo:
        for axis, direction in (("x", 1.0), ("y", 1j)):
            acc = None
            for k, w in _STENCIL[order]:
                conn = field_fn(point.shifted(c, k * step * direction))
                vals = {lab: conn.component(lab) for lab in (d.label for d in coordinate_order(point.n))}
                acc = {lab: w * v for lab, v in vals.items()} if acc is None else {
                    lab: acc[lab] + w * vals[lab] for lab in acc}
            partials[c.label, axis] = {lab: v / step for lab, v in acc.items()}

    def d(mu: Coord, target: str) -> np.ndarray:
        dx = partials[mu.holomorphic.label, "x"][target]
        dy = partials[mu.holomorphic.label, "y"][target]
        return 0.5 * (dx + 1j * dy) if mu.conj else 0.5 * (dx - 1j * dy)

    comps = {}
    for mu, nu in _all_pairs(point.n):
        a_mu, a_nu = base.component(mu), base.component(nu)
        comps[pair_label(mu, nu)] = d(mu, nu.label) - d(nu, mu.label) + a_mu @ a_nu - a_nu @ a_mu
    return CurvatureComponents(point, comps, {"step": step, "stencil_order": order})


def curvature_numeric(
    space: ModeSystem | None, point: ParameterPoint, frame: VacuumFrame | None = None,
    step: float = DEFAULTS.curvature_step, source: str = "numeric",
    connection_step: float = DEFAULTS.fd_step, order: int = 2, printed: bool = False,
) -> CurvatureComponents:
    """Finite-difference curvature driven by the numeric or closed-form connection."""
    if source == "numeric":
        if space is None:
            raise ValidationError("the numeric source needs a Fock space")
        _check_point(space, point)
        check_squeezing(point)
        frame = vacuum_frame(space) if frame is None else frame

        def field_fn(p):
            return connection_numeric(space, p, frame, connection_step,
                                      squeeze_bound=math.inf, richardson=False)
    elif source == "closed":
        def field_fn(p):
            return connection_closed(p, printed)
    else:
        raise ValidationError(f"unknown connection source {source!r}; expected 'numeric' or 'closed'")
    out = curvature_from_field(field_fn, point, step, order)
    out.meta.update(source=source, connection_step=connection_step if source == "numeric" else None)
    if space is not None:
        out.meta["cutoff"] = space.cutoff
    return out


def curvature_closed_n1(xi: complex, zeta: complex, printed: bool = False) -> CurvatureComponents:
    """Closed-form n = 1 curvature in the E, F, H, B basis.

    The ``dxi ^ dxibar`` coefficient is ``(sin 2|xi| / |xi|)(cosh^2 2|zeta| - 1) H``.
    ``printed=True`` returns the published coefficient instead, which follows
    from the published sign of the H term in the connection. The other five
    components agree between the two.
    """
    point = ParameterPoint((xi,), (zeta,))
    r, s = abs(xi), abs(zeta)
    p, _, t = xi_coefficients(xi)
    P, T = 2.0 * p, 2.0 * t  # (1 + sin2r/2r), xibar^2/r^2 (sin2r/2r - 1)
    Z = np.conj(zeta) * special.sinh2c(s)
    Zc = np.conj(Z)
    ch = math.cosh(2 * s)
    sin_over = 2.0 * special.sin2c(r)  # sin(2r) / r
    if printed:
        cos_term = -2.0 * special.one_minus_cos2_over(r)  # (cos 2r - 1) / r^2
        xixib = -(xi * cos_term * ch * F_HAT - sin_over * (1 + ch * ch) * H_HAT
                  + np.conj(xi) * cos_term * ch * E_HAT)
    else:
        xixib = sin_over * (ch * ch - 1.0) * H_HAT
    comps = {
        "xi1^zeta1": -(P * Z * F_HAT + T * Z * E_HAT),
        "xi1^xibar1": xixib,
        "xi1^zetabar1": -(P * Zc * F_HAT + T * Zc * E_HAT),
        "zeta1^xibar1": -(P * Z * E_HAT + np.conj(T) * Z * F_HAT),
        "zeta1^zetabar1": -2.0 * special.sinh2c(s) * (2 * B_HAT - np.eye(4)),
        "xibar1^zetabar1": P * Zc * E_HAT + np.conj(T) * Zc * F_HAT,
    }
    return CurvatureComponents(point, comps, {"source": "closed_n1", "printed": printed})


def global_curvature_check(
    space: ModeSystem, point: ParameterPoint, frame: VacuumFrame | None = None,
    step: float = DEFAULTS.curvature_step, curvature: CurvatureComponents | None = None,
    frozen: bool = False,
) -> float:
    """Worst residual of ``P dP^dP = W F W^-1`` on the image of the frame.

    Both sides are applied to ``Phi0 = W(point)|vac>``: the left side through
    nested central differences of ``lam -> Phi(lam) Phi(lam)^dag X``, the right
    side as ``Phi0 F``. With ``frozen`` the family is held at ``point`` so both
    sides vanish.
    """
    _check_point(space, point)
    check_squeezing(point)
    check_step(step)
    frame = vacuum_frame(space) if frame is None else frame
    phi0 = frame_image(space, point, frame)
    if frozen:
        def phi(p):
            return phi0
        F = {pair_label(mu, nu): np.zeros((frame.m, frame.m)) for mu, nu in _all_pairs(point.n)}
    else:
        def phi(p):
            return frame_image(space, p, frame)
        if curvature is None:
            if point.n == 1:
                curvature = curvature_closed_n1(point.xi[0], point.zeta[0])
            else:
                curvature = curvature_numeric(space, point, frame)
        F = curvature.components

    def dP(coord: Coord, X: np.ndarray) -> np.ndarray:
        h = coord.holomorphic

        def partial(direction):
            plus = phi(point.shifted(h, step * direction))
            minus = phi(point.shifted(h, -step * direction))
            return (plus @ (plus.conj().T @ X) - minus @ (minus.conj().T @ X)) / (2 * step)
        dx, dy = partial(1.0), partial(1j)
        return 0.5 * (dx + 1j * dy) if coord.conj else 0.5 * (dx - 1j * dy)

    worst = 0.0
    for mu, nu in _all_pairs(point.n):
        wedge = dP(mu, dP(nu, phi0)) - dP(nu, dP(mu, phi0))
        lhs = phi0 @ (phi0.conj().T @ wedge)
        rhs = phi0 @ F[pair_label(mu, nu)]
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst
