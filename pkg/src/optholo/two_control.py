"""Closed-form conjugations ``V^-1 a_i^dag a_j V`` for two control modes.

Modes 1, 2 are controls and mode 3 is shared. The operator tables are written
out term by term; their vacuum expectations are expressed through the frame
moments ``M_ij = <a_i^dag a_j>``, ``N_ij = <a_i a_j>`` and the identity ``E``.

Two published coefficients disagree with a direct expansion of
``(V^-1 a_i V)^dag (V^-1 a_j V)``:

* in ``V^-1 a_1^dag a_2 V`` the bracket multiplying ``a_2^dag a_2`` and
  ``a_2^dag a_3^dag`` carries ``conj(zeta_1)``, printed as ``zeta_1``;
* in ``V^-1 a_1^dag a_3 V`` the ``a_3 a_2^dag`` coefficient needs a factor
  ``zeta_2``, printed without it.

``printed=True`` reproduces the published forms for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from . import special
from .config import ValidationError
from .coords import ParameterPoint
from .ladder import LadderExpr, a, adag

PAIRS = ((1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3))


@dataclass(frozen=True)
class _Coeffs:
    ch: Tuple[float, float]  # cosh|z_k|
    s: Tuple[complex, complex]  # z_k sinh|z_k| / |z_k|
    c2: Tuple[float, float]  # cosh 2|z_k|
    s2: Tuple[complex, complex]  # z_k sinh(2|z_k|) / (2|z_k|)

    def p(self, k):  # (1 + cosh 2|z_k|) / 2
        return 0.5 * (1.0 + self.c2[k])

    def q(self, k):  # (cosh 2|z_k| - 1) / 2
        return 0.5 * (self.c2[k] - 1.0)


def _coeffs(point: ParameterPoint) -> _Coeffs:
    if point.n != 2:
        raise ValidationError(f"two-control tables need n=2, got n={point.n}")
    z = point.zeta
    r = [abs(v) for v in z]
    return _Coeffs(
        ch=tuple(math.cosh(x) for x in r),
        s=tuple(z[k] * special.sinhc(r[k]) for k in range(2)),
        c2=tuple(math.cosh(2 * x) for x in r),
        s2=tuple(z[k] * special.sinh2c(r[k]) for k in range(2)),
    )


def conjugated_bilinear(point: ParameterPoint, i: int, j: int, printed: bool = False) -> LadderExpr:
    """``V^-1 a_i^dag a_j V`` for (i, j) in :data:`PAIRS`, as a ladder expression."""
    if (i, j) not in PAIRS:
        raise ValidationError(f"no closed-form table for pair ({i}, {j}); available: {PAIRS}")
    k = _coeffs(point)
    ch1, ch2 = k.ch
    s1, s2 = k.s
    S1, S2 = k.s2
    P1, P2, Q1, Q2 = k.p(0), k.p(1), k.q(0), k.q(1)
    R2 = s2 * s2  # zeta_2^2 (cosh 2|z_2| - 1) / (2 |z_2|^2)
    one = LadderExpr.const(1.0)
    cj = np.conj
    if (i, j) == (1, 1):
        return (
            P1 * adag(1) * a(1)
            + S1 * (ch2 * adag(1) * adag(3) + cj(s2) * adag(1) * a(2))
            + cj(S1) * (ch2 * a(3) * a(1) + s2 * adag(2) * a(1))
            + Q1 * (P2 * (adag(3) * a(3) + one) + cj(S2) * a(3) * a(2)
                    + S2 * adag(2) * adag(3) + Q2 * adag(2) * a(2))
        )
    if (i, j) == (1, 2):
        third = s1 if printed else cj(s1)
        return (
            ch1 * (ch2 * adag(1) * a(2) + s2 * adag(1) * adag(3))
            + cj(s1) * (P2 * a(3) * a(2) + S2 * (adag(3) * a(3) + one))
            + third * (S2 * adag(2) * a(2) + R2 * adag(2) * adag(3))
        )
    if (i, j) == (1, 3):
        mixed = 2.0 * (special.sinh2c(abs(point.zeta[1])) if printed else S2)
        return (
            S1 * adag(1) * adag(1)
            + k.c2[0] * (ch2 * adag(1) * a(3) + s2 * adag(1) * adag(2))
            + cj(S1) * (P2 * a(3) * a(3) + mixed * a(3) * adag(2) + R2 * adag(2) * adag(2))
        )
    if (i, j) == (2, 2):
        return (
            P2 * adag(2) * a(2) + S2 * adag(2) * adag(3)
            + Q2 * (adag(3) * a(3) + one) + cj(S2) * a(3) * a(2)
        )
    if (i, j) == (2, 3):
        return (
            s1 * (ch2 * adag(2) * adag(1) + cj(s2) * a(3) * adag(1))
            + ch1 * (P2 * adag(2) * a(3) + S2 * adag(2) * adag(2)
                     + cj(S2) * a(3) * a(3) + Q2 * a(3) * adag(2))
        )
    return (
        Q1 * (adag(1) * a(1) + one)
        + cj(S1) * (ch2 * a(1) * a(3) + s2 * a(1) * adag(2))
        + S1 * (ch2 * adag(3) * adag(1) + cj(s2) * a(2) * adag(1))
        + P1 * (P2 * adag(3) * a(3) + S2 * adag(3) * adag(2)
                + cj(S2) * a(2) * a(3) + Q2 * (adag(2) * a(2) + one))
    )


def vacuum_conjugated_bilinears(
    point: ParameterPoint, M: Dict[Tuple[int, int], np.ndarray],
    N: Dict[Tuple[int, int], np.ndarray], printed: bool = False,
) -> Dict[Tuple[int, int], np.ndarray]:
    """``<vac| V^-1 a_i^dag a_j V |vac>`` for all nine (i, j) from the moment matrices.

    The six tabulated pairs are assembled directly; (2,1), (3,1), (3,2) follow
    by taking adjoints.
    """
    k = _coeffs(point)
    ch1, ch2 = k.ch
    s1, s2 = k.s
    S1, S2 = k.s2
    P1, P2, Q1, Q2 = k.p(0), k.p(1), k.q(0), k.q(1)
    R2 = s2 * s2
    E = np.eye(M[1, 1].shape[0])
    cj = np.conj

    def Nd(i, j):  # <a_i^dag a_j^dag>
        return N[i, j].conj().T

    out = {}
    out[1, 1] = (
        P1 * M[1, 1]
        + S1 * (ch2 * Nd(1, 3) + cj(s2) * M[1, 2])
        + cj(S1) * (ch2 * N[1, 3] + s2 * M[1, 2].conj().T)
        + Q1 * (P2 * (M[3, 3] + E) + cj(S2) * N[2, 3] + S2 * Nd(2, 3) + Q2 * M[2, 2])
    )
    third = s1 if printed else cj(s1)
    out[1, 2] = (
        ch1 * (ch2 * M[1, 2] + s2 * Nd(1, 3))
        + cj(s1) * (P2 * N[2, 3] + S2 * (M[3, 3] + E))
        + third * (S2 * M[2, 2] + R2 * Nd(2, 3))
    )
    mixed = 2.0 * (special.sinh2c(abs(point.zeta[1])) if printed else S2)
    out[1, 3] = (
        k.c2[0] * (ch2 * M[1, 3] + s2 * Nd(1, 2))
        + cj(S1) * mixed * M[2, 3]
    )
    out[2, 2] = P2 * M[2, 2] + S2 * Nd(2, 3) + Q2 * (M[3, 3] + E) + cj(S2) * N[2, 3]
    out[2, 3] = s1 * (ch2 * Nd(1, 2) + cj(s2) * M[1, 3]) + ch1 * k.c2[1] * M[2, 3]
    out[3, 3] = (
        Q1 * (M[1, 1] + E)
        + cj(S1) * (ch2 * N[1, 3] + s2 * M[1, 2].conj().T)
        + S1 * (ch2 * Nd(1, 3) + cj(s2) * M[1, 2])
        + P1 * (P2 * M[3, 3] + S2 * Nd(2, 3) + cj(S2) * N[2, 3] + Q2 * (M[2, 2] + E))
    )
    for i, j in ((2, 1), (3, 1), (3, 2)):
        out[i, j] = out[j, i].conj().T
    return out
