"""Points of the control manifold C^n x C^n and Wirtinger differentiation."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np

from .config import DEFAULTS, ValidationError

_COORD = re.compile(r"^(xi|zeta)(bar)?(\d+)$")


@dataclass(frozen=True)
class Coord:
    """One complex coordinate ``xi_j`` / ``zeta_j`` or its conjugate."""

    family: str  # "xi" or "zeta"
    index: int  # 1-based
    conj: bool = False

    @property
    def label(self) -> str:
        return f"{self.family}{'bar' if self.conj else ''}{self.index}"

    @property
    def holomorphic(self) -> "Coord":
        return Coord(self.family, self.index, False)

    def __str__(self):
        return self.label


def parse_coord(label: str | Coord) -> Coord:
    if isinstance(label, Coord):
        return label
    m = _COORD.match(str(label).strip())
    if not m:
        raise ValidationError(f"unknown coordinate tag {label!r}")
    return Coord(m.group(1), int(m.group(3)), bool(m.group(2)))


def coordinate_order(n: int) -> List[Coord]:
    """(xi_1..xi_n, zeta_1..zeta_n, xibar_1..xibar_n, zetabar_1..zetabar_n)"""
    out = []
    for conj in (False, True):
        for fam in ("xi", "zeta"):
            out.extend(Coord(fam, j, conj) for j in range(1, n + 1))
    return out


def _as_complex_tuple(values) -> Tuple[complex, ...]:
    arr = np.atleast_1d(np.asarray(values, dtype=complex))
    if arr.ndim != 1:
        raise ValidationError("coordinate vectors must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("coordinates must be finite")
    return tuple(complex(v) for v in arr)


@dataclass(frozen=True)
class ParameterPoint:
    xi: Tuple[complex, ...]
    zeta: Tuple[complex, ...]

    def __post_init__(self):
        xi = _as_complex_tuple(self.xi)
        zeta = _as_complex_tuple(self.zeta)
        if len(xi) != len(zeta):
            raise ValidationError(
                f"point dimension mismatch: {len(xi)} xi vs {len(zeta)} zeta entries"
            )
        if len(xi) < 1:
            raise ValidationError("point needs at least one xi and one zeta entry")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "zeta", zeta)

    @classmethod
    def zeros(cls, n: int) -> "ParameterPoint":
        return cls((0,) * n, (0,) * n)

    @property
    def n(self) -> int:
        return len(self.xi)

    def value(self, coord: Coord | str) -> complex:
        c = parse_coord(coord)
        self._check(c)
        v = (self.xi if c.family == "xi" else self.zeta)[c.index - 1]
        return v.conjugate() if c.conj else v

    def shifted(self, coord: Coord | str, delta: complex) -> "ParameterPoint":
        """Move the holomorphic coordinate underlying ``coord`` by ``delta``."""
        c = parse_coord(coord)
        self._check(c)
        xi, zeta = list(self.xi), list(self.zeta)
        target = xi if c.family == "xi" else zeta
        target[c.index - 1] += delta
        return ParameterPoint(tuple(xi), tuple(zeta))

    def __add__(self, other: "ParameterPoint") -> "ParameterPoint":
        return ParameterPoint(
            tuple(a + b for a, b in zip(self.xi, other.xi)),
            tuple(a + b for a, b in zip(self.zeta, other.zeta)),
        )

    def __sub__(self, other: "ParameterPoint") -> "ParameterPoint":
        return ParameterPoint(
            tuple(a - b for a, b in zip(self.xi, other.xi)),
            tuple(a - b for a, b in zip(self.zeta, other.zeta)),
        )

    def scaled(self, s: float) -> "ParameterPoint":
        return ParameterPoint(tuple(s * v for v in self.xi), tuple(s * v for v in self.zeta))

    def as_array(self) -> np.ndarray:
        return np.array(self.xi + self.zeta, dtype=complex)

    @classmethod
    def from_array(cls, arr: Sequence[complex]) -> "ParameterPoint":
        arr = list(arr)
        n = len(arr) // 2
        return cls(tuple(arr[:n]), tuple(arr[n:]))

    def _check(self, c: Coord) -> None:
        if not (1 <= c.index <= self.n):
            raise ValidationError(f"coordinate {c.label} out of range for n={self.n}")


def check_step(step: float) -> float:
    if not step > 0:
        raise ValidationError(f"finite-difference step must be positive, got {step}")
    if step < DEFAULTS.fd_step_min:
        raise ValidationError(
            f"finite-difference step {step:g} below {DEFAULTS.fd_step_min:g} (cancellation guard)"
        )
    return float(step)


_STENCILS = {
    2: ((1, 0.5), (-1, -0.5)),
    4: ((2, -1 / 12), (1, 8 / 12), (-1, -8 / 12), (-2, 1 / 12)),
}


def wirtinger(
    f: Callable[[ParameterPoint], np.ndarray],
    point: ParameterPoint,
    coord: Coord | str,
    step: float,
    order: int = 2,
) -> np.ndarray:
    """Central-difference Wirtinger derivative of ``f`` at ``point``.

    d/dz = (d/dx - i d/dy) / 2 and d/dzbar = (d/dx + i d/dy) / 2, each real
    partial taken with a symmetric stencil of the given order.
    """
    c = parse_coord(coord)
    step = check_step(step)
    if order not in _STENCILS:
        raise ValidationError(f"stencil order must be one of {sorted(_STENCILS)}")

    def partial(direction: complex):
        acc = None
        for k, w in _STENCILS[order]:
            term = w * np.asarray(f(point.shifted(c, k * step * direction)))
            acc = term if acc is None else acc + term
        return acc / step

    dx = partial(1.0)
    dy = partial(1j)
    return 0.5 * (dx + 1j * dy) if c.conj else 0.5 * (dx - 1j * dy)
