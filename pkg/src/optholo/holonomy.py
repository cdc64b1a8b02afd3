"""Holonomies of the vacuum-bundle connection and their Lie algebra.

The ordered product follows ``dGamma/dt = Gamma A(gamma'(t))``, so later
segments multiply on the right. For a small counter-clockwise loop of area
``eps`` in a coordinate plane this gives ``Gamma ~ exp(eps F(d/dx, d/dy))``
with ``F = dA + A^A``.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from .config import DEFAULTS, ValidationError
from .connection import ConnectionComponents, connection_closed_n1, connection_closed_n2, connection_numeric
from .coords import Coord, ParameterPoint, parse_coord
from .curvature import CurvatureComponents, curvature_closed_n1, curvature_numeric
from .fock import ModeSystem, make_space
from .linalg import expm, nearest_unitary, unitarity_residual

SOURCES = ("closed_n1", "closed_n2", "numeric")
MIN_SAMPLES = 8


# -- loops -------------------------------------------------------------------------

@dataclass(frozen=True)
class Loop:
    """Closed path in parameter space.

    ``kind="polyline"``: straight segments between ``vertices`` (first equals
    last), each split into ``samples_per_segment`` steps.
    ``kind="circle"``: counter-clockwise circle in one complex coordinate,
    starting at ``center + radius``; the other coordinates stay at ``base``.
    """

    kind: str
    n: int
    vertices: Tuple[ParameterPoint, ...] = ()
    samples_per_segment: int = 0
    coord: Coord | None = None
    center: complex = 0j
    radius: float = 0.0
    samples: int = 0
    base: ParameterPoint | None = None
    orientation: int = 1  # circle only: +1 counter-clockwise, -1 clockwise
    min_samples: int = field(default=MIN_SAMPLES, repr=False, compare=False)

    def __post_init__(self):
        if self.kind == "polyline":
            if len(self.vertices) < 2:
                raise ValidationError("polyline loop needs at least two vertices")
            if any(v.n != self.n for v in self.vertices):
                raise ValidationError("point dimension mismatch between loop vertices")
            gap = np.max(np.abs((self.vertices[0] - self.vertices[-1]).as_array()))
            if gap > 1e-14:
                raise ValidationError(f"loop not closed: first and last vertex differ by {gap:.3g}")
            if self.samples_per_segment < 1:
                raise ValidationError("samples_per_segment must be positive")
        elif self.kind == "circle":
            if self.coord is None or self.coord.conj:
                raise ValidationError("circle loop needs a holomorphic coordinate tag")
            if not 1 <= self.coord.index <= self.n:
                raise ValidationError(f"coordinate {self.coord.label} out of range for n={self.n}")
            if self.orientation not in (1, -1):
                raise ValidationError("circle orientation must be +1 or -1")
            if not self.radius >= 0 or not math.isfinite(self.radius):
                raise ValidationError("circle radius must be a finite non-negative number")
            base = self.base if self.base is not None else ParameterPoint.zeros(self.n)
            if base.n != self.n:
                raise ValidationError("point dimension mismatch between circle base and n")
            object.__setattr__(self, "base", base)
        else:
            raise ValidationError(f"unknown loop kind {self.kind!r}; expected 'circle' or 'polyline'")
        if self.total_samples < self.min_samples:
            raise ValidationError(
                f"loop has {self.total_samples} samples; at least {self.min_samples} are required"
            )

    @classmethod
    def circle(cls, coord: Coord | str, center: complex, radius: float, samples: int,
               base: ParameterPoint | None = None, n: int | None = None,
               orientation: int = 1) -> "Loop":
        c = parse_coord(coord)
        n = n if n is not None else (base.n if base is not None else c.index)
        return cls("circle", n, coord=c, center=complex(center), radius=float(radius),
                   samples=int(samples), base=base, orientation=orientation)

    @classmethod
    def polyline(cls, vertices: Sequence[ParameterPoint], samples_per_segment: int) -> "Loop":
        vertices = tuple(vertices)
        if not vertices:
            raise ValidationError("polyline loop needs vertices")
        return cls("polyline", vertices[0].n, vertices=vertices,
                   samples_per_segment=int(samples_per_segment))

    @property
    def total_samples(self) -> int:
        if self.kind == "circle":
            return self.samples
        return (len(self.vertices) - 1) * self.samples_per_segment

    @property
    def start(self) -> ParameterPoint:
        if self.kind == "polyline":
            return self.vertices[0]
        return self._on_circle(0.0)

    def _on_circle(self, angle: float) -> ParameterPoint:
        value = self.center + self.radius * cmath.exp(1j * angle)
        delta = value - self.base.value(self.coord)
        return self.base.shifted(self.coord, delta)

    def coarsened(self) -> "Loop":
        """Same path with half the samples, exempt from the sample minimum."""
        if self.kind == "circle":
            return replace(self, samples=max(self.samples // 2, 1), min_samples=1)
        return replace(self, samples_per_segment=max(self.samples_per_segment // 2, 1), min_samples=1)

    def reversed(self) -> "Loop":
        if self.kind == "polyline":
            return Loop.polyline(self.vertices[::-1], self.samples_per_segment)
        return Loop.circle(self.coord, self.center, self.radius, self.samples, self.base,
                           self.n, -self.orientation)

    def steps(self) -> List[Tuple[ParameterPoint, ParameterPoint]]:
        """(midpoint, displacement) for each step in traversal order."""
        out = []
        if self.kind == "circle":
            N = self.samples
            for k in range(N):
                a0 = self.orientation * 2 * math.pi * k / N
                a1 = self.orientation * 2 * math.pi * (k + 1) / N
                p0, p1 = self._on_circle(a0), self._on_circle(a1)
                out.append((self._on_circle(0.5 * (a0 + a1)), p1 - p0))
            return out
        s = self.samples_per_segment
        for v0, v1 in zip(self.vertices[:-1], self.vertices[1:]):
            d = v1 - v0
            for k in range(s):
                out.append((v0 + d.scaled((k + 0.5) / s), d.scaled(1.0 / s)))
        return out

    def to_dict(self) -> Dict[str, object]:
        if self.kind == "circle":
            return {"kind": "circle", "coord": self.coord.label, "center": [self.center.real, self.center.imag],
                    "radius": self.radius, "samples": self.samples, "orientation": self.orientation}
        return {"kind": "polyline", "n": self.n, "samples_per_segment": self.samples_per_segment,
                "vertex_count": len(self.vertices)}


def loop_from_spec(document: Dict[str, object]) -> Loop:
    """Build a :class:`Loop` from its JSON document form."""
    from .serialize import parse_complex, parse_point

    if not isinstance(document, dict):
        raise ValidationError("loop document must be an object")
    kind = document.get("kind")
    if kind == "circle":
        for key in ("coord", "radius", "samples"):
            if key not in document:
                raise ValidationError(f"circle loop document missing {key!r}")
        coord = parse_coord(str(document["coord"]))
        base = parse_point(document["base"]) if "base" in document else None
        n = int(document.get("n", base.n if base is not None else coord.index))
        return Loop.circle(coord, parse_complex(document.get("center", 0)), float(document["radius"]),
                           int(document["samples"]), base, n, int(document.get("orientation", 1)))
    if kind == "polyline":
        if "vertices" not in document or "samples_per_segment" not in document:
            raise ValidationError("polyline loop document needs 'vertices' and 'samples_per_segment'")
        return Loop.polyline([parse_point(v) for v in document["vertices"]],
                             int(document["samples_per_segment"]))
    raise ValidationError(f"unknown loop kind {kind!r}; expected 'circle' or 'polyline'")


# -- holonomy ------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HolonomyResult:
    gamma: np.ndarray
    unitarity_residual: float  # before projection
    step_count: int
    refinement_estimate: float
    meta: Dict[str, object] = field(default_factory=dict)

    @property
    def undersampled(self) -> bool:
        return bool(self.meta.get("undersampled", False))


def connection_field(
    source: str, n: int, space: ModeSystem | None = None, step: float = DEFAULTS.fd_step,
) -> Callable[[ParameterPoint], ConnectionComponents]:
    if source == "closed_n1":
        if n != 1:
            raise ValidationError(f"source closed_n1 needs n=1, loop has n={n}")
        return lambda p: connection_closed_n1(p.xi[0], p.zeta[0])
    if source == "closed_n2":
        if n != 2:
            raise ValidationError(f"source closed_n2 needs n=2, loop has n={n}")
        return connection_closed_n2
    if source == "numeric":
        if space is None:
            space = make_space(n + 1, _default_cutoff(n))
        if space.n != n:
            raise ValidationError(f"space has n={space.n}, loop has n={n}")
        return lambda p: connection_numeric(space, p, step=step, richardson=False)
    raise ValidationError(f"unknown source {source!r}; expected one of {SOURCES}")


def _default_cutoff(n):
    from .config import default_cutoff
    return default_cutoff(n)


def _ordered_product(loop: Loop, field_fn) -> Tuple[np.ndarray, int]:
    gamma = None
    steps = loop.steps()
    for mid, disp in steps:
        g = expm(field_fn(mid).contract(disp))
        gamma = g if gamma is None else gamma @ g
    return gamma, len(steps)


def holonomy(
    loop: Loop, source: str = "closed_n1", space: ModeSystem | None = None,
    step: float = DEFAULTS.fd_step, refinement_tol: float = 1e-6, refine: bool = True,
) -> HolonomyResult:
    """Path-ordered exponential of the connection around ``loop``."""
    field_fn = connection_field(source, loop.n, space, step)
    raw, count = _ordered_product(loop, field_fn)
    residual = unitarity_residual(raw)
    gamma = nearest_unitary(raw)
    estimate = 0.0
    if refine:
        coarse, _ = _ordered_product(loop.coarsened(), field_fn)
        estimate = float(np.max(np.abs(nearest_unitary(coarse) - gamma)))
    start = loop.start
    meta = {
        "source": source,
        "undersampled": estimate > refinement_tol,
        "refinement_tol": refinement_tol,
        "frame_relative": bool(np.any(start.as_array() != 0)),
    }
    if space is not None:
        meta["cutoff"] = space.cutoff
    return HolonomyResult(gamma, residual, count, estimate, meta)


# -- holonomy algebra ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LieAlgebraEstimate:
    basis: Tuple[np.ndarray, ...]
    dimension: int
    closed_under_bracket: bool
    closure_residual: float
    structure: Dict[str, object] = field(default_factory=dict)


def _vec(mats: Sequence[np.ndarray]) -> np.ndarray:
    return np.array([np.concatenate([m.real.ravel(), m.imag.ravel()]) for m in mats])


def _unvec(v: np.ndarray, m: int) -> np.ndarray:
    half = m * m
    return (v[:half] + 1j * v[half:]).reshape(m, m)


def orthonormal_span(mats: Sequence[np.ndarray], rank_tol: float = 1e-9) -> List[np.ndarray]:
    """Real orthonormal basis (trace inner product ``Re tr(X^dag Y)``) of the span."""
    if not mats:
        return []
    m = mats[0].shape[0]
    V = _vec(mats)
    scale = max(np.max(np.linalg.norm(V, axis=1)), 1e-300)
    _, s, vt = np.linalg.svd(V / scale, full_matrices=False)
    rank = int(np.sum(s > rank_tol * max(s[0], 1e-300))) if s.size else 0
    return [_unvec(vt[k], m) for k in range(rank)]


def span_residual(mat: np.ndarray, basis: Sequence[np.ndarray]) -> float:
    """Max-norm distance of ``mat`` from the real span of an orthonormal basis."""
    v = _vec([mat])[0]
    if basis:
        B = _vec(basis)
        v = v - B.T @ (B @ v)
    return float(np.max(np.abs(v)))


def curvature_generators(curv: CurvatureComponents) -> List[np.ndarray]:
    """``F(e_a, e_b)`` for all pairs of real coordinate directions (anti-hermitian)."""
    dirs = []
    for c in (f"{fam}{j}" for fam in ("xi", "zeta") for j in range(1, curv.point.n + 1)):
        bar = c.replace("xi", "xibar") if c.startswith("xi") else c.replace("zeta", "zetabar")
        dirs.append({c: 1.0, bar: 1.0})
        dirs.append({c: 1j, bar: -1j})
    return [curv.evaluate(X, Y) for X, Y in itertools.combinations(dirs, 2)]


def _bracket_closure(basis, depth, rank_tol):
    for _ in range(depth):
        brackets = [x @ y - y @ x for x, y in itertools.combinations(basis, 2)]
        new = orthonormal_span(list(basis) + brackets, rank_tol)
        if len(new) == len(basis):
            return new
        basis = new
    return basis


def _structure(basis: Sequence[np.ndarray], tol: float) -> Dict[str, object]:
    """Center, derived algebra and su(2)+u(1) matching for a compact algebra."""
    dim = len(basis)
    if dim == 0:
        return {"center_dimension": 0, "derived_dimension": 0, "su2_u1_match": False}
    ad = np.zeros((dim, dim, dim))  # ad[i][k, j] = <e_k, [e_i, e_j]>
    B = _vec(basis)
    for i, x in enumerate(basis):
        for j, y in enumerate(basis):
            ad[i][:, j] = B @ _vec([x @ y - y @ x])[0]
    # center: kernel of X -> [X, .]
    coeff_map = ad.transpose(1, 2, 0).reshape(dim * dim, dim)  # (k, j) rows, i columns
    _, s, vt = np.linalg.svd(coeff_map)
    center_dim = int(np.sum(s <= tol * max(1.0, s[0])))
    center = [sum(vt[-1 - k][i] * basis[i] for i in range(dim)) for k in range(center_dim)]
    derived = orthonormal_span([x @ y - y @ x for x, y in itertools.combinations(basis, 2)])
    info = {"center_dimension": center_dim, "derived_dimension": len(derived)}
    match = center_dim == 1 and len(derived) == 3 and dim == 4
    residual = math.inf
    if len(derived) == 3:
        D = _vec(derived)
        c = np.zeros((3, 3, 3))
        for i in range(3):
            for j in range(3):
                br = derived[i] @ derived[j] - derived[j] @ derived[i]
                c[i, j] = D @ _vec([br])[0]
        eps = np.zeros((3, 3, 3))
        for (i, j, k), sgn in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                               ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1)):
            eps[i, j, k] = sgn
        lam = c[0, 1, 2]
        residual = float(np.max(np.abs(c - lam * eps)))
        killing = np.einsum("ikl,jlk->ij", c, c)  # tr(ad_i ad_j) in the derived basis
        info["structure_constant"] = float(abs(lam))
        info["killing_eigenvalues"] = sorted(float(v) for v in np.linalg.eigvalsh(0.5 * (killing + killing.T)))
        info["killing_negative_definite"] = bool(np.all(np.linalg.eigvalsh(0.5 * (killing + killing.T)) < 0))
        if center:
            z = center[0]
            residual = max(residual, max(float(np.max(np.abs(z @ x - x @ z))) for x in basis),
                           float(np.max(np.abs(D @ _vec([z])[0]))))
        match = match and lam != 0 and info["killing_negative_definite"]
    info["matching_residual"] = residual
    info["su2_u1_match"] = bool(match and residual <= 1e-8)
    return info


def transport(
    start: ParameterPoint, end: ParameterPoint, field_fn, samples: int = 64,
) -> np.ndarray:
    """Ordered product along the straight segment from ``start`` to ``end``."""
    d = end - start
    out = np.eye(field_fn(start).m, dtype=complex)
    for k in range(samples):
        mid = start + d.scaled((k + 0.5) / samples)
        out = out @ expm(field_fn(mid).contract(d.scaled(1.0 / samples)))
    return nearest_unitary(out)


def holonomy_algebra(
    points: Sequence[ParameterPoint], source: str = "closed_n1", max_bracket_depth: int = 4,
    space: ModeSystem | None = None, rank_tol: float = 1e-9, closure_tol: float = 1e-8,
    transported_from: ParameterPoint | None = None, transport_samples: int = 64,
) -> LieAlgebraEstimate:
    """Lie algebra generated by curvature values at ``points``.

    By default curvature values are taken in the identity frame, which gives a
    lower bound on the holonomy algebra. With ``transported_from`` each value
    is conjugated back to that base point along a straight path, as the
    Ambrose-Singer theorem prescribes.
    """
    if not points:
        raise ValidationError("holonomy_algebra needs at least one point")
    gens = []
    field_fn = None
    if transported_from is not None:
        field_fn = connection_field(source, transported_from.n, space)
    for p in points:
        if source == "closed_n1":
            if p.n != 1:
                raise ValidationError("source closed_n1 needs n=1 points")
            curv = curvature_closed_n1(p.xi[0], p.zeta[0])
        elif source == "closed_n2":
            curv = curvature_numeric(None, p, source="closed")
        elif source == "numeric":
            sp_ = space if space is not None else make_space(p.n + 1, _default_cutoff(p.n))
            curv = curvature_numeric(sp_, p)
        else:
            raise ValidationError(f"unknown source {source!r}; expected one of {SOURCES}")
        values = curvature_generators(curv)
        if field_fn is not None:
            g = transport(transported_from, p, field_fn, transport_samples)
            values = [g @ v @ g.conj().T for v in values]
        gens.extend(values)
    basis = _bracket_closure(orthonormal_span(gens, rank_tol), max_bracket_depth, rank_tol)
    residual = 0.0
    for x, y in itertools.combinations(basis, 2):
        residual = max(residual, span_residual(x @ y - y @ x, basis))
    structure = _structure(basis, 1e-9)
    structure["frame"] = "identity" if transported_from is None else "transported"
    return LieAlgebraEstimate(tuple(basis), len(basis), residual <= closure_tol, residual, structure)


def subgroup_distance_n1(gamma: np.ndarray) -> float:
    """Distance of ``log(gamma)`` from span{E-F, i(E+F), iH, i diag(0,1,1,2)}."""
    from scipy.linalg import logm

    from .connection import E_HAT, F_HAT, H_HAT
    span = orthonormal_span([E_HAT - F_HAT, 1j * (E_HAT + F_HAT), 1j * H_HAT,
                             1j * np.diag([0.0, 1.0, 1.0, 2.0])])
    return span_residual(logm(gamma), span)
