"""Oracle cross-check battery shared by the ``verify`` command and the acceptance suite."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Sequence

import numpy as np
from scipy.linalg import expm as dense_expm

from . import coherent, two_control
from .config import DEFAULTS, TruncationError, ValidationError
from .connection import (
    connection_closed_n1, connection_closed_n2, connection_composed, connection_numeric,
    vacuum_expectation, vacuum_frame, vacuum_moments,
)
from .coords import ParameterPoint
from .curvature import curvature_closed_n1, curvature_numeric, global_curvature_check
from .fock import bilinear_sparse, ladder_sparse, low_block, make_space
from .holonomy import Loop, holonomy, holonomy_algebra
from .ladder import a, adag

GROUPS = ("n1", "n2", "all")

TOLERANCES = {
    "connection_n1": 1e-6,
    "curvature_n1": 1e-5,
    "conjugation": 1e-6,
    "connection_n2": 1e-5,
    "global_curvature": 1e-4,
    "holonomy_algebra": 1e-8,
    "small_loop_ratio": 3.0,
}

# 1-based (row, col) positions of the ones in the published two-control tables.
VACUUM_TABLES_N2 = {
    ("adag_a", 1, 1): [(5, 5), (6, 6), (7, 7), (8, 8)],
    ("adag_a", 1, 2): [(5, 3), (6, 4)],
    ("adag_a", 1, 3): [(5, 2), (7, 4)],
    ("a_a", 1, 2): [(1, 7), (2, 8)],
    ("a_a", 1, 3): [(1, 6), (3, 8)],
    ("adag_a", 2, 2): [(3, 3), (4, 4), (7, 7), (8, 8)],
    ("adag_a", 2, 3): [(3, 2), (7, 6)],
    ("a_a", 2, 3): [(1, 4), (5, 8)],
    ("adag_a", 3, 3): [(2, 2), (4, 4), (6, 6), (8, 8)],
}


@dataclass
class CheckResult:
    name: str
    group: str
    passed: bool | None  # None for informational entries
    residual: float
    tolerance: float
    seconds: float = 0.0
    details: Dict[str, object] = field(default_factory=dict)

    def to_dict(self):
        """Plain document; non-finite numbers become ``None``."""
        return _finite_only(asdict(self))

    def line(self) -> str:
        status = {True: "PASS", False: "FAIL", None: "INFO"}[self.passed]
        return (f"[{status}] {self.name}: residual={self.residual:.3e} tol={self.tolerance:.1e} "
                f"({self.seconds:.2f} s)")


def _finite_only(obj):
    if isinstance(obj, dict):
        return {k: _finite_only(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite_only(v) for v in obj]
    if isinstance(obj, (float, np.floating)) and not math.isfinite(obj):
        return None
    return obj


def random_points(
    n: int, count: int, bound: float, seed: int, min_magnitude: float = 0.0,
) -> List[ParameterPoint]:
    """Points whose coordinates have magnitude uniform in [min, bound] and uniform phase."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        mag = rng.uniform(min_magnitude, bound, 2 * n)
        z = mag * np.exp(1j * rng.uniform(0.0, 2 * math.pi, 2 * n))
        out.append(ParameterPoint(tuple(z[:n]), tuple(z[n:])))
    return out


def _timed(name: str, group: str, fn: Callable[[], CheckResult]) -> CheckResult:
    t = time.perf_counter()
    try:
        res = fn()
    except TruncationError as exc:
        res = CheckResult(name, group, False, math.inf, 0.0, details={"error": str(exc)})
    res.seconds = time.perf_counter() - t
    return res


# -- individual checks -------------------------------------------------------------

def check_vacuum_tables() -> CheckResult:
    space = make_space(3, 2)
    frame = vacuum_frame(space)
    worst, mismatched = 0.0, []
    tables = dict(VACUUM_TABLES_N2)
    for j in (1, 2, 3):
        tables[("a_a", j, j)] = []
    for (kind, i, j), ones in tables.items():
        expected = np.zeros((8, 8))
        for r, c in ones:
            expected[r - 1, c - 1] = 1.0
        got = vacuum_expectation(bilinear_sparse(space, i, j, kind), frame)
        diff = float(np.max(np.abs(got - expected)))
        if diff != 0.0:
            mismatched.append(f"{kind}{i}{j}")
        worst = max(worst, diff)
    return CheckResult("vacuum_tables_n2", "n2", worst == 0.0, worst, 0.0,
                       details={"tables": len(tables), "mismatched": mismatched})


def check_connection_n1(cutoff: int, seed: int, count: int = 20, bound: float = 0.5,
                        step: float = DEFAULTS.fd_step, tol: float = 1e-6) -> CheckResult:
    space = make_space(2, cutoff)
    frame = vacuum_frame(space)
    worst, gap = 0.0, 0.0
    for p in random_points(1, count, bound, seed):
        num = connection_numeric(space, p, frame, step)
        worst = max(worst, connection_closed_n1(p.xi[0], p.zeta[0]).max_deviation(num))
        gap = max(gap, num.meta["richardson_gap"])
    return CheckResult("connection_closed_n1_vs_numeric", "n1", worst <= tol, worst, tol,
                       details={"cutoff": cutoff, "points": count, "bound": bound,
                                "richardson_gap": gap})


def check_curvature_n1(seed: int, count: int = 10, tol: float = 1e-5,
                       step: float = DEFAULTS.curvature_step) -> CheckResult:
    worst = 0.0
    for p in random_points(1, count, 0.5, seed, min_magnitude=0.05):
        fd = curvature_numeric(None, p, step=step, source="closed")
        worst = max(worst, curvature_closed_n1(p.xi[0], p.zeta[0]).max_deviation(fd))
    return CheckResult("curvature_closed_n1_vs_fd", "n1", worst <= tol, worst, tol,
                       details={"points": count, "step": step})


def conjugation_residuals(n: int, cutoff: int, points: Sequence[ParameterPoint],
                          max_occ: int = 2) -> Dict[str, float]:
    """Closed-form ``V^-1 X V`` minus brute-force truncated conjugation on a low block."""
    space = make_space(n + 1, cutoff)
    blk = low_block(space, max_occ)
    worst: Dict[str, float] = {}
    for p in points:
        coherent.check_squeezing(p)
        vb = coherent.apply_product(space, p, np.eye(space.dim)[:, blk], "V")
        items = [(f"mode{m}", ladder_sparse(space, m), coherent.conjugate_mode_closed(p, m))
                 for m in range(1, n + 2)]
        if n == 2:
            items += [(f"bilinear{i}{j}", bilinear_sparse(space, i, j, "adag_a"),
                       two_control.conjugated_bilinear(p, i, j)) for i, j in two_control.PAIRS]
        for name, op, closed in items:
            brute = vb.conj().T @ (op @ vb)
            cl = closed.to_sparse(space)[blk][:, blk].toarray()
            worst[name] = max(worst.get(name, 0.0), float(np.max(np.abs(brute - cl))))
        # partial chains U_{j+1}..U_n and V_{j+1}..V_n acting on the shared mode
        last = ladder_sparse(space, n + 1)
        for algebra, kind, params, op in ((coherent.SU_N1, "su2", p.xi, last),
                                          (coherent.SU_N_1, "su11", p.zeta, last.T.tocsr())):
            for j in range(n + 1):
                xb = np.eye(space.dim)[:, blk].astype(complex)
                for k in range(n, j, -1):
                    xb = coherent.apply_pair(space, k, coherent.pair_unitary(space.levels, kind, params[k - 1]), xb)
                brute = xb.conj().T @ (op @ xb)
                cl = coherent.chain_conjugate_shared(p, j, algebra).to_sparse(space)[blk][:, blk].toarray()
                name = f"chain_{kind}"
                worst[name] = max(worst.get(name, 0.0), float(np.max(np.abs(brute - cl))))
    return worst


def check_conjugation(n: int, cutoff: int, seed: int, count: int, bound: float,
                      tol: float = 1e-6) -> CheckResult:
    res = conjugation_residuals(n, cutoff, random_points(n, count, bound, seed))
    worst = max(res.values())
    return CheckResult(f"conjugation_n{n}_vs_brute_force", f"n{n}", worst <= tol, worst, tol,
                       details={"cutoff": cutoff, "points": count, "bound": bound,
                                "per_identity": res})


def check_conjugation_tables_exact(seed: int, count: int = 5, tol: float = 1e-12) -> CheckResult:
    """Tabulated conjugations agree with mode-by-mode substitution, and their
    vacuum expectations with the moment-matrix tables."""
    mom = vacuum_moments(make_space(3, 1))
    worst = 0.0
    for p in random_points(2, count, 0.5, seed):
        tables = two_control.vacuum_conjugated_bilinears(p, mom.M, mom.N)
        for i, j in two_control.PAIRS:
            expr = two_control.conjugated_bilinear(p, i, j)
            composed = coherent.conjugate_expr_closed(p, adag(i) * a(j))
            worst = max(worst, expr.max_abs_difference(composed))
            worst = max(worst, float(np.max(np.abs(mom.expectation(expr) - tables[i, j]))))
        worst = max(worst, connection_closed_n2(p).max_deviation(connection_composed(p)))
    return CheckResult("two_control_tables_consistency", "n2", worst <= tol, worst, tol,
                       details={"points": count})


def check_connection_n2(cutoff: int, seed: int, count: int = 10, bound: float = 0.4,
                        step: float = DEFAULTS.fd_step, tol: float = 1e-5) -> CheckResult:
    space = make_space(3, cutoff)
    frame = vacuum_frame(space)
    worst, per_point = 0.0, []
    for p in random_points(2, count, bound, seed):
        num = connection_numeric(space, p, frame, step, richardson=False)
        dev = connection_closed_n2(p).max_deviation(num)
        per_point.append(dev)
        worst = max(worst, dev)
    return CheckResult("connection_closed_n2_vs_numeric", "n2", worst <= tol, worst, tol,
                       details={"cutoff": cutoff, "points": count, "bound": bound,
                                "per_point": per_point})


GLOBAL_POINTS = (
    ParameterPoint((0.2,), (0.1j,)),
    ParameterPoint((0.0,), (0.0,)),
    ParameterPoint((-0.15 + 0.25j,), (0.3 - 0.1j,)),
)


def check_global_curvature(cutoff: int, tol: float = 1e-4,
                           step: float = DEFAULTS.curvature_step) -> CheckResult:
    space = make_space(2, cutoff)
    res = [global_curvature_check(space, p, step=step) for p in GLOBAL_POINTS]
    worst = max(res)
    return CheckResult("global_curvature_identity_n1", "n1", worst <= tol, worst, tol,
                       details={"cutoff": cutoff, "per_point": res})


def check_holonomy_algebra(seed: int, count: int = 10, tol: float = 1e-8) -> CheckResult:
    est = holonomy_algebra(random_points(1, count, 0.5, seed, min_magnitude=0.05))
    s = est.structure
    ok = (est.dimension == 4 and est.closed_under_bracket and s["center_dimension"] == 1
          and s["derived_dimension"] == 3 and s["matching_residual"] <= tol)
    return CheckResult("holonomy_algebra_n1", "n1", bool(ok), s["matching_residual"], tol,
                       details={"dimension": est.dimension,
                                "closed_under_bracket": est.closed_under_bracket, **s})


def small_loop_errors(radii=(0.04, 0.02), samples: int = 256) -> List[float]:
    """``|Gamma - exp(G pi r^2)|`` for counter-clockwise zeta-circles about the origin."""
    G = curvature_closed_n1(0.0, 0.0).real_plane("zeta1")
    out = []
    for r in radii:
        res = holonomy(Loop.circle("zeta1", 0.0, r, samples), refine=False)
        out.append(float(np.max(np.abs(res.gamma - dense_expm(G * math.pi * r * r)))))
    return out


def check_small_loop(min_ratio: float = 3.0) -> CheckResult:
    big, small = small_loop_errors()
    ratio = big / small
    return CheckResult("small_loop_area_law_n1", "n1", ratio >= min_ratio, ratio, min_ratio,
                       details={"error_r0.04": big, "error_r0.02": small, "ratio": ratio})


def errata_report(seed: int) -> CheckResult:
    """How far the published forms are from the derived ones (informational)."""
    p1 = random_points(1, 5, 0.5, seed, min_magnitude=0.05)
    p2 = random_points(2, 5, 0.4, seed, min_magnitude=0.05)
    conn_n1 = max(connection_closed_n1(p.xi[0], p.zeta[0], printed=True)
                  .max_deviation(connection_closed_n1(p.xi[0], p.zeta[0])) for p in p1)
    curv_n1 = max(curvature_closed_n1(p.xi[0], p.zeta[0], printed=True)
                  .max_deviation(curvature_closed_n1(p.xi[0], p.zeta[0])) for p in p1)
    curv_consistent = max(curvature_closed_n1(p.xi[0], p.zeta[0], printed=True)
                          .max_deviation(curvature_numeric(None, p, source="closed", printed=True))
                          for p in p1)
    conn_n2 = max(connection_closed_n2(p, printed=True).max_deviation(connection_closed_n2(p))
                  for p in p2)
    mom = vacuum_moments(make_space(3, 1))
    tables = 0.0
    for p in p2:
        a = two_control.vacuum_conjugated_bilinears(p, mom.M, mom.N, printed=True)
        b = two_control.vacuum_conjugated_bilinears(p, mom.M, mom.N)
        tables = max(tables, max(float(np.max(np.abs(a[k] - b[k]))) for k in a))
    details = {
        "connection_n1_H_sign": conn_n1,
        "curvature_n1_xi_xibar": curv_n1,
        "published_curvature_equals_d_of_published_connection": curv_consistent,
        "connection_n2": conn_n2,
        "conjugation_tables_n2": tables,
    }
    return CheckResult("published_form_deviations", "all", None, max(conn_n1, curv_n1, conn_n2),
                       0.0, details=details)


def transported_algebra_report(seed: int, count: int = 10) -> CheckResult:
    est = holonomy_algebra(random_points(1, count, 0.3, seed, min_magnitude=0.05),
                           transported_from=ParameterPoint((0.0,), (0.0,)))
    return CheckResult("holonomy_algebra_n1_transported", "n1", None, float(est.dimension), 0.0,
                       details={"dimension": est.dimension, **est.structure})


# -- battery ---------------------------------------------------------------------------

def run_battery(group: str = "all", cutoff_n1: int | None = None, cutoff_n2: int | None = None,
                seed: int = 2024, step: float = DEFAULTS.fd_step,
                zeta_max: float | None = None,
                tolerances: Dict[str, float] | None = None) -> List[CheckResult]:
    if group not in GROUPS:
        raise ValidationError(f"unknown check group {group!r}; expected one of {GROUPS}")
    tol = dict(TOLERANCES)
    for key, value in (tolerances or {}).items():
        if key not in tol:
            raise ValidationError(f"unknown tolerance {key!r}; expected one of {sorted(tol)}")
        if not value > 0:
            raise ValidationError(f"tolerance {key} must be positive")
        tol[key] = float(value)
    c1 = DEFAULTS.cutoff_n1 if cutoff_n1 is None else cutoff_n1
    c2 = DEFAULTS.cutoff_n2 if cutoff_n2 is None else cutoff_n2
    b1 = 0.5 if zeta_max is None else zeta_max
    b2 = 0.4 if zeta_max is None else zeta_max
    jobs = []
    if group in ("n1", "all"):
        jobs += [
            ("connection_closed_n1_vs_numeric", "n1", lambda: check_connection_n1(c1, seed, bound=b1, step=step, tol=tol["connection_n1"])),
            ("curvature_closed_n1_vs_fd", "n1", lambda: check_curvature_n1(seed, tol=tol["curvature_n1"])),
            ("conjugation_n1_vs_brute_force", "n1", lambda: check_conjugation(1, c1, seed, 10, b1, tol["conjugation"])),
            ("global_curvature_identity_n1", "n1", lambda: check_global_curvature(c1, tol["global_curvature"])),
            ("holonomy_algebra_n1", "n1", lambda: check_holonomy_algebra(seed, tol=tol["holonomy_algebra"])),
            ("small_loop_area_law_n1", "n1", lambda: check_small_loop(tol["small_loop_ratio"])),
            ("holonomy_algebra_n1_transported", "n1", lambda: transported_algebra_report(seed)),
        ]
    if group in ("n2", "all"):
        jobs += [
            ("vacuum_tables_n2", "n2", check_vacuum_tables),
            ("two_control_tables_consistency", "n2", lambda: check_conjugation_tables_exact(seed)),
            ("conjugation_n2_vs_brute_force", "n2", lambda: check_conjugation(2, c2, seed, 10, b2, tol["conjugation"])),
            ("connection_closed_n2_vs_numeric", "n2", lambda: check_connection_n2(c2, seed, bound=b2, step=step, tol=tol["connection_n2"])),
        ]
    if group == "all":
        jobs.append(("published_form_deviations", "all", lambda: errata_report(seed)))
    return [_timed(*j) for j in jobs]
