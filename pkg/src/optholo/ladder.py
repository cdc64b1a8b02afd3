"""Polynomials in ladder operators with complex coefficients.

A term is a tuple of factors ``(mode, dagger)`` kept in written order. This is
enough to carry the closed-form adjoint actions (linear combinations of
``a_l`` and ``a_l^dag``) and their products, to realize them as truncated
matrices, and to normal-order them for exact coefficient comparison.
"""

from __future__ import annotations

import re
from typing import Dict, Iterator, Tuple

import numpy as np
import scipy.sparse as sp

from .config import ValidationError
from .fock import ModeSystem, ladder_sparse

Factor = Tuple[int, bool]
Term = Tuple[Factor, ...]

_TAG = re.compile(r"^a(\d+)(\+?)$")


def parse_tag(tag: str) -> Factor:
    """``"a3"`` -> (3, False), ``"a3+"`` -> (3, True)."""
    m = _TAG.match(tag.strip())
    if not m:
        raise ValidationError(f"bad ladder tag {tag!r}")
    return int(m.group(1)), bool(m.group(2))


def format_factor(f: Factor) -> str:
    return f"a{f[0]}{'+' if f[1] else ''}"


class LadderExpr:
    __slots__ = ("terms",)

    def __init__(self, terms: Dict[Term, complex] | None = None):
        self.terms: Dict[Term, complex] = {}
        for k, v in (terms or {}).items():
            if v != 0:
                self.terms[tuple(k)] = self.terms.get(tuple(k), 0) + complex(v)

    @classmethod
    def op(cls, mode: int, dagger: bool = False) -> "LadderExpr":
        return cls({((mode, dagger),): 1.0})

    @classmethod
    def const(cls, c: complex) -> "LadderExpr":
        return cls({(): c})

    @classmethod
    def combination(cls, pairs) -> "LadderExpr":
        """Build from ``(coefficient, tag)`` pairs, e.g. ``[(2, "a1"), (1j, "a3+")]``."""
        out = cls()
        for c, tag in pairs:
            out = out + c * cls({(parse_tag(tag),): 1.0})
        return out

    def __iter__(self) -> Iterator[Tuple[Term, complex]]:
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def __add__(self, other) -> "LadderExpr":
        if not isinstance(other, LadderExpr):
            other = LadderExpr.const(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return LadderExpr(out)

    __radd__ = __add__

    def __neg__(self) -> "LadderExpr":
        return LadderExpr({k: -v for k, v in self.terms.items()})

    def __sub__(self, other) -> "LadderExpr":
        return self + (-other if isinstance(other, LadderExpr) else -complex(other))

    def __rsub__(self, other) -> "LadderExpr":
        return (-self) + other

    def __mul__(self, other) -> "LadderExpr":
        if isinstance(other, LadderExpr):
            out: Dict[Term, complex] = {}
            for k1, v1 in self.terms.items():
                for k2, v2 in other.terms.items():
                    k = k1 + k2
                    out[k] = out.get(k, 0) + v1 * v2
            return LadderExpr(out)
        return LadderExpr({k: v * complex(other) for k, v in self.terms.items()})

    def __rmul__(self, other) -> "LadderExpr":
        return LadderExpr({k: v * complex(other) for k, v in self.terms.items()})

    @property
    def dag(self) -> "LadderExpr":
        return LadderExpr(
            {tuple((m, not d) for m, d in reversed(k)): np.conj(v) for k, v in self.terms.items()}
        )

    def degrees(self) -> set:
        return {len(k) for k in self.terms}

    def modes(self) -> set:
        return {m for k in self.terms for m, _ in k}

    def coefficient(self, *tags: str) -> complex:
        """Coefficient of the term written exactly as ``tags`` (use after normal ordering)."""
        key = tuple(parse_tag(t) for t in tags)
        return self.terms.get(key, 0j)

    def normal_ordered(self) -> "LadderExpr":
        """Creation operators to the left, each group sorted by mode."""
        out: Dict[Term, complex] = {}
        stack = list(self.terms.items())
        while stack:
            term, c = stack.pop()
            for pos in range(len(term) - 1):
                (m1, d1), (m2, d2) = term[pos], term[pos + 1]
                if not d1 and d2:
                    swapped = term[:pos] + (term[pos + 1], term[pos]) + term[pos + 2:]
                    stack.append((swapped, c))
                    if m1 == m2:
                        stack.append((term[:pos] + term[pos + 2:], c))
                    break
            else:
                n_dag = sum(1 for _, d in term if d)
                key = tuple(sorted(term[:n_dag])) + tuple(sorted(term[n_dag:]))
                out[key] = out.get(key, 0) + c
        return LadderExpr(out)

    def chop(self, tol: float = 1e-14) -> "LadderExpr":
        return LadderExpr({k: v for k, v in self.terms.items() if abs(v) > tol})

    def max_abs_difference(self, other: "LadderExpr") -> float:
        diff = (self - other).normal_ordered()
        return max((abs(v) for v in diff.terms.values()), default=0.0)

    def to_sparse(self, space: ModeSystem) -> sp.csr_matrix:
        out = sp.csr_matrix((space.dim, space.dim), dtype=complex)
        eye = sp.identity(space.dim, dtype=complex, format="csr")
        for term, c in self.terms.items():
            m = eye
            for mode, dag in term:
                m = m @ ladder_sparse(space, mode, dag)
            out = out + c * m
        return out.tocsr()

    def to_matrix(self, space: ModeSystem) -> np.ndarray:
        return self.to_sparse(space).toarray()

    def __repr__(self):
        if not self.terms:
            return "LadderExpr(0)"
        parts = []
        for k, v in sorted(self.terms.items()):
            ops = " ".join(format_factor(f) for f in k) or "1"
            parts.append(f"({v:.6g}) {ops}")
        return "LadderExpr(" + " + ".join(parts) + ")"


def a(mode: int) -> LadderExpr:
    return LadderExpr.op(mode, False)


def adag(mode: int) -> LadderExpr:
    return LadderExpr.op(mode, True)
