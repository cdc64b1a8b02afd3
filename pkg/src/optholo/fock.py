"""Truncated multi-mode bosonic Fock spaces and their elementary operators.

Modes are numbered ``1..n_modes``. Basis states ``|n_1, ..., n_N>`` are enumerated
in lexicographic order with the last mode varying fastest, so the basis index of
an occupation tuple is its base-``(cutoff + 1)`` numeral. Truncation is hard:
``a^dagger |cutoff> = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .config import DEFAULTS, ValidationError


@dataclass(frozen=True)
class ModeSystem:
    n_modes: int
    cutoff: int

    @property
    def levels(self) -> int:
        return self.cutoff + 1

    @property
    def dim(self) -> int:
        return self.levels ** self.n_modes

    @property
    def n(self) -> int:
        """Number of control modes; the last oscillator is the shared mode n + 1."""
        return self.n_modes - 1


def make_space(n_modes: int, cutoff: int, max_dim: int | None = None) -> ModeSystem:
    if int(n_modes) != n_modes or n_modes < 2:
        raise ValidationError(f"n_modes must be an integer >= 2, got {n_modes!r}")
    if int(cutoff) != cutoff or cutoff < 1:
        raise ValidationError(f"cutoff must be an integer >= 1, got {cutoff!r}")
    space = ModeSystem(int(n_modes), int(cutoff))
    budget = DEFAULTS.max_dim if max_dim is None else max_dim
    if space.dim > budget:
        raise ValidationError(
            f"space dimension {space.dim} exceeds memory budget {budget}"
        )
    return space


def _check_mode(space: ModeSystem, mode: int) -> None:
    if not (1 <= mode <= space.n_modes):
        raise ValidationError(f"mode {mode} out of range 1..{space.n_modes}")


@lru_cache(maxsize=None)
def occupations(space: ModeSystem) -> np.ndarray:
    """(dim, n_modes) integer table of occupation numbers, in basis order."""
    grids = np.indices((space.levels,) * space.n_modes).reshape(space.n_modes, -1)
    table = np.ascontiguousarray(grids.T)
    table.flags.writeable = False
    return table


def basis_index(space: ModeSystem, occ: Sequence[int]) -> int:
    if len(occ) != space.n_modes:
        raise ValidationError(f"expected {space.n_modes} occupations, got {len(occ)}")
    idx = 0
    for k in occ:
        if not (0 <= k <= space.cutoff):
            raise ValidationError(f"occupation {k} outside 0..{space.cutoff}")
        idx = idx * space.levels + int(k)
    return idx


def low_block(space: ModeSystem, max_occ: int) -> np.ndarray:
    """Basis indices of states with every occupation <= ``max_occ``."""
    return np.flatnonzero(np.all(occupations(space) <= max_occ, axis=1))


def total_block(space: ModeSystem, max_total: int, modes: Iterable[int] | None = None) -> np.ndarray:
    """Basis indices whose summed occupation over ``modes`` is <= ``max_total``."""
    occ = occupations(space)
    cols = [m - 1 for m in modes] if modes is not None else list(range(space.n_modes))
    return np.flatnonzero(occ[:, cols].sum(axis=1) <= max_total)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense matrix acting on a truncated Fock space."""

    space: ModeSystem
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise ValidationError(
                f"matrix shape {m.shape} does not match space dim {self.space.dim}"
            )
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    def _other(self, other):
        if isinstance(other, OperatorMatrix):
            if other.space != self.space:
                raise ValidationError("operators live on different spaces")
            return other.entries
        return other

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            return OperatorMatrix(self.space, self.entries @ self._other(other))
        return self.entries @ other

    def __add__(self, other):
        return OperatorMatrix(self.space, self.entries + self._other(other))

    def __sub__(self, other):
        return OperatorMatrix(self.space, self.entries - self._other(other))

    def __mul__(self, scalar):
        return OperatorMatrix(self.space, self.entries * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return OperatorMatrix(self.space, -self.entries)

    @property
    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.entries.conj().T)

    def commutator(self, other: "OperatorMatrix") -> "OperatorMatrix":
        o = self._other(other)
        return OperatorMatrix(self.space, self.entries @ o - o @ self.entries)

    def block(self, indices: np.ndarray) -> np.ndarray:
        return self.entries[np.ix_(indices, indices)]

    def hermiticity_residual(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T), initial=0.0))


@dataclass(frozen=True, eq=False)
class FockState:
    space: ModeSystem
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.amplitudes, dtype=complex)
        if v.shape != (self.space.dim,):
            raise ValidationError(f"state length {v.shape} does not match dim {self.space.dim}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("state amplitudes must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "amplitudes", v)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def basis_state(space: ModeSystem, occ: Sequence[int]) -> FockState:
    v = np.zeros(space.dim, dtype=complex)
    v[basis_index(space, occ)] = 1.0
    return FockState(space, v)


@lru_cache(maxsize=None)
def _single_mode_lowering(levels: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, levels, dtype=float)), 1, format="csr")


@lru_cache(maxsize=None)
def ladder_sparse(space: ModeSystem, mode: int, dagger: bool = False) -> sp.csr_matrix:
    """Sparse a_mode (or its adjoint) embedded at the mode's tensor position."""
    _check_mode(space, mode)
    a = _single_mode_lowering(space.levels)
    if dagger:
        a = a.T.tocsr()
    left = sp.identity(space.levels ** (mode - 1), format="csr")
    right = sp.identity(space.levels ** (space.n_modes - mode), format="csr")
    out = sp.kron(sp.kron(left, a), right, format="csr").astype(complex)
    out.sort_indices()
    return out


def annihilation(space: ModeSystem, mode: int) -> OperatorMatrix:
    return OperatorMatrix(space, ladder_sparse(space, mode).toarray())


def creation(space: ModeSystem, mode: int) -> OperatorMatrix:
    return OperatorMatrix(space, ladder_sparse(space, mode, True).toarray())


def number(space: ModeSystem, mode: int) -> OperatorMatrix:
    return bilinear(space, mode, mode, "adag_a")


BILINEAR_KINDS = ("adag_a", "adag_adag", "a_a")


def bilinear_sparse(space: ModeSystem, i: int, j: int, kind: str) -> sp.csr_matrix:
    if kind not in BILINEAR_KINDS:
        raise ValidationError(f"unknown bilinear kind {kind!r}; expected one of {BILINEAR_KINDS}")
    left_dag = kind in ("adag_a", "adag_adag")
    right_dag = kind == "adag_adag"
    return (ladder_sparse(space, i, left_dag) @ ladder_sparse(space, j, right_dag)).tocsr()


def bilinear(space: ModeSystem, i: int, j: int, kind: str) -> OperatorMatrix:
    """``a_i^dag a_j``, ``a_i^dag a_j^dag`` or ``a_i a_j`` as a dense matrix."""
    return OperatorMatrix(space, bilinear_sparse(space, i, j, kind).toarray())


def kerr_diagonal(space: ModeSystem) -> np.ndarray:
    occ = occupations(space)
    return (occ * (occ - 1)).sum(axis=1).astype(float)


def kerr_hamiltonian(space: ModeSystem) -> OperatorMatrix:
    """Sum over modes of N_j (N_j - 1), in units where hbar * X = 1."""
    return OperatorMatrix(space, np.diag(kerr_diagonal(space)))
