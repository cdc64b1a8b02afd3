"""Matrix exponentials and unitary projection."""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply


def expm(generator: np.ndarray, antihermitian_tol: float = 1e-13) -> np.ndarray:
    """exp of a dense matrix.

    Anti-hermitian input goes through a unitary eigendecomposition, which keeps
    the result unitary to machine precision; anything else falls back to
    scipy's scaling-and-squaring ``expm``.
    """
    g = np.asarray(generator, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(g), initial=0.0)))
    if np.max(np.abs(g + g.conj().T), initial=0.0) <= antihermitian_tol * scale:
        # g = -i h with h hermitian
        w, q = np.linalg.eigh(1j * g)
        return (q * np.exp(-1j * w)) @ q.conj().T
    return sla.expm(g)


def expm_apply(generator, vectors: np.ndarray) -> np.ndarray:
    """exp(generator) @ vectors without forming the exponential."""
    if sp.issparse(generator):
        return expm_multiply(generator.tocsc(), vectors)
    return expm(generator) @ vectors


def nearest_unitary(m: np.ndarray) -> np.ndarray:
    u, _ = sla.polar(m)
    return u


def unitarity_residual(m: np.ndarray) -> float:
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))
