"""Small dense linear-algebra helpers shared by the operator and spectral code."""

from __future__ import annotations

import numpy as np


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def opnorm(a: np.ndarray) -> float:
    """Spectral norm; 0 for empty matrices."""
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def hermitian_residual(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - a.conj().T)) if a.size else 0.0


def antihermitian_residual(a: np.ndarray) -> float:
    return float(np.linalg.norm(a + a.conj().T)) if a.size else 0.0


def expm_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """``exp(i t h)`` for Hermitian ``h`` via its eigendecomposition."""
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(1j * t * evals)) @ evecs.conj().T


def relative_residual(lhs: np.ndarray, rhs: np.ndarray) -> tuple[float, float]:
    """Return ``(||lhs - rhs||, ||lhs - rhs|| / max(||lhs||, ||rhs||))`` in Frobenius norm."""
    res = float(np.linalg.norm(lhs - rhs))
    scale = max(float(np.linalg.norm(lhs)), float(np.linalg.norm(rhs)))
    return res, (res / scale if scale > 0 else res)
