"""Real Lie closure of anti-Hermitian matrices and the block-wise rank test.

Anti-Hermitian ``d x d`` matrices are stored as real vectors of length ``d**2``
(imaginary diagonal, then ``sqrt(2)`` times real and imaginary parts of the
upper triangle), an isometry for the inner product ``Re tr(A^dagger B)``.
Closure is built by Gram-Schmidt with re-orthogonalization: every newly
accepted element is commuted with every element accepted before it, so each
pair is visited once and the insertion order is breadth-first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .exceptions import PreconditionError
from .hilbert import TruncatedSpace
from .linalg import antihermitian_residual
from .operators import ModelParams, build, project_block

DEFAULT_TOL = 1e-9
_AH_TOL = 1e-12


class _Coords:
    """Vectorization of anti-Hermitian matrices of one fixed size."""

    def __init__(self, d: int):
        self.d = d
        self.iu = np.triu_indices(d, 1)
        self.diag = np.arange(d)

    def to_vec(self, mats: np.ndarray) -> np.ndarray:
        """``(b, d, d) -> (b, d*d)``."""
        up = mats[:, self.iu[0], self.iu[1]]
        dg = mats[:, self.diag, self.diag].imag
        return np.concatenate([dg, np.sqrt(2) * up.real, np.sqrt(2) * up.imag], axis=1)

    def to_mat(self, vecs: np.ndarray) -> np.ndarray:
        vecs = np.atleast_2d(vecs)
        d, b = self.d, vecs.shape[0]
        m = len(self.iu[0])
        out = np.zeros((b, d, d), dtype=complex)
        out[:, self.diag, self.diag] = 1j * vecs[:, :d]
        up = (vecs[:, d:d + m] + 1j * vecs[:, d + m:]) / np.sqrt(2)
        out[:, self.iu[0], self.iu[1]] = up
        out[:, self.iu[1], self.iu[0]] = -up.conj()
        return out


@dataclass(frozen=True, eq=False)
class ClosureBasis:
    """Orthonormal real basis of the Lie algebra generated by ``generators``."""

    generators: tuple[np.ndarray, ...]
    vectors: np.ndarray = field(repr=False)
    tol: float
    d: int

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def basis(self) -> np.ndarray:
        """Basis as a ``(dim, d, d)`` stack of anti-Hermitian matrices."""
        return _Coords(self.d).to_mat(self.vectors) if self.dim else np.zeros((0, self.d, self.d), complex)

    @property
    def traceless_dim(self) -> int:
        """Dimension of the intersection with su(d)."""
        if self.dim == 0:
            return 0
        # the trace is a linear functional, so it cuts the span by at most one
        traces = self.vectors[:, : self.d].sum(axis=1)
        return self.dim - int(np.max(np.abs(traces)) > self.tol)

    def contains_su(self) -> bool:
        return self.traceless_dim >= self.d * self.d - 1

    def closure_residual(self) -> float:
        """Largest component of ``[b_i, b_j]`` outside the span, over all pairs."""
        mats = self.basis
        if self.dim == 0:
            return 0.0
        coords = _Coords(self.d)
        worst = 0.0
        for k in range(self.dim):
            comm = mats @ mats[k] - mats[k] @ mats
            v = coords.to_vec(comm)
            r = v - (v @ self.vectors.T) @ self.vectors
            worst = max(worst, float(np.max(np.linalg.norm(r, axis=1))))
        return worst


def _check_generators(generators: Sequence[np.ndarray]) -> int:
    if not generators:
        raise ValueError("need at least one generator")
    d = None
    for g in generators:
        g = np.asarray(g)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError(f"generator of shape {g.shape} is not square")
        if d is None:
            d = g.shape[0]
        elif g.shape[0] != d:
            raise ValueError(f"generator sizes differ: {d} vs {g.shape[0]}")
        scale = max(1.0, float(np.linalg.norm(g)))
        if antihermitian_residual(g) > _AH_TOL * scale:
            raise ValueError("generators must be anti-Hermitian")
    return d


def _absorb(Q: list[np.ndarray], cands: np.ndarray, tol: float, cap: int) -> list[np.ndarray]:
    """Gram-Schmidt the rows of ``cands`` against ``Q``; return the accepted unit vectors."""
    accepted = []
    if Q:
        basis = np.array(Q)
        cands = cands - (cands @ basis.T) @ basis
        cands = cands - (cands @ basis.T) @ basis
    for v in cands:
        for u in accepted:
            v = v - (u @ v) * u
        for u in accepted:
            v = v - (u @ v) * u
        nrm = np.linalg.norm(v)
        if nrm > tol:
            accepted.append(v / nrm)
            if len(Q) + len(accepted) >= cap:
                break
    return accepted


def lie_closure(generators: Sequence[np.ndarray], tol: float = DEFAULT_TOL) -> ClosureBasis:
    """Real Lie algebra generated by anti-Hermitian ``generators``.

    Generators are scaled to unit Frobenius norm first; a candidate joins the
    basis when its component orthogonal to the current span exceeds ``tol``.
    Stops early once the span reaches u(d), or su(d) if every generator is
    traceless.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    d = _check_generators(generators)
    gens = tuple(np.asarray(g, dtype=complex) for g in generators)
    coords = _Coords(d)
    vecs = coords.to_vec(np.array(gens))
    norms = np.linalg.norm(vecs, axis=1)
    vecs = vecs[norms > 0] / norms[norms > 0, None]
    has_trace = bool(np.any(np.abs(vecs[:, :d].sum(axis=1)) > tol)) if len(vecs) else False
    cap = d * d if has_trace else d * d - 1

    Q: list[np.ndarray] = []
    if len(vecs) and cap > 0:
        Q += _absorb(Q, vecs, tol, cap)
    mats = list(coords.to_mat(np.array(Q))) if Q else []
    k = 0
    while k < len(Q) and len(Q) < cap:
        if k > 0:
            prev = np.array(mats[:k])
            comm = prev @ mats[k] - mats[k] @ prev
            new = _absorb(Q, coords.to_vec(comm), tol, cap)
            if new:
                Q += new
                mats += list(coords.to_mat(np.array(new)))
        k += 1
    arr = np.array(Q) if Q else np.zeros((0, d * d))
    return ClosureBasis(gens, arr, tol, d)


@dataclass(frozen=True)
class BlockClosure:
    n: int
    d: int
    closure_dim: int
    traceless_dim: int
    target: int
    contains_su: bool


@dataclass(frozen=True)
class ClosureReport:
    blocks: tuple[BlockClosure, ...]
    generators: tuple[str, ...]
    tol: float

    @property
    def passed(self) -> bool:
        return all(b.contains_su for b in self.blocks)

    def failing_blocks(self) -> list[int]:
        return [b.n for b in self.blocks if not b.contains_su]


def block_closure(mats: Iterable[np.ndarray], n: int, tol: float = DEFAULT_TOL) -> BlockClosure:
    """Closure of ``i * H`` for the Hermitian block matrices ``mats``."""
    gens = [1j * np.asarray(m) for m in mats]
    d = gens[0].shape[0]
    nonzero = [g for g in gens if np.linalg.norm(g) > 0]
    if nonzero:
        cb = lie_closure(nonzero, tol)
        dim, tdim = cb.dim, cb.traceless_dim
    else:
        dim = tdim = 0
    target = d * d - 1
    return BlockClosure(n, d, dim, tdim, target, tdim >= target)


def check_rank_condition(space: TruncatedSpace, descriptors: Sequence[str],
                         params: ModelParams | None, tol: float = DEFAULT_TOL,
                         edges: Iterable[Sequence[int]] | None = None) -> ClosureReport:
    """Per charge block, does the closure of the projected generators contain su(d_n)?

    Every generator must commute with the total excitation number so that
    its block projections are exact.
    """
    if not descriptors:
        raise ValueError("no generators given")
    ops = [build(desc, params, space, edges=edges) for desc in descriptors]
    for op in ops:
        if not op.commutes_with_N:
            raise PreconditionError(
                f"{op.name} does not conserve the excitation number; its truncation is not exact")
    blocks = tuple(block_closure([project_block(op, n) for op in ops], n, tol)
                   for n in range(space.K + 1))
    return ClosureReport(blocks, tuple(op.name for op in ops), tol)
