"""Charge-type structure of N and complementarity of a symmetry-breaking control.

For two cavities the splitting used is by the left atom: ``E_+`` projects on
states with ``b_L = 1``, ``E_-`` on ``b_L = 0``, and the middle space is
trivial. The candidate control should map ``b_L = 1`` states of block
``n + 1`` isometrically onto ``b_L = 0`` states of block ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import PreconditionError
from .hilbert import TruncatedSpace, multiplicity_bound
from .lie import lie_closure
from .linalg import commutator, opnorm
from .operators import BlockOperator, build

EXACT_TOL = 1e-12


@dataclass(frozen=True)
class ChargeTypeRecord:
    eigenvalues: tuple[int, ...]
    multiplicities: tuple[int, ...]
    bounds: tuple[int, ...]
    integrality_residual: float
    block_dims: tuple[int, ...]

    @property
    def passed(self) -> bool:
        K = len(self.block_dims) - 1
        return (self.eigenvalues == tuple(range(K + 1))
                and self.multiplicities == self.block_dims
                and all(m <= b for m, b in zip(self.multiplicities, self.bounds))
                and self.integrality_residual <= EXACT_TOL)


def check_charge_type(space: TruncatedSpace) -> ChargeTypeRecord:
    """Spectrum of ``N`` on the truncation: integers ``0..K`` with multiplicities ``d_n``."""
    N = build("charge_N", None, space)
    evals = np.linalg.eigvalsh(N.matrix)
    rounded = np.rint(evals).astype(int)
    resid = float(np.max(np.abs(evals - rounded))) if evals.size else 0.0
    values, counts = np.unique(rounded, return_counts=True)
    return ChargeTypeRecord(
        eigenvalues=tuple(int(v) for v in values),
        multiplicities=tuple(int(c) for c in counts),
        bounds=tuple(multiplicity_bound(space.M, int(v)) for v in values),
        integrality_residual=resid,
        block_dims=tuple(space.block_dims()),
    )


def check_commutes_with_N(op: BlockOperator) -> float:
    """Spectral norm of ``[op, N]`` on the truncation."""
    N = build("charge_N", None, op.space)
    return opnorm(commutator(np.asarray(op.matrix), N.matrix))


@dataclass(frozen=True)
class ConditionResult:
    passed: bool
    residual: float
    detail: str = ""


@dataclass(frozen=True)
class ComplementarityReport:
    candidate: str
    condition_i: ConditionResult
    condition_ii: ConditionResult
    condition_iii: ConditionResult
    condition_iii_from_2: ConditionResult
    condition_iv: ConditionResult
    plus_minus_split: str
    boundary_block: int

    @property
    def max_residual(self) -> float:
        return max(self.condition_i.residual, self.condition_ii.residual,
                   self.condition_iii.residual, self.condition_iv.residual)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in (self.condition_i, self.condition_ii,
                                      self.condition_iii, self.condition_iv))


def _projectors(space: TruncatedSpace):
    dim = space.dim
    plus = np.diag([float(s.atom(1) == 1) for s in space.basis])
    blocks = []
    for n in range(space.K + 1):
        p = np.zeros((dim, dim))
        sl = space.block_slice(n)
        p[sl, sl] = np.eye(sl.stop - sl.start)
        blocks.append(p)
    return plus, np.eye(dim) - plus, blocks


def check_complementarity(space: TruncatedSpace, candidate: str = "sigma_x(1)",
                          tol: float = EXACT_TOL) -> ComplementarityReport:
    """Check the four complementarity conditions for ``candidate`` on a two-cavity truncation.

    The intertwining condition is tested for ``1 <= n <= K-1``; block ``K``
    is excluded because the candidate would couple it to the missing block
    ``K+1``. The result for ``n >= 2`` only is reported separately.
    """
    if space.M != 2:
        raise PreconditionError(f"complementarity split is defined for two cavities, got M={space.M}")
    if space.K < 2:
        raise PreconditionError(f"need K >= 2 for an interior intertwining pair, got K={space.K}")
    C = np.asarray(build(candidate, None, space).matrix)
    Ep, Em, P = _projectors(space)

    # (i) the splitting commutes with every charge projector
    r1 = max(opnorm(commutator(E, Pn)) for E in (Ep, Em) for Pn in P)
    cond_i = ConditionResult(r1 <= tol, r1, "[E_a, P_n] for a in {+,-}, n <= K")

    # (ii) middle space trivial; vacuum lies in the minus space
    r2 = opnorm(P[0] @ Em - P[0])
    cond_ii = ConditionResult(r2 <= tol, r2, "middle space {0}; P_0 E_- = P_0")

    # (iii) intertwining and partial isometry between neighbouring blocks
    per_n = {}
    for n in range(1, space.K):
        Pp = Ep @ P[n + 1]
        Pm = Em @ P[n]
        X = Pm @ C @ Pp
        XtX = X.conj().T @ X
        per_n[n] = max(opnorm(C @ Pp - Pm @ C), opnorm(XtX - Pp),
                       opnorm(X @ X.conj().T - Pm), opnorm(XtX @ XtX - XtX))
    r3 = max(per_n.values())
    cond_iii = ConditionResult(r3 <= tol, r3,
                               "n=1.." + str(space.K - 1) + "; block K excluded")
    later = [v for n, v in per_n.items() if n >= 2]
    r3b = max(later) if later else 0.0
    cond_iii_b = ConditionResult(r3b <= tol, r3b,
                                 "n=2.." + str(space.K - 1) if later else "no pair with n >= 2 below K")

    # (iv) transitivity between the vacuum and the one-dimensional plus space of block 1
    d0 = int(round(np.trace(P[0])))
    dp1 = int(round(np.trace(Ep @ P[1])))
    if d0 != 1 or dp1 != 1:
        cond_iv = ConditionResult(False, float("nan"),
                                  f"not decidable by this tool: dims {d0}, {dp1} are not both 1")
    else:
        link = opnorm(Ep @ P[1] @ C @ P[0])
        i0 = int(np.flatnonzero(np.diag(P[0]))[0])
        i1 = int(np.flatnonzero(np.diag(Ep @ P[1]))[0])
        idx = [i0, i1]
        R = C[np.ix_(idx, idx)]
        closure = lie_closure([1j * (R + R.conj().T) / 2, 1j * np.diag([0.0, 1.0])])
        transitive = closure.contains_su()
        cond_iv = ConditionResult(link > tol and transitive, abs(link - 1.0),
                                  f"dims 1, 1; coupling {link:.3g}; su(2) reached: {transitive}")

    return ComplementarityReport(
        candidate=candidate,
        condition_i=cond_i, condition_ii=cond_ii,
        condition_iii=cond_iii, condition_iii_from_2=cond_iii_b,
        condition_iv=cond_iv,
        plus_minus_split="H+ = span{b_L=1}, H0 = {0}, H- = span{b_L=0}",
        boundary_block=space.K,
    )
