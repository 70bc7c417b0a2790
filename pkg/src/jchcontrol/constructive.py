"""Commutator identities and the explicit construction of elementary matrices.

The identity catalog (``I1`` ... ``I7``) checks exact operator relations
between the drift, Pauli, hopping and two-cavity ladder operators on a
truncation. ``construct_E_generators`` replays a commutator recipe that
builds every superdiagonal elementary matrix ``E_{i,i+1}`` of a two-cavity
charge block from the ladder operators alone, which together with their
transposes generate su(4n).

Matrix indices in this module are 1-based, matching the ``E_{i,j}`` notation
(``E_{i,j}`` has a single 1 in row ``i``, column ``j``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt
from typing import Sequence

import numpy as np

from .exceptions import PreconditionError
from .hilbert import TruncatedSpace
from .linalg import commutator, relative_residual
from .operators import ModelParams, build, project_block, project_joint

EXACT_TOL = 1e-12
IDENTITY_IDS = ("I1", "I2", "I3", "I4", "I5", "I6", "I7")

DESCRIPTIONS = {
    "I1": "A1 - A2 = [H0, sz_L] / (2 wI_L)",
    "I2": "A1 + A2 = [[H0, sz_L], sz_L] / (4 wI_L)",
    "I3": "A5 = (H_H + [nL, H_H]) / 2 and A6 = (H_H - [nL, H_H]) / 2",
    "I4": "[A3^(n,0), A6^(n)] = sqrt(n) sqrt(n-1) E_{1,4}",
    "I5": "[A4^(n,0), A6^(n)] = n E_{2,3}",
    "I6": "[n_i, [H_H(I), n_k]] = a*_i a_k + a_i a*_k for an edge (i,k)",
    "I7": "[sz_k, [sz_k, H0]] = c wI_k (a*_k s-_k + a_k s+_k), c fitted",
}


@dataclass(frozen=True)
class IdentityResult:
    identity_id: str
    lhs_norm: float
    rhs_norm: float
    residual: float
    relative_residual: float
    passed: bool
    scalar_factor: float | None = None
    context: dict = field(default_factory=dict)

    @property
    def description(self) -> str:
        return DESCRIPTIONS[self.identity_id]


def elementary(d: int, i: int, j: int) -> np.ndarray:
    """``E_{i,j}`` of size ``d`` with 1-based indices."""
    e = np.zeros((d, d))
    e[i - 1, j - 1] = 1.0
    return e


def _exact(identity_id, lhs, rhs, tol, **context) -> IdentityResult:
    res, rel = relative_residual(lhs, rhs)
    return IdentityResult(identity_id, float(np.linalg.norm(lhs)), float(np.linalg.norm(rhs)),
                          res, rel, rel <= tol, None, context)


def _m(space, desc, params=None, edges=None):
    return np.asarray(build(desc, params, space, edges=edges).matrix)


def _need_two(space: TruncatedSpace, identity_id: str):
    if space.M != 2:
        raise PreconditionError(f"{identity_id} is a two-cavity identity (M={space.M})")


def verify_identity(identity_id: str, space: TruncatedSpace, params: ModelParams | None = None,
                    *, n: int | None = None, edge: Sequence[int] | None = None,
                    edges: Sequence[Sequence[int]] | None = None, k: int | None = None,
                    tol: float = EXACT_TOL) -> IdentityResult:
    """Evaluate one catalog identity and compare both sides.

    ``n`` selects the charge block for I4/I5; ``edge`` the pair and ``edges``
    the hopping graph for I6; ``k`` the cavity for I7. Exact identities pass
    when the relative Frobenius residual is at most ``tol``; I7 first fits the
    scalar ``c`` by least squares.
    """
    if identity_id not in IDENTITY_IDS:
        raise ValueError(f"unknown identity {identity_id!r}; known: {', '.join(IDENTITY_IDS)}")

    if identity_id in ("I1", "I2"):
        _need_two(space, identity_id)
        if params is None:
            raise ValueError(f"{identity_id} needs model parameters")
        H0 = _m(space, "drift", params)
        sz = _m(space, "sigma_z(1)")
        A1, A2 = _m(space, "A1"), _m(space, "A2")
        w = params.omega_I[0]
        if identity_id == "I1":
            return _exact("I1", A1 - A2, commutator(H0, sz) / (2 * w), tol)
        return _exact("I2", A1 + A2, commutator(commutator(H0, sz), sz) / (4 * w), tol)

    if identity_id == "I3":
        _need_two(space, identity_id)
        HH = _m(space, "hop(1,2)")
        c = commutator(_m(space, "number(1)"), HH)
        r5 = _exact("I3", _m(space, "A5"), (HH + c) / 2, tol)
        r6 = _exact("I3", _m(space, "A6"), (HH - c) / 2, tol)
        worst = r5 if r5.relative_residual >= r6.relative_residual else r6
        return IdentityResult("I3", max(r5.lhs_norm, r6.lhs_norm), max(r5.rhs_norm, r6.rhs_norm),
                              max(r5.residual, r6.residual), worst.relative_residual,
                              r5.passed and r6.passed, None,
                              {"A5_residual": r5.residual, "A6_residual": r6.residual})

    if identity_id in ("I4", "I5"):
        _need_two(space, identity_id)
        if n is None or not 1 <= n <= space.K:
            raise PreconditionError(f"{identity_id} needs a block 1 <= n <= K={space.K}, got n={n}")
        desc = "A3" if identity_id == "I4" else "A4"
        X = project_joint(build(desc, None, space), n, 0, embed=True)
        A6 = project_block(build("A6", None, space), n)
        d = 4 * n
        if identity_id == "I4":
            rhs = sqrt(n) * sqrt(n - 1) * elementary(d, 1, 4)
        else:
            rhs = n * elementary(d, 2, 3)
        return _exact(identity_id, commutator(X, A6), rhs, tol, n=n)

    if identity_id == "I6":
        if edge is None:
            raise ValueError("I6 needs an edge (i, k)")
        i, kk = int(edge[0]), int(edge[1])
        graph = edges if edges is not None else [(i, kk)]
        HH = _m(space, "hop_sum", edges=graph)
        ni, nk = _m(space, f"number({i})"), _m(space, f"number({kk})")
        lhs = commutator(ni, commutator(HH, nk))
        return _exact("I6", lhs, _m(space, f"hop({i},{kk})"), tol, edge=[i, kk])

    # I7: scalar-class
    if params is None:
        raise ValueError("I7 needs model parameters")
    if k is None:
        raise ValueError("I7 needs a cavity index k")
    sz = _m(space, f"sigma_z({k})")
    lhs = commutator(sz, commutator(sz, _m(space, "drift", params)))
    rhs = params.omega_I[k - 1] * _m(space, f"jc_coupling({k})")
    denom = float(np.vdot(rhs, rhs).real)
    c = float(np.vdot(rhs, lhs).real / denom) if denom > 0 else 0.0
    res, rel = relative_residual(lhs, c * rhs)
    return IdentityResult("I7", float(np.linalg.norm(lhs)), float(np.linalg.norm(rhs)),
                          res, rel, rel <= tol and c != 0.0, c, {"k": k})


# --- elementary-matrix construction -----------------------------------------------

@dataclass(frozen=True)
class ConstructionStep:
    label: str
    target: tuple[int, int]
    matrix: np.ndarray = field(repr=False)
    scalar: float
    off_target: float
    alpha: float | None
    passed: bool


@dataclass(frozen=True)
class ConstructionResult:
    n: int
    steps: tuple[ConstructionStep, ...]
    tol: float

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.steps) and len(self.superdiagonal()) == 4 * self.n - 1

    @property
    def failing_step(self) -> ConstructionStep | None:
        return next((s for s in self.steps if not s.passed), None)

    @property
    def alphas(self) -> dict[str, float]:
        return {s.label: s.alpha for s in self.steps if s.alpha is not None}

    def superdiagonal(self) -> list[ConstructionStep]:
        """The certified ``E_{i,i+1}`` outputs, ordered by ``i``."""
        best = {}
        for s in self.steps:
            if s.passed and s.target[1] == s.target[0] + 1 and s.target not in best:
                best[s.target] = s
        return [best[key] for key in sorted(best)]


class _Builder:
    """Keeps the certified elementary matrices and records each construction step."""

    def __init__(self, d: int, tol: float):
        self.d = d
        self.tol = tol
        self.known: dict[tuple[int, int], np.ndarray] = {}
        self.steps: list[ConstructionStep] = []

    def certify(self, label, target, mat, alpha=None) -> bool:
        i, j = target
        scalar = float(mat[i - 1, j - 1].real)
        rest = mat - scalar * elementary(self.d, i, j)
        norm = float(np.linalg.norm(mat))
        off = float(np.linalg.norm(rest)) / norm if norm > 0 else float("inf")
        ok = norm > 0 and abs(scalar) > self.tol * norm and off <= self.tol
        self.steps.append(ConstructionStep(label, target, mat, scalar, off, alpha, ok))
        if ok:
            unit = np.real_if_close(mat / scalar)
            self.known[target] = unit
            self.known[(j, i)] = unit.T
        return ok

    def get(self, i: int, j: int) -> np.ndarray:
        """``E_{i,j}`` from the known set, via ``E_ij = [E_{i,i+1}, E_{i+1,j}]`` chains."""
        if (i, j) in self.known:
            return self.known[(i, j)]
        if i == j:
            raise ValueError("diagonal elements are not produced by this recipe")
        if i < j:
            mat = commutator(self.get(i, i + 1), self.get(i + 1, j))
        else:
            mat = self.get(j, i).T
        self.known[(i, j)] = mat
        if i < j:
            self.known[(j, i)] = mat.T
        return mat

    def fit(self, label, target, base, correction) -> bool:
        """Certify ``base + alpha * E_correction`` with ``alpha`` from least squares."""
        y = self.get(*correction)
        alpha = -float(np.vdot(y, base).real / np.vdot(y, y).real)
        return self.certify(label, target, base + alpha * y, alpha)


def construct_E_generators(space: TruncatedSpace, n: int, tol: float = 1e-10) -> ConstructionResult:
    """Build ``E_{1,2}, ..., E_{4n-1,4n}`` on the charge-n block from the ladder operators.

    Uses only ``A1^(n,m)``, ``A3^(n,0)``, ``A3^(n,1)``, ``A6^(n)``, their
    transposes and commutators. Correction constants are fitted by least
    squares against the known off-target element and recorded per step.
    Stops at the first step whose output is not proportional to its target.
    """
    if space.M != 2:
        raise PreconditionError(f"the construction is for two cavities (M={space.M})")
    if not 2 <= n <= space.K:
        raise PreconditionError(f"need 2 <= n <= K={space.K}, got n={n}")

    d = 4 * n
    b = _Builder(d, tol)
    A6 = project_block(build("A6", None, space), n).real
    A1op, A3op = build("A1", None, space), build("A3", None, space)

    def A1(nl):
        return project_joint(A1op, n, nl, embed=True).real

    A3_0 = project_joint(A3op, n, 0, embed=True).real
    A3_1 = project_joint(A3op, n, 1, embed=True).real

    def run() -> None:
        # sl(6) on indices 1..6
        steps = [
            ("E12 from A3^(n,0)", (1, 2), lambda: A3_0),
            ("E14 = [A3^(n,0), A6]", (1, 4), lambda: commutator(A3_0, A6)),
            ("E23 = [A4^(n,0), A6]", (2, 3), lambda: commutator(A3_0.T, A6)),
            ("E13 = [E14, A4^(n,1)]", (1, 3), lambda: commutator(b.get(1, 4), A3_1.T)),
            ("E34 = [E31, E14]", (3, 4), lambda: commutator(b.get(3, 1), b.get(1, 4))),
            ("E45 = [E43, A1^(n,1)]", (4, 5), lambda: commutator(b.get(4, 3), A1(1))),
            ("E56 = [E54, A1^(n,1)] + E34", (5, 6),
             lambda: commutator(b.get(5, 4), A1(1)) + b.get(3, 4)),
        ]
        for label, target, make in steps:
            if not b.certify(label, target, make()):
                return

        # grow sl(4m+2) to sl(4m+6)
        for m in range(1, n - 1):
            p = 4 * m
            if not b.fit(f"m={m}: E{p+2},{p+3}", (p + 2, p + 3),
                         commutator(b.get(p + 2, p - 1), A6), (p - 2, p - 1)):
                return
            if not b.fit(f"m={m}: E{p+2},{p+4}", (p + 2, p + 4),
                         commutator(b.get(p + 2, p), A6), (p - 2, p)):
                return
            if not b.fit(f"m={m}: E{p+2},{p+5}", (p + 2, p + 5),
                         commutator(b.get(p + 2, p + 1), A6), (p - 2, p + 1)):
                return
            if not b.certify(f"m={m}: E{p+3},{p+4}", (p + 3, p + 4),
                             commutator(b.get(p + 3, p + 2), b.get(p + 2, p + 4))):
                return
            if not b.certify(f"m={m}: E{p+4},{p+5}", (p + 4, p + 5),
                             commutator(b.get(p + 4, p + 2), b.get(p + 2, p + 5))):
                return
            if not b.fit(f"m={m}: E{p+5},{p+6}", (p + 5, p + 6),
                         commutator(b.get(p + 5, p + 4), A1(m + 1)), (p + 3, p + 4)):
                return

        # last four indices
        q = 4 * n
        if not b.fit(f"E{q-2},{q-1}", (q - 2, q - 1),
                     commutator(b.get(q - 2, q - 5), A6), (q - 6, q - 5)):
            return
        if not b.fit(f"E{q-2},{q}", (q - 2, q),
                     commutator(b.get(q - 2, q - 3), A6), (q - 6, q - 3)):
            return
        b.certify(f"E{q-1},{q}", (q - 1, q), commutator(b.get(q - 1, q - 2), b.get(q - 2, q)))

    run()
    return ConstructionResult(n, tuple(b.steps), tol)
