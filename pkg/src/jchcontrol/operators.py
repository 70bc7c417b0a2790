"""Dense matrices of the JCH operators compressed to a truncated space.

Every operator is assembled from products of single-cavity ladder and Pauli
actions in the occupation basis::

    a|m> = sqrt(m)|m-1>      a*|m> = sqrt(m+1)|m+1>
    s-|1> = |0>              s+|0> = |1>
    sz|b> = (2b-1)|b>        sx|b> = |1-b>

Products are applied to the full occupation tuple and only the final state is
tested for membership in the truncation, so the result is exactly the
compression ``P A P``. For operators that commute with the total excitation
number this compression is the block-diagonal restriction and is exact.

Matrix entries are kept both as floats and as an exact ``weight * sqrt(k)``
list so that high-precision copies can be rebuilt without float rounding in
the radicals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import sqrt
from typing import Iterable, Mapping, Sequence

import numpy as np

from .hilbert import BasisState, TruncatedSpace
from .linalg import expm_hermitian

Edge = tuple[int, int]


def _edge(e: Sequence[int]) -> Edge:
    i, j = int(e[0]), int(e[1])
    if i == j:
        raise ValueError(f"self-loop ({i},{j}) is not a hopping edge")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class ModelParams:
    """Frequencies of the drift and hopping terms; cavities are 1-based.

    ``omega_H`` maps edges ``(i, j)``, ``i < j``, to hopping rates and is only
    used by ``jch_full`` (and as the default edge set for ``hop_sum``).
    """

    omega_P: tuple[float, ...]
    omega_A: tuple[float, ...]
    omega_I: tuple[float, ...]
    omega_H: Mapping[Edge, float] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("omega_P", "omega_A", "omega_I"):
            vals = tuple(float(v) for v in getattr(self, name))
            if not all(v > 0 and np.isfinite(v) for v in vals):
                raise ValueError(f"{name} must be strictly positive and finite, got {vals}")
            object.__setattr__(self, name, vals)
        if not len(self.omega_P) == len(self.omega_A) == len(self.omega_I):
            raise ValueError("omega_P, omega_A, omega_I must have equal length")
        hop = {}
        for e, w in dict(self.omega_H).items():
            hop[_edge(e)] = float(w)
        object.__setattr__(self, "omega_H", dict(sorted(hop.items())))

    @property
    def M(self) -> int:
        return len(self.omega_P)

    @classmethod
    def uniform(cls, M: int, value: float = 1.0, edges: Iterable[Sequence[int]] = ()) -> "ModelParams":
        v = (float(value),) * M
        return cls(v, v, v, {_edge(e): float(value) for e in edges})

    @classmethod
    def random(cls, M: int, rng: np.random.Generator, edges: Iterable[Sequence[int]] = (),
               low: float = 0.2, high: float = 1.0) -> "ModelParams":
        def draw():
            return tuple(float(x) for x in rng.uniform(low, high, size=M))
        return cls(draw(), draw(), draw(),
                   {_edge(e): float(rng.uniform(low, high)) for e in edges})

    def scaled(self, factor: float) -> "ModelParams":
        f = float(factor)
        return ModelParams(tuple(f * w for w in self.omega_P),
                           tuple(f * w for w in self.omega_A),
                           tuple(f * w for w in self.omega_I),
                           {e: f * w for e, w in self.omega_H.items()})


# exact entries: (row, col, weight, radicand) meaning weight * sqrt(radicand)
ExactEntry = tuple[int, int, float, int]


@dataclass(frozen=True, eq=False)
class BlockOperator:
    """Dense operator on a truncated space plus structural flags.

    ``commutes_with_N`` marks operators whose compression is block-diagonal
    and therefore exact; ``hermitian`` marks physical Hamiltonians.
    """

    space: TruncatedSpace
    matrix: np.ndarray
    hermitian: bool
    commutes_with_N: bool
    name: str
    exact: tuple[ExactEntry, ...] = field(default=(), repr=False)

    def __post_init__(self):
        self.matrix.setflags(write=False)

    def block(self, n: int) -> np.ndarray:
        return project_block(self, n)

    def _combine(self, other: "BlockOperator", sign: float) -> "BlockOperator":
        if other.space is not self.space:
            raise ValueError("operators live on different truncated spaces")
        exact = self.exact + tuple((r, c, sign * w, k) for r, c, w, k in other.exact)
        op = "+" if sign > 0 else "-"
        return BlockOperator(self.space, self.matrix + sign * other.matrix,
                             self.hermitian and other.hermitian,
                             self.commutes_with_N and other.commutes_with_N,
                             f"{self.name} {op} {other.name}", exact)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __rmul__(self, scalar):
        s = float(scalar)
        return BlockOperator(self.space, s * self.matrix, self.hermitian, self.commutes_with_N,
                             f"{s:g}*{self.name}", tuple((r, c, s * w, k) for r, c, w, k in self.exact))

    def to_mpmath(self, dps: int):
        """Real mpmath matrix rebuilt from the exact entries at ``dps`` digits."""
        import mpmath

        if np.iscomplexobj(self.matrix) and np.any(self.matrix.imag):
            raise ValueError("high-precision copies are only provided for real operators")
        with mpmath.workdps(dps):
            out = mpmath.zeros(self.space.dim, self.space.dim)
            for r, c, w, k in self.exact:
                out[r, c] += mpmath.mpf(w) * mpmath.sqrt(k)
        return out


# --- descriptors --------------------------------------------------------------

_DESCRIPTOR = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\(([^)]*)\))?\s*$")
_NO_ARGS = {"identity", "charge_N", "hop_sum", "drift", "jch_full",
            "A1", "A2", "A3", "A4", "A5", "A6"}
_ONE_ARG = {"sigma_z", "sigma_x", "number", "local_N", "jc_coupling"}
_TWO_ARGS = {"hop"}
# N-preserving except the atomic flip
_BREAKS_N = {"sigma_x"}
_NON_HERMITIAN = {"A1", "A2", "A3", "A4", "A5", "A6"}


def parse_descriptor(descriptor: str) -> tuple[str, tuple[int, ...]]:
    """Split ``"hop(1,2)"`` into ``("hop", (1, 2))``; validates arity."""
    m = _DESCRIPTOR.match(descriptor)
    if not m:
        raise ValueError(f"cannot parse operator descriptor {descriptor!r}")
    name, argstr = m.group(1), m.group(2)
    args = tuple(int(a) for a in argstr.split(",")) if argstr and argstr.strip() else ()
    if name in _NO_ARGS:
        expected = 0
    elif name in _ONE_ARG:
        expected = 1
    elif name in _TWO_ARGS:
        expected = 2
    else:
        raise ValueError(f"unknown operator {name!r}")
    if len(args) != expected:
        raise ValueError(f"{name} takes {expected} index argument(s), got {args}")
    return name, args


# A factor is (kind, cavity); a term is (weight, factors applied right-to-left).
Factor = tuple[str, int]
Term = tuple[float, tuple[Factor, ...]]


def _jc(i: int) -> list[tuple[float, tuple[Factor, ...]]]:
    return [(1.0, (("ad", i), ("sm", i))), (1.0, (("a", i), ("sp", i)))]


def _hop(i: int, j: int) -> list[Term]:
    return [(1.0, (("ad", i), ("a", j))), (1.0, (("a", i), ("ad", j)))]


def _terms(name: str, args: tuple[int, ...], params: ModelParams | None,
           M: int, edges: Iterable[Edge] | None) -> list[Term]:
    if name == "identity":
        return [(1.0, ())]
    if name == "sigma_z":
        return [(1.0, (("sz", args[0]),))]
    if name == "sigma_x":
        return [(1.0, (("sx", args[0]),))]
    if name == "number":
        return [(1.0, (("ad", args[0]), ("a", args[0])))]
    if name == "local_N":
        i = args[0]
        return [(1.0, (("ad", i), ("a", i))), (0.5, (("sz", i),)), (0.5, ())]
    if name == "charge_N":
        out = []
        for i in range(1, M + 1):
            out += _terms("local_N", (i,), params, M, edges)
        return out
    if name == "jc_coupling":
        return _jc(args[0])
    if name == "hop":
        return _hop(*args)
    if name == "hop_sum":
        out = []
        for i, j in edges:
            out += _hop(i, j)
        return out
    if name in ("drift", "jch_full"):
        if params is None:
            raise ValueError(f"{name} needs model parameters")
        out = []
        for i in range(1, M + 1):
            out.append((params.omega_P[i - 1], (("ad", i), ("a", i))))
            out.append((params.omega_A[i - 1], (("sz", i),)))
            out += [(params.omega_I[i - 1] * w, f) for w, f in _jc(i)]
        if name == "jch_full":
            for (i, j), w in params.omega_H.items():
                out += [(w * u, f) for u, f in _hop(i, j)]
        return out
    # two-cavity A-operators; L = cavity 1, R = cavity 2
    return {
        "A1": [(1.0, (("ad", 1), ("sm", 1)))],
        "A2": [(1.0, (("a", 1), ("sp", 1)))],
        "A3": [(1.0, (("ad", 2), ("sm", 2)))],
        "A4": [(1.0, (("a", 2), ("sp", 2)))],
        "A5": [(1.0, (("ad", 1), ("a", 2)))],
        "A6": [(1.0, (("a", 1), ("ad", 2)))],
    }[name]


def _apply(factors: tuple[Factor, ...], flat: list[int]):
    """Apply factors right-to-left; return ``(new_flat, sign, radicand)`` or None."""
    state = list(flat)
    sign, rad = 1.0, 1
    for kind, i in reversed(factors):
        mi, bi = 2 * (i - 1), 2 * (i - 1) + 1
        if kind == "a":
            if state[mi] == 0:
                return None
            rad *= state[mi]
            state[mi] -= 1
        elif kind == "ad":
            state[mi] += 1
            rad *= state[mi]
        elif kind == "sm":
            if state[bi] == 0:
                return None
            state[bi] = 0
        elif kind == "sp":
            if state[bi] == 1:
                return None
            state[bi] = 1
        elif kind == "sz":
            sign *= 2 * state[bi] - 1
        elif kind == "sx":
            state[bi] = 1 - state[bi]
        else:  # pragma: no cover - internal table
            raise AssertionError(kind)
    return state, sign, rad


def build(descriptor: str, params: ModelParams | None, space: TruncatedSpace,
          edges: Iterable[Sequence[int]] | None = None) -> BlockOperator:
    """Build a named operator on ``space``.

    ``hop_sum`` uses unit weights on ``edges`` (default: the keys of
    ``params.omega_H``); ``jch_full`` uses the rates in ``params.omega_H``.
    """
    name, args = parse_descriptor(descriptor)
    M = space.M
    for i in args:
        if not 1 <= i <= M:
            raise ValueError(f"cavity index {i} out of range 1..{M} in {descriptor!r}")
    if name == "hop" and args[0] == args[1]:
        raise ValueError("hop needs two distinct cavities")
    if name in _NON_HERMITIAN and M != 2:
        raise ValueError(f"{name} is defined for two cavities only (M={M})")
    if params is not None and params.M != M:
        raise ValueError(f"parameters for M={params.M} used on a space with M={M}")
    edge_list: list[Edge] | None = None
    if name == "hop_sum":
        src = edges if edges is not None else (params.omega_H.keys() if params else None)
        if src is None:
            raise ValueError("hop_sum needs an edge set")
        edge_list = sorted({_edge(e) for e in src})
        for e in edge_list:
            if not all(1 <= v <= M for v in e):
                raise ValueError(f"edge {e} out of range for M={M}")
    if name == "jch_full" and params is not None:
        for e in params.omega_H:
            if not all(1 <= v <= M for v in e):
                raise ValueError(f"edge {e} out of range for M={M}")

    terms = _terms(name, args, params, M, edge_list)
    exact: list[ExactEntry] = []
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    index_of = space.index_of
    for col, state in enumerate(space.basis):
        flat = list(state.flat())
        for weight, factors in terms:
            hit = _apply(factors, flat)
            if hit is None:
                continue
            new, sign, rad = hit
            row = index_of.get(BasisState.from_flat(new))
            if row is None:
                continue  # left the truncation
            w = weight * sign
            exact.append((row, col, w, rad))
            mat[row, col] += w * sqrt(rad)

    canon = name if not args else f"{name}({','.join(map(str, args))})"
    if name == "hop_sum":
        canon = "hop_sum[" + ";".join(f"{i}-{j}" for i, j in edge_list) + "]"
    return BlockOperator(space, mat, hermitian=name not in _NON_HERMITIAN,
                         commutes_with_N=name not in _BREAKS_N, name=canon, exact=tuple(exact))


def project_block(op: BlockOperator, n: int) -> np.ndarray:
    """Charge-n diagonal block ``P_n A P_n`` as a ``d_n x d_n`` array."""
    sl = op.space.block_slice(n)
    return np.array(op.matrix[sl, sl])


def project_joint(op: BlockOperator, n: int, n_L: int, embed: bool = False) -> np.ndarray:
    """Compression to the joint eigenspace ``N = n``, ``N_1 = n_L`` (two cavities).

    Returns the 2x2 or 4x4 compression, or with ``embed=True`` the
    ``d_n x d_n`` matrix ``Q A^(n) Q`` in the block's own coordinates.
    """
    space = op.space
    if space.M != 2:
        raise ValueError("joint blocks are defined for two cavities")
    if not 0 <= n_L <= n <= space.K:
        raise ValueError(f"need 0 <= n_L <= n <= K, got n_L={n_L}, n={n}, K={space.K}")
    sl = space.block_slice(n)
    local = [k - sl.start for k in space.joint_indices(n, n_L)]
    block = project_block(op, n)
    if not embed:
        return np.array(block[np.ix_(local, local)])
    out = np.zeros_like(block)
    out[np.ix_(local, local)] = block[np.ix_(local, local)]
    return out


def propagate(schedule: Sequence[tuple[float, BlockOperator]],
              space: TruncatedSpace | None = None) -> np.ndarray:
    """Ordered product ``exp(i dt_1 H_1) ... exp(i dt_k H_k)`` of a piecewise-constant schedule.

    An empty schedule gives the identity on ``space``.
    """
    if space is None:
        if not schedule:
            raise ValueError("an empty schedule needs an explicit space")
        space = schedule[0][1].space
    u = np.eye(space.dim, dtype=complex)
    for dt, h in schedule:
        if h.space is not space:
            raise ValueError("schedule mixes operators from different spaces")
        if dt < 0:
            raise ValueError(f"negative duration {dt}")
        if not h.hermitian:
            raise ValueError(f"{h.name} is not Hermitian")
        u = u @ expm_hermitian(np.asarray(h.matrix), dt)
    return u
