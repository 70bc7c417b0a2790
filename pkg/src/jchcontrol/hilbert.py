"""Excitation-truncated basis of the M-cavity atom-photon space.

A basis vector is an occupation configuration ``(m_1, b_1, ..., m_M, b_M)``
with photon numbers ``m_i >= 0`` and atomic bits ``b_i``. States are grouped
into charge blocks by total excitation ``n = sum(m_i + b_i)``. Indices are
0-based here; reports convert to 1-based.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Iterator

from .exceptions import ResourceLimitError

#: Default refusal threshold for the number of basis states.
DEFAULT_MAX_STATES = 10**6


@dataclass(frozen=True, order=True)
class BasisState:
    """One occupation configuration, stored as ``((m_1, b_1), ..., (m_M, b_M))``."""

    occupations: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for m, b in self.occupations:
            if m < 0 or b not in (0, 1):
                raise ValueError(f"invalid occupation (m={m}, b={b})")

    @classmethod
    def from_flat(cls, flat) -> "BasisState":
        flat = tuple(int(x) for x in flat)
        if len(flat) % 2:
            raise ValueError("flat occupation tuple must have even length")
        return cls(tuple(zip(flat[::2], flat[1::2])))

    @property
    def M(self) -> int:
        return len(self.occupations)

    @property
    def n(self) -> int:
        return sum(m + b for m, b in self.occupations)

    def local_excitation(self, i: int) -> int:
        """``n_i = m_i + b_i`` for the 1-based cavity ``i``."""
        m, b = self.occupations[i - 1]
        return m + b

    def photons(self, i: int) -> int:
        return self.occupations[i - 1][0]

    def atom(self, i: int) -> int:
        return self.occupations[i - 1][1]

    def flat(self) -> tuple[int, ...]:
        return tuple(x for pair in self.occupations for x in pair)


def count_states(M: int, K: int) -> int:
    """Number of configurations with total excitation at most ``K``.

    With ``s`` excited atoms the photons share ``K - s`` quanta among ``M``
    modes with slack, giving ``C(K - s + M, M)`` photon tuples.
    """
    return sum(comb(M, s) * comb(K - s + M, M) for s in range(0, min(M, K) + 1))


def _block_states(M: int, n: int) -> Iterator[BasisState]:
    # lexicographic in (n_1, ..., n_{M-1}, b_1, ..., b_M); n_M is implied by n
    for head in itertools.product(range(n + 1), repeat=M - 1):
        rest = n - sum(head)
        if rest < 0:
            continue
        local = head + (rest,)
        for bits in itertools.product((0, 1), repeat=M):
            if any(b > ni for b, ni in zip(bits, local)):
                continue
            yield BasisState(tuple((ni - b, b) for ni, b in zip(local, bits)))


def two_cavity_order(n: int, n_L: int, b_L: int, b_R: int) -> int:
    """1-based position of ``|n; n_L; b_L, b_R>`` inside the charge-n block (M=2).

    >>> two_cavity_order(2, 0, 0, 1)
    2
    """
    if n < 1:
        raise ValueError("ordering is defined for n >= 1")
    if not 0 <= n_L <= n or b_L not in (0, 1) or b_R not in (0, 1):
        raise ValueError(f"inadmissible coordinates n={n}, n_L={n_L}, b_L={b_L}, b_R={b_R}")
    if b_L > n_L:
        raise ValueError("b_L=1 requires n_L >= 1")
    if b_R > n - n_L:
        raise ValueError("b_R=1 requires n_L <= n - 1")
    return (4 * n_L + 2 * b_L + b_R - 1
            + 2 * (n_L == 0)
            - (n_L == n) * (b_L == 1))


@dataclass(frozen=True, eq=False)
class TruncatedSpace:
    """Ordered basis of the space with total excitation ``<= K``.

    Immutable once built; use :func:`enumerate_basis` to construct.
    """

    M: int
    K: int
    basis: tuple[BasisState, ...]
    block_ranges: tuple[tuple[int, int], ...]
    index_of: dict = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def block_dims(self) -> list[int]:
        return [stop - start for start, stop in self.block_ranges]

    def block_slice(self, n: int) -> slice:
        if not 0 <= n <= self.K:
            raise ValueError(f"charge block {n} outside 0..{self.K}")
        start, stop = self.block_ranges[n]
        return slice(start, stop)

    def joint_indices(self, n: int, n_L: int) -> list[int]:
        """Global indices of the states with ``N = n`` and ``N_1 = n_L``."""
        if not 0 <= n_L <= n:
            raise ValueError(f"need 0 <= n_L <= n, got n_L={n_L}, n={n}")
        sl = self.block_slice(n)
        return [k for k in range(sl.start, sl.stop)
                if self.basis[k].local_excitation(1) == n_L]

    def __repr__(self):
        return f"TruncatedSpace(M={self.M}, K={self.K}, dim={self.dim})"


def enumerate_basis(M: int, K: int, max_states: int = DEFAULT_MAX_STATES) -> TruncatedSpace:
    """Build the truncated basis grouped by charge, canonical order within blocks.

    For M=2 the within-block order coincides with :func:`two_cavity_order`.
    """
    if M < 1:
        raise ValueError(f"need at least one cavity, got M={M}")
    if K < 0:
        raise ValueError(f"cutoff must be non-negative, got K={K}")
    total = count_states(M, K)
    if total > max_states:
        raise ResourceLimitError(
            f"M={M}, K={K} needs {total} basis states (limit {max_states})")

    basis: list[BasisState] = []
    ranges = []
    for n in range(K + 1):
        start = len(basis)
        block = list(_block_states(M, n))
        if M == 2 and n >= 1:
            block.sort(key=lambda s: two_cavity_order(
                n, s.local_excitation(1), s.atom(1), s.atom(2)))
        basis.extend(block)
        ranges.append((start, len(basis)))
    index_of = {s: k for k, s in enumerate(basis)}
    return TruncatedSpace(M, K, tuple(basis), tuple(ranges), index_of)


def block_dimensions(M: int, K: int, max_states: int = DEFAULT_MAX_STATES) -> list[int]:
    """Charge-block dimensions ``d_0, ..., d_K``."""
    return enumerate_basis(M, K, max_states).block_dims()


def multiplicity_bound(M: int, n: int) -> int:
    """Upper bound ``2^M (n+1)^(M-1)`` on the charge-n multiplicity."""
    return 2**M * (n + 1) ** (M - 1)
