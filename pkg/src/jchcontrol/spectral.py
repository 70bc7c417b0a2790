"""Spectra, recurrence times and the interaction relative bound.

For a Hermitian ``H`` with eigenvalues ``lambda_k`` the distance between
``exp(i t+ H)`` and ``exp(i t- H)`` in operator norm is
``max_k |exp(i s lambda_k) - 1|`` with ``s = t+ - t-``, so recurrence is a
simultaneous Diophantine approximation problem for ``s lambda_k / 2 pi``.

Two search strategies are provided. ``grid`` scans ``t+`` on a uniform grid
and refines any grid point that could hide a hit within the Lipschitz bound
of the error function. ``lattice`` computes the spectrum at high precision
and uses LLL reduction to find ``s`` with every phase close to a multiple of
``2 pi``; for generic spectra with many rationally independent eigenvalues
this is the only practical route, since the first return can be
astronomically late. Every lattice hit is re-evaluated at a working
precision well above ``log10(s)`` digits before it is reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import mpmath
import numpy as np

from .hilbert import TruncatedSpace, enumerate_basis
from .operators import BlockOperator, ModelParams, build, project_block

Operator = Union[BlockOperator, np.ndarray]

DEFAULT_GRID_BUDGET = 2_000_000
DEFAULT_MAX_LOG10_HORIZON = 300
_CHUNK = 65_536


def _matrix(op: Operator) -> np.ndarray:
    if isinstance(op, BlockOperator):
        if not op.hermitian:
            raise ValueError(f"{op.name} is not Hermitian")
        return np.asarray(op.matrix)
    mat = np.asarray(op)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("expected a square matrix")
    if np.linalg.norm(mat - mat.conj().T) > 1e-13 * max(1.0, np.linalg.norm(mat)):
        raise ValueError("matrix is not Hermitian")
    return mat


def spectrum(op: Operator, eigenvectors: bool = False):
    """Ascending eigenvalues (and optionally eigenvectors as columns)."""
    mat = _matrix(op)
    if eigenvectors:
        return np.linalg.eigh(mat)
    return np.linalg.eigvalsh(mat)


def recurrence_error(eigenvalues: np.ndarray, t_plus, t_minus: float) -> np.ndarray:
    """``max_k |exp(i t+ lambda_k) - exp(i t- lambda_k)|``, vectorized over ``t_plus``."""
    s = np.atleast_1d(np.asarray(t_plus, dtype=float)) - t_minus
    phases = np.multiply.outer(s, np.asarray(eigenvalues)) / 2
    err = 2 * np.max(np.abs(np.sin(phases)), axis=-1)
    return err if np.ndim(t_plus) else float(err[0])


def smallest_gap(eigenvalues: np.ndarray, tol: float = 1e-9) -> float | None:
    """Smallest spacing between distinct eigenvalues, or None for a single level."""
    ev = np.sort(np.asarray(eigenvalues))
    diffs = np.diff(ev)
    diffs = diffs[diffs > tol * max(1.0, float(np.max(np.abs(ev))))]
    return float(diffs.min()) if diffs.size else None


def default_horizon(eigenvalues: np.ndarray) -> float:
    """``1e4 * 2 pi / gap``, or ``2 pi`` for a degenerate spectrum."""
    gap = smallest_gap(eigenvalues)
    return 1e4 * 2 * math.pi / gap if gap else 2 * math.pi


@dataclass(frozen=True)
class RecurrenceResult:
    """Outcome of a recurrence search.

    ``t_plus`` is a float for display; ``t_plus_exact`` holds all significant
    digits, which matter when ``t_plus`` is far beyond double precision.
    When no hit was found ``t_plus`` is None and ``best_t_plus`` and
    ``achieved_error`` describe the best candidate seen.
    """

    t_minus: float
    epsilon: float
    t_plus: float | None
    t_plus_exact: str | None
    achieved_error: float
    best_t_plus: float
    search_horizon: float
    method: str
    truncation_only: bool = False

    @property
    def found(self) -> bool:
        return self.t_plus is not None


def _refine(ev, t_minus, lo, hi):
    """Local minimum of the recurrence error on ``[lo, hi]`` by golden-section search.

    On a window much shorter than ``pi / max|lambda|`` every term is close to
    ``|lambda_k (s - s_k)|``, so the maximum is unimodal there; its kink at
    the minimum would stall parabolic interpolation.
    """
    def err(x):
        return recurrence_error(ev, x, t_minus)

    a, b = lo, hi
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = err(c), err(d)
    for _ in range(200):
        if b - a <= 4e-16 * max(1.0, abs(b)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = err(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = err(d)
    x, fx = (c, fc) if fc <= fd else (d, fd)
    return float(x), float(fx)


def _grid_search(ev, t_minus, epsilon, t_max, step, budget):
    """First grid-or-refined ``t+`` in ``[0, t_max]`` with error ``<= epsilon``.

    Returns ``(t_plus or None, error, best_t, scanned_up_to)``.
    """
    lip = max(float(np.max(np.abs(ev))), 1e-300)
    slack = lip * step / 2
    n_points = int(math.floor(t_max / step)) + 1
    n_points = min(n_points, budget)
    best_t, best_err = 0.0, math.inf
    for start in range(0, n_points, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, n_points))
        t = idx * step
        err = recurrence_error(ev, t, t_minus)
        k = int(np.argmin(err))
        if err[k] < best_err:
            best_t, best_err = float(t[k]), float(err[k])
        for j in np.flatnonzero(err <= epsilon + slack):
            if err[j] <= epsilon:
                return float(t[j]), float(err[j]), float(t[j]), float(t[-1])
            x, fx = _refine(ev, t_minus, max(0.0, t[j] - step), t[j] + step)
            if fx <= epsilon:
                return x, fx, x, float(t[-1])
            if fx < best_err:
                best_t, best_err = x, fx
    return None, best_err, best_t, (n_points - 1) * step


class _HighPrecisionSpectrum:
    """Eigenvalues of a real symmetric operator at adjustable working precision."""

    def __init__(self, op: Operator):
        self.op = op
        self.exact = isinstance(op, BlockOperator) and bool(op.exact) and not np.any(
            np.asarray(op.matrix).imag)
        self._cache: dict[int, list] = {}
        if not self.exact:
            self._float = [mpmath.mpf(float(x)) for x in spectrum(op)]

    @property
    def max_dps(self) -> int:
        return 10**6 if self.exact else 15

    def eigenvalues(self, dps: int) -> list:
        if not self.exact:
            return self._float
        for cached in sorted(self._cache):
            if cached >= dps:
                return self._cache[cached]
        with mpmath.workdps(dps):
            evals = mpmath.eigsy(self.op.to_mpmath(dps), eigvals_only=True)
            values = sorted(evals[k] for k in range(evals.rows))
        self._cache[dps] = values
        return values


def _hp_error(values: list, s, dps: int):
    with mpmath.workdps(dps):
        return max(abs(2 * mpmath.sin(s * lam / 2)) for lam in values)


def _lattice_search(op, t_minus, epsilon, max_log10):
    """LLL-based search; returns ``(s as mpf or None, error, best_s, dps)``."""
    from flint import fmpz_mat

    source = _HighPrecisionSpectrum(op)
    best_s, best_err = None, math.inf
    bits = 16
    while True:
        dps = int(2 * bits * 0.302) + 40
        if dps > source.max_dps:
            break
        values = source.eigenvalues(dps)
        with mpmath.workdps(dps):
            cut = mpmath.mpf(10) ** (-(dps // 2))
            distinct = []
            for lam in values:
                if abs(lam) > cut and all(abs(lam - mu) > cut for mu in distinct):
                    distinct.append(lam)
            if not distinct:
                # zero spectrum: any s recurs
                s = mpmath.mpf(-t_minus)
                return s, 0.0, s, dps
            ref = max(distinct, key=abs)
            ratios = [lam / ref for lam in distinct if lam is not ref]
            scale = mpmath.mpf(2) ** (bits + 64)
            pad = 2**64
            D = len(ratios) + 1
            rows = [[pad] + [int(mpmath.nint(scale * r)) for r in ratios]]
            for k in range(len(ratios)):
                row = [0] * D
                row[k + 1] = int(scale)
                rows.append(row)
            reduced = fmpz_mat(rows).lll()
            candidates = sorted({abs(int(reduced[i, 0])) // pad for i in range(D)} - {0})
            two_pi = 2 * mpmath.pi
            for q in candidates:
                s = abs(two_pi * q / ref)
                if s < -t_minus:
                    s = s * mpmath.ceil(-t_minus / s)
                # certify at a precision comfortably above the size of s
                need = int(mpmath.log10(s)) + 30 if s > 1 else 30
                if need > source.max_dps:
                    continue
                cert_values = source.eigenvalues(max(need, dps))
                err = _hp_error(cert_values, s, max(need, dps))
                if err < best_err:
                    best_s, best_err = s, float(err)
                if err <= epsilon:
                    return s, float(err), s, max(need, dps)
        if best_s is not None and mpmath.log10(best_s) > max_log10:
            break
        if bits * 0.302 > max_log10:
            break
        bits += 16
    return None, best_err, best_s, 0


def find_recurrence_time(op: Operator, t_minus: float = -1.0, epsilon: float = 1e-2,
                         t_max: float | None = None, step: float | None = None,
                         method: str = "auto", grid_budget: int = DEFAULT_GRID_BUDGET,
                         max_log10_horizon: float = DEFAULT_MAX_LOG10_HORIZON) -> RecurrenceResult:
    """Find ``t+ >= 0`` with ``||exp(i t+ H) - exp(i t- H)|| <= epsilon``.

    ``method='grid'`` scans ``0, step, ..., t_max`` (default ``t_max`` from
    :func:`default_horizon`, default ``step = epsilon / max|lambda|``) and
    returns the first hit. ``method='lattice'`` searches up to
    ``10**max_log10_horizon``. ``method='auto'`` runs the grid for at most
    ``grid_budget`` points and falls back to the lattice search.
    """
    if t_minus > 0:
        raise ValueError(f"t_minus must be <= 0, got {t_minus}")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if step is not None and not step > 0:
        raise ValueError("step must be positive")
    if t_max is not None and not t_max >= 0:
        raise ValueError("t_max must be non-negative")
    if method not in ("auto", "grid", "lattice"):
        raise ValueError(f"unknown method {method!r}")
    ev = spectrum(op)
    truncation_only = isinstance(op, BlockOperator) and not op.commutes_with_N
    lip = float(np.max(np.abs(ev))) if ev.size else 0.0

    if method in ("auto", "grid"):
        horizon = t_max if t_max is not None else default_horizon(ev)
        h = step if step is not None else (epsilon / lip if lip > 0 else 1.0)
        budget = grid_budget if method == "auto" else 2**62
        t, err, best, reach = _grid_search(ev, t_minus, epsilon, horizon, h, budget)
        if t is not None or method == "grid":
            return RecurrenceResult(t_minus, epsilon, t, repr(t) if t is not None else None,
                                    err, best, horizon if method == "grid" else reach,
                                    "grid", truncation_only)

    s, err, best_s, _ = _lattice_search(op, t_minus, epsilon, max_log10_horizon)
    horizon = 10.0**max_log10_horizon if max_log10_horizon < 308 else math.inf
    best_t = float(best_s + t_minus) if best_s is not None else math.nan
    if s is None:
        return RecurrenceResult(t_minus, epsilon, None, None, err, best_t, horizon,
                                "lattice", truncation_only)
    with mpmath.workdps(int(mpmath.log10(s)) + 30 if s > 1 else 30):
        t_plus = s + t_minus
        text = mpmath.nstr(t_plus, int(mpmath.log10(t_plus)) + 20 if t_plus > 1 else 20)
    return RecurrenceResult(t_minus, epsilon, float(t_plus), text, err, float(t_plus), horizon,
                            "lattice", truncation_only)


@dataclass(frozen=True)
class RelativeBound:
    M: int
    K: int
    sigma_max: float
    bound: float
    rel_slack: float = 1e-12

    @property
    def margin(self) -> float:
        return self.bound - self.sigma_max

    @property
    def passed(self) -> bool:
        return self.sigma_max <= self.bound * (1 + self.rel_slack)


def interaction_hamiltonian(space: TruncatedSpace, params: ModelParams) -> BlockOperator:
    """``sum_k wI_k (a*_k s-_k + a_k s+_k)`` on the truncation."""
    total = None
    for k in range(1, space.M + 1):
        term = params.omega_I[k - 1] * build(f"jc_coupling({k})", params, space)
        total = term if total is None else total + term
    return total


@lru_cache(maxsize=32)
def _coupling_blocks(M: int, K: int) -> tuple:
    """Charge blocks of each unit-strength JC coupling, indexed ``[k-1][n]``."""
    space = enumerate_basis(M, K)
    return tuple(tuple(project_block(build(f"jc_coupling({k})", None, space), n) for n in range(K + 1))
                 for k in range(1, M + 1))


def relative_bound_check(space: TruncatedSpace, params: ModelParams) -> RelativeBound:
    """Compare the largest singular value of the interaction with ``max wI * sqrt(M K)``.

    The interaction's eigenvalues are sums of ``+-wI_k sqrt(n_k)``, so equality
    holds for equal couplings when ``K`` splits evenly over the cavities; the
    comparison therefore allows a relative slack of ``1e-12``.
    """
    if space.K < 1:
        raise ValueError("the bound is stated for K >= 1")
    if params.M != space.M:
        raise ValueError(f"parameters for M={params.M} used on a space with M={space.M}")
    blocks = _coupling_blocks(space.M, space.K)
    # the interaction conserves the excitation number: its norm is the largest block norm
    sigma = max(float(np.linalg.norm(sum(w * blocks[k][n] for k, w in enumerate(params.omega_I)), 2))
                for n in range(space.K + 1))
    bound = max(params.omega_I) * math.sqrt(space.M * space.K)
    return RelativeBound(space.M, space.K, sigma, bound)
