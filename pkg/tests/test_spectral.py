from math import pi, sqrt

import mpmath
import numpy as np
import pytest
import scipy.linalg
import sympy
from hypothesis import given, settings, strategies as st

from jchcontrol.hilbert import enumerate_basis
from jchcontrol.operators import ModelParams, build, project_block
from jchcontrol.spectral import (find_recurrence_time, recurrence_error, relative_bound_check,
                                 spectrum)

FAMILY = ["drift", "drift + sigma_z(1)", "drift + sigma_x(1)", "drift + hop_sum", "drift + identity"]


def build_sum(desc, params, space):
    parts = [build(p.strip(), params, space, edges=[(1, 2)]) for p in desc.split("+")]
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    return total


def direct_error(H, t_plus, t_minus):
    diff = scipy.linalg.expm(1j * t_plus * H) - scipy.linalg.expm(1j * t_minus * H)
    return np.linalg.norm(diff, 2)


def test_spectrum_of_charge():
    ev = spectrum(build("charge_N", None, enumerate_basis(2, 2)))
    assert np.allclose(ev, [0] + [1] * 4 + [2] * 8, atol=1e-12)


def test_spectrum_of_identity(space_2_3):
    assert np.allclose(spectrum(build("identity", None, space_2_3)), 1.0)


def test_spectrum_reconstruction(space_2_3, rng):
    H = build("jch_full", ModelParams.random(2, rng, [(1, 2)]), space_2_3)
    w, v = spectrum(H, eigenvectors=True)
    assert np.all(np.diff(w) >= 0)
    assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - H.matrix) <= 1e-10


def test_drift_block_matches_characteristic_polynomial(unit_params_2):
    space = enumerate_basis(2, 1)
    block = project_block(build("drift", unit_params_2, space), 1).real
    # exact characteristic polynomial of the integer matrix, solved independently
    x = sympy.symbols("x")
    poly = sympy.Matrix(block.round().astype(int)).charpoly(x).as_expr()
    roots = sorted(float(r) for r in sympy.real_roots(sympy.Poly(poly, x)))
    assert np.allclose(block, block.round())
    assert np.allclose(np.linalg.eigvalsh(block), roots, atol=1e-12)


def test_spectrum_rejects_non_hermitian(space_2_3):
    with pytest.raises(ValueError):
        spectrum(build("A1", None, space_2_3))


@given(st.integers(0, 10**6))
@settings(max_examples=20)
def test_spectral_error_matches_operator_norm(seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    H = (x + x.conj().T) / 2
    tp, tm = float(rng.uniform(0, 20)), float(rng.uniform(-5, 0))
    assert abs(recurrence_error(np.linalg.eigvalsh(H), tp, tm) - direct_error(H, tp, tm)) <= 1e-12


def test_integer_spectrum_returns_after_two_pi():
    N = build("charge_N", None, enumerate_basis(2, 2))
    r = find_recurrence_time(N, -1.0, 1e-9, t_max=10.0, step=1e-3, method="grid")
    assert r.found and r.method == "grid"
    assert r.t_plus == pytest.approx(2 * pi - 1, abs=1e-9)
    assert r.achieved_error <= 1e-9


def test_two_frequencies_against_brute_force_grid():
    # needs q sqrt(2) close to an integer; the first good q is a Pell denominator
    H = np.diag([1.0, sqrt(2)])
    step, t_max, eps = 2e-3, 16000.0, 1e-3
    r = find_recurrence_time(H, -1.0, eps, t_max=t_max, step=step, method="grid")
    assert r.found
    assert direct_error(H, r.t_plus, -1.0) <= eps * (1 + 1e-9)
    # oracle: walk the same grid, sample densely around promising points with direct 2x2 norms
    first = None
    grid = np.arange(0, int(t_max / step) + 1) * step
    coarse = recurrence_error(np.array([1.0, sqrt(2)]), grid, -1.0)
    for k in np.flatnonzero(coarse <= eps + sqrt(2) * step):
        for t in np.linspace(grid[k] - step, grid[k] + step, 401):
            if direct_error(H, t, -1.0) <= eps:
                first = t
                break
        if first is not None:
            break
    assert first is not None
    assert abs(r.t_plus - first) <= 2 * step


def test_grid_reports_best_when_not_found():
    H = np.diag([1.0, sqrt(2), sqrt(3)])
    r = find_recurrence_time(H, -1.0, 1e-6, t_max=50.0, step=1e-2, method="grid")
    assert not r.found and r.t_plus is None
    assert r.achieved_error > 1e-6
    assert r.search_horizon == 50.0


@pytest.mark.parametrize("K", [1, 2, 3, 4])
def test_recurrence_exists_for_drift_family(K, rng):
    space = enumerate_basis(2, K)
    params = ModelParams.random(2, rng, [(1, 2)])
    for desc in FAMILY:
        H = build_sum(desc, params, space)
        r = find_recurrence_time(H, -1.0, 1e-2)
        assert r.found, desc
        assert r.achieved_error <= 1e-2
        assert r.t_plus >= 0
        assert r.truncation_only == ("sigma_x" in desc)


def test_lattice_hit_confirmed_by_high_precision_exponentials(rng):
    space = enumerate_basis(2, 2)
    H = build_sum("drift + hop_sum", ModelParams.random(2, rng, [(1, 2)]), space)
    r = find_recurrence_time(H, -1.0, 1e-2, method="lattice")
    assert r.found
    dps = len(r.t_plus_exact) + 30
    with mpmath.workdps(dps):
        A = H.to_mpmath(dps)
        D = mpmath.expm(1j * mpmath.mpf(r.t_plus_exact) * A) - mpmath.expm(-1j * A)
        err = max(mpmath.svd_c(D, compute_uv=False))
    assert float(err) <= 1e-2
    assert float(err) == pytest.approx(r.achieved_error, rel=1e-6)


def test_recurrence_parameter_validation(space_2_3):
    N = build("charge_N", None, space_2_3)
    with pytest.raises(ValueError):
        find_recurrence_time(N, 1.0, 1e-2)
    with pytest.raises(ValueError):
        find_recurrence_time(N, -1.0, 0.0)
    with pytest.raises(ValueError):
        find_recurrence_time(N, -1.0, 1e-2, step=-1.0)
    with pytest.raises(ValueError):
        find_recurrence_time(N, -1.0, 1e-2, method="magic")


def test_relative_bound_examples():
    one = relative_bound_check(enumerate_basis(1, 1), ModelParams.uniform(1))
    assert one.sigma_max == pytest.approx(1.0) and one.passed
    two = relative_bound_check(enumerate_basis(2, 4), ModelParams.uniform(2))
    # eigenvalues are +-sqrt(nL) +- sqrt(nR); maximum at nL = nR = 2, which meets the bound
    assert two.sigma_max == pytest.approx(2 * sqrt(2), rel=1e-12)
    assert two.bound == pytest.approx(sqrt(8))
    assert two.passed


def test_relative_bound_random(rng):
    for _ in range(5):
        params = ModelParams((1.0, 1.0), (1.0, 1.0), tuple(rng.uniform(0.01, 1.0, 2)))
        rb = relative_bound_check(enumerate_basis(2, 9), params)
        assert rb.passed and rb.margin > 0
        assert rb.bound / rb.sigma_max >= 1


def test_relative_bound_needs_K():
    with pytest.raises(ValueError):
        relative_bound_check(enumerate_basis(2, 0), ModelParams.uniform(2))


def test_relative_bound_blockwise_equals_dense_norm(rng):
    from jchcontrol.spectral import interaction_hamiltonian
    space = enumerate_basis(3, 3)
    params = ModelParams.random(3, rng)
    dense = np.linalg.norm(interaction_hamiltonian(space, params).matrix, 2)
    assert relative_bound_check(space, params).sigma_max == pytest.approx(dense, rel=1e-12)
