import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import unitary_group

from jchcontrol.exceptions import PreconditionError
from jchcontrol.hilbert import enumerate_basis
from jchcontrol.lie import check_rank_condition, lie_closure
from jchcontrol.operators import ModelParams, build, project_block

from oracles import naive_closure_dim

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def random_ah(rng, d):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return x - x.conj().T


def test_pauli_pair_gives_su2():
    cb = lie_closure([1j * SZ, 1j * SX])
    assert cb.dim == 3 and cb.contains_su()


def test_basis_properties(rng):
    cb = lie_closure([random_ah(rng, 3), random_ah(rng, 3)])
    assert cb.dim == 9
    B = cb.basis
    assert np.allclose(B + B.conj().transpose(0, 2, 1), 0, atol=1e-12)
    gram = np.einsum("aij,bij->ab", B.conj(), B).real
    assert np.allclose(gram, np.eye(cb.dim), atol=1e-10)
    assert cb.closure_residual() <= 1e-9


def test_two_cavity_n1_block(unit_params_2):
    space = enumerate_basis(2, 1)
    gens = [1j * project_block(build(d, unit_params_2, space), 1)
            for d in ("drift", "sigma_z(1)", "sigma_z(2)", "hop_sum", "identity")]
    cb = lie_closure(gens)
    assert cb.traceless_dim == 15


def test_rejects_non_antihermitian():
    with pytest.raises(ValueError):
        lie_closure([SZ])
    with pytest.raises(ValueError):
        lie_closure([1j * SZ, 1j * np.eye(3)])
    with pytest.raises(ValueError):
        lie_closure([])


@given(st.integers(0, 10**6))
@settings(max_examples=15)
def test_conjugation_and_rescaling_invariance(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 5))
    gens = [random_ah(rng, d) for _ in range(int(rng.integers(1, 3)))]
    # sometimes use a structured, smaller algebra
    if seed % 2:
        gens = [1j * np.diag(rng.normal(size=d))] + [1j * (np.eye(d, k=1) + np.eye(d, k=-1))]
    base = lie_closure(gens).dim
    U = unitary_group.rvs(d, random_state=seed)
    conj = [U @ g @ U.conj().T for g in gens]
    assert lie_closure(conj).dim == base
    scaled = [g * float(rng.uniform(0.1, 10)) * (-1) ** k for k, g in enumerate(gens)]
    assert lie_closure(scaled).dim == base


@given(st.integers(0, 10**6))
@settings(max_examples=15)
def test_monotone_and_idempotent(seed):
    rng = np.random.default_rng(seed)
    d = 3
    gens = [1j * np.diag(rng.normal(size=d)), 1j * (np.eye(d, k=1) + np.eye(d, k=-1))]
    cb = lie_closure(gens)
    again = lie_closure(list(cb.basis))
    assert again.dim == cb.dim
    bigger = lie_closure(gens + [random_ah(rng, d)])
    assert bigger.dim >= cb.dim


def test_rank_condition_two_cavities(space_2_3, unit_params_2):
    rep = check_rank_condition(space_2_3, ["drift", "sigma_z(1)", "sigma_z(2)", "hop_sum", "identity"],
                               unit_params_2)
    assert rep.passed
    assert [b.target for b in rep.blocks] == [0, 15, 63, 143]
    assert rep.blocks[0].contains_su


def test_abelian_generators_fail(unit_params_2):
    space = enumerate_basis(2, 2)
    rep = check_rank_condition(space, ["sigma_z(1)", "sigma_z(2)", "identity"], unit_params_2)
    assert rep.failing_blocks() == [1, 2]
    # oracle: commuting diagonals span at most the number of distinct generators
    for b in rep.blocks[1:]:
        diag = np.array([np.diag(project_block(build(d, None, space), b.n)).real
                         for d in ("sigma_z(1)", "sigma_z(2)", "identity")])
        assert b.closure_dim == np.linalg.matrix_rank(diag)


def test_rank_condition_rejects_symmetry_breaking(space_2_3, unit_params_2):
    with pytest.raises(PreconditionError):
        check_rank_condition(space_2_3, ["drift", "sigma_x(1)"], unit_params_2)


def test_matches_naive_oracle_small(rng):
    for _ in range(10):
        d = int(rng.integers(1, 5))
        gens = [random_ah(rng, d) for _ in range(int(rng.integers(1, 4)))]
        assert lie_closure(gens).dim == naive_closure_dim(gens)
