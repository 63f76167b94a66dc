import numpy as np
import pytest
from scipy.stats import unitary_group

from gateuniv.errors import ResourceError, UnsupportedError
from gateuniv.gates import H, I2, T
from gateuniv.gateset import FamilyMode, gamma_N, make_gateset
from gateuniv.moments import (exact_moment, frame_potential_mc, haar_reference, jackknife_stderr,
                              moment_operators)

from oracles import enumerate_group, haar_trace_moment, trace_moment


def test_pauli_m4_matches_enumeration(pauli):
    fam = gamma_N(pauli, 1)
    elements = enumerate_group([op.to_dense() for op in fam.members])
    assert len(elements) == 8
    assert trace_moment(elements) == pytest.approx(4.0)
    assert exact_moment(fam).exact == 4


def test_clifford1_m4_matches_enumeration(clifford1):
    fam = gamma_N(clifford1, 1)
    elements = enumerate_group([op.to_dense() for op in fam.members])
    assert trace_moment(elements) == pytest.approx(2.0)
    assert exact_moment(fam).exact == 2


def test_ht_is_a_design(ht):
    assert exact_moment(gamma_N(ht, 1)).exact == 2


def test_ht_eighth_moment_is_catalan(ht):
    # Haar average of |tr U|^8 over SU(2) is the Catalan number C_4 = 14
    assert exact_moment(gamma_N(ht, 1), k=4).exact == 14


def test_identity_gate_fixes_everything():
    gs = make_gateset(2, 1, [I2])
    assert exact_moment(gamma_N(gs, 1)).exact == 16


def test_single_qubit_set_is_not_a_design_on_two_qubits(ht):
    # only local gates and SWAP: the group is not dense in SU(4)
    assert exact_moment(gamma_N(ht, 2)).exact == 3


def test_clifford2_local_generators_and_cz():
    from gateuniv.gates import CZ, S
    gens = [np.kron(H, I2), np.kron(I2, H), np.kron(S, I2), np.kron(I2, S), CZ]
    assert exact_moment(gamma_N(make_gateset(2, 2, gens), 2)).exact == 2


def test_clifford2_dense_and_matrix_free(clifford2):
    fam = gamma_N(clifford2, 2)
    assert exact_moment(fam, method="dense").exact == 2
    assert exact_moment(fam, method="matrix-free").exact == 2


def test_full_orbit_of_one_qubit_gates_lacks_swaps(ht):
    # embeddings of 1-qudit gates never move qudits, so the full orbit is SU(2) x SU(2)
    assert exact_moment(gamma_N(ht, 2, FamilyMode.FULL_ORBIT)).exact == 4
    assert exact_moment(gamma_N(ht, 2, FamilyMode.SWAP_FORM)).exact == 3


@pytest.fixture
def random_pair():
    u = unitary_group.rvs(4, random_state=np.random.default_rng(21))
    return make_gateset(2, 2, [u, np.kron(H, I2)], ["U", "H0"])


@pytest.mark.parametrize("N", [2, 3])
def test_full_orbit_matches_swap_form_universal(random_pair, N):
    swap = exact_moment(gamma_N(random_pair, N, FamilyMode.SWAP_FORM)).exact
    full = exact_moment(gamma_N(random_pair, N, FamilyMode.FULL_ORBIT)).exact
    assert swap == full == 2


@pytest.mark.parametrize("N", [2, 3])
def test_full_orbit_matches_swap_form_two_qubit(clifford2, N):
    swap = exact_moment(gamma_N(clifford2, N, FamilyMode.SWAP_FORM)).exact
    full = exact_moment(gamma_N(clifford2, N, FamilyMode.FULL_ORBIT)).exact
    assert swap == full == 2


def test_distinct_generators_drop_phase_duplicates():
    gs = make_gateset(2, 1, [H, 1j * H, T])
    ops = moment_operators(gamma_N(gs, 1), 2)
    assert len(ops) == 2


def test_unsupported_order(ht):
    with pytest.raises(UnsupportedError):
        exact_moment(gamma_N(ht, 1), k=3)


def test_moment_space_too_large(clifford2):
    with pytest.raises(ResourceError):
        exact_moment(gamma_N(clifford2, 4), k=4)


def test_haar_reference_values():
    assert haar_reference(4, 2) == 2
    assert haar_reference(8, 4) == 24
    assert haar_reference(4, 4) == 24
    with pytest.raises(UnsupportedError):
        haar_reference(3, 4)


def test_haar_m4_oracle():
    mean, se = haar_trace_moment(4, 2, 200_000, np.random.default_rng(1))
    assert abs(mean - haar_reference(4, 2)) < 4 * se


def test_haar_m8_oracle_dim8():
    mean, se = haar_trace_moment(8, 4, 1_000_000, np.random.default_rng(2))
    assert abs(mean - haar_reference(8, 4)) < 4 * se


def test_haar_m8_oracle_dim4():
    mean, se = haar_trace_moment(4, 4, 400_000, np.random.default_rng(3))
    assert abs(mean - haar_reference(4, 4)) < 4 * se


def test_mc_ht_agrees_with_two(ht):
    rep = frame_potential_mc(gamma_N(ht, 1), 2, word_length=200, samples=100_000, seed=11)
    assert abs(rep.estimate - 2) < 3 * rep.stderr


def test_mc_pauli_close_to_four(pauli):
    rep = frame_potential_mc(gamma_N(pauli, 1), 2, word_length=50, samples=20_000, seed=3)
    assert abs(rep.estimate - 4) < 4 * rep.stderr


def test_mc_reproducible(ht):
    fam = gamma_N(ht, 1)
    a = frame_potential_mc(fam, 2, 30, 2000, seed=5, streams=3)
    b = frame_potential_mc(fam, 2, 30, 2000, seed=5, streams=3, workers=3)
    c = frame_potential_mc(fam, 2, 30, 2000, seed=6, streams=3)
    assert a.estimate == b.estimate
    assert a.estimate != c.estimate


def test_mc_matrix_free_path_matches_dense_path(clifford2):
    fam = gamma_N(clifford2, 2)
    dense = frame_potential_mc(fam, 2, 100, 3000, seed=9)
    free = frame_potential_mc(fam, 2, 100, 3000, seed=9, dense_threshold=2)
    assert free.estimate != dense.estimate  # different paths, different draws
    for rep in (dense, free):
        assert abs(rep.estimate - 2) < 4 * rep.stderr


def test_jackknife_of_mean_is_standard_error():
    x = np.random.default_rng(0).standard_normal(1000)
    assert jackknife_stderr(x) == pytest.approx(x.std(ddof=1) / np.sqrt(len(x)), rel=1e-9)
