import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rescalc import quantum as Q
from rescalc.entropy import (JointPMF, binary_entropy, classical_mutual_information,
                             conditional_entropy, feedback_coefficients, link_values,
                             mutual_information, shannon_entropy, von_neumann_entropy)
from rescalc.protocols import cobit_isometry

from conftest import random_pure_vector

H01 = 0.4689955935892812      # -0.1 log2 0.1 - 0.9 log2 0.9
H011 = 0.499915958164528     # h(0.11)


def schmidt_entropy(psi, subset):
    """Oracle: entropy of a pure-state bipartition from its singular values."""
    dims = psi.dims
    idx = [i for i, n in enumerate(psi.names) if n in subset]
    rest = [i for i in range(len(dims)) if i not in idx]
    m = psi.vector.reshape(dims).transpose(idx + rest).reshape(
        int(np.prod([dims[i] for i in idx])), -1)
    s = np.linalg.svd(m, compute_uv=False) ** 2
    s = s[s > 1e-15]
    return float(-np.sum(s * np.log2(s)))


def random_tripartite(seed, dims):
    r = np.random.default_rng(seed)
    return Q.PureState(list(zip("RAB", dims)), random_pure_vector(r, int(np.prod(dims))))


def test_binary_entropy_values():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0
    assert abs(binary_entropy(0.1) - H01) < 1e-15
    with pytest.raises(ValueError):
        binary_entropy(1.2)


def test_entropy_of_bell_pair_and_pure_state():
    assert abs(von_neumann_entropy(Q.maximally_entangled("A", "B"), ["A"]) - 1) < 1e-12
    assert von_neumann_entropy(Q.basis_state([("A", 2)], [0]).density(), ["A"]) == 0


def test_entropy_of_two_ghz_copies():
    g2 = Q.tensor(Q.ghz(("R1", "A1", "B1")), Q.ghz(("R2", "A2", "B2")))
    assert abs(von_neumann_entropy(g2, ["R1", "R2"]) - 2) < 1e-12


def test_mutual_information_examples():
    g = Q.ghz(("R", "A", "B"))
    assert abs(mutual_information(g, ["R"], ["B"]) - 1) < 1e-12
    prod = Q.tensor(Q.maximally_mixed("A"), Q.diagonal_state("B", [0.2, 0.8]))
    assert abs(mutual_information(prod, ["A"], ["B"])) < 1e-12
    with pytest.raises(ValueError):
        mutual_information(g, ["R", "A"], ["A"])


def test_feedback_coefficients_cobit():
    r = feedback_coefficients(cobit_isometry(), Q.maximally_mixed("A'"))
    assert abs(r.q - 0.5) < 1e-9 and abs(r.e - 0.5) < 1e-9


def test_feedback_coefficients_identity_is_schumacher_rate():
    q, e = feedback_coefficients(Q.identity_isometry("A'", "B"), Q.diagonal_state("A'", [0.9, 0.1]))
    assert abs(q - H01) < 1e-9 and abs(e) < 1e-9


def test_feedback_coefficients_appending_channel():
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    u = Q.Isometry([("A'", 2)], [("A1", 2), ("A2", 2), ("B", 2)], np.kron(np.eye(2), phi[:, None]))
    q, e = feedback_coefficients(u, Q.diagonal_state("A'", [0.3, 0.7]))
    assert abs(q) < 1e-9 and abs(e - 1) < 1e-9


def test_feedback_coefficients_label_mismatch():
    with pytest.raises(ValueError):
        feedback_coefficients(cobit_isometry(), Q.maximally_mixed("S"))
    with pytest.raises(ValueError):
        feedback_coefficients(cobit_isometry(), Q.maximally_mixed("A'"), bob=["C"])


@given(st.floats(min_value=0.0, max_value=1.0))
def test_identity_coefficients_equal_source_entropy(p):
    q, e = feedback_coefficients(Q.identity_isometry("A'", "B"), Q.diagonal_state("A'", [p, 1 - p]))
    assert abs(q - binary_entropy(p)) < 1e-9 and abs(e) < 1e-9


def test_link_values():
    np.testing.assert_allclose(link_values(Q.ghz(("R", "A", "B"))), (0.5, 0.5, 0.5), atol=1e-12)
    s = Q.tensor(Q.maximally_entangled("R", "A"), Q.basis_state([("B", 2)], [0]))
    np.testing.assert_allclose(link_values(s), (1, 0, 0), atol=1e-12)
    with pytest.raises(ValueError):
        link_values(Q.maximally_entangled("A", "B"))


def test_link_values_sum_to_node_entropies(rng):
    psi = Q.PureState([("R", 2), ("A", 2), ("B", 2)], random_pure_vector(rng, 8))
    ra, rb, ab = link_values(psi)
    assert abs(ra + ab - von_neumann_entropy(psi, ["A"])) < 1e-9
    assert abs(ra + rb - von_neumann_entropy(psi, ["R"])) < 1e-9
    assert abs(rb + ab - von_neumann_entropy(psi, ["B"])) < 1e-9


@given(st.integers(0, 2**32 - 1), st.tuples(*[st.integers(1, 3)] * 3))
def test_node_entropy_is_sum_of_adjacent_links(seed, dims):
    psi = random_tripartite(seed, dims)
    h_a = von_neumann_entropy(psi, ["A"])
    half = 0.5 * mutual_information(psi, ["R"], ["A"]) + 0.5 * mutual_information(psi, ["A"], ["B"])
    assert abs(h_a - half) < 1e-9


@given(st.integers(0, 2**32 - 1), st.tuples(*[st.integers(1, 3)] * 3))
def test_complement_symmetry_and_schmidt_oracle(seed, dims):
    psi = random_tripartite(seed, dims)
    names = set(psi.names)
    for k in range(1, 3):
        for sub in itertools.combinations(psi.names, k):
            h = von_neumann_entropy(psi, sub)
            assert abs(h - von_neumann_entropy(psi, names - set(sub))) < 1e-9
            assert abs(h - schmidt_entropy(psi, sub)) < 1e-9
            assert -1e-9 <= h <= math.log2(np.prod([psi.dims[psi.names.index(x)] for x in sub])) + 1e-9


@given(st.integers(0, 2**32 - 1))
def test_entropy_invariant_under_permutation_and_local_isometry(seed):
    r = np.random.default_rng(seed)
    psi = Q.PureState([("R", 2), ("A", 3), ("B", 2)], random_pure_vector(r, 12))
    perm = Q.permute_systems(psi, ["B", "R", "A"])
    m = r.standard_normal((4, 3)) + 1j * r.standard_normal((4, 3))
    v, _ = np.linalg.qr(m)
    moved = Q.apply(Q.Isometry([("A", 3)], [("A", 4)], v), psi)
    for sub in (["R"], ["A"], ["B"], ["R", "B"]):
        h = von_neumann_entropy(psi, sub)
        assert abs(h - von_neumann_entropy(perm, sub)) < 1e-9
        assert abs(h - von_neumann_entropy(moved, sub)) < 1e-9


def test_classical_examples():
    copy = JointPMF((("X", 2), ("Y", 2)), [[0.5, 0], [0, 0.5]])
    assert abs(classical_mutual_information(copy, ["X"], ["Y"]) - 1) < 1e-12
    assert abs(conditional_entropy(copy, ["Y"], ["X"])) < 1e-12
    indep = JointPMF((("X", 2), ("Y", 2)), np.full((2, 2), 0.25))
    assert abs(classical_mutual_information(indep, ["X"], ["Y"])) < 1e-12
    assert abs(conditional_entropy(indep, ["Y"], ["X"]) - 1) < 1e-12
    bsc = JointPMF.from_channel([0.5, 0.5], [[0.89, 0.11], [0.11, 0.89]])
    assert abs(classical_mutual_information(bsc, ["X"], ["Y"]) - (1 - H011)) < 1e-12
    assert abs(conditional_entropy(bsc, ["Y"], ["X"]) - H011) < 1e-12


def test_invalid_pmf():
    with pytest.raises(ValueError):
        JointPMF((("X", 2),), [0.5, 0.6])
    with pytest.raises(ValueError):
        JointPMF((("X", 2),), [1.5, -0.5])


def test_pmf_json_roundtrip():
    p = JointPMF((("X", 2), ("Y", 3)), np.arange(6) / 15)
    q = JointPMF.from_json(p.to_json())
    np.testing.assert_array_equal(p.probs, q.probs)
    assert q.variables == (("X", 2), ("Y", 3))


@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.integers(2, 4))
def test_classical_identities(seed, kx, ky):
    r = np.random.default_rng(seed)
    p = JointPMF((("X", kx), ("Y", ky)), r.dirichlet(np.ones(kx * ky)))
    i = classical_mutual_information(p, ["X"], ["Y"])
    assert i >= -1e-9
    assert abs(conditional_entropy(p, ["Y"], ["X"]) + i - shannon_entropy(p, ["Y"])) < 1e-9
