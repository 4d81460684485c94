import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rescalc import protocols as P
from rescalc.entropy import binary_entropy

from oracles import concentration_oracle, schumacher_oracle


# --- circuits -------------------------------------------------------------------

def test_circuits_match_ideal():
    for c in P.verify_circuits():
        assert c.passed, c
        assert c.deviation <= 1e-12 and c.isometry_defect <= 1e-12


def test_cobit_isometry_copies_basis():
    d = P.cobit_isometry().matrix
    assert np.allclose(d[:, 0], [1, 0, 0, 0]) and np.allclose(d[:, 1], [0, 0, 0, 1])


def test_coherent_sdc_copies_two_bits():
    v = P.coherent_sdc()
    assert list(v.out_names) == ["A1", "A2", "B1", "B2"]
    phase = None
    for i in range(2):
        for j in range(2):
            col = v.matrix[:, 2 * i + j].reshape(2, 2, 2, 2)
            target = np.zeros((2, 2, 2, 2))
            target[i, j, i, j] = 1
            z = col[i, j, i, j]
            phase = z if phase is None else phase
            assert abs(z - phase) < 1e-12 and abs(abs(z) - 1) < 1e-12
            assert np.allclose(col, z * target, atol=1e-12)


def test_coherent_teleport_relocates_message():
    v = P.coherent_teleport()
    assert list(v.out_names) == ["Be", "M", "Bm", "Ae", "Bn"]
    phi = np.array([1, 0, 0, 1]) / math.sqrt(2)
    for i in range(2):
        e = np.zeros(2)
        e[i] = 1
        target = np.kron(e, np.kron(phi, phi))
        assert abs(abs(np.vdot(target, v.matrix[:, i])) - 1) < 1e-12


def test_phase_normalization():
    m = np.eye(2) * np.exp(0.7j)
    assert np.allclose(P.phase_normalized(m), np.eye(2))


def test_circuit_facts():
    f = P.circuit_facts()
    assert set(f) == {"coherent-sdc", "coherent-teleport"}
    assert f["coherent-sdc"].to_text() == "[q->q] + [qq] >= 2*[q->qq]"


# --- concentration --------------------------------------------------------------

@pytest.mark.parametrize("p,n", [(0.1, 1), (0.1, 10), (0.5, 4), (0.3, 257), (0.1, 1000)])
def test_concentration_matches_direct_sum(p, n):
    assert abs(P.concentration_yield(p, n).per_copy_yield - concentration_oracle(p, n)) < 1e-9


def test_concentration_small_exact():
    # n=4, p=1/2: sum C(4,k)/16 * log2 C(4,k) / 4
    exact = (2 * 4 * 2 + 6 * math.log2(6)) / 16 / 4
    assert abs(P.concentration_yield(0.5, 4).per_copy_yield - exact) < 1e-12
    assert P.concentration_yield(0.5, 1).per_copy_yield == 0


def test_concentration_approaches_entropy_from_below():
    prev_total = -1.0
    for n in (10, 100, 1000, 10000):
        y = P.concentration_yield(0.1, n)
        assert y.per_copy_yield <= y.target
        assert n * y.per_copy_yield > prev_total
        prev_total = n * y.per_copy_yield
    assert P.concentration_yield(0.1, 1000).gap < 0.01


def test_concentration_bad_input():
    for bad in ((0.0, 10), (1.0, 10), (0.1, 0), (0.1, P.MAX_COPIES + 1), (0.1, 2.5)):
        with pytest.raises(ValueError):
            P.concentration_yield(*bad)


@settings(max_examples=25)
@given(st.floats(0.01, 0.99), st.integers(1, 300))
def test_concentration_bounded_by_entropy(p, n):
    y = P.concentration_yield(p, n).per_copy_yield
    assert -1e-12 <= y <= binary_entropy(p) + 1e-12


# --- Schumacher compression ---------------------------------------------------------

@pytest.mark.parametrize("n,rate", [(200, binary_entropy(0.1) + 0.1), (200, binary_entropy(0.1) - 0.1),
                                    (50, 0.3), (10, 0.05), (120, 0.9)])
def test_schumacher_matches_exact_oracle(n, rate):
    assert abs(P.schumacher_fidelity(0.1, n, rate) - schumacher_oracle(Fraction(1, 10), n, rate)) < 1e-9


def test_schumacher_edge_cases():
    assert P.schumacher_fidelity(0.1, 10, 1.0) == 1.0
    assert abs(P.schumacher_fidelity(0.1, 10, 0.0) - 0.9 ** 10) < 1e-12
    assert P.schumacher_fidelity(0.0, 10, 0.0) == 1.0
    with pytest.raises(ValueError):
        P.schumacher_fidelity(0.1, 10, -1)
    with pytest.raises(ValueError):
        P.schumacher_fidelity(1.1, 10, 0.5)


@settings(max_examples=25)
@given(st.integers(1, 120), st.floats(0, 1), st.floats(0, 1))
def test_schumacher_monotone_in_rate(n, r1, r2):
    lo, hi = sorted((r1, r2))
    assert P.schumacher_fidelity(0.2, n, lo) <= P.schumacher_fidelity(0.2, n, hi) + 1e-12


@pytest.mark.parametrize("n", [1000, 4000])
def test_log_space_agrees_with_exact(monkeypatch, n):
    rate = binary_entropy(0.1) + 0.02
    exact = P.schumacher_fidelity(0.1, n, rate)
    monkeypatch.setattr(P, "EXACT_LIMIT", 0)
    assert abs(P.schumacher_fidelity(0.1, n, rate) - exact) < 1e-9


def test_yield_csv():
    text = P.yield_csv([P.concentration_yield(0.5, 4).row()])
    assert text.splitlines()[0] == "n,value,target,gap"
    assert text.splitlines()[1].startswith("4,0.4923402344")


# --- GHZ versus EPR pairs ----------------------------------------------------------------

def test_ghz_demo_entropies():
    demo = P.ghz_entropy_demo()
    for state in ("GHZ x2", "EPR x3"):
        for v in demo.entropies[state].values():
            assert abs(v - 2) < 1e-9
        for v in demo.mutual_info[state].values():
            assert abs(v - 2) < 1e-9


def test_ghz_demo_pairwise_spectra_coincide():
    demo = P.ghz_entropy_demo()
    for k in ("RA", "RB", "AB"):
        np.testing.assert_allclose(demo.pair_spectra["GHZ x2"][k], demo.pair_spectra["EPR x3"][k], atol=1e-12)


def test_ghz_demo_partial_transpose_separates():
    demo = P.ghz_entropy_demo()
    for k in ("RA", "RB", "AB"):
        assert demo.pt_spectra["GHZ x2"][k].min() > -1e-12
        assert abs(demo.pt_spectra["EPR x3"][k].min() + 0.125) < 1e-12


@pytest.mark.parametrize("p", [0.1, 0.3, 0.5])
def test_concentration_gap_shrinks_monotonically(p):
    gaps = [P.concentration_yield(p, n).gap for n in range(2, 300)]
    assert all(b <= a + 1e-9 for a, b in zip(gaps, gaps[1:]))
    assert all(g > 0 for g in gaps)
