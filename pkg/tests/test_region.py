import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rescalc import quantum as Q
from rescalc.entropy import RatePair, binary_entropy, feedback_coefficients
from rescalc.protocols import cobit_isometry
from rescalc.region import (blahut_arimoto, dominates, maximize_weighted, optimize_region,
                            pareto_frontier, sample_region)


def appending_channel():
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    return Q.Isometry([("A'", 2)], [("A1", 2), ("A2", 2), ("B", 2)], np.kron(np.eye(2), phi[:, None]))


def diagonal_oracle(u, points=251):
    """Brute force over inputs diag(t, 1-t)."""
    best = 0.0
    for t in np.linspace(0, 1, points):
        best = max(best, feedback_coefficients(u, Q.diagonal_state("A'", [t, 1 - t])).q)
    return best


def test_cobit_diagonal_family_has_equal_rates():
    for t in (0.1, 0.25, 0.5):
        q, e = feedback_coefficients(cobit_isometry(), Q.diagonal_state("A'", [t, 1 - t]))
        assert abs(q - binary_entropy(t) / 2) < 1e-9 and abs(e - binary_entropy(t) / 2) < 1e-9
    assert abs(diagonal_oracle(cobit_isometry()) - 0.5) < 1e-12


def test_optimizer_reaches_diagonal_oracle():
    opt = maximize_weighted(cobit_isometry(), 1.0, restarts=20, seed=0)
    assert abs(opt.pair.q - diagonal_oracle(cobit_isometry())) < 1e-4
    assert opt.converged
    assert abs(np.trace(opt.rho) - 1) < 1e-12
    assert np.linalg.eigvalsh(opt.rho).min() > -1e-12


def test_optimizer_not_dominated_by_samples():
    u = cobit_isometry()
    samples = sample_region(u, 300, seed=3)
    opt = maximize_weighted(u, 0.5, restarts=5, seed=1)
    assert not any(dominates(p, opt.pair, 1e-6) for p in samples.points)
    best = max(0.5 * p.q + 0.5 * p.e for p in samples.points)
    assert opt.objective >= best - 1e-9


def test_identity_channel_region():
    u = Q.identity_isometry("A'", "B")
    res = sample_region(u, 200, seed=7)
    for p in res.points:
        assert -1e-9 <= p.q <= 1 + 1e-9 and abs(p.e) < 1e-9
    opt = maximize_weighted(u, 1.0, restarts=3, seed=0)
    assert abs(opt.pair.q - 1) < 1e-4


def test_appending_channel_region():
    res = sample_region(appending_channel(), 50, seed=1)
    for p in res.points:
        assert abs(p.q) < 1e-9 and abs(p.e - 1) < 1e-9
    assert len(res.frontier) == 1


@pytest.mark.parametrize("lam", [0.0, 0.3, 1.0])
def test_appending_channel_optimum_is_constant(lam):
    opt = maximize_weighted(appending_channel(), lam, restarts=2, seed=0)
    assert abs(opt.pair.q) < 1e-9 and abs(opt.pair.e - 1) < 1e-9


def test_sampling_is_reproducible():
    u = cobit_isometry()
    a, b = sample_region(u, 100, seed=42), sample_region(u, 100, seed=42)
    assert a.to_csv() == b.to_csv() and a.dumps() == b.dumps()
    assert sample_region(u, 100, seed=43).to_csv() != a.to_csv()
    # prefix property: sample i does not depend on the total count
    assert sample_region(u, 10, seed=42).points == a.points[:10]


def test_region_outputs():
    res = sample_region(cobit_isometry(), 20, seed=5)
    rows = list(csv.DictReader(io.StringIO(res.to_csv())))
    assert sum(r["source"] == "sample" for r in rows) == 20
    assert sum(r["source"] == "frontier" for r in rows) == len(res.frontier)
    d = json.loads(res.dumps())
    assert d["seed"] == 5 and "single-letter" in d["note"] and len(d["points"]) == 20


def test_optimize_region_sweep():
    res = optimize_region(cobit_isometry(), [0.0, 1.0], restarts=3, seed=0)
    assert res.sources == ["lambda=0", "lambda=1"]
    # pure |+> input: the output is an ebit, so e = 1 and q = 0
    assert abs(res.points[0].e - 1) < 1e-4 and abs(res.points[0].q) < 1e-4
    assert abs(res.points[1].q - 0.5) < 1e-4


def test_bad_arguments():
    u = cobit_isometry()
    with pytest.raises(ValueError):
        maximize_weighted(u, 1.5)
    with pytest.raises(ValueError):
        sample_region(u, 0, seed=0)


def test_dimension_cap(monkeypatch):
    monkeypatch.setenv("RT_MAX_DIM", "3")
    with pytest.raises(Q.DimensionError):
        sample_region(cobit_isometry(), 5, seed=0)


# --- Pareto frontier -----------------------------------------------------------

def test_pareto_examples():
    pts = [RatePair(0, 1), RatePair(1, 0), RatePair(0.5, 0.5), RatePair(0.4, 0.4), RatePair(0.5, 0.5)]
    assert pareto_frontier(pts) == [RatePair(0, 1), RatePair(0.5, 0.5), RatePair(1, 0)]
    assert pareto_frontier([RatePair(0.2, 0.2)]) == [RatePair(0.2, 0.2)]
    three = [RatePair(1, 0), RatePair(0, 1), RatePair(0.4, 0.4)]
    assert pareto_frontier(three) == [RatePair(0, 1), RatePair(0.4, 0.4), RatePair(1, 0)]
    assert pareto_frontier([RatePair(1, 1), RatePair(0.5, 0.5)]) == [RatePair(1, 1)]
    assert not dominates(RatePair(1, 1), RatePair(1, 1))


@settings(max_examples=50)
@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=1, max_size=30))
def test_pareto_properties(raw):
    pts = [RatePair(q, e) for q, e in raw]
    front = pareto_frontier(pts)
    assert front
    for f in front:
        assert not any(dominates(p, f) for p in pts)
    for p in pts:
        assert p in front or any(dominates(f, p) or (abs(f.q - p.q) <= 1e-9 and abs(f.e - p.e) <= 1e-9)
                                 for f in front)
    assert [f.q for f in front] == sorted(f.q for f in front)


# --- Blahut-Arimoto ------------------------------------------------------------

def test_blahut_arimoto_bsc():
    c = blahut_arimoto([[0.89, 0.11], [0.11, 0.89]])
    assert abs(c - (1 - binary_entropy(0.11))) < 1e-6


@pytest.mark.parametrize("w,cap", [
    ([[1, 0], [0, 1]], 1.0),
    ([[0.5, 0.5], [0.5, 0.5]], 0.0),
    ([[0.75, 0.25, 0], [0, 0.25, 0.75]], 0.75),                  # erasure 0.25
    ([[1, 0], [0.5, 0.5]], math.log2(1.25)),                     # Z channel
    (np.eye(4), 2.0),
])
def test_blahut_arimoto_known_capacities(w, cap):
    assert abs(blahut_arimoto(w) - cap) < 1e-6


def test_blahut_arimoto_rejects_bad_rows():
    with pytest.raises(ValueError):
        blahut_arimoto([[0.5, 0.6], [0.5, 0.5]])
    with pytest.raises(ValueError):
        blahut_arimoto([[1.2, -0.2], [0, 1]])


def test_cobit_samples_stay_below_half():
    res = sample_region(cobit_isometry(), 1000, seed=11)
    qs = [p.q for p in res.points]
    assert max(qs) <= 0.5 + 1e-9 and max(qs) > 0.49


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.integers(2, 4))
def test_capacity_at_least_uniform_input_information(seed, nx, ny):
    from rescalc.entropy import JointPMF, classical_mutual_information
    w = np.random.default_rng(seed).dirichlet(np.ones(ny), size=nx)
    uniform = classical_mutual_information(JointPMF.from_channel(np.full(nx, 1 / nx), w), ["X"], ["Y"])
    assert blahut_arimoto(w) >= uniform - 1e-9
