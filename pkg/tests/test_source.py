import numpy as np
import pytest

from mnbp.source import (
    MARKOV_4S,
    MarkovModel,
    NotIrreducibleError,
    builtin_model,
    entropy_rate,
    generate,
    load_model,
    resolve_model,
)


def binary_entropy(p):
    return -p * np.log2(p) - (1 - p) * np.log2(1 - p)


def eig_stationary(T):
    w, v = np.linalg.eig(T.T)
    pi = np.real(v[:, np.argmin(np.abs(w - 1))])
    return pi / pi.sum()


def test_markov2s():
    m = builtin_model("markov2s")
    assert m.T.tolist() == [[0.89, 0.11], [0.11, 0.89]]
    assert np.allclose(m.pi, [0.5, 0.5])
    assert m.entropy_rate == pytest.approx(binary_entropy(0.11), abs=1e-12)
    assert m.entropy_rate == pytest.approx(0.49992, abs=1e-4)


def test_markov4s_matrix_and_stationarity():
    m = builtin_model("markov4s")
    assert m.T[0, 0] == pytest.approx(0.808022, abs=1e-6)
    assert m.T[0, 1] == pytest.approx(0.0883281, abs=1e-6)
    assert np.allclose(m.T.sum(axis=1), 1.0, atol=1e-12)
    assert np.abs(m.pi @ m.T - m.pi).max() < 1e-9
    assert m.pi.sum() == pytest.approx(1.0, abs=1e-12)


def test_markov4s_entropy_matches_eigen_oracle():
    T = MARKOV_4S / MARKOV_4S.sum(axis=1, keepdims=True)
    pi = eig_stationary(T)
    oracle = -(pi[:, None] * T * np.log2(T)).sum()
    assert oracle == pytest.approx(0.946494, abs=1e-6)
    assert entropy_rate(builtin_model("markov4s")) == pytest.approx(oracle, abs=1e-9)


def test_iid_entropy():
    assert builtin_model("iid", 8).entropy_rate == pytest.approx(3.0)
    assert builtin_model("iid", 2).entropy_rate == pytest.approx(1.0)


def test_unknown_name():
    with pytest.raises(ValueError):
        builtin_model("markov3s")
    with pytest.raises(ValueError):
        builtin_model("iid")


def test_rows_must_be_stochastic():
    with pytest.raises(ValueError):
        MarkovModel.from_matrix([[0.5, 0.4], [0.5, 0.5]])
    with pytest.raises(ValueError):
        MarkovModel.from_matrix([[1.2, -0.2], [0.5, 0.5]])


def test_reducible_chain():
    with pytest.raises(NotIrreducibleError):
        MarkovModel.from_matrix(np.eye(3))
    m = MarkovModel.from_matrix(np.eye(3), pi=[0.2, 0.3, 0.5])
    with pytest.raises(NotIrreducibleError):
        entropy_rate(m)


def test_periodic_chain_stationary():
    m = MarkovModel.from_matrix([[0, 1], [1, 0]])
    assert np.allclose(m.pi, [0.5, 0.5])


def test_identity_chain_is_constant(rng):
    m = MarkovModel.from_matrix(np.eye(4), pi=[0.25] * 4)
    seq = generate(m, 500, rng)
    assert len(set(seq.tolist())) == 1


def test_iid_frequencies(rng):
    q, n = 8, 100_000
    seq = generate(builtin_model("iid", q), n, rng)
    freq = np.bincount(seq, minlength=q) / n
    se = np.sqrt((1 / q) * (1 - 1 / q) / n)
    assert np.all(np.abs(freq - 1 / q) < 3 * se)


def test_markov2s_transition_counts(rng):
    n = 100_000
    model = builtin_model("markov2s")
    seq = generate(model, n, rng)
    counts = np.zeros((2, 2))
    np.add.at(counts, (seq[:-1], seq[1:]), 1)
    est = counts / counts.sum(axis=1, keepdims=True)
    se = np.sqrt(model.T * (1 - model.T) / counts.sum(axis=1, keepdims=True))
    assert np.all(np.abs(est - model.T) < 3 * se)


def test_generate_reproducible():
    m = builtin_model("markov4s")
    a = generate(m, 1000, np.random.default_rng(5))
    b = generate(m, 1000, np.random.default_rng(5))
    assert np.array_equal(a, b)


def test_embedding_in_larger_field(rng):
    m = builtin_model("markov2s").embed(8)
    assert m.q == 8
    assert np.allclose(m.pi, [0.5, 0.5, 0, 0, 0, 0, 0, 0])
    assert np.allclose(m.T.sum(axis=1), 1.0)
    seq = generate(m, 5000, rng)
    assert seq.max() <= 1
    with pytest.raises(ValueError):
        builtin_model("markov4s").embed(2)


def test_load_model(tmp_path):
    p = tmp_path / "t.txt"
    p.write_text("2\n0.7 0.3\n0.4 0.6\n")
    m = load_model(p)
    assert np.allclose(m.pi, [4 / 7, 3 / 7])
    assert resolve_model(str(p), 4).q == 4
    bad = tmp_path / "bad.txt"
    bad.write_text("3\n1 0 0\n")
    with pytest.raises(ValueError):
        load_model(bad)
