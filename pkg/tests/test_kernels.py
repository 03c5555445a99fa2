"""Compiled and pure-Python kernels must agree; transform-domain path too."""
import numpy as np
import pytest

from mnbp.channels import ChannelSpec
from mnbp.code import build_code
from mnbp.decoder import _pykernels, decode_pus, decode_sus, init_messages, tanner_graph
from mnbp.decoder.kernels import BACKENDS, get_backend
from mnbp.source import builtin_model

from .test_decoder import noisy_instance

needs_compiled = pytest.mark.skipif("compiled" not in BACKENDS,
                                    reason="compiled kernels not built")


def random_state(q, seed):
    code = build_code(q, 150 // (q.bit_length() - 1) // 3 * 3 // 3 * 3, "1/3", 3, rng_seed=seed)
    g = tanner_graph(code)
    rng = np.random.default_rng(seed)
    q_msg = rng.dirichlet(np.ones(q), size=g.n_edges)
    prior = rng.dirichlet(np.ones(q), size=code.n_vars)
    r_msg = rng.dirichlet(np.ones(q), size=g.n_edges)
    z = rng.integers(0, q, code.M_len).astype(np.uint8)
    return code, g, q_msg, r_msg, prior, z


def test_get_backend():
    assert get_backend("python") is _pykernels
    with pytest.raises(ValueError):
        get_backend("fortran")


@needs_compiled
@pytest.mark.parametrize("q", [2, 4, 8])
def test_horizontal_pass_equivalence(q):
    code, g, q_msg, _, _, z = random_state(q, 1)
    out = {}
    for name, kern in BACKENDS.items():
        r = np.zeros_like(q_msg)
        kern.horizontal_pass(g.row_ptr, g.edge_h, q_msg, r, z, g.mul)
        out[name] = r
    assert np.abs(out["python"] - out["compiled"]).max() < 1e-13


@needs_compiled
@pytest.mark.parametrize("q", [2, 4, 8])
def test_vertical_pass_equivalence(q):
    code, g, _, r_msg, prior, _ = random_state(q, 2)
    out = {}
    for name, kern in BACKENDS.items():
        qm = np.zeros_like(r_msg)
        post = np.zeros_like(prior)
        assert kern.vertical_pass(g.col_ptr, g.col_edges, prior, r_msg, qm, post) == 0
        out[name] = (qm, post)
    assert np.abs(out["python"][0] - out["compiled"][0]).max() < 1e-13
    assert np.abs(out["python"][1] - out["compiled"][1]).max() < 1e-13


@needs_compiled
@pytest.mark.parametrize("q", [2, 4, 8])
def test_sus_sweep_equivalence(q):
    code, g, q_msg, r_msg, prior, z = random_state(q, 3)
    order = np.random.default_rng(0).permutation(code.n_vars).astype(np.int64)
    out = {}
    for name, kern in BACKENDS.items():
        qm, rm, post = q_msg.copy(), r_msg.copy(), prior.copy()
        status = kern.sus_sweep(g.row_ptr, g.edge_row, g.edge_h, g.col_ptr, g.col_edges,
                                order, prior, qm, rm, post, z, g.mul)
        assert status == 0
        out[name] = (qm, rm, post)
    for a, b in zip(out["python"], out["compiled"]):
        assert np.abs(a - b).max() < 1e-12


@needs_compiled
@pytest.mark.parametrize("q,src,spec", [(2, "iid", ChannelSpec("BSC", 0.1)),
                                        (8, "markov2s", ChannelSpec("BSC", 0.25))])
def test_full_decode_equivalence(q, src, spec):
    code = build_code(q, 90 // (q.bit_length() - 1), "1/3", 3, rng_seed=4)
    model = builtin_model(src, q).embed(q)
    out, z, x = noisy_instance(code, model, spec, 9)
    msgs = init_messages(code, out, model)
    for dec in (decode_pus, decode_sus):
        a = dec(code, z, msgs.copy(), 60, x, source_model=model, backend="python")
        b = dec(code, z, msgs.copy(), 60, x, source_model=model, backend="compiled")
        assert (a.converged, a.iterations) == (b.converged, b.iterations)
        assert np.array_equal(a.x_hat, b.x_hat)


@pytest.mark.parametrize("q", [2, 4, 8])
def test_wht_check_update_matches_direct(q):
    code, g, q_msg, _, _, z = random_state(q, 5)
    direct = np.zeros_like(q_msg)
    wht = np.zeros_like(q_msg)
    _pykernels.horizontal_pass(g.row_ptr, g.edge_h, q_msg, direct, z, g.mul)
    _pykernels.horizontal_pass_wht(g.row_ptr, g.edge_h, q_msg, wht, z, g.mul)
    assert np.abs(direct - wht).max() < 1e-10


def test_wht_is_involution_up_to_scale(rng):
    v = rng.random((3, 8))
    assert np.allclose(_pykernels.wht(_pykernels.wht(v)) / 8, v)
