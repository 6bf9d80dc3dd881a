"""The numba and numpy backends must agree on every kernel."""
import numpy as np
import pytest

from sensepipe import kernels

np_k = kernels.get_backend("numpy")
jit_k = kernels.get_backend("numba")


@pytest.fixture
def rng():
    return np.random.default_rng(3)


def test_im2col_col2im(rng):
    X = rng.normal(size=(3, 9, 4))
    np.testing.assert_array_equal(np_k.im2col(X, 3), jit_k.im2col(X, 3))
    d = rng.normal(size=(3, 7, 12))
    np.testing.assert_allclose(np_k.col2im(d, 3, 9), jit_k.col2im(d, 3, 9), rtol=1e-13)
    # adjointness: <im2col(X), D> == <X, col2im(D)>
    assert np.sum(np_k.im2col(X, 3) * d) == pytest.approx(np.sum(X * np_k.col2im(d, 3, 9)), rel=1e-12)


@pytest.mark.parametrize("chunk", [1, 3, 4, 7])
def test_pooling(rng, chunk):
    M = rng.normal(size=(2, 7, 5))
    G1, i1 = np_k.pool_forward(M, chunk)
    G2, i2 = jit_k.pool_forward(M, chunk)
    np.testing.assert_array_equal(G1, G2)
    np.testing.assert_array_equal(i1, i2)
    assert G1.shape[1] == -(-7 // chunk)
    dG = rng.normal(size=G1.shape)
    np.testing.assert_array_equal(np_k.pool_backward(dG, i1, 7), jit_k.pool_backward(dG, i2, 7))


def test_pooling_tie_takes_first():
    M = np.zeros((1, 4, 1))
    _, idx = np_k.pool_forward(M, 4)
    _, idx2 = jit_k.pool_forward(M, 4)
    assert idx[0, 0, 0] == idx2[0, 0, 0] == 0


def test_scatter_rows(rng):
    ids = rng.integers(0, 5, size=(3, 6))
    g = rng.normal(size=(3, 6, 2))
    a, b = np_k.scatter_rows(ids, g, 5), jit_k.scatter_rows(ids, g, 5)
    np.testing.assert_allclose(a, b, rtol=1e-13)
    ref = np.zeros((5, 2))
    for bi in range(3):
        for li in range(6):
            ref[ids[bi, li]] += g[bi, li]
    np.testing.assert_allclose(a, ref, rtol=1e-13)


def test_lstm(rng):
    T, B, H = 5, 3, 4
    xa = rng.normal(size=(T, B, 4 * H))
    Uh = rng.normal(size=(H, 4 * H)) * 0.5
    a = np_k.lstm_forward(xa, Uh)
    b = jit_k.lstm_forward(xa, Uh)
    for x, y in zip(a, b):
        np.testing.assert_allclose(x, y, rtol=1e-12, atol=1e-14)
    dh = rng.normal(size=(B, H))
    np.testing.assert_allclose(np_k.lstm_backward(dh, Uh, *a), jit_k.lstm_backward(dh, Uh, *b),
                               rtol=1e-11, atol=1e-14)


def test_lstm_zero_weights_give_zero_state(rng):
    hs, cs, gates = np_k.lstm_forward(np.zeros((6, 2, 12)), np.zeros((3, 12)))
    assert not hs.any() and not cs.any()
    np.testing.assert_array_equal(gates[..., :9], 0.5)


def test_backend_selection_env(monkeypatch):
    monkeypatch.setenv("SENSEPIPE_DISABLE_JIT", "1")
    assert kernels._select()[0] == "numpy"
    monkeypatch.setenv("SENSEPIPE_DISABLE_JIT", "0")
    assert kernels._select()[0] == "numba"
    with pytest.raises(ValueError):
        kernels.get_backend("cuda")
