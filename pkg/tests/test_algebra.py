import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fkdet import sampling
from fkdet.algebra import (AElement, GPairElement, JElement, TensorChain, TracialPair, a_norm, amplify,
                           amplify_element, embed_corner, entry_sum_norm, hochschild_b, j_norm, mat_trace, tau)
from fkdet.errors import PairMismatch, ShapeMismatch, Singular, SupportViolation


@pytest.mark.parametrize("blocks, mask, weights", [
    ([], [0], {0: 1.0}),
    ([2, 0], [0], {0: 1.0}),
    ([2], [], {}),
    ([2], [1], {1: 1.0}),
    ([2, 2], [0], {0: 1.0, 1: 1.0}),
    ([2], [0], {0: -1.0}),
    ([2], [0], {0: 0.0}),
    ([2], [0], {0: float("inf")}),
])
def test_pair_validation(blocks, mask, weights):
    with pytest.raises(ValueError):
        TracialPair(blocks, mask, weights)


def test_tau_scalar_and_identity(pair):
    one = TracialPair([1], [0], {0: 1.0})
    assert tau(JElement(one, [np.array([[2.0]])])) == 2.0
    assert tau(pair.identity()) == pytest.approx(3 * 1.0 + 2 * 0.5)


def test_j_support_enforced(pair):
    parts = [np.zeros((n, n)) for n in pair.blocks]
    parts[2][0, 0] = 1.0
    with pytest.raises(SupportViolation):
        JElement(pair, parts)


def test_shape_and_pair_checks(pair):
    with pytest.raises(ShapeMismatch):
        AElement(pair, [np.eye(3)])
    other = TracialPair([3, 2, 2], [0], {0: 1.0})
    with pytest.raises(PairMismatch):
        pair.identity() + other.identity()


def test_ideal_closure(pair, rng):
    j = sampling.random_j(pair, rng)
    a = sampling.random_a(pair, rng)
    for x in (j @ a, a @ j, j + j, j * 2.0, -j, j.H):
        assert isinstance(x, JElement)
    assert not isinstance(a @ a, JElement)


def test_gpair_singular_and_support(pair):
    parts = [-np.eye(n) if k == 0 else np.zeros((n, n)) for k, n in enumerate(pair.blocks)]
    with pytest.raises(Singular):
        GPairElement(JElement(pair, parts))
    g = list(pair.identity().parts)
    g[2] = 2 * g[2]
    with pytest.raises(SupportViolation):
        GPairElement.from_element(AElement(pair, g))


@pytest.mark.parametrize("seed", range(10))
def test_hyper_trace_and_norms(pair, seed):
    rng = np.random.default_rng(seed)
    j = sampling.random_j(pair, rng)
    a, b = sampling.random_a(pair, rng), sampling.random_a(pair, rng)
    assert abs(tau(j @ a) - tau(a @ j)) <= 1e-12 * (1 + j_norm(j) * a_norm(a))
    assert j_norm(a @ j @ b) <= a_norm(a) * j_norm(j) * a_norm(b) * (1 + 1e-12)
    assert a_norm(j) <= j_norm(j)
    assert abs(tau(j)) <= j_norm(j)


def test_j_norm_diagonal(pair):
    parts = [np.diag(np.arange(1, n + 1, dtype=float)) * (k < 2) for k, n in enumerate(pair.blocks)]
    x = JElement(pair, parts)
    assert j_norm(x) == pytest.approx(3.0 + (1 + 2 + 3) + 0.5 * (1 + 2))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31), st.integers(1, 5))
def test_tau_kills_boundary(seed, nterms):
    rng = np.random.default_rng(seed)
    p = sampling.random_pair(rng)
    chain = TensorChain(p, [(sampling.random_j(p, rng), sampling.random_a(p, rng)) for _ in range(nterms)])
    assert len(chain) == nterms
    assert abs(tau(hochschild_b(chain))) <= 1e-12 * nterms * 10


def test_chain_rejects_non_ideal_first_factor(pair, rng):
    with pytest.raises(SupportViolation):
        TensorChain(pair, [(sampling.random_a(pair, rng), pair.identity())])


def test_amplification_roundtrip(pair, rng):
    x = sampling.random_j(pair, rng)
    z = pair.zeros()
    big = amplify_element([[x, z], [z, x]])
    assert big.pair == amplify(pair, 2)
    assert isinstance(big, JElement)
    assert mat_trace(big).allclose(x * 2.0)
    assert tau(mat_trace(big)) == pytest.approx(2 * tau(x))
    corner = embed_corner(x, 3)
    assert tau(mat_trace(corner)) == pytest.approx(tau(x))
    assert entry_sum_norm(big, 2) == pytest.approx(2 * j_norm(x))
    with pytest.raises(ShapeMismatch):
        mat_trace(big, 3)


def test_amplify_composes(pair):
    assert amplify(pair, 1) is pair
    assert amplify(amplify(pair, 2), 3) == amplify(pair, 6)
    assert amplify(pair, 2).root() == pair
