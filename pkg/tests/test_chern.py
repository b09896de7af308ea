import numpy as np
import pytest

from fkdet import sampling
from fkdet.algebra import TracialPair, amplify, embed_corner, hochschild_b, mat_trace, tau
from fkdet.chern import ch_rel, gauss_legendre, integrate_blocks, rel_log, tau_tilde, transgression_L
from fkdet.errors import QuadratureFailure, SupportViolation
from fkdet.paths import (ConjugationHomotopy, PerturbationHomotopy, ReparametrizationHomotopy, concat_smooth,
                         constant_path, conjugate_path, exp_path, idempotent_loop, pw_commutator)


def _blk_norm(x):
    return max(np.linalg.norm(p, 2) for p in x.parts)


def test_gauss_legendre_exact_on_polynomials():
    t, w = gauss_legendre(0.0, 2.0, 8)
    for d in range(16):
        assert np.dot(w, t ** d) == pytest.approx(2.0 ** (d + 1) / (d + 1), rel=1e-13)


def test_integrate_blocks_smooth():
    f = lambda ts: [np.exp(ts)[:, None, None] * np.ones((1, 2, 2))]
    val, err = integrate_blocks(f)
    assert np.allclose(val[0], np.e - 1, atol=1e-14)
    assert err <= 1e-12


def test_integrate_blocks_uses_breaks():
    f = lambda ts: [np.abs(ts - 0.3)[:, None, None]]
    val, err = integrate_blocks(f, breaks=[0.3])
    assert val[0][0, 0] == pytest.approx(0.3 ** 2 / 2 + 0.7 ** 2 / 2, abs=1e-14)


def test_integrate_blocks_fails_loudly():
    f = lambda ts: [np.sign(ts - 1 / 3)[:, None, None]]
    with pytest.raises(QuadratureFailure):
        integrate_blocks(f)


def test_constant_path_is_zero(pair):
    assert tau_tilde(constant_path(pair)) == 0


@pytest.mark.parametrize("seed", range(6))
def test_exp_segment(pair, seed):
    rng = np.random.default_rng(seed)
    x = sampling.random_j(pair, rng, 0.6)
    p = exp_path(-x)
    assert rel_log(p).allclose(-x, 1e-12)
    assert tau_tilde(p) == pytest.approx(tau(x), abs=1e-12)


def test_scalar_weight_half():
    p = TracialPair([1, 1], [0, 1], {0: 1.0, 1: 0.5})
    x = p.j_element([np.array([[0.3]]), np.array([[0.4]])])
    assert tau_tilde(exp_path(-x)) == pytest.approx(0.3 + 0.2, abs=1e-14)


@pytest.mark.parametrize("k, w", [(0, 1.0), (1, 0.5)])
def test_idempotent_loop_rank_one(pair, k, w):
    parts = [None] * pair.nblocks
    n = pair.blocks[k]
    parts[k] = np.zeros((n, n))
    parts[k][0, 0] = 1.0
    e = pair.j_element(parts)
    assert tau_tilde(idempotent_loop(e)) == pytest.approx(-2j * np.pi * w, abs=1e-12)


def test_unrestricted_rejected(pair, rng):
    with pytest.raises(SupportViolation):
        rel_log(sampling.random_path(pair, rng, restricted=False))


@pytest.mark.parametrize("seed", range(4))
def test_additivity_and_inverse(pair, seed):
    rng = np.random.default_rng(seed)
    a = sampling.random_path(pair, rng)
    b = sampling.random_path(pair, rng)
    ta, tb = tau_tilde(a), tau_tilde(b)
    assert abs(tau_tilde(concat_smooth(a, b)) - ta - tb) <= 1e-10
    assert abs(tau_tilde(a * b) - ta - tb) <= 1e-10
    assert abs(tau_tilde(a.inverse()) + ta) <= 1e-10


@pytest.mark.parametrize("seed", range(4))
def test_commutator_and_conjugation(pair, seed):
    rng = np.random.default_rng(seed)
    a = sampling.random_path(pair, rng)
    b = sampling.random_path(pair, rng, restricted=False)
    assert abs(tau_tilde(pw_commutator(a, b))) <= 1e-10
    assert abs(tau_tilde(conjugate_path(b, a)) - tau_tilde(a)) <= 1e-10
    h = sampling.random_invertible_a(pair, rng)
    assert abs(tau_tilde(conjugate_path(h, a)) - tau_tilde(a)) <= 1e-10


def test_amplified_chern(pair, rng):
    big = amplify(pair, 2)
    x = sampling.random_j(pair, rng, 0.5)
    p = exp_path(embed_corner(x, 2))
    assert p.pair == big
    assert ch_rel(p).allclose(x, 1e-12)
    assert mat_trace(rel_log(p)).allclose(x, 1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_transgression_identity(pair, seed):
    rng = np.random.default_rng(seed)
    sigma = sampling.random_path(pair, rng, restricted=False, segments=2, scale=0.3)
    tp = sampling.random_path(pair, rng, restricted=True, segments=2, scale=0.3)
    hom = ConjugationHomotopy(sigma, tp)
    res = transgression_L(hom, return_error=True)
    assert res.error <= 1e-7
    lhs = hochschild_b(res.chain)
    rhs = rel_log(hom.end) - rel_log(hom.start)
    assert _blk_norm(lhs - rhs) <= 1e-6
    assert abs(tau(lhs)) <= 1e-12


@pytest.mark.parametrize("family", ["reparam", "perturb"])
def test_transgression_other_families(pair, rng, family):
    tp = sampling.random_path(pair, rng, restricted=True, segments=2, scale=0.3)
    if family == "reparam":
        hom = ReparametrizationHomotopy(tp)
    else:
        hom = PerturbationHomotopy(tp, sampling.random_j(pair, rng, 0.3))
    lhs = hochschild_b(transgression_L(hom))
    rhs = rel_log(hom.end) - rel_log(hom.start)
    assert _blk_norm(lhs - rhs) <= 1e-6
    assert abs(tau(ch_rel(hom.end)) - tau(ch_rel(hom.start))) <= 1e-10
