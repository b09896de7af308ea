import numpy as np
import pytest

from fkdet import sampling
from fkdet.algebra import GPairElement, TracialPair, amplify, mat_trace, tau
from fkdet.chern import tau_tilde
from fkdet.errors import NotALoop, PairMismatch, SupportViolation
from fkdet.ktheory import (QuotientValue, boundary, bott_class, commutator_lift, connect_to_identity,
                           exactness_probe, in_lattice, theta, winding_subgroup)
from fkdet.paths import constant_path, invertibility_sweep


def _blk_norm(x):
    return max(np.linalg.norm(p, 2) for p in x.parts)


@pytest.mark.parametrize("z, ok", [(0, True), (2j * np.pi, True), (-3j * np.pi, True), (1j * np.pi * 7 + 1e-8, True),
                                   (1.0, False), (0.5j, False), (1j * np.pi + 1e-4, False)])
def test_in_lattice(z, ok):
    assert in_lattice(z, [2j * np.pi, 1j * np.pi]) is ok


def test_in_lattice_coefficient_bound():
    assert in_lattice(40j * np.pi, [2j * np.pi])
    assert not in_lattice(42j * np.pi, [2j * np.pi])


def test_winding_generators(pair):
    gens = winding_subgroup(pair)
    assert gens == pytest.approx([2j * np.pi, 1j * np.pi])


def test_quotient_value(pair):
    q = QuotientValue(0.3 + 1j, winding_subgroup(pair))
    assert q == 0.3 + 1j + 5j * np.pi
    assert q != 0.3
    assert q.real == 0.3
    with pytest.raises(TypeError):
        hash(q)


@pytest.mark.parametrize("seed", range(10))
def test_connect_to_identity(pair, seed):
    rng = np.random.default_rng(seed)
    g = sampling.random_invertible_j(pair, rng)
    path = connect_to_identity(g)
    assert path.restricted
    assert _blk_norm(path.endpoint() - g.g) <= 1e-8 * _blk_norm(g.g)
    assert invertibility_sweep(path) > 1e-8
    assert _blk_norm(theta(connect_to_identity(g.inv())).g - g.g) <= 1e-8 * _blk_norm(g.g)


def test_connect_unrestricted(pair, rng):
    h = sampling.random_invertible_a(pair, rng)
    path = connect_to_identity(h)
    assert not path.restricted
    assert _blk_norm(path.endpoint() - h) <= 1e-9


def test_connect_identity_is_constant(pair):
    one = GPairElement(pair.zeros())
    assert tau_tilde(connect_to_identity(one)) == 0


def test_boundary_requires_loop(pair, rng):
    with pytest.raises(NotALoop):
        boundary(sampling.random_path(pair, rng))
    with pytest.raises(SupportViolation):
        boundary(constant_path(pair, restricted=False))


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("order", [1, 2])
def test_bott_triangle(pair, seed, order):
    rng = np.random.default_rng(seed)
    p_ = amplify(pair, order)
    proj, ranks = sampling.random_projection_j(p_, rng)
    tt = tau_tilde(boundary(bott_class(proj, p_.zeros())))
    expected = -2j * np.pi * sum(pair.weight_map[k] * r for k, r in ranks.items())
    assert tt == pytest.approx(expected, abs=1e-10)
    assert tt == pytest.approx(-2j * np.pi * tau(mat_trace(proj)), abs=1e-10)
    assert in_lattice(tt, winding_subgroup(p_))


def test_bott_equal_projections(pair, rng):
    proj, _ = sampling.random_projection_j(pair, rng)
    assert abs(tau_tilde(bott_class(proj, proj))) <= 1e-12


def test_bott_support(pair):
    e = pair.identity()
    with pytest.raises(SupportViolation):
        bott_class(e, pair.zeros())


@pytest.mark.parametrize("seed", range(4))
def test_exactness_probe(pair, seed):
    rng = np.random.default_rng(seed)
    pairs = [(sampling.random_path(pair, rng, segments=1, scale=0.5),
              sampling.random_path(pair, rng, restricted=False, segments=1, scale=0.5)) for _ in range(2)]
    probe = exactness_probe(pairs)
    assert probe["additivity"] <= 1e-8
    assert probe["theta_gamma"] <= 1e-8
    assert probe["lift"] <= 1e-8
    assert probe["lattice"]


def test_commutator_lift_checks(pair, rng):
    a = sampling.random_path(pair, rng, restricted=False)
    with pytest.raises(SupportViolation):
        commutator_lift([(a, a)])
    with pytest.raises(ValueError):
        commutator_lift([])
    assert tau_tilde(commutator_lift([], pair)) == 0
    other = TracialPair([2], [0], {0: 1.0})
    with pytest.raises(PairMismatch):
        commutator_lift([(sampling.random_path(pair, rng), sampling.random_path(other, rng, restricted=False))])
