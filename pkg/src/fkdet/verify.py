"""Seeded invariant suites, one function per module.

Each suite returns a list of :class:`Check` rows; the CLI ``verify``
command concatenates them into a report.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkernel as nk
from . import sampling
from .algebra import TensorChain, TracialPair, a_norm, amplify, hochschild_b, j_norm, mat_trace, tau
from .chern import ch_rel, rel_log, tau_tilde, transgression_L
from .det import det_closed, property_suite
from .ktheory import (bott_class, boundary, commutator_lift, connect_to_identity, exactness_probe, in_lattice,
                      theta, winding_subgroup)
from .paths import (ConjugationHomotopy, PerturbationHomotopy, ReparametrizationHomotopy, concat_smooth,
                    conjugate_path, invertibility_sweep)

DEFAULT_PAIR = TracialPair([3, 2, 2], [0, 1], {0: 1.0, 1: 0.5})


@dataclass(frozen=True)
class Check:
    name: str
    value: object
    reference: object
    deviation: float
    tolerance: float

    @property
    def passed(self):
        return bool(self.deviation <= self.tolerance)


def _max_check(name, devs, tol, value=None, reference=0.0):
    dev = float(max(devs)) if devs else 0.0
    return Check(name, dev if value is None else value, reference, dev, tol)


def _blk_norm(x):
    return max(nk.op_norm(p) for p in x.parts)


def numkernel_suite(seed, trials):
    eig, pol, ex, ulog, sub = [], [], [], [], []
    for rng in sampling.rng_streams(seed, trials):
        n = int(rng.integers(1, 9))
        m = sampling._gauss(rng, n) * 3
        h = 0.5 * (m + m.conj().T)
        evals, u = nk.herm_eig(h)
        eig.append(nk.op_norm((u * evals) @ u.conj().T - h) / (1 + nk.op_norm(h)))
        g = sampling._invertible_block(rng, n, 1e6)
        uu, p = nk.polar(g)
        pol.append(nk.op_norm(uu @ p - g) / nk.op_norm(g))
        x = sampling._gauss(rng, n)
        x = x / max(1.0, nk.op_norm(x))
        ex.append(nk.op_norm(nk.mat_exp(x) @ nk.mat_exp(-x) - np.eye(n)))
        xl = nk.unitary_log(uu)
        ulog.append(nk.op_norm(nk.mat_exp(1j * xl) - uu))
        b = sampling._gauss(rng, n)
        sub.append(max(0.0, nk.op_norm(m @ b) - nk.op_norm(m) * nk.op_norm(b)))
    return [
        _max_check("numkernel.eig_reconstruction", eig, 1e-10),
        _max_check("numkernel.polar_reconstruction", pol, 1e-9),
        _max_check("numkernel.exp_inverse", ex, 1e-10),
        _max_check("numkernel.unitary_log_roundtrip", ulog, 1e-8),
        _max_check("numkernel.norm_submultiplicative", sub, 1e-9),
    ]


def algebra_suite(pair, seed, trials):
    hyper, ideal_norm, dominate, tb, support = [], [], [], [], []
    for rng in sampling.rng_streams(seed, trials):
        j = sampling.random_j(pair, rng)
        a = sampling.random_a(pair, rng)
        b = sampling.random_a(pair, rng)
        hyper.append(abs(tau(j @ a) - tau(a @ j)) / (1 + j_norm(j) * a_norm(a)))
        ideal_norm.append(max(0.0, j_norm(a @ j @ b) - a_norm(a) * j_norm(j) * a_norm(b)))
        dominate.append(max(0.0, a_norm(j) - j_norm(j)))
        chain = TensorChain(pair, [(sampling.random_j(pair, rng), sampling.random_a(pair, rng)) for _ in range(3)])
        tb.append(abs(tau(hochschild_b(chain))))
        support.append(0.0 if ((a @ j).is_j_supported() and (j @ a).is_j_supported()) else 1.0)
    return [
        _max_check("algebra.hyper_trace", hyper, 1e-10),
        _max_check("algebra.ideal_norm_axiom", ideal_norm, 1e-9),
        _max_check("algebra.norm_domination", dominate, 1e-9),
        _max_check("algebra.tau_kills_boundary", tb, 1e-10),
        _max_check("algebra.ideal_support_exact", support, 0.0),
    ]


def chern_suite(pair, seed, trials, nodes=32):
    homot, trans, additive, conj, commut, fd = [], [], [], [], [], []
    for rng in sampling.rng_streams(seed, trials):
        sigma = sampling.random_path(pair, rng, restricted=False, segments=2, scale=0.3)
        tp = sampling.random_path(pair, rng, restricted=True, segments=2, scale=0.3)
        hom = ConjugationHomotopy(sigma, tp)
        s1 = conjugate_path(sigma, tp)
        s0 = conjugate_path(sigma.endpoint(), tp)
        lhs = hochschild_b(transgression_L(hom))
        rhs = rel_log(s1, nodes) - rel_log(s0, nodes)
        trans.append(_blk_norm(lhs - rhs))
        homot.append(abs(tau(ch_rel(s1, nodes)) - tau(ch_rel(s0, nodes))))
        conj.append(abs(tau_tilde(s1, nodes) - tau_tilde(tp, nodes)))
        for h in (ReparametrizationHomotopy(tp), PerturbationHomotopy(tp, sampling.random_j(pair, rng, 0.3))):
            homot.append(abs(tau(ch_rel(h.start, nodes)) - tau(ch_rel(h.end, nodes))))

        s0p = sampling.random_path(pair, rng, restricted=True, scale=0.4)
        s1p = sampling.random_path(pair, rng, restricted=True, scale=0.4)
        additive.append(abs(tau_tilde(concat_smooth(s0p, s1p), nodes) - tau_tilde(s0p, nodes) - tau_tilde(s1p, nodes)))

        lift = commutator_lift([(s0p, sigma)])
        commut.append(abs(tau_tilde(lift, nodes)))

        ts = np.linspace(0.05, 0.95, 20)
        h = 1e-6
        vp, _ = tp.evaluate(ts + h)
        vm, _ = tp.evaluate(ts - h)
        _, d = tp.evaluate(ts)
        fd.append(max(float(np.max(np.abs((p - m) / (2 * h) - q))) for p, m, q in zip(vp, vm, d)))
    return [
        _max_check("chern.transgression_identity", trans, 1e-6),
        _max_check("chern.homotopy_invariance", homot, 1e-7),
        _max_check("chern.conjugation_invariance", conj, 1e-7),
        _max_check("chern.additivity", additive, 1e-7),
        _max_check("chern.commutator_vanishing", commut, 1e-7),
        _max_check("paths.finite_difference_derivative", fd, 1e-6),
    ]


def ktheory_suite(pair, seed, trials, nodes=32):
    exact_add, exact_theta, exact_lat, bott, section, sweep, endpoint = [], [], [], [], [], [], []
    pair2 = amplify(pair, 2)
    for rng in sampling.rng_streams(seed, trials):
        alpha = sampling.random_path(pair, rng, restricted=True, segments=1, scale=0.5)
        beta = sampling.random_path(pair, rng, restricted=False, segments=1, scale=0.5)
        probe = exactness_probe([(alpha, beta)], nodes)
        exact_add.append(probe["additivity"])
        exact_theta.append(probe["theta_gamma"])
        exact_lat.append(0.0 if probe["lattice"] else 1.0)

        for p_ in (pair, pair2):
            proj, _ = sampling.random_projection_j(p_, rng)
            loop = boundary(bott_class(proj, p_.zeros()))
            ref = -2j * np.pi * tau(mat_trace(proj))
            bott.append(abs(tau_tilde(loop, nodes) - ref))

        g = sampling.random_invertible_j(pair, rng)
        path = connect_to_identity(g.inv())
        section.append(_blk_norm(theta(path).g - g.g))
        sweep.append(max(0.0, 1e-8 - invertibility_sweep(path)))
        endpoint.append(_blk_norm(connect_to_identity(g).endpoint() - g.g))
    return [
        _max_check("ktheory.exactness_additivity", exact_add, 1e-7),
        _max_check("ktheory.exactness_theta_loop", exact_theta, 1e-8),
        _max_check("ktheory.exactness_loop_in_lattice", exact_lat, 0.0),
        _max_check("ktheory.bott_trace_triangle", bott, 1e-7),
        _max_check("ktheory.theta_section", section, 1e-8),
        _max_check("ktheory.connect_endpoint", endpoint, 1e-8),
        _max_check("ktheory.invertibility_sweep", sweep, 0.0),
    ]


def det_suite(pair, seed, trials, nodes=32, tol=1e-6):
    rep = property_suite(pair, trials, seed, nodes=nodes, tol=tol)
    return [Check(f"det.{name}", dev, 0.0, dev, t) for name, dev, t, _ in rep.rows()]


def run_all(pair=None, seed=1, trials=200, nodes=32, tol=1e-6):
    """Every suite with sub-seeds derived from ``seed``.

    The path-heavy suites run ``max(1, trials // 20)`` trials.
    """
    pair = pair or DEFAULT_PAIR
    seeds = np.random.SeedSequence(seed).generate_state(5)
    heavy = max(1, trials // 20)
    checks = []
    checks += numkernel_suite(int(seeds[0]), min(trials, 100))
    checks += algebra_suite(pair, int(seeds[1]), trials)
    checks += chern_suite(pair, int(seeds[2]), heavy, nodes)
    checks += ktheory_suite(pair, int(seeds[3]), heavy, nodes)
    checks += det_suite(pair, int(seeds[4]), max(1, trials // 4), nodes, tol)
    return checks


__all__ = ["Check", "DEFAULT_PAIR", "numkernel_suite", "algebra_suite", "chern_suite", "ktheory_suite",
           "det_suite", "run_all", "in_lattice", "winding_subgroup", "det_closed"]
