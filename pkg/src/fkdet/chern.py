"""Generalized logarithm, relative Chern character and transgression.

The logarithm of a relative path is the integral of ``sigma' sigma^-1``.
It is computed with composite Gauss-Legendre quadrature whose panels are
the seams of the path; each panel is checked by node doubling and bisected
when the two rules disagree.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .algebra import JElement, TensorChain, hochschild_b, mat_trace, tau
from .errors import QuadratureFailure, SupportViolation

__all__ = [
    "gauss_legendre",
    "integrate_blocks",
    "rel_log",
    "ch_rel",
    "tau_tilde",
    "transgression_L",
    "TransgressionResult",
]

DEFAULT_NODES = 32
TARGET_TOL = 1e-10
FAIL_TOL = 1e-8
MAX_DEPTH = 8


@lru_cache(maxsize=None)
def _leggauss(m):
    x, w = np.polynomial.legendre.leggauss(m)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(a, b, m):
    """Nodes and weights of the ``m``-point Gauss-Legendre rule on [a, b]."""
    x, w = _leggauss(int(m))
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def _panels(breaks, split=1):
    pts = [0.0] + [float(c) for c in sorted(breaks) if 0.0 < c < 1.0] + [1.0]
    out = []
    for a, b in zip(pts, pts[1:]):
        if b > a:
            edges = np.linspace(a, b, split + 1)
            out.extend(zip(edges[:-1], edges[1:]))
    return out


def _rule_pair(func, a, b, m):
    # the m- and 2m-point rules in one batched evaluation
    t1, w1 = gauss_legendre(a, b, m)
    t2, w2 = gauss_legendre(a, b, 2 * m)
    vals = func(np.concatenate([t1, t2]))
    coarse = [np.einsum("m,mij->ij", w1, blk[:m]) for blk in vals]
    fine = [np.einsum("m,mij->ij", w2, blk[m:]) for blk in vals]
    return coarse, fine


def _diff(x, y):
    return max(float(np.max(np.abs(p - q))) if p.size else 0.0 for p, q in zip(x, y))


def integrate_blocks(func, breaks=(), nodes=DEFAULT_NODES, target=TARGET_TOL, fail=FAIL_TOL):
    """Integrate a block-stack valued function over [0, 1].

    ``func(ts)`` must return a list of arrays of shape ``(len(ts), n, n)``.
    Returns ``(integral, error_estimate)``. Panels whose ``m`` and ``2m``
    rules differ by more than ``target`` (scaled by panel length) are
    bisected up to ``MAX_DEPTH`` times; :class:`QuadratureFailure` is raised
    if the accumulated estimate still exceeds ``fail``.
    """
    total = None
    err = 0.0
    stack = [(a, b, 0) for a, b in reversed(_panels(breaks))]
    while stack:
        a, b, depth = stack.pop()
        coarse, fine = _rule_pair(func, a, b, nodes)
        d = _diff(coarse, fine)
        if d > target * (b - a) and depth < MAX_DEPTH:
            mid = 0.5 * (a + b)
            stack.append((mid, b, depth + 1))
            stack.append((a, mid, depth + 1))
            continue
        err += d
        total = fine if total is None else [t + f for t, f in zip(total, fine)]
    if err > fail:
        raise QuadratureFailure(f"node doubling changed the integral by {err:.3e}")
    return total, err


def rel_log(sigma, nodes=DEFAULT_NODES, return_error=False):
    """``int_0^1 sigma'(t) sigma(t)^-1 dt`` for a J-restricted path."""
    if not sigma.restricted:
        raise SupportViolation("the generalized logarithm needs a J-restricted path")
    pair = sigma.pair

    def integrand(ts):
        vals, ders = sigma.evaluate(ts)
        return [d @ np.linalg.inv(v) for v, d in zip(vals, ders)]

    parts, err = integrate_blocks(integrand, sigma.breaks(), nodes)
    for k in range(pair.nblocks):
        if not pair.is_finite(k):
            parts[k] = np.zeros_like(parts[k])
    out = JElement._raw(pair, parts)
    return (out, err) if return_error else out


def ch_rel(sigma, nodes=DEFAULT_NODES):
    """Relative Chern character: matrix trace of the generalized logarithm."""
    return mat_trace(rel_log(sigma, nodes))


def tau_tilde(sigma, nodes=DEFAULT_NODES):
    """``-tau(ch_rel(sigma))``."""
    return -tau(ch_rel(sigma, nodes))


class TransgressionResult:
    """The chain ``L(H)`` together with its grid-doubling error estimate."""

    def __init__(self, chain, error):
        self.chain = chain
        self.error = error


def _transgression_terms(hom, nodes, split=1):
    # outer rule in s (panels from s_breaks), inner composite rule in t whose
    # panels follow the seams of H(s, .); all nodes evaluated in one batch
    s_all, t_all, w_all = [], [], []
    for a, b in _panels(hom.s_breaks(), split):
        ss, sw = gauss_legendre(a, b, nodes)
        for s, ws in zip(ss, sw):
            for ta, tb in _panels(hom.t_breaks(s), split):
                ts, tw = gauss_legendre(ta, tb, nodes)
                s_all.append(np.full(ts.shape, s))
                t_all.append(ts)
                w_all.append(ws * tw)
    ss, ts, ws = np.concatenate(s_all), np.concatenate(t_all), np.concatenate(w_all)
    h, ht, hs = hom.evaluate(ss, ts)
    terms_j, terms_a = [], []
    for k in range(hom.pair.nblocks):
        hi = np.linalg.inv(h[k])
        terms_j.append((-ws)[:, None, None] * (ht[k] @ hi))
        terms_a.append(hs[k] @ hi)
    return terms_j, terms_a


def _boundary_of(terms_j, terms_a, pair):
    out = []
    for k in range(pair.nblocks):
        j, a = terms_j[k], terms_a[k]
        out.append((j @ a - a @ j).sum(axis=0))
    return out


def transgression_L(hom, nodes=24, tol=1e-7, return_error=False, max_split=8):
    """Transgression chain ``-int int dH/dt H^-1 (x) dH/ds H^-1 dt ds``.

    Each Gauss node ``(s, t)`` contributes one tensor term; the node weight
    and the sign are folded into the ideal factor. Seams of ``H`` become
    panel boundaries, so the chain has ``nodes**2`` terms per panel pair.
    The error is estimated by comparing the Hochschild boundary of the
    chain against the grid with doubled node count; while the estimate
    exceeds ``tol`` every panel is bisected (up to ``max_split`` pieces).
    """
    pair = hom.pair
    split = 1
    while True:
        tj, ta = _transgression_terms(hom, nodes, split)
        tj2, ta2 = _transgression_terms(hom, 2 * nodes, split)
        err = _diff(_boundary_of(tj, ta, pair), _boundary_of(tj2, ta2, pair))
        if err <= tol:
            break
        if split >= max_split:
            raise QuadratureFailure(f"transgression grid doubling changed b(L(H)) by {err:.3e}")
        split *= 2
    for k in range(pair.nblocks):
        if not pair.is_finite(k):
            tj[k] = np.zeros_like(tj[k])
    chain = TensorChain.from_stacks(pair, tj, ta)
    return TransgressionResult(chain, err) if return_error else chain


def transgression_boundary(hom, nodes=24, tol=1e-7):
    """``b(L(H))`` computed straight from the chain."""
    return hochschild_b(transgression_L(hom, nodes, tol))
