"""Representative-level maps of the comparison sequence.

Nothing here canonicalizes K-classes: every function takes and returns
representatives (paths, loops, invertibles), and group-level statements
are checked through ``tau_tilde``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from . import numkernel as nk
from .algebra import AElement, GPairElement, _exact_identity_off_mask
from .chern import tau_tilde
from .errors import NotALoop, PairMismatch, SupportViolation
from .paths import ProductPath, SmoothPath, constant_path, idempotent_loop, pw_commutator

__all__ = [
    "QuotientValue",
    "in_lattice",
    "boundary",
    "theta",
    "connect_to_identity",
    "commutator_lift",
    "bott_class",
    "winding_subgroup",
    "exactness_probe",
]

LATTICE_TOL = 1e-6
LATTICE_BOUND = 20
_ZERO_GEN = 1e-13


def _coefficient_sums(gens, bound):
    if not gens:
        return np.zeros(1, dtype=complex)
    rng = np.arange(-bound, bound + 1)
    grids = np.meshgrid(*([rng] * len(gens)), indexing="ij")
    return sum(g * c.ravel() for g, c in zip(gens, grids)).astype(complex)


def in_lattice(z, generators, tol=LATTICE_TOL, bound=LATTICE_BOUND):
    """Is ``z`` within ``tol`` of ``sum_i c_i g_i`` for integers ``|c_i| <= bound``?

    Meet-in-the-middle over the two halves of the generator list.
    """
    gens = []
    for g in generators:
        g = complex(g)
        if g != 0 and not any(abs(g - h) <= 1e-15 * abs(g) for h in gens):
            gens.append(g)
    z = complex(z)
    if not gens:
        return abs(z) <= tol
    half = len(gens) // 2
    left = _coefficient_sums(gens[:half], bound)
    right = _coefficient_sums(gens[half:], bound)
    tree = cKDTree(np.column_stack([right.real, right.imag]))
    target = z - left
    dist, _ = tree.query(np.column_stack([target.real, target.imag]))
    return bool(np.min(dist) <= tol)


@dataclass(frozen=True, eq=False)
class QuotientValue:
    """A complex number modulo the subgroup generated by ``generators``."""

    rep: complex
    generators: tuple

    def __post_init__(self):
        object.__setattr__(self, "rep", complex(self.rep))
        object.__setattr__(self, "generators", tuple(complex(g) for g in self.generators))

    def equals(self, other, tol=LATTICE_TOL, bound=LATTICE_BOUND):
        if not isinstance(other, QuotientValue):
            other = QuotientValue(other, self.generators)
        return in_lattice(self.rep - other.rep, self.generators + other.generators, tol, bound)

    def __eq__(self, other):
        if not isinstance(other, (QuotientValue, complex, float, int)):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    @property
    def real(self):
        """Real part; well defined when every generator is imaginary."""
        return self.rep.real


def boundary(loop, atol=1e-10):
    """The loop read as a relative path (identity on representatives)."""
    if not loop.restricted:
        raise SupportViolation("boundary map needs a J-restricted loop")
    if not loop.is_loop(atol):
        raise NotALoop("path does not start and end at the identity")
    return loop


def theta(sigma):
    """``[sigma] -> [sigma(1)^-1]``."""
    end = sigma.endpoint()
    inv = _exact_identity_off_mask(end.inv()) if sigma.restricted else end.inv()
    if sigma.restricted:
        return GPairElement.from_element(inv)
    return inv


def _polar_generators(g, restricted):
    pair = g.pair
    ix, lp = [], []
    for k, (n, blk) in enumerate(zip(pair.blocks, g.parts)):
        if restricted and not pair.is_finite(k):
            ix.append(np.zeros((n, n), dtype=complex))
            lp.append(np.zeros((n, n), dtype=complex))
            continue
        u, p = nk.polar(blk)
        x = 1j * nk.unitary_log(u)
        y = nk.func_herm(p, np.log)
        ix.append(x if nk.op_norm(x) > _ZERO_GEN else np.zeros_like(x))
        lp.append(y if nk.op_norm(y) > _ZERO_GEN else np.zeros_like(y))
    return AElement._raw(pair, ix), AElement._raw(pair, lp)


def connect_to_identity(g):
    """Explicit path from 1 to ``g`` through the polar decomposition.

    ``g = u |g|``; the first segment runs ``exp(i s x)`` from 1 to ``u``
    with ``x = -i log u`` (spectrum in (-pi, pi]) and the second multiplies
    by ``exp(s log|g|)``. Segments with a vanishing generator are dropped.
    A :class:`GPairElement` yields a J-restricted path; a plain
    :class:`AElement` yields a path in ``GL(A)``.
    """
    restricted = isinstance(g, GPairElement)
    elem = g.g if restricted else g
    pair = elem.pair
    elem.inv()  # singularity gate
    gens = [x for x in _polar_generators(elem, restricted) if any(p.any() for p in x.parts)]
    if not gens:
        return constant_path(pair, restricted=restricted)
    return SmoothPath.from_generators(pair, gens, restricted=restricted)


def commutator_lift(pairs, pair=None):
    """Pointwise product of the commutators ``[alpha_i, beta_i]``.

    ``alpha_i`` are J-restricted, ``beta_i`` arbitrary; the result is a
    J-restricted path ending at ``prod [alpha_i(1), beta_i(1)]``.
    """
    pairs = list(pairs)
    if not pairs:
        if pair is None:
            raise ValueError("an empty lift needs the pair")
        return constant_path(pair)
    base = pairs[0][0].pair
    out = None
    for alpha, beta in pairs:
        if alpha.pair != base or beta.pair != base:
            raise PairMismatch("paths over different pairs")
        if not alpha.restricted:
            raise SupportViolation("the first factor of each commutator must be J-restricted")
        c = pw_commutator(alpha, beta)
        out = c if out is None else out * c
    return out


def bott_class(e, f, tol=1e-10):
    """Loop ``gamma_e gamma_f^-1`` representing the Bott image of ``[e] - [f]``."""
    if e.pair != f.pair:
        raise PairMismatch("idempotents over different pairs")
    if not (e - f).is_j_supported():
        raise SupportViolation("e - f must lie in the ideal")
    ge = idempotent_loop(e, tol)
    gf = idempotent_loop(f, tol)
    # e - f in the ideal makes the product trivial off the mask
    return ProductPath(ge, gf.inverse(), restricted=True)


def winding_subgroup(pair):
    """Generators ``2 pi i w_k`` of the image of ``tau_tilde`` on loops."""
    return [2j * np.pi * w for _, w in pair.weights]


def exactness_probe(pairs, nodes=32):
    """Lift a product of commutators and split off the loop.

    Given ``(alpha_i, beta_i)``, builds ``c = prod [alpha_i(1), beta_i(1)]``,
    the lift ``tau = commutator_lift(pairs)``, an independent path
    ``sigma = connect_to_identity(c)`` and the loop
    ``gamma = sigma tau^-1``. Returns a dict of residuals: ``theta_gamma``
    (distance of ``theta(gamma)`` to 1), ``additivity``
    (``|tt(sigma) - tt(tau) - tt(gamma)|``), ``lift`` (``|tt(tau)|``) and
    ``lattice`` (whether ``tt(gamma)`` lies in the winding lattice).
    """
    lift = commutator_lift(pairs)
    pair = lift.pair
    c = GPairElement.from_element(_exact_identity_off_mask(lift.endpoint()))
    sigma = connect_to_identity(c)
    gamma = sigma * lift.inverse()
    tt_sigma = tau_tilde(sigma, nodes)
    tt_lift = tau_tilde(lift, nodes)
    tt_gamma = tau_tilde(gamma, nodes)
    th = theta(gamma).g - pair.identity()
    return {
        "theta_gamma": max(nk.op_norm(p) for p in th.parts),
        "additivity": abs(tt_sigma - tt_lift - tt_gamma),
        "lift": abs(tt_lift),
        "lattice": in_lattice(tt_gamma, winding_subgroup(pair), tol=1e-7),
        "tau_tilde_gamma": tt_gamma,
    }
