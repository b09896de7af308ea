"""Smooth paths and loops in the invertible groups of a tracial pair.

All paths share the :class:`Path` interface: batched evaluation of values
and derivatives per block, the list of interior seam points (used by the
quadrature to place panel boundaries), pointwise product ``*`` and
:meth:`Path.inverse`.

The concrete representative class is :class:`SmoothPath`, a
piecewise-exponential path

    sigma(t) = g_i exp(rho((t - t_i) / (t_{i+1} - t_i)) X_i)   on [t_i, t_{i+1}]

with the flat ramp :func:`ramp`, so derivatives are exact and vanish at
every seam.
"""
from __future__ import annotations

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit, logit

from . import numkernel as nk
from .algebra import AElement, JElement
from .errors import NotIdempotent, OutOfRange, PairMismatch, Singular, SupportViolation

__all__ = [
    "ramp",
    "ramp_deriv",
    "ramp_inverse",
    "Path",
    "Segment",
    "SmoothPath",
    "constant_path",
    "exp_path",
    "ConstantValue",
    "ProductPath",
    "InversePath",
    "ReparamPath",
    "IdempotentLoop",
    "pw_product",
    "pw_inverse",
    "pw_commutator",
    "conjugate_path",
    "concat_smooth",
    "idempotent_loop",
    "invertibility_sweep",
    "Homotopy",
    "ConjugationHomotopy",
    "ReparametrizationHomotopy",
    "PerturbationHomotopy",
    "conjugation_homotopy",
]

SEAM_TOL = 1e-10
SWEEP_TOL = 1e-8


# ramp -------------------------------------------------------------------


def ramp(t):
    """Smooth monotone step: 0 on (-inf, 0], 1 on [1, inf), flat at both ends.

    ``rho(t) = b(t) / (b(t) + b(1 - t))`` with ``b(t) = exp(-1/t)``, written
    as a logistic function for numerical stability.
    """
    t = np.asarray(t, dtype=float)
    out = np.where(t >= 1.0, 1.0, 0.0)
    inside = (t > 0.0) & (t < 1.0)
    if np.any(inside):
        ti = t[inside]
        out[inside] = expit(1.0 / (1.0 - ti) - 1.0 / ti)
    return out


def ramp_deriv(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > 0.0) & (t < 1.0)
    if np.any(inside):
        ti = t[inside]
        e = expit(1.0 / (1.0 - ti) - 1.0 / ti)
        w = e * (1.0 - e)
        # w underflows to 0 long before the second factor overflows
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            out[inside] = np.where(w > 0.0, w * (1.0 / (1.0 - ti) ** 2 + 1.0 / ti ** 2), 0.0)
    return out


def ramp_inverse(c):
    """Solve ``ramp(x) = c`` for ``c`` in (0, 1)."""
    lg = float(logit(c))
    return 2.0 / (np.sqrt(lg * lg + 4.0) - lg + 2.0)


def _eye_stack(n, m):
    return np.broadcast_to(np.eye(n, dtype=complex), (m, n, n)).copy()


def _check_t(t):
    t = float(t)
    if not (0.0 <= t <= 1.0):
        raise OutOfRange(f"parameter {t} outside [0, 1]")
    return t


# base class -------------------------------------------------------------


class Path:
    """Interface shared by every path-valued object.

    Subclasses implement ``_block(k, ts)`` returning ``(values, derivs)``
    as arrays of shape ``(len(ts), n_k, n_k)``. For J-restricted paths the
    blocks outside the finite mask are identically 1 and are never
    evaluated.
    """

    pair = None
    restricted = False

    def _block(self, k, ts):
        raise NotImplementedError

    def breaks(self):
        """Interior points of [0, 1] where the path is only C-infinity."""
        return []

    def _block_any(self, k, ts):
        n = self.pair.blocks[k]
        if self.restricted and not self.pair.is_finite(k):
            return _eye_stack(n, ts.size), np.zeros((ts.size, n, n), dtype=complex)
        return self._block(k, ts)

    def evaluate(self, ts):
        """Per-block stacks of values and derivatives at the points ``ts``."""
        ts = np.asarray(ts, dtype=float).reshape(-1)
        vals, ders = [], []
        for k in range(self.pair.nblocks):
            v, d = self._block_any(k, ts)
            vals.append(v)
            ders.append(d)
        return vals, ders

    def _element(self, parts, ideal=False):
        return (JElement if ideal else AElement)._raw(self.pair, parts)

    def eval(self, t):
        t = _check_t(t)
        vals, _ = self.evaluate([t])
        return self._element([v[0] for v in vals])

    def deriv(self, t):
        t = _check_t(t)
        _, ders = self.evaluate([t])
        return self._element([d[0] for d in ders], ideal=self.restricted)

    def endpoint(self):
        return self.eval(1.0)

    def __mul__(self, other):
        if not isinstance(other, Path):
            return NotImplemented
        return pw_product(self, other)

    def inverse(self):
        return InversePath(self)

    def is_loop(self, atol=1e-10):
        one = self.pair.identity()
        return self.eval(0.0).allclose(one, atol) and self.eval(1.0).allclose(one, atol)


# piecewise exponential representatives ---------------------------------


class Segment:
    """One exponential piece ``base @ exp(ramp(s) * generator)``."""

    __slots__ = ("t0", "t1", "base", "generator", "_exp")

    def __init__(self, t0, t1, base, generator):
        if not t1 > t0:
            raise ValueError("segment must have positive length")
        self.t0 = float(t0)
        self.t1 = float(t1)
        self.base = base
        self.generator = generator
        self._exp = [None] * base.pair.nblocks

    def exp_family(self, k):
        if self._exp[k] is None:
            self._exp[k] = nk.ScaledExp(self.generator.parts[k])
        return self._exp[k]

    def end_value(self):
        parts = [b @ nk.mat_exp(x) for b, x in zip(self.base.parts, self.generator.parts)]
        return AElement._raw(self.base.pair, parts)


class SmoothPath(Path):
    """Piecewise-exponential smooth path starting at the identity.

    Parameters
    ----------
    pair : TracialPair
    segments : sequence of Segment or (t0, t1, base, generator) tuples
        Must tile [0, 1]; each segment must end where the next begins.
    restricted : bool
        J-restricted paths (``sigma(t) - 1`` in the ideal) model the group
        of relative paths; unrestricted ones live in ``GL(A)``.
    """

    def __init__(self, pair, segments, restricted=True, sweep=True):
        self.pair = pair
        self.restricted = bool(restricted)
        segs = [s if isinstance(s, Segment) else Segment(*s) for s in segments]
        if not segs:
            raise ValueError("a path needs at least one segment")
        self.segments = tuple(segs)
        self._validate()
        self._edges = np.array([s.t1 for s in segs[:-1]])
        if sweep:
            smin = invertibility_sweep(self)
            if smin <= SWEEP_TOL:
                raise Singular(f"path is not invertible along [0, 1] (min singular value {smin:.2e})")

    def _validate(self):
        segs = self.segments
        one = self.pair.identity()
        if segs[0].t0 != 0.0 or segs[-1].t1 != 1.0:
            raise ValueError("segments must cover [0, 1]")
        for a, b in zip(segs, segs[1:]):
            if a.t1 != b.t0:
                raise ValueError("segments must be contiguous")
        for s in segs:
            if s.base.pair != self.pair or s.generator.pair != self.pair:
                raise PairMismatch("segment data over a different pair")
            if self.restricted and not (s.generator.is_j_supported() and (s.base - one).is_j_supported()):
                raise SupportViolation("J-restricted path with data outside the finite mask")
        if not segs[0].base.allclose(one, 0.0):
            raise ValueError("path must start at the identity")
        for a, b in zip(segs, segs[1:]):
            end = a.end_value()
            scale = 1.0 + max(nk.op_norm(p) for p in end.parts)
            if not end.allclose(b.base, SEAM_TOL * scale):
                raise ValueError("segment end does not match the next base")

    @classmethod
    def from_generators(cls, pair, generators, restricted=True, sweep=True):
        """Equal-length segments, each base being the previous endpoint."""
        m = len(generators)
        base = pair.identity()
        segs = []
        for i, x in enumerate(generators):
            segs.append(Segment(i / m, (i + 1) / m if i + 1 < m else 1.0, base, x))
            base = segs[-1].end_value()
        return cls(pair, segs, restricted=restricted, sweep=sweep)

    def breaks(self):
        return [s.t0 for s in self.segments[1:]]

    def _block(self, k, ts):
        n = self.pair.blocks[k]
        idx = np.searchsorted(self._edges, ts, side="left") if self._edges.size else np.zeros(ts.size, int)
        vals = np.empty((ts.size, n, n), dtype=complex)
        ders = np.empty((ts.size, n, n), dtype=complex)
        for i in np.unique(idx):
            sel = idx == i
            seg = self.segments[i]
            h = seg.t1 - seg.t0
            s = (ts[sel] - seg.t0) / h
            e = seg.exp_family(k)(ramp(s))
            x = seg.generator.parts[k]
            v = seg.base.parts[k] @ e
            vals[sel] = v
            ders[sel] = (v @ x) * (ramp_deriv(s) / h)[:, None, None]
        return vals, ders


def constant_path(pair, restricted=True):
    return SmoothPath(pair, [(0.0, 1.0, pair.identity(), pair.zeros())], restricted=restricted, sweep=False)


def exp_path(x, restricted=None):
    """One-segment path ``t -> exp(ramp(t) x)`` from 1 to ``exp(x)``."""
    if restricted is None:
        restricted = x.is_j_supported()
    pair = x.pair
    return SmoothPath(pair, [(0.0, 1.0, pair.identity(), x)], restricted=restricted)


# evaluators built from other paths --------------------------------------


class ConstantValue(Path):
    """The constant map ``t -> value`` (need not be the identity)."""

    def __init__(self, value, restricted=None):
        self.pair = value.pair
        self.value = value
        if restricted is None:
            restricted = (value - value.pair.identity()).is_j_supported()
        self.restricted = restricted

    def _block(self, k, ts):
        n = self.pair.blocks[k]
        v = np.broadcast_to(self.value.parts[k], (ts.size, n, n)).copy()
        return v, np.zeros_like(v)


class ProductPath(Path):
    """Pointwise product ``t -> a(t) b(t)`` with the product rule."""

    def __init__(self, a, b, restricted=None):
        if a.pair != b.pair:
            raise PairMismatch("paths over different pairs")
        self.pair = a.pair
        self.a, self.b = a, b
        self.restricted = (a.restricted and b.restricted) if restricted is None else restricted

    def breaks(self):
        return sorted(set(self.a.breaks()) | set(self.b.breaks()))

    def _block(self, k, ts):
        va, da = self.a._block_any(k, ts)
        vb, db = self.b._block_any(k, ts)
        return va @ vb, da @ vb + va @ db


class InversePath(Path):
    """Pointwise inverse with derivative ``-s^-1 s' s^-1``."""

    def __init__(self, a):
        self.pair = a.pair
        self.a = a
        self.restricted = a.restricted

    def breaks(self):
        return self.a.breaks()

    def _block(self, k, ts):
        v, d = self.a._block_any(k, ts)
        vi = np.linalg.inv(v)
        return vi, -(vi @ d @ vi)

    def inverse(self):
        return self.a


class ReparamPath(Path):
    """``t -> a(phi(t))`` for a smooth reparametrisation ``phi``."""

    def __init__(self, a, phi, dphi, breaks=()):
        self.pair = a.pair
        self.a = a
        self.phi, self.dphi = phi, dphi
        self.restricted = a.restricted
        self._breaks = sorted(breaks)

    def breaks(self):
        return list(self._breaks)

    def _block(self, k, ts):
        u = np.clip(self.phi(ts), 0.0, 1.0)
        v, d = self.a._block_any(k, u)
        return v, d * self.dphi(ts)[:, None, None]


class IdempotentLoop(Path):
    """``t -> exp(2 pi i t) e + 1 - e`` for an idempotent ``e``."""

    def __init__(self, e, tol=1e-10):
        self.pair = e.pair
        self.e = e.as_a()
        for p in e.parts:
            if nk.op_norm(p @ p - p) > tol:
                raise NotIdempotent("e @ e differs from e by more than the tolerance")
        self.restricted = e.is_j_supported()

    def _block(self, k, ts):
        n = self.pair.blocks[k]
        e = self.e.parts[k]
        z = np.exp(2j * np.pi * ts)[:, None, None]
        one = np.eye(n)
        v = z * e + (one - e)
        return v, (2j * np.pi) * z * e

    def inverse(self):
        return _IdempotentLoopInverse(self)


class _IdempotentLoopInverse(Path):
    # closed form: (z e + 1 - e)^-1 = z^-1 e + 1 - e
    def __init__(self, loop):
        self.pair = loop.pair
        self.loop = loop
        self.restricted = loop.restricted

    def _block(self, k, ts):
        n = self.pair.blocks[k]
        e = self.loop.e.parts[k]
        z = np.exp(-2j * np.pi * ts)[:, None, None]
        v = z * e + (np.eye(n) - e)
        return v, (-2j * np.pi) * z * e

    def inverse(self):
        return self.loop


# operations -------------------------------------------------------------


def pw_product(a, b):
    """Pointwise product of two paths over the same pair."""
    return ProductPath(a, b)


def pw_inverse(a):
    return a.inverse()


def pw_commutator(alpha, beta):
    """``t -> alpha beta alpha^-1 beta^-1``; J-restricted if either factor is."""
    restricted = alpha.restricted or beta.restricted
    return ProductPath(ProductPath(alpha, beta), ProductPath(alpha.inverse(), beta.inverse()),
                       restricted=restricted)


def conjugate_path(h, path):
    """``t -> h(t) path(t) h(t)^-1``; ``h`` may be a Path or a fixed element."""
    if not isinstance(h, Path):
        h = ConstantValue(h, restricted=False)
    return ProductPath(ProductPath(h, path, restricted=False), h.inverse(), restricted=path.restricted)


def _half_ramp(t):
    return ramp(2.0 * np.asarray(t, dtype=float))


def _half_ramp_deriv(t):
    return 2.0 * ramp_deriv(2.0 * np.asarray(t, dtype=float))


def concat_smooth(sigma0, sigma1):
    """Smooth concatenation: ``sigma1`` on [0, 1/2], then ``sigma0 * sigma1(1)``.

    Realised as ``(sigma0 o psi) * (sigma1 o phi)`` with ``phi(t) = ramp(2t)``
    and ``psi(t) = phi(t - 1/2)``; the endpoint is ``sigma0(1) sigma1(1)``.
    """
    if sigma0.pair != sigma1.pair:
        raise PairMismatch("paths over different pairs")
    if sigma0.restricted != sigma1.restricted:
        raise SupportViolation("cannot concatenate a J-restricted with an unrestricted path")
    b1 = [0.5 * ramp_inverse(c) for c in sigma1.breaks()]
    b0 = [0.5 + 0.5 * ramp_inverse(c) for c in sigma0.breaks()]
    first = ReparamPath(sigma1, _half_ramp, _half_ramp_deriv, b1)
    second = ReparamPath(sigma0, lambda t: _half_ramp(np.asarray(t) - 0.5),
                         lambda t: _half_ramp_deriv(np.asarray(t) - 0.5), b0 + [0.5])
    return ProductPath(second, first)


def idempotent_loop(e, tol=1e-10):
    """Bott loop ``t -> exp(2 pi i t) e + 1 - e`` of an idempotent."""
    return IdempotentLoop(e, tol)


def invertibility_sweep(path, npoints=64):
    """Smallest singular value of ``path(t)`` over an even grid of [0, 1]."""
    ts = np.linspace(0.0, 1.0, npoints)
    vals, _ = path.evaluate(ts)
    return float(min(np.linalg.svd(v, compute_uv=False)[:, -1].min() for v in vals))


# homotopies -------------------------------------------------------------


class Homotopy:
    """Two-parameter family ``H(s, t)`` with fixed endpoints in ``t``.

    ``evaluate(ss, ts)`` returns per-block stacks ``(H, dH/dt, dH/ds)`` at
    the points ``(ss[i], ts[i])`` (a scalar ``s`` is broadcast);
    ``t_breaks(s)`` and ``s_breaks()`` list the seams.
    """

    kind = None
    pair = None
    restricted = True

    def _block(self, k, s, ts):
        raise NotImplementedError

    def t_breaks(self, s):
        return []

    def s_breaks(self):
        return []

    def evaluate(self, ss, ts):
        ts = np.asarray(ts, dtype=float).reshape(-1)
        ss = np.broadcast_to(np.asarray(ss, dtype=float), ts.shape).copy()
        hs, hts, hss = [], [], []
        for k, n in enumerate(self.pair.blocks):
            if self.restricted and not self.pair.is_finite(k):
                hs.append(_eye_stack(n, ts.size))
                hts.append(np.zeros((ts.size, n, n), dtype=complex))
                hss.append(np.zeros((ts.size, n, n), dtype=complex))
                continue
            h, ht, hsd = self._block(k, ss, ts)
            hs.append(h)
            hts.append(ht)
            hss.append(hsd)
        return hs, hts, hss

    def path_at(self, s):
        return _HomotopySlice(self, float(s))

    @property
    def start(self):
        return self.path_at(0.0)

    @property
    def end(self):
        return self.path_at(1.0)


class _HomotopySlice(Path):
    def __init__(self, hom, s):
        self.hom = hom
        self.s = s
        self.pair = hom.pair
        self.restricted = hom.restricted

    def breaks(self):
        return self.hom.t_breaks(self.s)

    def _block(self, k, ts):
        h, ht, _ = self.hom._block(k, np.full(ts.shape, self.s), ts)
        return h, ht


class ConjugationHomotopy(Homotopy):
    """``H(s, t) = sigma(f) tau(t) sigma(f)^-1`` with ``f = ts + 1 - s``.

    ``H(1, .)`` is the pointwise conjugate ``sigma tau sigma^-1`` and
    ``H(0, .)`` is ``sigma(1) tau sigma(1)^-1``.
    """

    kind = "conjugation"

    def __init__(self, sigma, tau_path):
        if sigma.pair != tau_path.pair:
            raise PairMismatch("paths over different pairs")
        if not tau_path.restricted:
            raise SupportViolation("the conjugated path must be J-restricted")
        self.sigma = sigma
        self.tau_path = tau_path
        self.pair = sigma.pair
        self.restricted = True

    def t_breaks(self, s):
        out = set(self.tau_path.breaks())
        if s > 0:
            for c in self.sigma.breaks():
                t = 1.0 - (1.0 - c) / s
                if 0.0 < t < 1.0:
                    out.add(t)
        return sorted(out)

    def s_breaks(self):
        # the seam c of sigma enters the t-range at s = 1 - c
        return sorted(1.0 - c for c in self.sigma.breaks())

    def _block(self, k, s, ts):
        f = ts * s + 1.0 - s
        sv, sd = self.sigma._block_any(k, f)
        tv, td = self.tau_path._block_any(k, ts)
        si = np.linalg.inv(sv)
        h = sv @ tv @ si
        c = sd @ si
        comm = c @ h - h @ c
        ht = s[:, None, None] * comm + sv @ td @ si
        hs = (ts - 1.0)[:, None, None] * comm
        return h, ht, hs


class ReparametrizationHomotopy(Homotopy):
    """``H(s, t) = sigma((1 - s) t + s ramp(t))`` from ``sigma`` to ``sigma o ramp``."""

    kind = "reparametrization"

    def __init__(self, sigma):
        self.sigma = sigma
        self.pair = sigma.pair
        self.restricted = sigma.restricted

    def _r(self, s, ts):
        return (1.0 - s) * ts + s * ramp(ts)

    def t_breaks(self, s):
        out = []
        for c in self.sigma.breaks():
            out.append(brentq(lambda t: (1.0 - s) * t + s * float(ramp(np.array([t]))[0]) - c,
                              0.0, 1.0, xtol=1e-15))
        return sorted(out)

    def _block(self, k, s, ts):
        r = np.clip(self._r(s, ts), 0.0, 1.0)
        v, d = self.sigma._block_any(k, r)
        ht = d * ((1.0 - s) + s * ramp_deriv(ts))[:, None, None]
        hs = d * (ramp(ts) - ts)[:, None, None]
        return v, ht, hs


class PerturbationHomotopy(Homotopy):
    """``H(s, t) = sigma(t) exp(s b(t) y)`` with the bump ``b(t) = sin(pi t)^2``.

    The bump vanishes at both ends, so the endpoints stay fixed.
    """

    kind = "segment-perturbation"

    def __init__(self, sigma, y):
        if y.pair != sigma.pair:
            raise PairMismatch("perturbation over a different pair")
        if sigma.restricted and not y.is_j_supported():
            raise SupportViolation("perturbation of a J-restricted path must lie in the ideal")
        self.sigma = sigma
        self.y = y
        self.pair = sigma.pair
        self.restricted = sigma.restricted
        self._exp = [nk.ScaledExp(p) for p in y.parts]

    def t_breaks(self, s):
        return self.sigma.breaks()

    def _block(self, k, s, ts):
        b = np.sin(np.pi * ts) ** 2
        db = np.pi * np.sin(2.0 * np.pi * ts)
        y = self.y.parts[k]
        e = self._exp[k](s * b)
        v, d = self.sigma._block_any(k, ts)
        ve = v @ e
        h = ve
        ht = d @ e + (ve @ y) * (s * db)[:, None, None]
        hs = (ve @ y) * b[:, None, None]
        return h, ht, hs


def conjugation_homotopy(sigma, tau_path):
    return ConjugationHomotopy(sigma, tau_path)
