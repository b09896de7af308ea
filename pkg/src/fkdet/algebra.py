"""Finite block model of the relative pair (trace ideal, von Neumann algebra).

A :class:`TracialPair` describes a block-diagonal algebra ``A = (+)_k M_{n_k}``
with a trace ``tau(x) = sum_{k in S} w_k Tr(x_k)``. Blocks in the finite
mask ``S`` carry trace; blocks outside it model the part of the algebra
where the trace is infinite, so the ideal ``J`` is the set of elements that
vanish there.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numkernel as nk
from .errors import PairMismatch, ShapeMismatch, Singular, SupportViolation

__all__ = [
    "TracialPair",
    "AElement",
    "JElement",
    "GPairElement",
    "TensorChain",
    "tau",
    "j_norm",
    "a_norm",
    "entry_sum_norm",
    "hochschild_b",
    "amplify",
    "amplify_element",
    "embed_corner",
    "mat_trace",
]


@dataclass(frozen=True)
class TracialPair:
    """Weighted block algebra with a finite-trace mask.

    Parameters
    ----------
    blocks : sequence of int
        Block dimensions ``n_k``.
    finite_mask : iterable of int
        Indices of the blocks that carry finite trace.
    weights : mapping int -> float
        Positive trace weight of each masked block.
    base, order :
        Set by :func:`amplify`; ``base`` is the unamplified pair and the
        blocks of ``self`` are ``order * base.blocks``.
    """

    blocks: tuple
    finite_mask: tuple
    weights: tuple
    base: "TracialPair | None" = field(default=None, compare=False, repr=False)
    order: int = 1

    def __init__(self, blocks, finite_mask, weights, base=None, order=1):
        blocks = tuple(int(b) for b in blocks)
        mask = tuple(sorted({int(k) for k in finite_mask}))
        if isinstance(weights, dict):
            wmap = {int(k): float(v) for k, v in weights.items()}
        else:
            wmap = {int(k): float(v) for k, v in weights}
        if not blocks or any(b < 1 for b in blocks):
            raise ValueError("need at least one block, all of positive dimension")
        if not mask:
            raise ValueError("finite mask must be non-empty")
        if any(k < 0 or k >= len(blocks) for k in mask):
            raise ValueError("finite mask refers to a non-existent block")
        if set(wmap) != set(mask):
            raise ValueError("weights must be given exactly for the masked blocks")
        if any(not np.isfinite(w) or w <= 0 for w in wmap.values()):
            raise ValueError("weights must be finite and positive")
        if int(order) < 1:
            raise ValueError("order must be >= 1")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "finite_mask", mask)
        object.__setattr__(self, "weights", tuple(sorted(wmap.items())))
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "order", int(order))

    @property
    def nblocks(self):
        return len(self.blocks)

    @property
    def weight_map(self):
        return dict(self.weights)

    def is_finite(self, k):
        return k in self.finite_mask

    def root(self):
        """The unamplified pair this one was built from."""
        return self if self.base is None else self.base

    # convenience constructors -------------------------------------------

    def identity(self):
        return AElement(self, [np.eye(n, dtype=complex) for n in self.blocks])

    def zeros(self, cls=None):
        cls = cls or JElement
        return cls(self, [np.zeros((n, n), dtype=complex) for n in self.blocks])

    def element(self, parts):
        return AElement(self, parts)

    def j_element(self, parts):
        """Build a :class:`JElement`; ``None`` entries become zero blocks."""
        parts = [np.zeros((n, n), dtype=complex) if p is None else p for n, p in zip(self.blocks, parts)]
        return JElement(self, parts)


class AElement:
    """Block-diagonal element of the algebra ``A``.

    Supports ``+``, ``-``, ``@`` (product), scalar ``*`` and ``.H``
    (adjoint). Results of operations involving a :class:`JElement` are
    again ``JElement`` when the ideal property guarantees it.
    """

    __slots__ = ("pair", "parts")
    in_ideal = False

    def __init__(self, pair, parts):
        parts = tuple(nk.as_cmatrix(p) for p in parts)
        if len(parts) != pair.nblocks:
            raise ShapeMismatch(f"expected {pair.nblocks} blocks, got {len(parts)}")
        for n, p in zip(pair.blocks, parts):
            if p.shape != (n, n):
                raise ShapeMismatch(f"block of shape {p.shape}, expected {(n, n)}")
        self.pair = pair
        self.parts = parts
        self._check()

    def _check(self):
        pass

    @classmethod
    def _raw(cls, pair, parts):
        obj = cls.__new__(cls)
        obj.pair = pair
        obj.parts = tuple(parts)
        return obj

    def _same_pair(self, other):
        if self.pair != other.pair:
            raise PairMismatch("operands belong to different tracial pairs")

    def __add__(self, other):
        if not isinstance(other, AElement):
            return NotImplemented
        self._same_pair(other)
        cls = JElement if (self.in_ideal and other.in_ideal) else AElement
        return cls._raw(self.pair, [a + b for a, b in zip(self.parts, other.parts)])

    def __sub__(self, other):
        if not isinstance(other, AElement):
            return NotImplemented
        self._same_pair(other)
        cls = JElement if (self.in_ideal and other.in_ideal) else AElement
        return cls._raw(self.pair, [a - b for a, b in zip(self.parts, other.parts)])

    def __neg__(self):
        return type(self)._raw(self.pair, [-a for a in self.parts])

    def __mul__(self, c):
        if isinstance(c, AElement) or not np.isscalar(c):
            return NotImplemented
        return type(self)._raw(self.pair, [c * a for a in self.parts])

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, AElement):
            return NotImplemented
        self._same_pair(other)
        cls = JElement if (self.in_ideal or other.in_ideal) else AElement
        return cls._raw(self.pair, [a @ b for a, b in zip(self.parts, other.parts)])

    @property
    def H(self):
        return type(self)._raw(self.pair, [a.conj().T for a in self.parts])

    def inv(self):
        """Blockwise inverse, gated like :func:`numkernel.polar`."""
        out = []
        for a in self.parts:
            s = np.linalg.svd(a, compute_uv=False)
            if s[0] == 0.0 or s[-1] < nk.SINGULAR_RTOL * s[0]:
                raise Singular("element is numerically singular")
            out.append(np.linalg.inv(a))
        return AElement._raw(self.pair, out)

    def to_ideal(self):
        """Reinterpret as a :class:`JElement` (validates the support)."""
        return JElement(self.pair, self.parts)

    def as_a(self):
        return AElement._raw(self.pair, self.parts)

    def is_j_supported(self):
        return all(not p.any() for k, p in enumerate(self.parts) if not self.pair.is_finite(k))

    def allclose(self, other, atol=1e-10):
        self._same_pair(other)
        return all(np.allclose(a, b, rtol=0, atol=atol) for a, b in zip(self.parts, other.parts))

    def __repr__(self):
        return f"{type(self).__name__}(blocks={self.pair.blocks})"


class JElement(AElement):
    """Element of the ideal: exactly zero on blocks outside the finite mask."""

    __slots__ = ()
    in_ideal = True

    def _check(self):
        for k, p in enumerate(self.parts):
            if not self.pair.is_finite(k) and p.any():
                raise SupportViolation(f"block {k} lies outside the finite mask but is non-zero")


class GPairElement:
    """Invertible ``g = 1 + j`` with ``j`` in the ideal.

    Build from the perturbation (``GPairElement(j)``) or from ``g`` itself
    via :meth:`from_element`.
    """

    __slots__ = ("j",)

    def __init__(self, j):
        if not isinstance(j, JElement):
            j = JElement(j.pair, j.parts)
        self.j = j
        for p in self.g.parts:
            s = np.linalg.svd(p, compute_uv=False)
            if s[0] == 0.0 or s[-1] < nk.SINGULAR_RTOL * s[0]:
                raise Singular("1 + j is numerically singular")

    @classmethod
    def from_element(cls, g):
        pair = g.pair
        parts = []
        for k, (n, p) in enumerate(zip(pair.blocks, g.parts)):
            d = p - np.eye(n)
            if not pair.is_finite(k):
                if np.any(p != np.eye(n)):
                    raise SupportViolation(f"g differs from the identity on infinite block {k}")
                d = np.zeros_like(d)
            parts.append(d)
        return cls(JElement._raw(pair, parts))

    @property
    def pair(self):
        return self.j.pair

    @property
    def g(self):
        return AElement._raw(self.pair, [np.eye(n) + p for n, p in zip(self.pair.blocks, self.j.parts)])

    def inv(self):
        return GPairElement.from_element(_exact_identity_off_mask(self.g.inv()))

    def __matmul__(self, other):
        if isinstance(other, GPairElement):
            return GPairElement.from_element(_exact_identity_off_mask(self.g @ other.g))
        return NotImplemented

    def conjugate_by(self, h):
        """``h g h^-1`` for ``h`` invertible in ``A``."""
        return GPairElement.from_element(_exact_identity_off_mask(h @ self.g @ h.inv()))

    def __repr__(self):
        return f"GPairElement(blocks={self.pair.blocks})"


def _exact_identity_off_mask(x):
    # g = 1 + j restricted to infinite blocks is exactly 1 in exact arithmetic;
    # h g h^-1 picks up rounding there, which is removed here
    pair = x.pair
    parts = [p if pair.is_finite(k) else np.eye(n, dtype=complex)
             for k, (n, p) in enumerate(zip(pair.blocks, x.parts))]
    return AElement._raw(pair, parts)


class TensorChain:
    """Finite sum ``sum_i j_i (x) a_i`` in the projective tensor product.

    Terms are stored blockwise as stacks ``(N, n_k, n_k)``; iterating
    yields ``(JElement, AElement)`` pairs.
    """

    __slots__ = ("pair", "j_stacks", "a_stacks")

    def __init__(self, pair, terms=()):
        self.pair = pair
        self.j_stacks = [np.zeros((0, n, n), dtype=complex) for n in pair.blocks]
        self.a_stacks = [np.zeros((0, n, n), dtype=complex) for n in pair.blocks]
        terms = list(terms)
        for j, a in terms:
            if j.pair != pair or a.pair != pair:
                raise PairMismatch("tensor term over a different pair")
            if not j.is_j_supported():
                raise SupportViolation("first tensor factor must lie in the ideal")
        if terms:
            self.j_stacks = [np.stack([j.parts[k] for j, _ in terms]) for k in range(pair.nblocks)]
            self.a_stacks = [np.stack([a.parts[k] for _, a in terms]) for k in range(pair.nblocks)]

    @classmethod
    def from_stacks(cls, pair, j_stacks, a_stacks):
        out = cls(pair)
        out.j_stacks = [np.asarray(x, dtype=complex) for x in j_stacks]
        out.a_stacks = [np.asarray(x, dtype=complex) for x in a_stacks]
        for k in range(pair.nblocks):
            if not pair.is_finite(k) and out.j_stacks[k].any():
                raise SupportViolation("first tensor factor must lie in the ideal")
        return out

    def __len__(self):
        return self.j_stacks[0].shape[0]

    def __iter__(self):
        for i in range(len(self)):
            yield (JElement._raw(self.pair, [x[i] for x in self.j_stacks]),
                   AElement._raw(self.pair, [x[i] for x in self.a_stacks]))

    @property
    def terms(self):
        return list(self)


def tau(x):
    """Weighted trace ``sum_{k in S} w_k Tr(x_k)``."""
    pair = x.pair
    total = 0j
    for k, w in pair.weights:
        total += w * np.trace(x.parts[k])
    return complex(total)


def a_norm(x):
    """Operator norm: max of blockwise spectral norms."""
    return max(nk.op_norm(p) for p in x.parts)


def j_norm(x):
    """Norm ``||x|| + tau(|x|)`` of the trace ideal."""
    absval = JElement._raw(x.pair, [nk.func_herm(p.conj().T @ p, lambda v: np.sqrt(np.clip(v, 0, None)))
                                    for p in x.parts])
    return a_norm(x) + tau(absval).real


def entry_sum_norm(x, n):
    """Entry-sum norm ``sum_{kl} ||x_{kl}||_J`` of an ``n``-amplified element.

    Diagnostic only; the package works with :func:`j_norm` on amplified
    pairs, which is equivalent at fixed ``n``.
    """
    if x.pair.order != n:
        raise ShapeMismatch("element is not over an n-fold amplification")
    total = 0.0
    for r in range(n):
        for c in range(n):
            total += j_norm(_sub_block(x, r, c))
    return total


def hochschild_b(chain):
    """Hochschild boundary ``sum_i (j_i a_i - a_i j_i)``."""
    pair = chain.pair
    acc = []
    for k, n in enumerate(pair.blocks):
        j, a = chain.j_stacks[k], chain.a_stacks[k]
        if not pair.is_finite(k) or j.shape[0] == 0:
            acc.append(np.zeros((n, n), dtype=complex))
        else:
            acc.append((j @ a - a @ j).sum(axis=0))
    return JElement._raw(pair, acc)


# amplification ----------------------------------------------------------


def amplify(pair, n):
    """The pair ``(M_n(J), M_n(A))``: block ``k`` becomes ``n * n_k``."""
    n = int(n)
    if n < 1:
        raise ValueError("amplification order must be >= 1")
    if n == 1:
        return pair
    root = pair.root()
    order = pair.order * n
    return TracialPair([order * b for b in root.blocks], root.finite_mask, root.weights,
                       base=root, order=order)


def amplify_element(grid):
    """Assemble an ``n x n`` grid of elements into one amplified element.

    ``grid[r][c]`` are elements over the same pair; the result lives over
    ``amplify(pair, n)`` and is a :class:`JElement` when every entry is.
    """
    n = len(grid)
    if n == 0 or any(len(row) != n for row in grid):
        raise ShapeMismatch("grid must be square and non-empty")
    pair = grid[0][0].pair
    for row in grid:
        for x in row:
            if x.pair != pair:
                raise PairMismatch("grid entries over different pairs")
    big = amplify(pair, n)
    parts = [np.block([[grid[r][c].parts[k] for c in range(n)] for r in range(n)])
             for k in range(pair.nblocks)]
    in_j = all(x.in_ideal for row in grid for x in row)
    return (JElement if in_j else AElement)._raw(big, parts)


def embed_corner(x, n, fill_identity=False):
    """``diag(x, 0, ..., 0)`` (or ``diag(x, 1, ..., 1)``) in ``amplify(pair, n)``."""
    pair = x.pair
    z = pair.zeros(AElement)
    one = pair.identity()
    grid = [[x if (r == c == 0) else (one if (r == c and fill_identity) else z) for c in range(n)]
            for r in range(n)]
    out = amplify_element(grid)
    if x.in_ideal and not fill_identity:
        return JElement._raw(out.pair, out.parts)
    return out


def _sub_block(x, r, c):
    pair = x.pair
    base = pair.root()
    parts = []
    for k, nb in enumerate(base.blocks):
        parts.append(x.parts[k][r * nb:(r + 1) * nb, c * nb:(c + 1) * nb])
    cls = JElement if x.in_ideal else AElement
    return cls._raw(base, [p.copy() for p in parts])


def mat_trace(x, n=None):
    """Sum of the diagonal sub-blocks of an amplified element.

    For an element over an unamplified pair this is the identity map. When
    ``n`` is given it must match the amplification order of ``x``.
    """
    pair = x.pair
    if n is not None and int(n) != pair.order:
        raise ShapeMismatch(f"element is amplified {pair.order}-fold, not {n}-fold")
    if pair.order == 1:
        return x
    base = pair.root()
    n = pair.order
    for k, nb in enumerate(base.blocks):
        if x.parts[k].shape != (n * nb, n * nb):
            raise ShapeMismatch("element shape does not match its amplification")
    acc = [np.zeros((nb, nb), dtype=complex) for nb in base.blocks]
    for r in range(n):
        blk = _sub_block(x, r, r)
        for k in range(base.nblocks):
            acc[k] += blk.parts[k]
    cls = JElement if x.in_ideal else AElement
    return cls._raw(base, acc)
