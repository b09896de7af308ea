"""Seeded random generators for pairs, elements, paths and projections.

Every function takes a ``numpy.random.Generator`` so callers control the
stream; nothing here touches global random state.
"""
import numpy as np

from .algebra import AElement, GPairElement, JElement, TracialPair
from .paths import SmoothPath


def rng_streams(seed, n):
    """``n`` independent generators derived from one integer seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def random_pair(rng, max_blocks=3, max_dim=8, allow_infinite=True):
    nb = int(rng.integers(1, max_blocks + 1))
    blocks = [int(rng.integers(1, max_dim + 1)) for _ in range(nb)]
    if allow_infinite and nb > 1:
        mask = [k for k in range(nb) if rng.random() < 0.7] or [0]
    else:
        mask = list(range(nb))
    weights = {k: float(rng.choice([0.25, 0.5, 1.0, 1.5, 2.0, 3.0])) for k in mask}
    return TracialPair(blocks, mask, weights)


def _gauss(rng, n):
    return (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2 * n)


def _haar_unitary(rng, n):
    q, r = np.linalg.qr(_gauss(rng, n))
    d = np.diag(r)
    return q * (d / np.abs(d))


def _parts(pair, rng, make, on_mask_only):
    parts = []
    for k, n in enumerate(pair.blocks):
        if on_mask_only and not pair.is_finite(k):
            parts.append(np.zeros((n, n), dtype=complex))
        else:
            parts.append(make(n))
    return parts


def random_j(pair, rng, scale=1.0):
    """Gaussian element of the ideal with operator norm of order ``scale``."""
    return JElement._raw(pair, _parts(pair, rng, lambda n: scale * 2 * _gauss(rng, n), True))


def random_a(pair, rng, scale=1.0):
    return AElement._raw(pair, _parts(pair, rng, lambda n: scale * 2 * _gauss(rng, n), False))


def random_hermitian_j(pair, rng, scale=1.0):
    def make(n):
        x = 2 * _gauss(rng, n)
        return scale * 0.5 * (x + x.conj().T)
    return JElement._raw(pair, _parts(pair, rng, make, True))


def _invertible_block(rng, n, cond_max):
    s = np.exp(rng.uniform(-0.5, 0.5, size=n) * np.log(cond_max))
    return (_haar_unitary(rng, n) * s) @ _haar_unitary(rng, n)


def random_invertible_j(pair, rng, cond_max=1e4):
    """Random ``g = 1 + j`` with condition number at most ``cond_max`` per block."""
    parts = []
    for k, n in enumerate(pair.blocks):
        if pair.is_finite(k):
            parts.append(_invertible_block(rng, n, cond_max) - np.eye(n))
        else:
            parts.append(np.zeros((n, n), dtype=complex))
    return GPairElement(JElement._raw(pair, parts))


def random_invertible_a(pair, rng, cond_max=1e2, off_mask_only=False):
    """Random invertible of ``A``; ``off_mask_only`` makes it 1 on the mask."""
    parts = []
    for k, n in enumerate(pair.blocks):
        if off_mask_only and pair.is_finite(k):
            parts.append(np.eye(n, dtype=complex))
        else:
            parts.append(_invertible_block(rng, n, cond_max))
    return AElement._raw(pair, parts)


def random_unitary_j(pair, rng):
    """Haar unitary on every masked block, identity elsewhere."""
    parts = [(_haar_unitary(rng, n) - np.eye(n)) if pair.is_finite(k) else np.zeros((n, n), dtype=complex)
             for k, n in enumerate(pair.blocks)]
    return GPairElement(JElement._raw(pair, parts))


def random_projection_j(pair, rng, min_rank=1):
    """Orthogonal projection supported on the masked blocks.

    Returns ``(p, ranks)`` with ``ranks[k]`` the rank on block ``k``.
    """
    parts, ranks = [], {}
    for k, n in enumerate(pair.blocks):
        if not pair.is_finite(k):
            parts.append(np.zeros((n, n), dtype=complex))
            continue
        r = int(rng.integers(min(min_rank, n), n + 1))
        q = _haar_unitary(rng, n)[:, :r]
        parts.append(q @ q.conj().T)
        ranks[k] = r
    if sum(ranks.values()) == 0:
        k = pair.finite_mask[0]
        q = _haar_unitary(rng, pair.blocks[k])[:, :1]
        parts[k] = q @ q.conj().T
        ranks[k] = 1
    return JElement._raw(pair, parts), ranks


def random_path(pair, rng, restricted=True, segments=None, scale=0.4):
    """Piecewise-exponential path with Gaussian generators."""
    if segments is None:
        segments = int(rng.integers(1, 4))
    make = random_j if restricted else random_a
    gens = [make(pair, rng, scale) for _ in range(segments)]
    return SmoothPath.from_generators(pair, gens, restricted=restricted)
