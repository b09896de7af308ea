"""Dense complex matrix kernels.

Every function takes and returns plain ``numpy`` arrays of shape ``(n, n)``.
The heavy lifting is delegated to LAPACK through numpy/scipy; this module
adds the input gates and the conventions (branch choices, tolerances) the
rest of the package relies on.
"""
import numpy as np
import scipy.linalg

from .errors import DomainError, NoConvergence, NotHermitian, NotUnitary, ShapeMismatch, Singular

__all__ = [
    "as_cmatrix",
    "herm_eig",
    "func_herm",
    "mat_exp",
    "polar",
    "unitary_log",
    "op_norm",
    "is_hermitian",
]

HERMITIAN_RTOL = 1e-12
UNITARY_TOL = 1e-10
SINGULAR_RTOL = 1e-10


def as_cmatrix(m):
    """Validate ``m`` as a finite square complex matrix and return a copy."""
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ShapeMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def op_norm(m):
    """Operator (spectral) norm, i.e. the largest singular value."""
    a = np.asarray(m, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def is_hermitian(m, rtol=HERMITIAN_RTOL):
    a = np.asarray(m)
    return op_norm(a - a.conj().T) <= rtol * (1.0 + op_norm(a))


def herm_eig(m):
    """Eigendecomposition of a Hermitian matrix.

    Returns
    -------
    evals : (n,) ndarray
        Real eigenvalues in ascending order.
    u : (n, n) ndarray
        Unitary matrix whose columns are the corresponding eigenvectors,
        so that ``m = u @ diag(evals) @ u.conj().T``.

    Raises
    ------
    NotHermitian
        If ``||m - m*|| > 1e-12 (1 + ||m||)``.
    NoConvergence
        If the LAPACK driver fails to converge.
    """
    a = as_cmatrix(m)
    if not is_hermitian(a):
        raise NotHermitian("matrix is not Hermitian within 1e-12 relative tolerance")
    a = 0.5 * (a + a.conj().T)
    try:
        evals, u = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return evals, u


def func_herm(m, f):
    """Apply a scalar function to a Hermitian matrix via its spectrum.

    ``f`` receives the eigenvalue vector and must return a vector of the
    same length. A ``RuntimeWarning``/``FloatingPointError`` or a non-finite
    value in ``f(evals)`` is reported as :class:`DomainError`.

    Only spectral projections enter the result, so the arbitrary choice of
    eigenvectors inside a degenerate eigenspace does not matter.
    """
    evals, u = herm_eig(m)
    with np.errstate(all="raise"):
        try:
            fv = np.asarray(f(evals))
        except (FloatingPointError, ValueError) as exc:
            raise DomainError(f"function undefined on spectrum {evals}") from exc
    if fv.shape != evals.shape or not np.all(np.isfinite(fv)):
        raise DomainError(f"function undefined on spectrum {evals}")
    out = (u * fv) @ u.conj().T
    if not np.iscomplexobj(fv):
        out = 0.5 * (out + out.conj().T)
    return out


def mat_exp(x):
    """Matrix exponential by scaling and squaring with a Pade kernel.

    ``mat_exp(0)`` is the identity exactly.
    """
    a = as_cmatrix(x)
    if not a.any():
        return np.eye(a.shape[0], dtype=complex)
    return scipy.linalg.expm(a)


def polar(g):
    """Right polar decomposition ``g = u @ p`` of an invertible matrix.

    Computed from the SVD ``g = w s v*`` as ``u = w v*`` and ``p = v s v*``,
    which is the positive square root of ``g* g``.

    Raises
    ------
    Singular
        If the smallest singular value is below ``1e-10 * ||g||``.
    """
    a = as_cmatrix(g)
    w, s, vh = np.linalg.svd(a)
    if s[-1] < SINGULAR_RTOL * s[0] or s[0] == 0.0:
        raise Singular(f"smallest singular value {s[-1]:.3e} below gate for norm {s[0]:.3e}")
    u = w @ vh
    p = (vh.conj().T * s) @ vh
    p = 0.5 * (p + p.conj().T)
    return u, p


def unitary_log(u):
    """Hermitian ``x`` with ``exp(i x) = u`` and spectrum in ``(-pi, pi]``.

    A unitary is normal, so its complex Schur form is diagonal up to
    rounding; the eigenphases are read off the diagonal. Eigenvalues at
    ``-1`` are sent to ``+pi``.
    """
    a = as_cmatrix(u)
    n = a.shape[0]
    if op_norm(a.conj().T @ a - np.eye(n)) > UNITARY_TOL:
        raise NotUnitary("u*u deviates from the identity by more than 1e-10")
    t, z = scipy.linalg.schur(a, output="complex")
    phases = np.angle(np.diag(t))
    # snap the negative real axis onto +pi so the branch is deterministic
    phases = np.where(phases <= -np.pi + 1e-12, np.pi, phases)
    x = (z * phases) @ z.conj().T
    return 0.5 * (x + x.conj().T)


class ScaledExp:
    """Batched ``c -> exp(c x)`` for a fixed matrix ``x``.

    Normal ``x`` (Hermitian, skew-Hermitian, unitary generators, ...) is
    diagonalised once through its Schur form. A non-normal ``x`` whose
    eigenvector basis has condition number at most ``EIG_COND_MAX`` is
    diagonalised with ``eig``; anything else falls back to a stacked Pade
    evaluation.
    """

    EIG_COND_MAX = 1e4

    def __init__(self, x):
        self.x = as_cmatrix(x)
        n = self.x.shape[0]
        self.zero = not self.x.any()
        self._z = self._d = self._zi = None
        if self.zero:
            return
        x = self.x
        scale = 1.0 + op_norm(x) ** 2
        if op_norm(x @ x.conj().T - x.conj().T @ x) <= 1e-13 * scale:
            t, z = scipy.linalg.schur(x, output="complex")
            if op_norm(np.triu(t, 1)) <= 1e-12 * (1.0 + op_norm(x)):
                self._z, self._d = z, np.diag(t)
                self._zi = z.conj().T
                return
        d, v = np.linalg.eig(x)
        if np.linalg.cond(v) <= self.EIG_COND_MAX:
            self._z, self._d, self._zi = v, d, np.linalg.inv(v)

    def __call__(self, coeffs):
        c = np.asarray(coeffs, dtype=float).reshape(-1)
        n = self.x.shape[0]
        if self.zero:
            return np.broadcast_to(np.eye(n, dtype=complex), (c.size, n, n)).copy()
        if self._z is not None:
            ev = np.exp(c[:, None] * self._d[None, :])
            out = (self._z[None, :, :] * ev[:, None, :]) @ self._zi
        else:
            out = scipy.linalg.expm(c[:, None, None] * self.x[None, :, :])
        # paths must start exactly at 1
        out[c == 0.0] = np.eye(n)
        return out
