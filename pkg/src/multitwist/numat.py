"""Dense complex linear algebra and antilinear operator calculus.

Matrices are plain ``complex128`` numpy arrays. An antiunitary ``J`` is
stored as its unitary part ``U`` with action ``v -> U @ conj(v)``, so every
identity involving ``J`` becomes a linear matrix identity.
"""

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9


class DimensionError(ValueError):
    pass


class NotHermitianError(ValueError):
    def __init__(self, asymmetry, scale):
        self.asymmetry = asymmetry
        super().__init__(f"matrix is not Hermitian: ||m - m*|| = {asymmetry:.3e} (||m|| = {scale:.3e})")


class SingularMatrixError(ValueError):
    def __init__(self, smallest, message="matrix is singular"):
        self.smallest = smallest
        super().__init__(f"{message}: smallest |eigenvalue| or singular value = {smallest:.3e}")


def as_cmatrix(m):
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def _square(m, name="matrix"):
    m = as_cmatrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got {m.shape}")
    return m


def adjoint(m):
    return np.conj(m).T


def commutator(a, b):
    return a @ b - b @ a


def kron(a, b):
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def op_norm(m):
    """Spectral norm, via the largest eigenvalue of ``m* m``."""
    m = as_cmatrix(m)
    if m.size == 0:
        return 0.0
    lam = np.linalg.eigvalsh(adjoint(m) @ m)[-1]
    return float(np.sqrt(max(lam, 0.0)))


def hs_norm(m):
    return float(np.linalg.norm(m))


def herm_eig(m, tol=DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Raises NotHermitianError when ``||m - m*|| > tol * max(1, ||m||)``.
    """
    m = _square(m)
    scale = op_norm(m)
    asym = op_norm(m - adjoint(m))
    if asym > tol * max(1.0, scale):
        raise NotHermitianError(asym, scale)
    h = 0.5 * (m + adjoint(m))
    lam, v = np.linalg.eigh(h)
    return lam, v


def herm_function(m, fn, tol=DEFAULT_TOL):
    """Apply a scalar function to a Hermitian matrix through its spectrum."""
    lam, v = herm_eig(m, tol)
    return (v * fn(lam)) @ adjoint(v)


def herm_exp(m, tol=DEFAULT_TOL):
    return herm_function(m, lambda lam: np.exp(lam).astype(np.complex128), tol)


def principal_sqrt(m, tol=DEFAULT_TOL):
    """Principal square root of an invertible Hermitian matrix.

    Positive eigenvalues map to their positive root, negative ones to
    ``1j * sqrt(|lam|)``; the result is normal and squares back to ``m``.
    """
    lam, v = herm_eig(m, tol)
    smallest = float(np.min(np.abs(lam))) if lam.size else 0.0
    if smallest <= tol * max(1.0, float(np.max(np.abs(lam)))):
        raise SingularMatrixError(smallest)
    roots = np.where(lam > 0, np.sqrt(np.abs(lam)) + 0j, 1j * np.sqrt(np.abs(lam)))
    return (v * roots) @ adjoint(v)


def inverse(m, max_cond=1e12):
    m = _square(m)
    s = np.linalg.svd(m, compute_uv=False)
    if s.size and (s[-1] == 0.0 or s[0] / s[-1] > max_cond):
        raise SingularMatrixError(float(s[-1]), f"matrix is singular (condition number > {max_cond:.1e})")
    return np.linalg.inv(m)


def condition_number(m):
    s = np.linalg.svd(as_cmatrix(m), compute_uv=False)
    return float("inf") if s[-1] == 0.0 else float(s[0] / s[-1])


@dataclass(frozen=True, eq=False)
class AntilinearOp:
    """Antiunitary ``v -> unitary @ conj(v)`` with ``J^2 = square_sign``."""

    unitary: np.ndarray
    square_sign: int

    def __post_init__(self):
        u = _square(self.unitary, "unitary part")
        if self.square_sign not in (1, -1):
            raise ValueError(f"square_sign must be +1 or -1, got {self.square_sign}")
        object.__setattr__(self, "unitary", u)

    @property
    def dim(self):
        return self.unitary.shape[0]

    def isometry_defect(self):
        u = self.unitary
        return op_norm(u @ adjoint(u) - np.eye(self.dim))

    def square_defect(self):
        u = self.unitary
        return op_norm(u @ np.conj(u) - self.square_sign * np.eye(self.dim))

    def validate(self, tol=DEFAULT_TOL):
        iso = self.isometry_defect()
        if iso > tol:
            raise ValueError(f"unitary part is not unitary: ||U U* - I|| = {iso:.3e}")
        sq = self.square_defect()
        if sq > tol:
            raise ValueError(f"J^2 != {self.square_sign:+d}: ||U conj(U) - eps I|| = {sq:.3e}")
        return self


def measure_square_sign(u):
    """Return the sign s in ``U conj(U) = s I`` closest to the data."""
    p = u @ np.conj(u)
    eye = np.eye(u.shape[0])
    return 1 if op_norm(p - eye) <= op_norm(p + eye) else -1


def _check_vec(j, v):
    v = np.asarray(v, dtype=np.complex128)
    if v.shape[0] != j.dim:
        raise DimensionError(f"vector of length {v.shape[0]} does not match J of dimension {j.dim}")
    return v


def al_apply(j, v):
    v = _check_vec(j, v)
    return j.unitary @ np.conj(v)


def al_conjugate(j, m):
    """Matrix of the linear operator ``J m J^-1``."""
    m = _square(m)
    if m.shape[0] != j.dim:
        raise DimensionError(f"matrix of size {m.shape[0]} does not match J of dimension {j.dim}")
    u = j.unitary
    return u @ np.conj(m) @ adjoint(u)


def al_compose_sign(d, j, n):
    """Matrix M with ``d J n = (v -> M conj(v))``."""
    d = _square(d)
    n = _square(n)
    if not (d.shape[0] == n.shape[0] == j.dim):
        raise DimensionError(f"dimensions {d.shape[0]}, {j.dim}, {n.shape[0]} do not match")
    return d @ j.unitary @ np.conj(n)


def al_tensor(j1, j2):
    return AntilinearOp(np.kron(j1.unitary, j2.unitary), j1.square_sign * j2.square_sign)


def random_unitary(n, rng):
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(n, rng):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (z + adjoint(z))


PAULI = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)
