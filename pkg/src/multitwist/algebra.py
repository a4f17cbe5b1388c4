"""Finite *-subalgebras of matrices held as Hilbert-Schmidt orthonormal bases.

Conditions quantified over "all a, b in A" are bilinear in (a, b), so it is
enough to evaluate them on basis pairs.
"""

from dataclasses import dataclass, field

import numpy as np

from .numat import DEFAULT_TOL, DimensionError, adjoint, as_cmatrix, op_norm


class ClosureError(RuntimeError):
    def __init__(self, reached, max_dim):
        self.reached = reached
        super().__init__(f"span closure exceeded max_dim={max_dim} (reached dimension {reached})")


@dataclass(eq=False)
class StarAlgebraBasis:
    dim_h: int
    generators: list
    basis: np.ndarray  # shape (k, dim_h, dim_h), orthonormal in <x, y> = tr(x* y)
    _norms: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[0]

    def op_norms(self):
        if self._norms is None:
            self._norms = np.array([op_norm(b) for b in self.basis])
        return self._norms

    def coefficients(self, x):
        return np.einsum("kij,ij->k", np.conj(self.basis), x)

    def combine(self, coeffs):
        return np.einsum("k,kij->ij", np.asarray(coeffs, dtype=np.complex128), self.basis)

    def orthonormality_defect(self):
        flat = self.basis.reshape(self.dim, -1)
        gram = np.conj(flat) @ flat.T
        return float(np.max(np.abs(gram - np.eye(self.dim)))) if self.dim else 0.0

    def mapped(self, fn):
        """Apply a map that preserves the Hilbert-Schmidt inner product to every element."""
        return StarAlgebraBasis(
            self.dim_h,
            [fn(g) for g in self.generators],
            np.array([fn(b) for b in self.basis]),
        )


class _Span:
    def __init__(self, n, tol):
        self.n = n
        self.tol = tol
        self.vecs = []

    def add(self, x):
        v = x.reshape(-1)
        scale = 1.0 + np.linalg.norm(v)
        r = v.copy()
        if self.vecs:
            q = np.array(self.vecs)
            # modified Gram-Schmidt, then one re-orthogonalization pass
            for _ in range(2):
                for qi in q:
                    r = r - qi * np.vdot(qi, r)
        nr = np.linalg.norm(r)
        if nr > self.tol * scale:
            self.vecs.append(r / nr)
            return True
        return False

    def matrices(self):
        return np.array(self.vecs).reshape(len(self.vecs), self.n, self.n)


def _check_square_family(mats):
    mats = [as_cmatrix(m) for m in mats]
    if not mats:
        raise DimensionError("at least one matrix is required")
    n = mats[0].shape[0]
    for m in mats:
        if m.shape != (n, n):
            raise DimensionError(f"expected square matrices of size {n}, got {m.shape}")
    return mats, n


def span_closure(generators, tol=DEFAULT_TOL, max_dim=None):
    """Basis of the unital *-algebra generated by ``generators``."""
    gens, n = _check_square_family(generators)
    max_dim = n * n if max_dim is None else max_dim
    span = _Span(n, tol)
    for m in [np.eye(n, dtype=np.complex128)] + gens + [adjoint(g) for g in gens]:
        span.add(m)
        if len(span.vecs) > max_dim:
            raise ClosureError(len(span.vecs), max_dim)

    done = 0
    while True:
        mats = span.matrices()
        k = len(mats)
        if done == k:
            break
        for i in range(k):
            for j in range(k):
                if i < done and j < done:
                    continue
                span.add(mats[i] @ mats[j])
                if len(span.vecs) > max_dim:
                    raise ClosureError(len(span.vecs), max_dim)
            if i >= done:
                span.add(adjoint(mats[i]))
        done = k
    return StarAlgebraBasis(n, gens, span.matrices())


def membership_residual(x, a):
    """Hilbert-Schmidt distance from ``x`` to the span of the basis."""
    x = as_cmatrix(x)
    if x.shape != (a.dim_h, a.dim_h):
        raise DimensionError(f"matrix of shape {x.shape} does not act on dimension {a.dim_h}")
    return float(np.linalg.norm(x - a.combine(a.coefficients(x))))


def commutant_residual(x, a):
    """max over basis elements b of ``||[x, b]||``."""
    x = as_cmatrix(x)
    if x.shape != (a.dim_h, a.dim_h):
        raise DimensionError(f"matrix of shape {x.shape} does not act on dimension {a.dim_h}")
    return max(op_norm(x @ b - b @ x) for b in a.basis)


def product_defect(a):
    """Largest membership residual of a product of two basis elements."""
    worst = 0.0
    for x in a.basis:
        for y in a.basis:
            worst = max(worst, membership_residual(x @ y, a))
    return worst
