"""Residual sweeps over basis pairs.

Every bilinear condition reduces to the same inner loop: for stacks of
matrices ``C[i]``, ``L[j]``, ``R[j]`` compute the spectral norm of
``C[i] @ L[j] - R[j] @ C[i]``. Two implementations are provided, a numba
``@njit`` kernel and a batched numpy one. Set ``MULTITWIST_NO_NUMBA=1`` to
force the numpy path.
"""

import logging
import os

import numpy as np

logger = logging.getLogger(__name__)

_DISABLED = os.environ.get("MULTITWIST_NO_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _DISABLED


def _spectral_norm_np(m):
    # largest singular value from the Hermitian eigenproblem of m* m
    g = np.swapaxes(m.conj(), -1, -2) @ m
    lam = np.linalg.eigvalsh(g)[..., -1]
    return np.sqrt(np.maximum(lam, 0.0))


def stack_norms_numpy(ms):
    return _spectral_norm_np(np.ascontiguousarray(ms, dtype=np.complex128))


def intertwine_grid_numpy(cs, ls, rs):
    """Grid ``out[i, j] = ||cs[i] @ ls[j] - rs[j] @ cs[i]||``, numpy batched."""
    cs = np.ascontiguousarray(cs, dtype=np.complex128)
    ls = np.ascontiguousarray(ls, dtype=np.complex128)
    rs = np.ascontiguousarray(rs, dtype=np.complex128)
    out = np.empty((cs.shape[0], ls.shape[0]))
    for i in range(cs.shape[0]):
        x = cs[i] @ ls - rs @ cs[i]
        out[i] = _spectral_norm_np(x)
    return out


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _norm_nb(m):
        g = m.conj().T @ m
        lam = np.linalg.eigvalsh(g)[-1]
        if lam < 0.0:
            return 0.0
        return np.sqrt(lam)

    @numba.njit(cache=True)
    def stack_norms_numba(ms):
        out = np.empty(ms.shape[0])
        for i in range(ms.shape[0]):
            out[i] = _norm_nb(np.ascontiguousarray(ms[i]))
        return out

    @numba.njit(cache=True)
    def _grid_nb(cs, ls, rs):
        ni = cs.shape[0]
        nj = ls.shape[0]
        out = np.empty((ni, nj))
        for i in range(ni):
            c = np.ascontiguousarray(cs[i])
            for j in range(nj):
                x = c @ np.ascontiguousarray(ls[j]) - np.ascontiguousarray(rs[j]) @ c
                out[i, j] = _norm_nb(x)
        return out

    def intertwine_grid_numba(cs, ls, rs):
        """Grid ``out[i, j] = ||cs[i] @ ls[j] - rs[j] @ cs[i]||``, numba kernel."""
        return _grid_nb(
            np.ascontiguousarray(cs, dtype=np.complex128),
            np.ascontiguousarray(ls, dtype=np.complex128),
            np.ascontiguousarray(rs, dtype=np.complex128),
        )

else:  # pragma: no cover
    stack_norms_numba = None
    intertwine_grid_numba = None


def intertwine_grid(cs, ls, rs):
    if USE_NUMBA:
        return intertwine_grid_numba(cs, ls, rs)
    return intertwine_grid_numpy(cs, ls, rs)


def stack_norms(ms):
    if USE_NUMBA:
        return stack_norms_numba(np.ascontiguousarray(ms, dtype=np.complex128))
    return stack_norms_numpy(ms)


def backend():
    return "numba" if USE_NUMBA else "numpy"
