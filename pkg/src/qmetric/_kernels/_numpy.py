"""Pure-numpy batched spectral kernels.

These are the fallback implementations of the hot primitives: largest
singular value and extreme Hermitian eigenvalues over a stack of small
matrices.  Sizes 1 and 2 use closed forms evaluated with vectorized
arithmetic; larger sizes go through LAPACK via numpy's batched eigvalsh.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def _herm2_bounds(a00, a11, a01):
    # eigenvalues of [[a00, a01], [conj(a01), a11]] with real diagonal
    mean = 0.5 * (a00 + a11)
    rad = np.sqrt(0.25 * (a00 - a11) ** 2 + np.abs(a01) ** 2)
    return mean - rad, mean + rad


def sv_max_batch(mats: np.ndarray) -> np.ndarray:
    """Largest singular value of each matrix in a (..., k, k) complex stack."""
    mats = np.asarray(mats, dtype=np.complex128)
    k = mats.shape[-1]
    if k == 1:
        return np.abs(mats[..., 0, 0])
    gram = np.einsum("...ji,...jl->...il", mats.conj(), mats)
    if k == 2:
        _, top = _herm2_bounds(
            gram[..., 0, 0].real, gram[..., 1, 1].real, gram[..., 0, 1]
        )
        return np.sqrt(np.maximum(top, 0.0))
    w = np.linalg.eigvalsh(gram)
    return np.sqrt(np.maximum(w[..., -1], 0.0))


def herm_eig_bounds_batch(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Smallest and largest eigenvalue of each Hermitian matrix in a stack."""
    mats = np.asarray(mats, dtype=np.complex128)
    k = mats.shape[-1]
    if k == 1:
        d = mats[..., 0, 0].real
        return d.copy(), d.copy()
    if k == 2:
        lo, hi = _herm2_bounds(
            mats[..., 0, 0].real, mats[..., 1, 1].real, mats[..., 0, 1]
        )
        return lo, hi
    w = np.linalg.eigvalsh(mats)
    return w[..., 0], w[..., -1]


def sv_max_le_batch(mats: np.ndarray, bound: float) -> np.ndarray:
    """Elementwise test ||M||_op <= bound over a (B, k, k) complex stack.

    Decided exactly (up to rounding) through an LDL^* factorization of
    bound^2 I - M^* M, which is positive semidefinite iff the test holds;
    no eigenvalue iteration is involved, which keeps dense grid sweeps cheap.
    """
    mats = np.asarray(mats, dtype=np.complex128)
    k = mats.shape[-1]
    if k <= 2:
        return sv_max_batch(mats) <= bound
    flat = mats.reshape(-1, k, k)
    a = (bound * bound) * np.eye(k, dtype=np.complex128) - np.einsum(
        "bji,bjl->bil", flat.conj(), flat
    )
    ok = np.ones(a.shape[0], dtype=bool)
    tol = 1e-12 * max(1.0, bound * bound)
    for j in range(k):
        pivot = a[:, j, j].real
        ok &= pivot > -tol
        if j == k - 1:
            break
        col = a[:, j + 1 :, j]
        # null pivot: PSD forces the whole column to vanish
        small = pivot <= tol
        if small.any():
            ok &= ~small | (np.abs(col).max(axis=1) <= np.sqrt(tol))
        safe = np.where(pivot > tol, pivot, 1.0)
        l = col / safe[:, None]
        l[small] = 0.0
        a[:, j + 1 :, j + 1 :] -= l[:, :, None] * col.conj()[:, None, :]
    return ok.reshape(mats.shape[:-2])
