"""Dense complex Hermitian linear algebra, states, unitaries, and bases.

All values are immutable after construction and every operation is a pure
function, so everything here is safe to use from concurrent workers.
Randomness is always explicit: each stochastic helper takes a seed and runs
a fresh PCG64 generator, which is reproducible across platforms.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, ShapeError

HERMITIAN_TOL = 1e-12
STATE_TOL = 1e-10
UNITARY_TOL = 1e-10


def hermitian_part(a: np.ndarray) -> np.ndarray:
    """Return (A + A^*) / 2."""
    a = np.asarray(a, dtype=np.complex128)
    return 0.5 * (a + a.conj().T)


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.complex128, copy=True)
    out.flags.writeable = False
    return out


def _check_square_finite(a: np.ndarray, what: str) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"{what}: expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise InvalidInputError(f"{what}: dimension must be >= 1")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{what}: entries must be finite")
    return a


def as_matrix(x) -> np.ndarray:
    """Unwrap a HermitianMatrix / DensityState / UnitaryMap or pass an ndarray through."""
    if isinstance(x, HermitianMatrix):
        return x.mat
    if isinstance(x, DensityState):
        return x.rho
    if isinstance(x, UnitaryMap):
        return x.u
    return np.asarray(x, dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """A self-adjoint element of a finite-dimensional matrix algebra.

    The constructor symmetrizes its input, so the stored matrix satisfies
    A = A^* to working precision regardless of round-off in the caller.
    """

    mat: np.ndarray

    def __init__(self, mat):
        mat = _check_square_finite(as_matrix(mat), "HermitianMatrix")
        object.__setattr__(self, "mat", _frozen(hermitian_part(mat)))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return HermitianMatrix(self.mat + as_matrix(other))

    def __sub__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return HermitianMatrix(self.mat - as_matrix(other))

    def __mul__(self, t: float) -> "HermitianMatrix":
        return HermitianMatrix(float(t) * self.mat)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class DensityState:
    """A state, represented by its density matrix: rho >= 0 with unit trace."""

    rho: np.ndarray

    def __init__(self, rho):
        rho = _check_square_finite(as_matrix(rho), "DensityState")
        rho = hermitian_part(rho)
        w = np.linalg.eigvalsh(rho)
        if w[0] < -STATE_TOL:
            raise InvalidInputError(
                f"DensityState: smallest eigenvalue {w[0]:.3e} below -{STATE_TOL}"
            )
        tr = float(np.trace(rho).real)
        if abs(tr - 1.0) > STATE_TOL:
            raise InvalidInputError(f"DensityState: trace {tr!r} is not 1")
        object.__setattr__(self, "rho", _frozen(rho))

    @property
    def dim(self) -> int:
        return self.rho.shape[0]


@dataclass(frozen=True, eq=False)
class UnitaryMap:
    """A unitary U together with the inner automorphism a -> U a U^*."""

    u: np.ndarray

    def __init__(self, u):
        u = _check_square_finite(as_matrix(u), "UnitaryMap")
        n = u.shape[0]
        defect = np.linalg.norm(u.conj().T @ u - np.eye(n))
        if defect > UNITARY_TOL:
            raise InvalidInputError(f"UnitaryMap: ||U*U - I|| = {defect:.3e}")
        object.__setattr__(self, "u", _frozen(u))

    @property
    def dim(self) -> int:
        return self.u.shape[0]

    def apply(self, a) -> np.ndarray:
        """The automorphism U a U^* on a plain matrix."""
        return self.u @ as_matrix(a) @ self.u.conj().T

    def inverse(self) -> "UnitaryMap":
        return UnitaryMap(self.u.conj().T)

    def compose(self, other: "UnitaryMap") -> "UnitaryMap":
        """Composition of automorphisms: (self o other)(a) = U V a V^* U^*."""
        return UnitaryMap(self.u @ other.u)


@dataclass(frozen=True)
class AlgebraSpec:
    """A direct sum of full matrix algebras, stored inside M_N (N = sum of blocks).

    Elements are block-diagonal matrices; ``project`` confines arithmetic
    round-off back onto the block mask.
    """

    blocks: tuple[int, ...]
    mask: np.ndarray = field(compare=False, repr=False, default=None)

    def __init__(self, blocks):
        blocks = tuple(int(b) for b in blocks)
        if len(blocks) == 0 or any(b < 1 for b in blocks):
            raise InvalidInputError(f"AlgebraSpec: bad blocks {blocks}")
        object.__setattr__(self, "blocks", blocks)
        n = sum(blocks)
        mask = np.zeros((n, n), dtype=bool)
        at = 0
        for b in blocks:
            mask[at : at + b, at : at + b] = True
            at += b
        mask.flags.writeable = False
        object.__setattr__(self, "mask", mask)

    @property
    def total_dim(self) -> int:
        return sum(self.blocks)

    @property
    def sa_dim(self) -> int:
        """Real dimension of the self-adjoint part."""
        return sum(b * b for b in self.blocks)

    def unit(self) -> np.ndarray:
        return np.eye(self.total_dim, dtype=np.complex128)

    def project(self, a) -> np.ndarray:
        """Project a matrix onto the block-diagonal subalgebra."""
        a = as_matrix(a)
        if a.shape != self.mask.shape:
            raise ShapeError(f"project: shape {a.shape} vs algebra dim {self.total_dim}")
        return np.where(self.mask, a, 0.0)

    def contains(self, a, tol: float = 1e-10) -> bool:
        a = as_matrix(a)
        return a.shape == self.mask.shape and np.abs(np.where(self.mask, 0.0, a)).max(initial=0.0) <= tol

    def basis(self) -> "HermitianBasis":
        return HermitianBasis.for_algebra(self)


def _full_block_traceless(n: int) -> list[np.ndarray]:
    """Orthonormal traceless Hermitian basis of M_n (Frobenius inner product)."""
    out: list[np.ndarray] = []
    for k in range(1, n):
        d = np.zeros(n)
        d[:k] = 1.0
        d[k] = -float(k)
        out.append(np.diag(d).astype(np.complex128) / np.sqrt(k * (k + 1)))
    for i in range(n):
        for j in range(i + 1, n):
            x = np.zeros((n, n), dtype=np.complex128)
            x[i, j] = x[j, i] = 1.0 / np.sqrt(2.0)
            out.append(x)
            y = np.zeros((n, n), dtype=np.complex128)
            y[i, j] = 1j / np.sqrt(2.0)
            y[j, i] = -1j / np.sqrt(2.0)
            out.append(y)
    return out


@dataclass(frozen=True, eq=False)
class HermitianBasis:
    """Orthonormal Hermitian basis: identity/sqrt(N) first, the rest traceless.

    ``elements[k]`` are orthonormal for <A, B> = Tr(A^* B); coordinates of
    Hermitian matrices in this basis are real.
    """

    dim: int
    stack: np.ndarray  # (D, N, N), read-only

    def __init__(self, dim: int, elements):
        stack = np.array([as_matrix(e) for e in elements], dtype=np.complex128)
        stack.flags.writeable = False
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "stack", stack)

    @classmethod
    def full(cls, n: int) -> "HermitianBasis":
        return cls.for_algebra(AlgebraSpec((n,)))

    @classmethod
    def for_algebra(cls, algebra: AlgebraSpec) -> "HermitianBasis":
        n = algebra.total_dim
        elements = [np.eye(n, dtype=np.complex128) / np.sqrt(n)]
        # relative block identities, orthogonalized against the global unit
        if len(algebra.blocks) > 1:
            vecs = []
            at = 0
            for b in algebra.blocks:
                v = np.zeros((n, n), dtype=np.complex128)
                v[at : at + b, at : at + b] = np.eye(b)
                vecs.append(v)
                at += b
            basis_so_far = [elements[0]]
            for v in vecs:
                w = v.copy()
                for e in basis_so_far:
                    w -= np.trace(e.conj().T @ w) * e
                nrm = np.linalg.norm(w)
                if nrm > 1e-12:
                    w /= nrm
                    basis_so_far.append(w)
                    elements.append(w)
        # traceless elements inside each block
        at = 0
        for b in algebra.blocks:
            for g in _full_block_traceless(b):
                e = np.zeros((n, n), dtype=np.complex128)
                e[at : at + b, at : at + b] = g
                elements.append(e)
            at += b
        return cls(n, elements)

    @property
    def size(self) -> int:
        return self.stack.shape[0]

    def coords(self, a) -> np.ndarray:
        """Real coordinates of a Hermitian matrix: c_k = Tr(e_k^* a)."""
        a = as_matrix(a)
        return np.einsum("kij,ij->k", self.stack.conj(), a).real

    def to_matrix(self, c: np.ndarray) -> np.ndarray:
        return np.tensordot(np.asarray(c, dtype=np.float64), self.stack, axes=(0, 0))

    def traceless(self) -> "HermitianBasis":
        """The sub-basis spanning the traceless part (identity dropped)."""
        return HermitianBasis(self.dim, self.stack[1:])


# ---------------------------------------------------------------------------
# operations


def operator_norm(a) -> float:
    """Largest singular value (= max |eigenvalue| for Hermitian input)."""
    m = _check_square_finite(as_matrix(a), "operator_norm")
    if np.allclose(m, m.conj().T, atol=1e-13, rtol=0.0):
        w = np.linalg.eigvalsh(hermitian_part(m))
        return float(max(abs(w[0]), abs(w[-1])))
    return float(np.linalg.svd(m, compute_uv=False)[0])


def state_eval(rho: DensityState, a) -> float:
    """phi(a) = Tr(rho a); the (tiny) imaginary part of the trace is discarded."""
    m = as_matrix(a)
    r = as_matrix(rho)
    if r.shape != m.shape:
        raise ShapeError(f"state_eval: state dim {r.shape[0]} vs element dim {m.shape[0]}")
    return float(np.trace(r @ m).real)


def spectral_spread(a) -> float:
    """lambda_max - lambda_min of a Hermitian matrix.

    Equals the largest difference of two state evaluations, which is how the
    state-space diameter reduces to a single matrix quantity.
    """
    m = _check_square_finite(as_matrix(a), "spectral_spread")
    w = np.linalg.eigvalsh(hermitian_part(m))
    return float(w[-1] - w[0])


def central_normalize(a) -> HermitianMatrix:
    """Shift by the optimal multiple of the unit: a - (l_max + l_min)/2 * 1.

    The result has the smallest operator norm among all central shifts of a,
    namely spectral_spread(a)/2.
    """
    m = hermitian_part(as_matrix(a))
    w = np.linalg.eigvalsh(m)
    t = 0.5 * (w[-1] + w[0])
    return HermitianMatrix(m - t * np.eye(m.shape[0]))


# ---------------------------------------------------------------------------
# seeded randomness (PCG64 throughout)


def rng_from_seed(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def child_seed(seed, *tags) -> np.random.SeedSequence:
    """Derive a reproducible child seed from a root seed and string/int tags."""
    ints = []
    for t in tags:
        if isinstance(t, str):
            ints.append(int.from_bytes(hashlib.sha256(t.encode()).digest()[:8], "big"))
        else:
            ints.append(int(t))
    return np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(ints))


def child_rng(seed, *tags) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(child_seed(seed, *tags)))


def _gaussian_complex(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def random_hermitian(seed, dim: int, scale: float = 1.0) -> HermitianMatrix:
    """Gaussian Hermitian matrix: symmetrized complex Gaussian entries."""
    if dim < 1:
        raise InvalidInputError("random_hermitian: dim must be >= 1")
    if scale <= 0:
        raise InvalidInputError("random_hermitian: scale must be > 0")
    g = _gaussian_complex(rng_from_seed(seed), dim)
    return HermitianMatrix(scale * hermitian_part(g))


def random_state(seed, dim: int) -> DensityState:
    """Random density matrix G G^* / Tr(G G^*)."""
    if dim < 1:
        raise InvalidInputError("random_state: dim must be >= 1")
    g = _gaussian_complex(rng_from_seed(seed), dim)
    p = g @ g.conj().T
    return DensityState(p / np.trace(p).real)


def random_unitary(seed, dim: int) -> UnitaryMap:
    """Haar-style unitary from the QR factorization of a complex Gaussian."""
    if dim < 1:
        raise InvalidInputError("random_unitary: dim must be >= 1")
    g = _gaussian_complex(rng_from_seed(seed), dim)
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return UnitaryMap(q)


def random_algebra_hermitian(seed, algebra: AlgebraSpec, scale: float = 1.0) -> HermitianMatrix:
    """Gaussian Hermitian element of a block-diagonal algebra."""
    a = random_hermitian(seed, algebra.total_dim, scale)
    return HermitianMatrix(algebra.project(a.mat))


def random_algebra_automorphism(seed, algebra: AlgebraSpec) -> UnitaryMap:
    """Random *-automorphism of a block-diagonal algebra.

    Composes Haar-style unitaries inside each block with a random
    permutation of equal-sized blocks; these exhaust the automorphisms of a
    finite direct sum of matrix algebras.
    """
    rng = rng_from_seed(seed)
    n = algebra.total_dim
    blocks = algebra.blocks
    # permute block slots among groups of equal size
    perm = list(range(len(blocks)))
    by_size: dict[int, list[int]] = {}
    for i, b in enumerate(blocks):
        by_size.setdefault(b, []).append(i)
    for idxs in by_size.values():
        shuffled = [idxs[j] for j in rng.permutation(len(idxs))]
        for src, dst in zip(idxs, shuffled):
            perm[src] = dst
    offsets = np.cumsum((0,) + blocks)
    u = np.zeros((n, n), dtype=np.complex128)
    for src, dst in enumerate(perm):
        b = blocks[src]
        g = rng.standard_normal((b, b)) + 1j * rng.standard_normal((b, b))
        q, r = np.linalg.qr(g)
        d = np.diag(r)
        q = q * (d / np.abs(d))
        u[offsets[dst] : offsets[dst] + b, offsets[src] : offsets[src] + b] = q
    return UnitaryMap(u)


def pure_state(vector) -> DensityState:
    """Rank-one state from a (not necessarily normalized) vector."""
    v = np.asarray(vector, dtype=np.complex128).reshape(-1)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise InvalidInputError("pure_state: zero vector")
    v = v / nrm
    return DensityState(np.outer(v, v.conj()))


def maximally_mixed(dim: int) -> DensityState:
    return DensityState(np.eye(dim, dtype=np.complex128) / dim)
