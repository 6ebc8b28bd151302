"""Seminorm families built from Dirac-type operators, and their checks.

Five variants are supported, all of the form  L(a) = scale * ||T(a)||_op
with T a linear matrix-valued map:

- ``DiracCommutator``: T(a) = [D, pi(a)]
- ``Perturbed``: T(a) = [D + omega, pi(a)]
- ``Conformal``: T(a) = D_h pi(a) - pi(h^2 a h^-2) D_h, with D_h = pi(h) D pi(h)
- ``Curved``: T(a) = sum_jk H[k, j] (i [X_k, a]) (x) gamma_j
- ``Scaled``: a positive multiple of an inner variant

pi is either the identity or the amplification a -> a (x) I_m.  Linearity of
T is what makes kernel checks and subgradients cheap, so it is part of the
internal contract of this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import _kernels
from .core import (
    AlgebraSpec,
    HermitianBasis,
    HermitianMatrix,
    as_matrix,
    child_rng,
    hermitian_part,
    operator_norm,
)
from .errors import InvalidInputError, ShapeError, SingularInputError
from .serialize import digest, matrix_from_json, matrix_to_json

# ---------------------------------------------------------------------------
# specs


@dataclass(frozen=True, eq=False)
class DiracCommutator:
    d: np.ndarray
    amplification: int = 1

    def __init__(self, d, amplification: int = 1):
        object.__setattr__(self, "d", hermitian_part(as_matrix(d)))
        object.__setattr__(self, "amplification", int(amplification))
        if self.amplification < 1:
            raise InvalidInputError("amplification must be >= 1")


@dataclass(frozen=True, eq=False)
class Perturbed:
    d: np.ndarray
    omega: np.ndarray
    amplification: int = 1

    def __init__(self, d, omega, amplification: int = 1):
        object.__setattr__(self, "d", hermitian_part(as_matrix(d)))
        object.__setattr__(self, "omega", hermitian_part(as_matrix(omega)))
        object.__setattr__(self, "amplification", int(amplification))
        if self.d.shape != self.omega.shape:
            raise ShapeError("Perturbed: omega must act on the same space as D")
        if self.amplification < 1:
            raise InvalidInputError("amplification must be >= 1")


@dataclass(frozen=True, eq=False)
class Conformal:
    d: np.ndarray
    h: np.ndarray
    amplification: int = 1

    def __init__(self, d, h, amplification: int = 1):
        object.__setattr__(self, "d", hermitian_part(as_matrix(d)))
        object.__setattr__(self, "h", hermitian_part(as_matrix(h)))
        object.__setattr__(self, "amplification", int(amplification))
        if self.amplification < 1:
            raise InvalidInputError("amplification must be >= 1")


@dataclass(frozen=True, eq=False)
class Curved:
    xs: tuple[np.ndarray, ...]
    h: np.ndarray  # (m, m) real invertible coefficient matrix

    def __init__(self, xs, h):
        xs = tuple(hermitian_part(as_matrix(x)) for x in xs)
        if not xs:
            raise InvalidInputError("Curved: need at least one generator")
        for x in xs:
            if x.shape != xs[0].shape:
                raise ShapeError("Curved: generators must share a dimension")
            if abs(np.trace(x)) > 1e-10 * max(1.0, float(np.abs(x).max())):
                raise InvalidInputError("Curved: generators must be traceless")
        h = np.asarray(h, dtype=np.float64)
        m = len(xs)
        if h.shape != (m, m):
            raise ShapeError(f"Curved: H must be {m}x{m}")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "h", h)


@dataclass(frozen=True, eq=False)
class Scaled:
    factor: float
    inner: object

    def __init__(self, factor: float, inner):
        if not (factor > 0):
            raise InvalidInputError("Scaled: factor must be > 0")
        object.__setattr__(self, "factor", float(factor))
        object.__setattr__(self, "inner", inner)


LipNormSpec = DiracCommutator | Perturbed | Conformal | Curved | Scaled


# ---------------------------------------------------------------------------
# gamma matrices


def gamma_matrices(m: int) -> list[np.ndarray]:
    """Hermitian generators of the rank-m Clifford relations, size 2^floor(m/2).

    Recursive Pauli construction: gamma_1 = (1); even steps tensor with
    sigma_x and append I (x) sigma_y; odd steps append the chirality element.
    The result is fixed, so downstream values are bit-reproducible.
    """
    if m < 1:
        raise InvalidInputError("gamma_matrices: m must be >= 1")
    sx = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    sy = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
    gs = [np.array([[1.0 + 0j]])]
    for j in range(2, m + 1):
        if j % 2 == 0:
            d = gs[0].shape[0]
            gs = [np.kron(g, sx) for g in gs] + [np.kron(np.eye(d, dtype=np.complex128), sy)]
        else:
            k = (j - 1) // 2
            prod = reduce(np.matmul, gs)
            gs = gs + [((-1j) ** k) * prod]
    return gs


def _amplify(a: np.ndarray, m: int) -> np.ndarray:
    if m == 1:
        return a
    return np.kron(a, np.eye(m, dtype=np.complex128))


# ---------------------------------------------------------------------------
# runtime object


def unwrap_scaled(spec: LipNormSpec) -> tuple[LipNormSpec, float]:
    scale = 1.0
    while isinstance(spec, Scaled):
        scale *= spec.factor
        spec = spec.inner
    return spec, scale


class LipNorm:
    """A seminorm bound to an algebra, evaluated as scale * ||T(a)||_op."""

    def __init__(self, spec: LipNormSpec, algebra: AlgebraSpec):
        self.spec = spec
        self.algebra = algebra
        self.base, self.scale = unwrap_scaled(spec)
        n = algebra.total_dim
        b = self.base

        if isinstance(b, (DiracCommutator, Perturbed, Conformal)):
            rep_dim = n * b.amplification
            if b.d.shape != (rep_dim, rep_dim):
                raise ShapeError(
                    f"D has shape {b.d.shape}, expected {(rep_dim, rep_dim)} "
                    f"for algebra dim {n} with amplification {b.amplification}"
                )
            self.rep_dim = rep_dim
        if isinstance(b, Conformal):
            if b.h.shape != (n, n):
                raise ShapeError("Conformal: h must be an element of the algebra")
            if not algebra.contains(b.h, tol=1e-10):
                raise InvalidInputError("Conformal: h must be block-diagonal in the algebra")
            w, v = np.linalg.eigh(b.h)
            if np.min(np.abs(w)) <= 1e-12 * max(1.0, np.max(np.abs(w))):
                raise SingularInputError("Conformal: h is numerically singular")
            self._h2 = (v * (w**2)) @ v.conj().T
            self._hinv2 = (v * (w**-2.0)) @ v.conj().T
            pi_h = _amplify(b.h, b.amplification)
            self._dh = pi_h @ b.d @ pi_h
        if isinstance(b, Curved):
            if b.xs[0].shape != (n, n):
                raise ShapeError("Curved: generators must act on the algebra space")
            cond = np.linalg.cond(b.h)
            if not np.isfinite(cond) or cond > 1e12:
                raise SingularInputError("Curved: coefficient matrix H is singular")
            self._gammas = gamma_matrices(len(b.xs))
            self.rep_dim = n * self._gammas[0].shape[0]

        self._digest = digest(spec_to_json(spec, algebra))
        self._kernel_result = None  # filled lazily by kernel_check

    # -- linear structure ---------------------------------------------------

    def base_image(self, a) -> np.ndarray:
        """T(a) for the unscaled variant; eval = scale * ||T(a)||_op."""
        a = as_matrix(a)
        b = self.base
        if isinstance(b, DiracCommutator):
            pa = _amplify(a, b.amplification)
            return b.d @ pa - pa @ b.d
        if isinstance(b, Perturbed):
            pa = _amplify(a, b.amplification)
            dw = b.d + b.omega
            return dw @ pa - pa @ dw
        if isinstance(b, Conformal):
            pa = _amplify(a, b.amplification)
            twisted = _amplify(self._h2 @ a @ self._hinv2, b.amplification)
            return self._dh @ pa - twisted @ self._dh
        if isinstance(b, Curved):
            m = len(b.xs)
            out = np.zeros((self.rep_dim, self.rep_dim), dtype=np.complex128)
            for j in range(m):
                acc = np.zeros_like(a)
                for k in range(m):
                    acc += b.h[k, j] * 1j * (b.xs[k] @ a - a @ b.xs[k])
                out += np.kron(acc, self._gammas[j])
            return out
        raise TypeError(f"unknown variant {type(b).__name__}")

    def image_stack(self, mats: np.ndarray) -> np.ndarray:
        """T applied to each matrix of a (d, N, N) stack."""
        return np.stack([self.base_image(m) for m in mats])

    def eval(self, a) -> float:
        return self.scale * operator_norm(self.base_image(a))

    def eval_batch(self, stack: np.ndarray) -> np.ndarray:
        images = self.image_stack(stack)
        return self.scale * _kernels.sv_max_batch(images)

    @property
    def dim(self) -> int:
        return self.algebra.total_dim

    @property
    def digest(self) -> str:
        return self._digest


def eval_lipnorm(lipnorm: LipNorm, a) -> float:
    """Value of the seminorm at a Hermitian element."""
    return lipnorm.eval(a)


def domain_norm(lipnorm: LipNorm, a) -> float:
    """||a||_op + L(a); the graph norm used when comparing seminorms."""
    return operator_norm(a) + lipnorm.eval(a)


# ---------------------------------------------------------------------------
# kernel check


@dataclass(frozen=True, eq=False)
class KernelCheckResult:
    ok: bool
    min_on_sphere: float
    unit_value: float
    witness: HermitianMatrix | None

    def __bool__(self) -> bool:
        return self.ok


def kernel_check(
    lipnorm: LipNorm,
    basis: HermitianBasis | None = None,
    starts: int = 64,
    iterations: int = 150,
    threshold: float = 1e-8,
) -> KernelCheckResult:
    """Decide whether the seminorm vanishes exactly on multiples of the unit.

    L(1) must vanish, and the minimum of L over the Frobenius-unit sphere of
    the traceless subspace must exceed ``threshold``.  The minimum is located
    by multistart projected subgradient descent; one start is preloaded with
    the most nearly degenerate direction of the linear map T (from an SVD of
    its matrixization), which is what makes genuinely degenerate seminorms
    fail reliably.  Returns the minimizing direction as witness on failure.
    """
    default_basis = basis is None
    if default_basis and lipnorm._kernel_result is not None:
        return lipnorm._kernel_result
    if basis is None:
        basis = lipnorm.algebra.basis()
    if basis.dim != lipnorm.dim:
        raise ShapeError("kernel_check: basis dimension mismatch")

    unit_value = lipnorm.eval(np.eye(lipnorm.dim, dtype=np.complex128))
    traceless = basis.stack[1:]
    d = traceless.shape[0]
    tstack = lipnorm.image_stack(traceless)  # (d, R, R)

    # most nearly degenerate direction of the matrixized map
    flat = tstack.reshape(d, -1)
    mat = np.concatenate([flat.real, flat.imag], axis=1).T  # (2R^2, d)
    _, svals, vt = np.linalg.svd(mat, full_matrices=False)
    degenerate_dir = vt[-1]

    rng = child_rng(int(lipnorm.digest, 16) % (2**63), "kernel-check")
    c = rng.standard_normal((starts, d))
    c[0] = degenerate_dir
    c /= np.linalg.norm(c, axis=1, keepdims=True)

    def values(carr: np.ndarray) -> np.ndarray:
        imgs = np.tensordot(carr, tstack, axes=(1, 0))
        return lipnorm.scale * _kernels.sv_max_batch(imgs)

    best_val = values(c)
    best_c = c.copy()
    step = np.full(starts, 0.3)
    for _ in range(iterations):
        imgs = np.tensordot(c, tstack, axes=(1, 0))
        gram = imgs @ np.conj(np.transpose(imgs, (0, 2, 1)))
        w, u = np.linalg.eigh(gram)
        top_u = u[..., -1]
        s = np.sqrt(np.maximum(w[..., -1], 1e-300))
        v = np.einsum("bij,bi->bj", imgs.conj(), top_u) / s[:, None]
        grad = np.einsum("bi,kij,bj->bk", top_u.conj(), tstack, v).real
        grad -= np.einsum("bk,bk->b", grad, c)[:, None] * c  # tangent part
        cand = c - step[:, None] * grad
        nrm = np.linalg.norm(cand, axis=1, keepdims=True)
        nrm[nrm == 0] = 1.0
        cand /= nrm
        cand_val = values(cand)
        improved = cand_val < best_val
        best_val = np.where(improved, cand_val, best_val)
        best_c = np.where(improved[:, None], cand, best_c)
        step = np.where(improved, step * 1.1, step * 0.5)
        c = np.where(improved[:, None], cand, c)
        if np.all(step < 1e-12):
            break

    idx = int(np.argmin(best_val))
    min_val = float(best_val[idx])
    ok = unit_value <= 1e-10 and min_val > threshold
    witness = None
    if not ok:
        witness = HermitianMatrix(np.tensordot(best_c[idx], traceless, axes=(0, 0)))
    result = KernelCheckResult(ok, min_val, unit_value, witness)
    if default_basis:
        lipnorm._kernel_result = result
    return result


# ---------------------------------------------------------------------------
# admissible functions and quasi-Leibniz defect


@dataclass(frozen=True)
class LeibnizF:
    name: str = "leibniz"

    def value(self, x: float, y: float, lx: float, ly: float) -> float:
        return x * ly + y * lx


@dataclass(frozen=True)
class ScaledLeibnizF:
    m: float
    name: str = "scaled-leibniz"

    def __post_init__(self):
        if self.m < 1:
            raise InvalidInputError("ScaledLeibnizF: factor must be >= 1 to be admissible")

    def value(self, x: float, y: float, lx: float, ly: float) -> float:
        return self.m * (x * ly + y * lx)


@dataclass(frozen=True)
class CallableF:
    fn: object
    name: str = "custom"

    def value(self, x, y, lx, ly) -> float:
        return float(self.fn(x, y, lx, ly))


def admissibility_defect(f, seed, samples: int = 256, scale: float = 5.0) -> float:
    """Worst violation of F(x,y,lx,ly) >= x*ly + y*lx on random quadruples (<= 0 is good)."""
    rng = child_rng(seed, "admissibility")
    worst = -np.inf
    for _ in range(samples):
        x, y, lx, ly = rng.uniform(0.0, scale, size=4)
        worst = max(worst, x * ly + y * lx - f.value(x, y, lx, ly))
    return float(worst)


def jordan_product(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    return 0.5 * (a @ b + b @ a)


def lie_product(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    return (a @ b - b @ a) / 2j


def quasi_leibniz_defect(lipnorm: LipNorm, f, a, b) -> float:
    """max{L(jordan), L(lie)} - F(||a||, ||b||, L(a), L(b)); <= 0 certifies the instance."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ShapeError("quasi_leibniz_defect: dimension mismatch")
    proj = lipnorm.algebra.project
    lhs = max(
        lipnorm.eval(hermitian_part(proj(jordan_product(a, b)))),
        lipnorm.eval(hermitian_part(proj(lie_product(a, b)))),
    )
    rhs = f.value(operator_norm(a), operator_norm(b), lipnorm.eval(a), lipnorm.eval(b))
    return float(lhs - rhs)


# ---------------------------------------------------------------------------
# serialization

_VARIANTS = {
    "DiracCommutator": DiracCommutator,
    "Perturbed": Perturbed,
    "Conformal": Conformal,
    "Curved": Curved,
    "Scaled": Scaled,
}


def spec_to_json(spec: LipNormSpec, algebra: AlgebraSpec | None = None) -> dict:
    if isinstance(spec, DiracCommutator):
        out = {
            "variant": "DiracCommutator",
            "d": matrix_to_json(spec.d),
            "amplification": spec.amplification,
        }
    elif isinstance(spec, Perturbed):
        out = {
            "variant": "Perturbed",
            "d": matrix_to_json(spec.d),
            "omega": matrix_to_json(spec.omega),
            "amplification": spec.amplification,
        }
    elif isinstance(spec, Conformal):
        out = {
            "variant": "Conformal",
            "d": matrix_to_json(spec.d),
            "h": matrix_to_json(spec.h),
            "amplification": spec.amplification,
        }
    elif isinstance(spec, Curved):
        out = {
            "variant": "Curved",
            "xs": [matrix_to_json(x) for x in spec.xs],
            "h": np.asarray(spec.h).tolist(),
        }
    elif isinstance(spec, Scaled):
        out = {
            "variant": "Scaled",
            "factor": spec.factor,
            "inner": spec_to_json(spec.inner),
        }
    else:
        raise InvalidInputError(f"unknown lipnorm variant {type(spec).__name__}")
    if algebra is not None:
        out["algebra"] = list(algebra.blocks)
    return out


def spec_from_json(obj: dict) -> LipNormSpec:
    variant = obj.get("variant")
    if variant not in _VARIANTS:
        raise InvalidInputError(f"unknown lipnorm variant tag {variant!r}")
    if variant == "DiracCommutator":
        return DiracCommutator(matrix_from_json(obj["d"]), int(obj.get("amplification", 1)))
    if variant == "Perturbed":
        return Perturbed(
            matrix_from_json(obj["d"]),
            matrix_from_json(obj["omega"]),
            int(obj.get("amplification", 1)),
        )
    if variant == "Conformal":
        return Conformal(
            matrix_from_json(obj["d"]),
            matrix_from_json(obj["h"]),
            int(obj.get("amplification", 1)),
        )
    if variant == "Curved":
        return Curved(
            [matrix_from_json(x) for x in obj["xs"]],
            np.asarray(obj["h"], dtype=np.float64),
        )
    return Scaled(float(obj["factor"]), spec_from_json(obj["inner"]))
