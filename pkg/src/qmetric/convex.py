"""Optimization over Lip-norm balls.

Everything happens in real coordinates over an orthonormal Hermitian basis
of a working subspace: the traceless subspace for unsliced balls (the unit
direction is neutral for every seminorm here, so it is removed analytically)
or the hyperplane {phi(a) = 0} for sliced balls.  In those coordinates the
ball is an operator-norm sublevel set {||sum_k c_k T_k|| <= r}, whose
separation oracle (top singular pair) is cheap and exact; the primary method
is therefore a cutting-plane scheme with an LP master problem, with a
projected-subgradient polish for the feasible side.

Convex maximization is NP-hard in general; ``max_convex`` is a documented
heuristic (multistart retracted gradient ascent) whose accuracy contract is
defined by validation against the brute-force grid oracle at dimension 2.
Reported values are lower estimates.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linprog

from . import _kernels
from .core import (
    DensityState,
    HermitianBasis,
    HermitianMatrix,
    as_matrix,
    child_rng,
    hermitian_part,
)
from .errors import (
    InvalidInputError,
    ShapeError,
    UnboundedProblemError,
    UnsupportedDimensionError,
)
from .lipnorms import LipNorm
from .serialize import canonical_dumps, digest, matrix_to_json

_TIE_TOL = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances, iteration caps, multistart counts, and the RNG seed.

    ``oracle_resolution`` is the grid resolution (points per axis) of the
    brute-force oracle.  The remaining knobs bound the sampling effort of
    the Hausdorff-type estimators and the Lipschitz-distance search.
    """

    tol: float = 1e-6
    max_iter: int = 10_000
    restarts: int = 32
    seed: int = 0
    oracle_resolution: int = 201
    hauslip_directions: int = 128
    height_samples: int = 256
    lipd_starts: int = 6
    lipd_maxfev: int = 150

    def __post_init__(self):
        if not (self.tol > 0):
            raise InvalidInputError("SolverConfig: tol must be > 0")
        if self.restarts < 1:
            raise InvalidInputError("SolverConfig: restarts must be >= 1")

    def to_json(self) -> dict:
        return {
            "tol": self.tol,
            "max_iter": self.max_iter,
            "restarts": self.restarts,
            "seed": self.seed,
            "oracle_resolution": self.oracle_resolution,
            "hauslip_directions": self.hauslip_directions,
            "height_samples": self.height_samples,
            "lipd_starts": self.lipd_starts,
            "lipd_maxfev": self.lipd_maxfev,
        }

    @property
    def digest(self) -> str:
        return digest(self.to_json())


@dataclass(frozen=True)
class BallSpec:
    """A Lip-norm sublevel set, optionally sliced by a state.

    The set {a : L(a) <= radius} is convex and symmetric; adding the slice
    {phi(a) = 0} makes it compact whenever the seminorm passes its kernel
    check.
    """

    lipnorm: LipNorm
    radius: float = 1.0
    slice_state: DensityState | None = None

    def __post_init__(self):
        if not (self.radius > 0):
            raise InvalidInputError("BallSpec: radius must be > 0")

    @property
    def digest(self) -> str:
        payload = {
            "lipnorm": self.lipnorm.digest,
            "radius": self.radius,
            "slice": matrix_to_json(self.slice_state) if self.slice_state else None,
        }
        return digest(payload)


class WorkingSpace:
    """Orthonormal Hermitian coordinates for the subspace a ball lives in."""

    def __init__(self, algebra, slice_state: DensityState | None):
        basis = algebra.basis()
        if slice_state is None:
            self.stack = basis.stack[1:]
        else:
            rho = algebra.project(as_matrix(slice_state))
            if rho.shape[0] != algebra.total_dim:
                raise ShapeError("slice state dimension does not match the algebra")
            v = np.einsum("kij,ij->k", basis.stack.conj(), rho).real
            nrm = np.linalg.norm(v)
            if nrm == 0:
                raise InvalidInputError("slice state has no component in the algebra")
            v = v / nrm
            # orthonormal basis of the hyperplane v-perp in coordinate space
            d = basis.stack.shape[0]
            q, _ = np.linalg.qr(np.concatenate([v[:, None], np.eye(d)], axis=1))
            coeffs = q[:, 1:d]
            self.stack = np.tensordot(coeffs.T, basis.stack, axes=(1, 0))
        self.dim = self.stack.shape[0]
        self.ambient_dim = algebra.total_dim

    def coords(self, a) -> np.ndarray:
        a = as_matrix(a)
        return np.einsum("kij,ij->k", self.stack.conj(), a).real

    def to_matrix(self, c: np.ndarray) -> np.ndarray:
        return np.tensordot(np.asarray(c, dtype=np.float64), self.stack, axes=(0, 0))


@dataclass
class SolveResult:
    value: float
    coords: np.ndarray
    matrix: np.ndarray
    certificate: float | None = None
    converged: bool = True
    iterations: int = 0
    flags: tuple[str, ...] = ()

    @property
    def hermitian(self) -> HermitianMatrix:
        return HermitianMatrix(self.matrix)


class _NormModel:
    """The ball's norm in coordinates: r(c) = scale * ||sum c_k T_k||_op."""

    def __init__(self, lipnorm: LipNorm, ws: WorkingSpace):
        self.tstack = lipnorm.image_stack(ws.stack)  # (d, RI, RI)
        self.scale = lipnorm.scale
        self.img_dim = self.tstack.shape[-1]
        d = ws.dim
        flat = self.tstack.reshape(d, -1)
        mat = np.concatenate([flat.real, flat.imag], axis=1).T
        svals = np.linalg.svd(mat, compute_uv=False) if d else np.array([0.0])
        self.sigma_max = float(svals[0]) if len(svals) else 0.0
        self.sigma_min = float(svals[-1]) if len(svals) >= d and d > 0 else 0.0
        # ||M||_op >= ||M||_F / sqrt(size), so base_norm(c) >= lower_coeff * |c|_2
        self.lower_coeff = self.sigma_min / np.sqrt(self.img_dim)

    def base_value(self, c: np.ndarray) -> float:
        m = np.tensordot(c, self.tstack, axes=(0, 0))
        return float(_kernels.sv_max_batch(m[None])[0])

    def base_values(self, cs: np.ndarray) -> np.ndarray:
        ms = np.tensordot(cs, self.tstack, axes=(1, 0))
        return _kernels.sv_max_batch(ms)

    def feasible(self, cs: np.ndarray, radius: float) -> np.ndarray:
        """Exact membership test base_norm(c) <= radius, batched."""
        ms = np.tensordot(cs, self.tstack, axes=(1, 0))
        return _kernels.sv_max_le_batch(ms, radius)

    def subgradient(self, c: np.ndarray) -> tuple[float, np.ndarray]:
        """(base value, g) with <g, x> <= base_norm(x) for all x, equality at c."""
        m = np.tensordot(c, self.tstack, axes=(0, 0))
        u, s, vh = np.linalg.svd(m)
        g = np.einsum("i,kij,j->k", u[:, 0].conj(), self.tstack, vh[0].conj()).real
        return float(s[0]), g


class BallSolver:
    """Shared machinery for one ball: cut pool, bounds, and the three solvers.

    Cuts are stored for the unit ball of the unscaled base norm, so they stay
    valid across radii and across every call on this solver; sharing the pool
    is what makes repeated distance evaluations on one ball cheap.
    """

    def __init__(self, ball: BallSpec, cfg: SolverConfig):
        self.ball = ball
        self.cfg = cfg
        self.ws = WorkingSpace(ball.lipnorm.algebra, ball.slice_state)
        self.model = _NormModel(ball.lipnorm, self.ws)
        if self.model.lower_coeff <= 1e-13 * max(1.0, self.model.sigma_max):
            raise UnboundedProblemError(
                "the seminorm is degenerate on the working subspace; "
                "the ball is unbounded (kernel check would fail)"
            )
        self.radius_eff = ball.radius / self.model.scale
        self.coord_bound = 1.0 / self.model.lower_coeff  # for the unit ball
        self.cuts: list[np.ndarray] = []

    # -- plumbing -----------------------------------------------------------

    def _cut_matrix(self) -> np.ndarray | None:
        if not self.cuts:
            return None
        return np.asarray(self.cuts)

    def _add_cut(self, g: np.ndarray):
        self.cuts.append(g)
        if len(self.cuts) > 512:
            del self.cuts[: len(self.cuts) - 384]

    def _retract(self, c: np.ndarray, radius: float) -> np.ndarray:
        v = self.model.base_value(c)
        if v <= radius:
            return c
        return c * (radius / v)

    def _lp_max_linear(self, gamma: np.ndarray) -> tuple[np.ndarray, float]:
        a_ub = self._cut_matrix()
        b_ub = None if a_ub is None else np.ones(len(a_ub))
        res = linprog(
            -gamma,
            A_ub=a_ub,
            b_ub=b_ub,
            bounds=(-self.coord_bound, self.coord_bound),
            method="highs",
        )
        if not res.success:
            raise UnboundedProblemError(f"LP master failed: {res.message}")
        return res.x, float(-res.fun)

    # -- max linear ----------------------------------------------------------

    def max_linear(self, gamma: np.ndarray) -> SolveResult:
        """Maximize <gamma, c> over the ball, with a dual (outer) certificate.

        Runs on the unit ball of the base norm and rescales once at the end,
        so values under scaled variants of one seminorm differ by an exact
        factor.
        """
        gamma = np.asarray(gamma, dtype=np.float64)
        gnorm = np.linalg.norm(gamma)
        if gnorm == 0:
            zero = np.zeros(self.ws.dim)
            return SolveResult(0.0, zero, self.ws.to_matrix(zero), certificate=0.0)
        tol = self.cfg.tol
        best_val = -np.inf
        best_c = np.zeros(self.ws.dim)
        ub = np.inf
        converged = False
        it = 0
        for it in range(1, self.cfg.max_iter + 1):
            c_star, ub = self._lp_max_linear(gamma)
            v = self.model.base_value(c_star)
            if v <= 0:
                if np.linalg.norm(c_star) > 1e-9 * self.coord_bound:
                    raise UnboundedProblemError("degenerate direction inside the ball")
                cand = c_star
            else:
                cand = c_star if v <= 1.0 else c_star / v
            val = float(gamma @ cand)
            if val > best_val:
                best_val, best_c = val, cand
            if ub - best_val <= tol * max(1.0, abs(best_val)):
                converged = True
                break
            bval, g = self.model.subgradient(c_star)
            self._add_cut(g)
        # subgradient polish on the feasible side (ascent along gamma)
        c = best_c
        step = 0.25
        for _ in range(25):
            cand = self._retract(c + step * gamma / gnorm, 1.0)
            val = float(gamma @ cand)
            if val > best_val:
                best_val, best_c, c = val, cand, cand
                step *= 1.3
            else:
                step *= 0.4
                if step < 1e-12:
                    break
        flags = () if converged else ("nonconverged",)
        r = self.radius_eff
        coords = best_c * r
        return SolveResult(
            best_val * r,
            coords,
            self.ws.to_matrix(coords),
            certificate=ub * r,
            converged=converged,
            iterations=it,
            flags=flags,
        )

    # -- min distance ----------------------------------------------------------

    def min_distance(
        self,
        target: np.ndarray,
        image_stack: np.ndarray | None = None,
        halfspread: bool = False,
    ) -> SolveResult:
        """Distance from ``target`` to the image of the ball.

        The image defaults to the working subspace itself.  With
        ``halfspread`` the objective is spread(target - C(c)) / 2, i.e. the
        operator-norm distance after the best central shift, which is the
        unsliced variant of the problem.
        """
        ws = self.ws
        stack = ws.stack if image_stack is None else image_stack
        target = np.asarray(target, dtype=np.complex128)
        if target.shape != stack.shape[1:]:
            raise ShapeError("min_distance: target shape does not match the image space")
        d = ws.dim
        r = self.radius_eff
        tol = self.cfg.tol
        bound = self.coord_bound * r

        def objective(c: np.ndarray) -> float:
            m = target - np.tensordot(c, stack, axes=(0, 0))
            if halfspread:
                lo, hi = _kernels.herm_eig_bounds_batch(m[None])
                return 0.5 * float(hi[0] - lo[0])
            return float(_kernels.sv_max_batch(m[None])[0])

        def objective_cut(c: np.ndarray) -> tuple[float, np.ndarray, float]:
            """(alpha, beta, value) with f(x) >= alpha + <beta, x>, equality at c."""
            m = target - np.tensordot(c, stack, axes=(0, 0))
            if halfspread:
                m = hermitian_part(m)
                w, vecs = np.linalg.eigh(m)
                u, v = vecs[:, -1], vecs[:, 0]
                alpha = 0.5 * float(
                    (u.conj() @ target @ u).real - (v.conj() @ target @ v).real
                )
                beta = -0.5 * (
                    np.einsum("i,kij,j->k", u.conj(), stack, u).real
                    - np.einsum("i,kij,j->k", v.conj(), stack, v).real
                )
                return alpha, beta, 0.5 * float(w[-1] - w[0])
            u_m, s_m, vh_m = np.linalg.svd(m)
            u, v = u_m[:, 0], vh_m[0].conj()
            alpha = float((u.conj() @ target @ v).real)
            beta = -np.einsum("i,kij,j->k", u.conj(), stack, v).real
            return alpha, beta, float(s_m[0])

        obj_cuts: list[tuple[float, np.ndarray]] = []
        c0 = np.zeros(d)
        best_c = c0
        best_val = objective(c0)
        a0, b0, _ = objective_cut(c0)
        obj_cuts.append((a0, b0))
        converged = False
        it = 0
        for it in range(1, self.cfg.max_iter + 1):
            n_norm = len(self.cuts)
            n_obj = len(obj_cuts)
            a_rows = []
            b_rows = []
            for g in self.cuts:
                a_rows.append(np.concatenate([g, [0.0]]))
                b_rows.append(r)
            for alpha, beta in obj_cuts:
                a_rows.append(np.concatenate([beta, [-1.0]]))
                b_rows.append(-alpha)
            cvec = np.zeros(d + 1)
            cvec[-1] = 1.0
            res = linprog(
                cvec,
                A_ub=np.asarray(a_rows),
                b_ub=np.asarray(b_rows),
                bounds=[(-bound, bound)] * d + [(0.0, None)],
                method="highs",
            )
            if not res.success:
                raise UnboundedProblemError(f"LP master failed: {res.message}")
            c_star = res.x[:d]
            lb = float(res.x[-1])
            nv = self.model.base_value(c_star)
            c_f = c_star if nv <= r else c_star * (r / nv)
            val = objective(c_f)
            if val < best_val:
                best_val, best_c = val, c_f
            if best_val - lb <= tol * max(1.0, best_val):
                converged = True
                break
            alpha, beta, _ = objective_cut(c_star)
            obj_cuts.append((alpha, beta))
            if nv > r:
                _, g = self.model.subgradient(c_star)
                self._add_cut(g)
            if n_norm == len(self.cuts) and n_obj + 1 == len(obj_cuts) and nv <= r:
                # cut repetition guard: optimum reached up to LP accuracy
                if abs(val - lb) <= max(tol, 1e-9) * max(1.0, val):
                    converged = True
                    break
        flags = () if converged else ("nonconverged",)
        return SolveResult(
            best_val,
            best_c,
            self.ws.to_matrix(best_c),
            certificate=None,
            converged=converged,
            iterations=it,
            flags=flags,
        )

    # -- max convex ----------------------------------------------------------

    def max_convex(
        self,
        objective: "ConvexObjective",
        seed_tags: tuple = (),
        extra_starts: list[np.ndarray] | None = None,
    ) -> SolveResult:
        """Best lower estimate of sup g over the ball via multistart ascent.

        All restarts advance in lockstep so the hot evaluations are batched.
        Each run terminates on the boundary sphere of the ball (retraction
        keeps iterates there).  Among value ties the lexicographically
        smallest coordinate vector wins, so results do not depend on
        scheduling.
        """
        d = self.ws.dim
        if d == 0:
            zero = np.zeros(0)
            return SolveResult(0.0, zero, self.ws.to_matrix(zero))
        work_radius = 1.0 if objective.homogeneous else self.radius_eff
        rng = child_rng(self.cfg.seed, "max-convex", self.ball.digest, *seed_tags)
        n0 = self.cfg.restarts
        starts = rng.standard_normal((n0, d))
        if extra_starts:
            extra = np.asarray(extra_starts, dtype=np.float64).reshape(-1, d)
            scale_back = work_radius / self.radius_eff
            starts = np.concatenate([starts, extra * scale_back])
        nrm = np.linalg.norm(starts, axis=1, keepdims=True)
        nrm[nrm == 0] = 1.0
        starts = starts / nrm
        bv = self.model.base_values(starts)
        bv[bv <= 0] = 1.0
        c = starts * (work_radius / bv)[:, None]
        nb = c.shape[0]

        best_c = c.copy()
        best_vals = objective.values(c)

        def ascend(c, best_c, best_vals, iters):
            nb = c.shape[0]
            step = np.full(nb, 0.5 * work_radius)
            stall = np.zeros(nb, dtype=int)
            for _ in range(iters):
                grads = objective.subgrads(c)
                gn = np.linalg.norm(grads, axis=1, keepdims=True)
                gn[gn == 0] = 1.0
                direction = grads / gn
                improved_any = np.zeros(nb, dtype=bool)
                for factor in (1.0, 0.25):
                    cand = c + (factor * step)[:, None] * direction
                    bv = self.model.base_values(cand)
                    bv[bv <= 0] = 1.0
                    cand *= (work_radius / bv)[:, None]
                    cv = objective.values(cand)
                    better = cv > best_vals + 1e-15 * np.maximum(1.0, np.abs(best_vals))
                    take = better & ~improved_any
                    c[take] = cand[take]
                    best_vals[take] = cv[take]
                    best_c[take] = cand[take]
                    improved_any |= better
                step = np.where(improved_any, step * 1.3, step * 0.3)
                stall = np.where(improved_any, 0, stall + 1)
                if np.all((stall > 5) | (step < 1e-11 * work_radius)):
                    break
            return c, best_c, best_vals

        iters = min(max(50, 5 * d), 300)
        c, best_c, best_vals = ascend(c, best_c, best_vals, iters)

        # vertex-jump polish: the linear cut at a candidate is maximized
        # exactly over the ball, which escapes the slow-creep regime of
        # plain ascent on ridged norm objectives
        for _ in range(3):
            order = np.argsort(best_vals)[::-1][: min(4, nb)]
            seeds = best_c[order]
            grads = objective.subgrads(seeds)
            fresh = []
            for g in grads:
                if np.linalg.norm(g) == 0:
                    continue
                vertex = self.max_linear(g).coords * (work_radius / self.radius_eff)
                fresh.append(vertex)
            if not fresh:
                break
            fc = np.asarray(fresh)
            fv = objective.values(fc)
            gain = float(np.max(fv)) > float(np.max(best_vals)) + self.cfg.tol * max(
                1.0, float(np.max(best_vals))
            )
            c = np.concatenate([c, fc])
            best_c = np.concatenate([best_c, fc])
            best_vals = np.concatenate([best_vals, fv])
            nb = c.shape[0]
            c, best_c, best_vals = ascend(c, best_c, best_vals, 30)
            if not gain:
                break

        top = float(np.max(best_vals))
        ties = np.where(best_vals >= top - _TIE_TOL * max(1.0, abs(top)))[0]
        rows = sorted(best_c[i].tolist() for i in ties)
        win = np.asarray(rows[0])
        factor = self.radius_eff / work_radius
        coords = win * factor
        value = top * factor if objective.homogeneous else top
        return SolveResult(value, coords, self.ws.to_matrix(coords), iterations=iters)


# ---------------------------------------------------------------------------
# convex objectives


class ConvexObjective:
    """Internal protocol: batched values/subgradients in ball coordinates."""

    homogeneous = False

    def values(self, cs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def subgrads(self, cs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def lipschitz_bound(self) -> float | None:
        return None


class NormImageObjective(ConvexObjective):
    """g(c) = scale * ||base + sum_k c_k B_k||_op (homogeneous when base = 0)."""

    def __init__(self, stack: np.ndarray, base: np.ndarray | None = None, scale: float = 1.0):
        self.stack = np.ascontiguousarray(stack, dtype=np.complex128)
        self.base = None if base is None else np.asarray(base, dtype=np.complex128)
        self.scale = float(scale)
        self.homogeneous = self.base is None

    def _images(self, cs: np.ndarray) -> np.ndarray:
        m = np.tensordot(cs, self.stack, axes=(1, 0))
        if self.base is not None:
            m = m + self.base
        return m

    def values(self, cs: np.ndarray) -> np.ndarray:
        return self.scale * _kernels.sv_max_batch(self._images(cs))

    def subgrads(self, cs: np.ndarray) -> np.ndarray:
        m = self._images(cs)
        gram = m @ np.conj(np.transpose(m, (0, 2, 1)))
        w, u = np.linalg.eigh(gram)
        top_u = u[..., -1]
        s = np.sqrt(np.maximum(w[..., -1], 1e-300))
        v = np.einsum("bij,bi->bj", m.conj(), top_u) / s[:, None]
        return self.scale * np.einsum("bi,kij,bj->bk", top_u.conj(), self.stack, v).real

    def lipschitz_bound(self) -> float:
        flat = self.stack.reshape(self.stack.shape[0], -1)
        mat = np.concatenate([flat.real, flat.imag], axis=1)
        return self.scale * float(np.linalg.svd(mat, compute_uv=False)[0])


class SpreadObjective(ConvexObjective):
    """g(c) = spread(base + sum_k c_k H_k) over a Hermitian image stack."""

    def __init__(self, stack: np.ndarray, base: np.ndarray | None = None):
        self.stack = np.ascontiguousarray(stack, dtype=np.complex128)
        self.base = None if base is None else np.asarray(base, dtype=np.complex128)
        self.homogeneous = self.base is None

    def _images(self, cs):
        m = np.tensordot(cs, self.stack, axes=(1, 0))
        if self.base is not None:
            m = m + self.base
        return m

    def values(self, cs: np.ndarray) -> np.ndarray:
        lo, hi = _kernels.herm_eig_bounds_batch(self._images(cs))
        return hi - lo

    def subgrads(self, cs: np.ndarray) -> np.ndarray:
        m = self._images(cs)
        w, vecs = np.linalg.eigh(m)
        u, v = vecs[..., -1], vecs[..., 0]
        gu = np.einsum("bi,kij,bj->bk", u.conj(), self.stack, u).real
        gv = np.einsum("bi,kij,bj->bk", v.conj(), self.stack, v).real
        return gu - gv

    def lipschitz_bound(self) -> float:
        flat = self.stack.reshape(self.stack.shape[0], -1)
        mat = np.concatenate([flat.real, flat.imag], axis=1)
        return 2.0 * float(np.linalg.svd(mat, compute_uv=False)[0])


class LinearObjective(ConvexObjective):
    homogeneous = True

    def __init__(self, gamma: np.ndarray):
        self.gamma = np.asarray(gamma, dtype=np.float64)

    def values(self, cs: np.ndarray) -> np.ndarray:
        return cs @ self.gamma

    def subgrads(self, cs: np.ndarray) -> np.ndarray:
        return np.broadcast_to(self.gamma, cs.shape).copy()

    def lipschitz_bound(self) -> float:
        return float(np.linalg.norm(self.gamma))


class CallableObjective(ConvexObjective):
    """Adapter for a plain convex functional on Hermitian matrices.

    Subgradients fall back to forward differences; this path is the slow,
    generic one and is meant for experimentation, not the hot loops.
    """

    homogeneous = False

    def __init__(self, fn, ws: WorkingSpace, fd_step: float = 1e-6):
        self.fn = fn
        self.ws = ws
        self.fd_step = fd_step

    def values(self, cs: np.ndarray) -> np.ndarray:
        return np.asarray([float(self.fn(self.ws.to_matrix(c))) for c in cs])

    def subgrads(self, cs: np.ndarray) -> np.ndarray:
        d = cs.shape[1]
        out = np.empty_like(cs)
        for b, c in enumerate(cs):
            f0 = float(self.fn(self.ws.to_matrix(c)))
            for k in range(d):
                cp = c.copy()
                cp[k] += self.fd_step
                out[b, k] = (float(self.fn(self.ws.to_matrix(cp))) - f0) / self.fd_step
        return out


# ---------------------------------------------------------------------------
# public operations


def max_linear_over_ball(c, ball: BallSpec, cfg: SolverConfig) -> SolveResult:
    """Maximize Tr(c a) over the ball.

    For unsliced balls c must be traceless (orthogonal to the neutral unit
    direction), otherwise the supremum is infinite and an
    UnboundedProblemError is raised.
    """
    solver = BallSolver(ball, cfg)
    cm = as_matrix(c)
    if ball.slice_state is None:
        tr = abs(float(np.trace(cm).real))
        if tr > 1e-10 * max(1.0, float(np.abs(cm).max())):
            raise UnboundedProblemError(
                "objective has a component along the unit: supremum is infinite"
            )
    gamma = solver.ws.coords(cm)
    return solver.max_linear(gamma)


def min_distance_to_ball(a, ball: BallSpec, cfg: SolverConfig) -> SolveResult:
    """Distance min ||a - b||_op over b in the ball, plus the projection.

    Unsliced balls contain the whole central line, so the distance is
    computed after the optimal central shift (half the spectral spread of
    the difference); sliced balls use the plain operator norm.
    """
    solver = BallSolver(ball, cfg)
    target = hermitian_part(as_matrix(a))
    return solver.min_distance(target, halfspread=ball.slice_state is None)


def max_convex_over_ball(
    g,
    ball: BallSpec,
    cfg: SolverConfig,
    seed_tags: tuple = (),
    extra_starts=None,
) -> SolveResult:
    """Lower estimate of sup g over the (compact, sliced) ball.

    ``g`` may be an engine objective or a plain callable on Hermitian
    matrices (assumed convex; this is the caller's contract).
    """
    solver = BallSolver(ball, cfg)
    if not isinstance(g, ConvexObjective):
        g = CallableObjective(g, solver.ws)
    return solver.max_convex(g, seed_tags=seed_tags, extra_starts=extra_starts)


# ---------------------------------------------------------------------------
# brute-force oracle


@dataclass(frozen=True)
class OracleResult:
    value: float
    error_bound: float
    coords: np.ndarray
    flags: tuple[str, ...] = ()


_CHUNK = 1 << 17


def _grid_axes(box: np.ndarray, resolution: int) -> list[np.ndarray]:
    return [np.linspace(-b, b, resolution) for b in box]


def _axes_around(center: np.ndarray, half: np.ndarray, box: np.ndarray, resolution: int):
    lo = np.maximum(center - half, -box)
    hi = np.minimum(center + half, box)
    return [np.linspace(a, b, resolution) for a, b in zip(lo, hi)]


def brute_force_oracle(
    problem: str,
    ball: BallSpec,
    payload,
    resolution: int | None = None,
    cfg: SolverConfig | None = None,
) -> OracleResult:
    """Exhaustive grid evaluation over the ball's coordinate box.

    Ground truth for tests at small dimension: the working subspace may have
    at most 3 coordinates.  The box comes from per-axis bisection against
    the seminorm and is doubled (up to 3 times) whenever the incumbent lands
    on the box boundary; one refinement pass shrinks the cell around the
    incumbent.  The reported error bound is an analytic Lipschitz constant
    of the objective times the final cell diagonal.
    """
    cfg = cfg or SolverConfig()
    resolution = int(resolution or cfg.oracle_resolution)
    if resolution < 51:
        raise InvalidInputError("oracle resolution must be >= 51")
    if problem not in {"max-linear", "min-distance", "max-convex"}:
        raise InvalidInputError(f"unknown oracle problem {problem!r}")
    solver = BallSolver(ball, cfg)
    ws = solver.ws
    if ws.dim > 3:
        raise UnsupportedDimensionError(
            f"oracle supports at most 3 working coordinates, got {ws.dim}"
        )
    model = solver.model
    r = solver.radius_eff

    # objective setup -------------------------------------------------------
    maximize = problem != "min-distance"
    halfspread = False
    if problem == "max-linear":
        cm = as_matrix(payload)
        if ball.slice_state is None:
            tr = abs(float(np.trace(cm).real))
            if tr > 1e-10 * max(1.0, float(np.abs(cm).max())):
                raise UnboundedProblemError("objective unbounded along the unit")
        gamma = ws.coords(cm)
        slope = float(np.linalg.norm(gamma))

        def evaluate(cs: np.ndarray) -> np.ndarray:
            return cs @ gamma

    elif problem == "min-distance":
        target = hermitian_part(as_matrix(payload))
        halfspread = ball.slice_state is None
        slope = 1.0

        def evaluate(cs: np.ndarray) -> np.ndarray:
            m = target - np.tensordot(cs, ws.stack, axes=(1, 0))
            if halfspread:
                lo, hi = _kernels.herm_eig_bounds_batch(m)
                return 0.5 * (hi - lo)
            return _kernels.sv_max_batch(m)

    else:
        obj = payload
        if not isinstance(obj, ConvexObjective):
            obj = CallableObjective(obj, ws)
        lb = obj.lipschitz_bound()
        slope = lb if lb is not None else None

        def evaluate(cs: np.ndarray) -> np.ndarray:
            return obj.values(cs)

    # box from per-axis bisection -------------------------------------------
    box = np.empty(ws.dim)
    for k in range(ws.dim):
        e = np.zeros(ws.dim)
        e[k] = 1.0
        val = model.base_value(e)
        if val <= 0:
            raise UnboundedProblemError("ball is unbounded along a coordinate axis")
        hi = 1.0
        while model.base_value(hi * e) <= r:
            hi *= 2.0
            if hi > 1e12:
                raise UnboundedProblemError("ball is unbounded along a coordinate axis")
        lo = 0.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if model.base_value(mid * e) <= r:
                lo = mid
            else:
                hi = mid
        box[k] = hi

    flags: list[str] = []

    def sweep(axes: list[np.ndarray]):
        grids = np.meshgrid(*axes, indexing="ij")
        coords = np.stack([g.ravel() for g in grids], axis=1)
        best_v = -np.inf if maximize else np.inf
        best_c = np.zeros(ws.dim)
        found = False
        for at in range(0, len(coords), _CHUNK):
            chunk = coords[at : at + _CHUNK]
            feas = model.feasible(chunk, r * (1 + 1e-12))
            if not feas.any():
                continue
            pts = chunk[feas]
            vals = evaluate(pts)
            idx = int(np.argmax(vals)) if maximize else int(np.argmin(vals))
            v = float(vals[idx])
            if (maximize and v > best_v) or (not maximize and v < best_v):
                best_v, best_c, found = v, pts[idx], True
        if not found:
            zero = np.zeros((1, ws.dim))
            best_v = float(evaluate(zero)[0])
            best_c = zero[0]
        return best_v, best_c

    steps = None
    for expansion in range(4):
        axes = _grid_axes(box, resolution)
        steps = np.asarray([ax[1] - ax[0] if len(ax) > 1 else 0.0 for ax in axes])
        best_v, best_c = sweep(axes)
        on_edge = np.any(np.abs(best_c) >= box - 0.5 * steps)
        if not on_edge:
            break
        box = box * 2.0
        if expansion == 3:
            flags.append("box-expansion-exhausted")

    fine_axes = _axes_around(best_c, 2.0 * steps, box, resolution)
    fine_steps = np.asarray([ax[1] - ax[0] if len(ax) > 1 else 0.0 for ax in fine_axes])
    fv, fc = sweep(fine_axes)
    if (maximize and fv > best_v) or (not maximize and fv < best_v):
        best_v, best_c = fv, fc

    if slope is None:
        # sampled slope estimate for opaque callables, disclosed via flag
        probe = child_rng(cfg.seed, "oracle-slope").standard_normal((64, ws.dim))
        probe /= np.linalg.norm(probe, axis=1, keepdims=True)
        h = max(float(np.max(fine_steps)), 1e-9)
        base = evaluate(best_c[None])[0]
        slopes = np.abs(evaluate(best_c[None] + h * probe) - base) / h
        slope = 1.5 * float(np.max(slopes))
        flags.append("sampled-slope")

    err = 2.0 * slope * float(np.linalg.norm(0.5 * fine_steps))
    return OracleResult(best_v, err, best_c, tuple(flags))
