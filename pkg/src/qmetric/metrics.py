"""Metric quantities over quantum compact metric spaces at desk scale.

Every operation returns a MetricReport carrying the value, an honesty tag
(kind), optional enclosing interval, convergence flags, and provenance.
Estimators never claim more than they can certify: Hausdorff-type values are
lower estimates with a disclosed sampling mesh, suprema of convex
functionals are multistart lower estimates, and aggregated upper bounds are
assembled from the sound (interval-high) side of their components.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convex import (
    BallSolver,
    BallSpec,
    NormImageObjective,
    SolveResult,
    SolverConfig,
    SpreadObjective,
)
from .core import (
    AlgebraSpec,
    DensityState,
    HermitianMatrix,
    UnitaryMap,
    as_matrix,
    child_rng,
    hermitian_part,
    maximally_mixed,
    operator_norm,
)
from .errors import (
    ContractError,
    InvalidBridgeError,
    InvalidInputError,
    NotALipNormError,
    ShapeError,
    UnsupportedDimensionError,
)
from .lipnorms import LipNorm, kernel_check
from .serialize import digest, matrix_to_json

KINDS = ("exact-within-tol", "upper-bound", "lower-estimate", "interval")
_RANK = {"exact-within-tol": 3, "interval": 2, "upper-bound": 1, "lower-estimate": 1}


@dataclass(frozen=True)
class MetricReport:
    value: float
    kind: str
    lo: float | None = None
    hi: float | None = None
    flags: tuple[str, ...] = ()
    provenance: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown report kind {self.kind!r}")
        if self.lo is not None and self.hi is not None and not (self.lo <= self.hi + 1e-12):
            raise InvalidInputError(f"report interval inverted: [{self.lo}, {self.hi}]")

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "kind": self.kind,
            "lo": self.lo,
            "hi": self.hi,
            "flags": list(self.flags),
            "provenance": self.provenance,
        }

    @property
    def tainted(self) -> bool:
        return any("nonconverged" in f for f in self.flags)


def weakest_kind(*kinds: str) -> str:
    return min(kinds, key=lambda k: _RANK[k])


def _prov(op: str, cfg: SolverConfig) -> str:
    return f"{op}:{cfg.digest}"


def _require_lipnorm(lipnorm: LipNorm):
    res = kernel_check(lipnorm)
    if not res.ok:
        raise NotALipNormError(
            f"seminorm fails the kernel check (min on sphere {res.min_on_sphere:.3e}, "
            f"value at unit {res.unit_value:.3e})"
        )


def _same_algebra(l1: LipNorm, l2: LipNorm):
    if l1.algebra.blocks != l2.algebra.blocks:
        raise ShapeError("lip-norms live on different algebras")


def report_max(a: MetricReport, b: MetricReport, provenance: str) -> MetricReport:
    lo = None if (a.lo is None or b.lo is None) else max(a.lo, b.lo)
    hi = None if (a.hi is None or b.hi is None) else max(a.hi, b.hi)
    return MetricReport(
        max(a.value, b.value),
        weakest_kind(a.kind, b.kind),
        lo,
        hi,
        tuple(dict.fromkeys(a.flags + b.flags)),
        provenance,
    )


# ---------------------------------------------------------------------------
# Monge-Kantorovich metric


class MKEngine:
    """Reusable distance evaluator for one Lip-norm: shares the cut pool.

    Batch consumers (axiom suites, Hausdorff-of-states sampling) construct
    one engine and query many pairs; one-shot callers can use
    ``mk_distance``.
    """

    def __init__(self, lipnorm: LipNorm, cfg: SolverConfig):
        _require_lipnorm(lipnorm)
        self.lipnorm = lipnorm
        self.cfg = cfg
        self.solver = BallSolver(BallSpec(lipnorm, 1.0), cfg)
        # memoized by the canonical coordinate functional: repeated queries
        # (and argument swaps, which canonicalize to the same functional)
        # return bit-identical reports even though the cut pool keeps growing
        self._cache: dict[bytes, tuple[MetricReport, SolveResult | None]] = {}

    def gamma(self, rho, sigma) -> np.ndarray:
        r = as_matrix(rho)
        s = as_matrix(sigma)
        if r.shape != s.shape or r.shape[0] != self.lipnorm.dim:
            raise ShapeError("mk_distance: state dimensions do not match the algebra")
        g = self.solver.ws.coords(r - s)
        # canonical sign: the ball is symmetric, so the value is even in g,
        # and fixing the sign makes mk symmetric in its arguments bit for bit
        for x in g:
            if abs(x) > 1e-14:
                if x < 0:
                    g = -g
                break
        return g

    def distance_detailed(self, rho, sigma) -> tuple[MetricReport, SolveResult | None]:
        g = self.gamma(rho, sigma)
        prov = _prov("mk_distance", self.cfg)
        if np.linalg.norm(g) <= 1e-14:
            return MetricReport(0.0, "exact-within-tol", 0.0, 0.0, (), prov), None
        key = g.tobytes()
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        res = self.solver.max_linear(g)
        kind = "exact-within-tol" if res.converged else "lower-estimate"
        report = MetricReport(res.value, kind, res.value, res.certificate, res.flags, prov)
        self._cache[key] = (report, res)
        return report, res

    def distance(self, rho, sigma) -> MetricReport:
        return self.distance_detailed(rho, sigma)[0]

    def value(self, rho, sigma) -> float:
        return self.distance(rho, sigma).value


def mk_distance(lipnorm: LipNorm, rho: DensityState, sigma: DensityState, cfg: SolverConfig) -> MetricReport:
    """mk(rho, sigma) = sup{ |Tr(rho a) - Tr(sigma a)| : L(a) <= 1 }."""
    return MKEngine(lipnorm, cfg).distance(rho, sigma)


def _starts_from_matrices(solver: BallSolver, mats) -> list[np.ndarray] | None:
    if not mats:
        return None
    return [solver.ws.coords(as_matrix(m)) for m in mats]


def mk_diameter_detailed(
    lipnorm: LipNorm, cfg: SolverConfig, extra_start_matrices=None
) -> tuple[MetricReport, SolveResult]:
    """Diameter of the state space: sup of the spectral spread over the unit ball.

    The spread is invariant under central shifts, so the supremum over the
    (compact) sliced ball equals the supremum over the full ball; the value
    is a multistart lower estimate and the interval upper bound comes from
    the Frobenius circumscribed radius of the sliced ball.
    """
    _require_lipnorm(lipnorm)
    ball = BallSpec(lipnorm, 1.0, maximally_mixed(lipnorm.dim))
    solver = BallSolver(ball, cfg)
    obj = SpreadObjective(solver.ws.stack)
    res = solver.max_convex(
        obj,
        seed_tags=("mk-diameter",),
        extra_starts=_starts_from_matrices(solver, extra_start_matrices),
    )
    hi = 2.0 * solver.radius_eff / solver.model.lower_coeff
    report = MetricReport(
        res.value,
        "lower-estimate",
        res.value,
        hi,
        res.flags + ("frobenius-upper-bound",),
        _prov("mk_diameter", cfg),
    )
    return report, res


def mk_diameter(lipnorm: LipNorm, cfg: SolverConfig) -> MetricReport:
    return mk_diameter_detailed(lipnorm, cfg)[0]


# ---------------------------------------------------------------------------
# Hausdorff distance between Lip-norm unit balls (sliced surrogate)


def _direction_net(dim: int, count: int, seed: int, tag: str) -> np.ndarray:
    rng = child_rng(seed, tag, dim)
    dirs = rng.standard_normal((count, dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return dirs


def _directed_hausdorff(
    source: BallSolver,
    target: BallSolver,
    dirs: np.ndarray,
    source_stack: np.ndarray | None = None,
    target_stack: np.ndarray | None = None,
) -> tuple[float, float]:
    """(directed distance estimate, outer radius of sampled source points)."""
    worst = 0.0
    r_out = 0.0
    for g in dirs:
        ext = source.max_linear(g)
        x = (
            ext.matrix
            if source_stack is None
            else np.tensordot(ext.coords, source_stack, axes=(0, 0))
        )
        r_out = max(r_out, float(np.linalg.norm(ext.coords)))
        dist = target.min_distance(x, image_stack=target_stack).value
        worst = max(worst, dist)
    return worst, r_out


def _net_mesh(dirs: np.ndarray, seed: int) -> float:
    probes = child_rng(seed, "net-mesh", dirs.shape[1]).standard_normal((1024, dirs.shape[1]))
    probes /= np.linalg.norm(probes, axis=1, keepdims=True)
    # largest gap from a probe direction to the net, in chord distance
    dots = probes @ dirs.T
    nearest = np.clip(dots.max(axis=1), -1.0, 1.0)
    return float(np.max(np.sqrt(2.0 - 2.0 * nearest)))


def hauslip(
    l1: LipNorm,
    l2: LipNorm,
    phi: DensityState | None = None,
    cfg: SolverConfig | None = None,
) -> MetricReport:
    """Hausdorff distance between the phi-sliced unit balls of two Lip-norms.

    The sliced value upper-bounds the Hausdorff distance between the full
    (unbounded) balls, and is the canonical surrogate computed here; phi
    defaults to the maximally mixed state, the basis-independent choice.
    Extreme points are sampled along a seeded direction net and matched by
    exact convex projection; the net mesh is disclosed and added to the
    interval upper bound.
    """
    cfg = cfg or SolverConfig()
    _same_algebra(l1, l2)
    if l2.digest < l1.digest:
        l1, l2 = l2, l1  # canonical order: symmetry holds exactly
    _require_lipnorm(l1)
    _require_lipnorm(l2)
    phi = phi or maximally_mixed(l1.dim)
    s1 = BallSolver(BallSpec(l1, 1.0, phi), cfg)
    s2 = BallSolver(BallSpec(l2, 1.0, phi), cfg)
    if s1.ws.dim == 1:
        # the sliced balls are symmetric collinear segments: exact distance
        e = np.ones(1)
        ext1 = s1.radius_eff / s1.model.base_value(e)
        ext2 = s2.radius_eff / s2.model.base_value(e)
        value = abs(ext1 - ext2) * operator_norm(s1.ws.to_matrix(e))
        return MetricReport(
            value, "exact-within-tol", value, value, ("segment-exact",),
            _prov("hauslip", cfg),
        )
    dirs = _direction_net(
        s1.ws.dim, cfg.hauslip_directions, cfg.seed, f"hauslip-net-{l1.algebra.blocks}"
    )
    d12, r1 = _directed_hausdorff(s1, s2, dirs)
    d21, r2 = _directed_hausdorff(s2, s1, dirs)
    value = max(d12, d21)
    mesh = _net_mesh(dirs, cfg.seed) * max(r1, r2)
    flags = (f"directions={len(dirs)}", f"mesh={mesh:.6e}")
    return MetricReport(
        value, "lower-estimate", value, value + mesh, flags, _prov("hauslip", cfg)
    )


# ---------------------------------------------------------------------------
# bridges


@dataclass(frozen=True, eq=False)
class Embedding:
    """Unital *-monomorphism: block repetition (amplification) plus unitary.

    Maps a block-diagonal element a = diag(a_1, ..., a_b) to
    U diag(a_1 (x) I_m1, ..., a_b (x) I_mb) U^*.
    """

    multiplicities: tuple[int, ...]
    unitary: np.ndarray | None = None

    def __init__(self, multiplicities, unitary=None):
        multiplicities = tuple(int(m) for m in multiplicities)
        if any(m < 1 for m in multiplicities):
            raise InvalidInputError("Embedding: multiplicities must be >= 1")
        object.__setattr__(self, "multiplicities", multiplicities)
        u = None if unitary is None else as_matrix(unitary)
        object.__setattr__(self, "unitary", u)

    @classmethod
    def identity(cls, algebra: AlgebraSpec) -> "Embedding":
        return cls((1,) * len(algebra.blocks))

    def target_dim(self, algebra: AlgebraSpec) -> int:
        return sum(n * m for n, m in zip(algebra.blocks, self.multiplicities))

    def apply(self, a, algebra: AlgebraSpec) -> np.ndarray:
        a = as_matrix(a)
        if len(self.multiplicities) != len(algebra.blocks):
            raise ShapeError("Embedding: one multiplicity per algebra block required")
        pieces = []
        at = 0
        for n, m in zip(algebra.blocks, self.multiplicities):
            blk = a[at : at + n, at : at + n]
            pieces.append(np.kron(blk, np.eye(m, dtype=np.complex128)))
            at += n
        total = sum(p.shape[0] for p in pieces)
        out = np.zeros((total, total), dtype=np.complex128)
        at = 0
        for p in pieces:
            k = p.shape[0]
            out[at : at + k, at : at + k] = p
            at += k
        if self.unitary is not None:
            out = self.unitary @ out @ self.unitary.conj().T
        return out

    def pullback_state(self, rho_ambient, algebra: AlgebraSpec) -> np.ndarray:
        """Density matrix of the pulled-back state: Tr(out a) = Tr(rho pi(a))."""
        rho = as_matrix(rho_ambient)
        if self.unitary is not None:
            rho = self.unitary.conj().T @ rho @ self.unitary
        n_total = algebra.total_dim
        out = np.zeros((n_total, n_total), dtype=np.complex128)
        at_src = 0
        at_dst = 0
        for n, m in zip(algebra.blocks, self.multiplicities):
            k = n * m
            blk = rho[at_dst : at_dst + k, at_dst : at_dst + k]
            # partial trace over the multiplicity factor of a (x) I_m
            blk4 = blk.reshape(n, m, n, m)
            out[at_src : at_src + n, at_src : at_src + n] = np.einsum("isjs->ij", blk4)
            at_src += n
            at_dst += k
        return out


@dataclass(frozen=True, eq=False)
class BridgeSpec:
    """Ambient algebra, Hermitian pivot, and two unital embeddings.

    Construction validates that the pivot is Hermitian (non-Hermitian pivots
    are rejected rather than guessed) and that its fixed subspace
    ker(omega - 1) is nonempty, which realizes the nonempty 1-level set:
    states supported there satisfy phi(omega d) = phi(d omega) = phi(d).
    """

    ambient_dim: int
    omega: np.ndarray
    embed_a: Embedding
    embed_b: Embedding

    def __init__(self, ambient_dim: int, omega, embed_a: Embedding, embed_b: Embedding):
        omega = as_matrix(omega)
        if omega.shape != (ambient_dim, ambient_dim):
            raise ShapeError("BridgeSpec: pivot must act on the ambient algebra")
        if np.abs(omega - omega.conj().T).max() > 1e-12 * max(1.0, np.abs(omega).max()):
            raise InvalidBridgeError("BridgeSpec: only Hermitian pivots are supported")
        omega = hermitian_part(omega)
        w = np.linalg.eigvalsh(omega)
        if not np.any(np.abs(w - 1.0) <= 1e-10):
            raise InvalidBridgeError("BridgeSpec: the 1-level set is empty (no fixed subspace)")
        object.__setattr__(self, "ambient_dim", int(ambient_dim))
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "embed_a", embed_a)
        object.__setattr__(self, "embed_b", embed_b)

    @classmethod
    def identity(cls, algebra: AlgebraSpec) -> "BridgeSpec":
        n = algebra.total_dim
        e = Embedding.identity(algebra)
        return cls(n, np.eye(n, dtype=np.complex128), e, e)

    def fixed_subspace(self) -> np.ndarray:
        w, v = np.linalg.eigh(self.omega)
        cols = np.abs(w - 1.0) <= 1e-10
        return v[:, cols]

    @property
    def is_identity_pivot(self) -> bool:
        return bool(
            np.abs(self.omega - np.eye(self.ambient_dim)).max() <= 1e-12
        )


def _validate_bridge_sides(bridge: BridgeSpec, l_a: LipNorm, l_b: LipNorm, cfg: SolverConfig):
    for lip, emb, side in ((l_a, bridge.embed_a, "A"), (l_b, bridge.embed_b, "B")):
        alg = lip.algebra
        if emb.target_dim(alg) != bridge.ambient_dim:
            raise InvalidBridgeError(f"embedding for side {side} does not land in the ambient algebra")
        unit_img = emb.apply(np.eye(alg.total_dim, dtype=np.complex128), alg)
        if np.abs(unit_img - np.eye(bridge.ambient_dim)).max() > 1e-10:
            raise InvalidBridgeError(f"embedding for side {side} is not unital")
        rng = child_rng(cfg.seed, "bridge-isometry", side)
        for _ in range(4):
            g = rng.standard_normal((alg.total_dim, alg.total_dim))
            a = alg.project(hermitian_part(g + 0j))
            if abs(operator_norm(emb.apply(a, alg)) - operator_norm(a)) > 1e-10 * max(
                1.0, operator_norm(a)
            ):
                raise InvalidBridgeError(f"embedding for side {side} is not isometric")


def bridge_reach(
    bridge: BridgeSpec, l_a: LipNorm, l_b: LipNorm, cfg: SolverConfig
) -> MetricReport:
    """Hausdorff distance between the pivoted images of the two unit balls.

    Both image sets are invariant under central shifts composed with pivot
    multiplication, so each side is sliced at its maximally mixed state
    before sampling (the same device that makes the sliced ball compact).
    """
    _require_lipnorm(l_a)
    _require_lipnorm(l_b)
    _validate_bridge_sides(bridge, l_a, l_b, cfg)
    sa = BallSolver(BallSpec(l_a, 1.0, maximally_mixed(l_a.dim)), cfg)
    sb = BallSolver(BallSpec(l_b, 1.0, maximally_mixed(l_b.dim)), cfg)
    stack_a = np.stack(
        [bridge.embed_a.apply(e, l_a.algebra) @ bridge.omega for e in sa.ws.stack]
    )
    stack_b = np.stack(
        [bridge.omega @ bridge.embed_b.apply(e, l_b.algebra) for e in sb.ws.stack]
    )
    dirs_a = _direction_net(
        sa.ws.dim, cfg.hauslip_directions, cfg.seed, f"hauslip-net-{l_a.algebra.blocks}"
    )
    dirs_b = _direction_net(
        sb.ws.dim, cfg.hauslip_directions, cfg.seed, f"hauslip-net-{l_b.algebra.blocks}"
    )
    d_ab, r_a = _directed_hausdorff(sa, sb, dirs_a, source_stack=stack_a, target_stack=stack_b)
    d_ba, r_b = _directed_hausdorff(sb, sa, dirs_b, source_stack=stack_b, target_stack=stack_a)
    value = max(d_ab, d_ba)
    mesh = max(_net_mesh(dirs_a, cfg.seed) * r_a, _net_mesh(dirs_b, cfg.seed) * r_b)
    flags = (f"directions={len(dirs_a)}", f"mesh={mesh:.6e}")
    return MetricReport(
        value, "lower-estimate", value, value + mesh, flags, _prov("bridge_reach", cfg)
    )


def bridge_height(
    bridge: BridgeSpec, l_a: LipNorm, l_b: LipNorm, cfg: SolverConfig
) -> MetricReport:
    """Largest MK distance from a state space to the pullback of the 1-level set.

    The 1-level set is realized as the densities supported on the fixed
    subspace of the Hermitian pivot.  For the unit pivot that set is all
    states and the height vanishes identically, which is reported exactly.
    """
    _require_lipnorm(l_a)
    _require_lipnorm(l_b)
    _validate_bridge_sides(bridge, l_a, l_b, cfg)
    prov = _prov("bridge_height", cfg)
    if bridge.is_identity_pivot:
        return MetricReport(0.0, "exact-within-tol", 0.0, 0.0, ("unit-pivot",), prov)
    p = bridge.fixed_subspace()
    nsamp = cfg.height_samples
    sides = []
    for lip, emb, side in ((l_a, bridge.embed_a, "A"), (l_b, bridge.embed_b, "B")):
        engine = MKEngine(lip, cfg)
        alg = lip.algebra
        rng = child_rng(cfg.seed, "bridge-height", side, lip.digest)
        n = alg.total_dim
        pulled = []
        for _ in range(nsamp):
            v = p @ (rng.standard_normal(p.shape[1]) + 1j * rng.standard_normal(p.shape[1]))
            v /= np.linalg.norm(v)
            pulled.append(emb.pullback_state(np.outer(v, v.conj()), alg))
        worst = 0.0
        for _ in range(nsamp):
            g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            q = g @ g.conj().T
            q = alg.project(q)
            state = q / np.trace(q).real
            best = min(engine.value(state, f) for f in pulled)
            worst = max(worst, best)
        sides.append(worst)
    value = max(sides)
    flags = (f"samples={nsamp}",)
    return MetricReport(value, "lower-estimate", value, None, flags, prov)


def bridge_length(
    bridge: BridgeSpec, l_a: LipNorm, l_b: LipNorm, cfg: SolverConfig
) -> MetricReport:
    """max(reach, height) of the bridge."""
    reach = bridge_reach(bridge, l_a, l_b, cfg)
    height = bridge_height(bridge, l_a, l_b, cfg)
    return report_max(reach, height, _prov("bridge_length", cfg))


def propinquity_upper_bound(
    bridges, l_a: LipNorm, l_b: LipNorm, cfg: SolverConfig
) -> MetricReport:
    """Best available upper bound from a family of explicit bridges.

    Assembled from the sound side of each length estimate (value + mesh);
    the result is also checked against the max-diameter bound, which is a
    theorem-level upper bound, and clamped with a warning flag if a bridge
    exceeded it.
    """
    bridges = list(bridges)
    if not bridges:
        raise InvalidInputError("propinquity_upper_bound: need at least one bridge")
    lengths = [bridge_length(b, l_a, l_b, cfg) for b in bridges]
    highs = [r.hi if r.hi is not None else r.value for r in lengths]
    value = min(highs)
    lo = min(r.lo if r.lo is not None else r.value for r in lengths)
    flags: tuple[str, ...] = tuple(
        dict.fromkeys(f for r in lengths for f in r.flags)
    )
    diam_cap = max(mk_diameter(l_a, cfg).hi, mk_diameter(l_b, cfg).hi)
    if value > diam_cap:
        value = diam_cap
        flags = flags + ("diameter-clamped",)
    return MetricReport(
        value, "upper-bound", min(lo, value), value, flags, _prov("propinquity_upper_bound", cfg)
    )


# ---------------------------------------------------------------------------
# dilation, Lipschitz distance, automorphism length


def _as_morphism(mapping, algebra: AlgebraSpec):
    """Normalize a map argument to a callable on matrices."""
    if mapping is None or (isinstance(mapping, str) and mapping == "identity"):
        return lambda a: a
    if isinstance(mapping, UnitaryMap):
        return mapping.apply
    if isinstance(mapping, Embedding):
        return lambda a: mapping.apply(a, algebra)
    if callable(mapping):
        return mapping
    raise ContractError(f"unsupported morphism {type(mapping).__name__}")


def dilation_detailed(
    mapping, l_a: LipNorm, l_b: LipNorm, cfg: SolverConfig, extra_start_matrices=None
) -> tuple[MetricReport, SolveResult]:
    """sup of L_B(map(a)) over the sliced unit L_A-ball (lower estimate).

    Equals the Lipschitz seminorm of the dual state-space map for unital
    morphisms.
    """
    _require_lipnorm(l_a)
    _require_lipnorm(l_b)
    f = _as_morphism(mapping, l_a.algebra)
    unit = np.eye(l_a.dim, dtype=np.complex128)
    img_unit = f(unit)
    if np.abs(img_unit - np.eye(img_unit.shape[0])).max() > 1e-10:
        raise ContractError("dilation: the map must be unital")
    solver = BallSolver(BallSpec(l_a, 1.0, maximally_mixed(l_a.dim)), cfg)
    images = np.stack([f(e) for e in solver.ws.stack])
    for img in images:
        if not l_b.algebra.contains(img, tol=1e-8):
            raise ContractError("dilation: the map does not land in the target algebra")
    stack = l_b.image_stack(images)
    obj = NormImageObjective(stack, scale=l_b.scale)
    res = solver.max_convex(
        obj,
        seed_tags=("dilation", l_b.digest),
        extra_starts=_starts_from_matrices(solver, extra_start_matrices),
    )
    report = MetricReport(
        res.value, "lower-estimate", res.value, None, res.flags, _prov("dilation", cfg)
    )
    return report, res


def dilation(mapping, l_a: LipNorm, l_b: LipNorm, cfg: SolverConfig) -> MetricReport:
    return dilation_detailed(mapping, l_a, l_b, cfg)[0]


def dilation_pair(
    mapping, inverse_mapping, l_a: LipNorm, l_b: LipNorm, cfg: SolverConfig
) -> tuple[MetricReport, MetricReport]:
    """Both dilation directions, cross-seeded so the chain bound d1*d2 >= 1 holds.

    The argmax of the forward problem is pushed through the map and used as
    a start for the reverse problem, which makes the product of the two
    lower estimates at least one up to rounding.
    """
    r1, res1 = dilation_detailed(mapping, l_a, l_b, cfg)
    f = _as_morphism(mapping, l_a.algebra)
    r2, _ = dilation_detailed(
        inverse_mapping, l_b, l_a, cfg, extra_start_matrices=[f(res1.matrix)]
    )
    return r1, r2


def mk_length_detailed(
    alpha: UnitaryMap, lipnorm: LipNorm, cfg: SolverConfig, extra_start_matrices=None
) -> tuple[MetricReport, SolveResult]:
    """sup ||alpha(a) - a|| over the unit ball (lower estimate).

    Central shifts cancel inside alpha(a) - a, so slicing is exact here.
    """
    _require_lipnorm(lipnorm)
    solver = BallSolver(BallSpec(lipnorm, 1.0, maximally_mixed(lipnorm.dim)), cfg)
    alg = lipnorm.algebra
    images = []
    for e in solver.ws.stack:
        img = alpha.apply(e)
        if not alg.contains(img, tol=1e-8):
            raise ContractError("mk_length: the map is not an automorphism of the algebra")
        images.append(img - e)
    stack = np.stack(images)
    obj = NormImageObjective(stack)
    res = solver.max_convex(
        obj,
        seed_tags=("mk-length", digest(matrix_to_json(alpha.u))),
        extra_starts=_starts_from_matrices(solver, extra_start_matrices),
    )
    report = MetricReport(
        res.value, "lower-estimate", res.value, None, res.flags, _prov("mk_length", cfg)
    )
    return report, res


def mk_length(alpha: UnitaryMap, lipnorm: LipNorm, cfg: SolverConfig) -> MetricReport:
    return mk_length_detailed(alpha, lipnorm, cfg)[0]


def best_equivalence_constant_detailed(
    l1: LipNorm, l2: LipNorm, cfg: SolverConfig, extra_start_matrices=None
) -> tuple[MetricReport, SolveResult]:
    """Least C with L2 <= C L1, as sup of L2 over the sliced unit L1-ball.

    Central invariance of both seminorms extends the bound from the slice to
    the whole self-adjoint part.
    """
    _require_lipnorm(l1)
    _require_lipnorm(l2)
    _same_algebra(l1, l2)
    solver = BallSolver(BallSpec(l1, 1.0, maximally_mixed(l1.dim)), cfg)
    stack = l2.image_stack(solver.ws.stack)
    obj = NormImageObjective(stack, scale=l2.scale)
    res = solver.max_convex(
        obj,
        seed_tags=("equivalence", l2.digest),
        extra_starts=_starts_from_matrices(solver, extra_start_matrices),
    )
    report = MetricReport(
        res.value,
        "lower-estimate",
        res.value,
        None,
        res.flags,
        _prov("best_equivalence_constant", cfg),
    )
    return report, res


def best_equivalence_constant(l1: LipNorm, l2: LipNorm, cfg: SolverConfig) -> MetricReport:
    return best_equivalence_constant_detailed(l1, l2, cfg)[0]


def equivalence_constants_pair(
    l1: LipNorm, l2: LipNorm, cfg: SolverConfig
) -> tuple[MetricReport, MetricReport]:
    """Both equivalence constants, cross-seeded so C12 * C21 >= 1 holds."""
    r12, res12 = best_equivalence_constant_detailed(l1, l2, cfg)
    r21, _ = best_equivalence_constant_detailed(
        l2, l1, cfg, extra_start_matrices=[res12.matrix]
    )
    return r12, r21


# ---------------------------------------------------------------------------
# Lipschitz distance over inner automorphisms


def _unitary_from_k(coords: np.ndarray, basis_stack: np.ndarray) -> np.ndarray:
    k = np.tensordot(coords, basis_stack, axes=(0, 0))
    w, v = np.linalg.eigh(k)
    return (v * np.exp(1j * w)) @ v.conj().T


def _k_from_unitary(u: np.ndarray, basis_stack: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eig(u)
    theta = np.angle(w)
    k = (v * theta) @ np.linalg.inv(v)
    k = hermitian_part(k)
    return np.einsum("kij,ji->k", basis_stack.conj(), k).real


def lipschitz_distance(
    l_a: LipNorm,
    l_b: LipNorm,
    cfg: SolverConfig,
    extra_unitaries=(),
) -> tuple[MetricReport, UnitaryMap]:
    """Infimum over inner automorphisms of max{|ln dil|, |ln dil of inverse|}.

    Approximated from above: multistart descent over U = exp(iK) with K
    traceless Hermitian, the identity always among the starts.  Exact only
    for single-block algebras, where every automorphism is inner;
    multi-block algebras are rejected.
    """
    from scipy.optimize import minimize

    _same_algebra(l_a, l_b)
    if len(l_a.algebra.blocks) != 1:
        raise UnsupportedDimensionError(
            "lipschitz_distance handles single-block algebras only "
            "(outer automorphisms permute blocks)"
        )
    prov = _prov("lipschitz_distance", cfg)
    if l_a.digest == l_b.digest:
        n = l_a.dim
        return (
            MetricReport(0.0, "exact-within-tol", 0.0, 0.0, ("identical-lipnorms",), prov),
            UnitaryMap(np.eye(n)),
        )
    swapped = l_b.digest < l_a.digest
    if swapped:
        l_a, l_b = l_b, l_a  # the objective is symmetric; canonical order
    _require_lipnorm(l_a)
    _require_lipnorm(l_b)

    n = l_a.dim
    kbasis = l_a.algebra.basis().stack[1:]
    d = kbasis.shape[0]
    inner_cfg = SolverConfig(
        tol=cfg.tol,
        max_iter=cfg.max_iter,
        restarts=max(4, cfg.restarts // 4),
        seed=cfg.seed,
        oracle_resolution=cfg.oracle_resolution,
    )
    floored = []

    def dils(kcoords: np.ndarray, local_cfg: SolverConfig) -> tuple[float, float]:
        u = UnitaryMap(_unitary_from_k(kcoords, kbasis))
        d1 = dilation_detailed(u, l_a, l_b, local_cfg)[1].value
        d2 = dilation_detailed(u.inverse(), l_b, l_a, local_cfg)[1].value
        return d1, d2

    def objective(kcoords: np.ndarray) -> float:
        d1, d2 = dils(kcoords, inner_cfg)
        if d1 < 1e-12 or d2 < 1e-12:
            floored.append(True)
            d1, d2 = max(d1, 1e-12), max(d2, 1e-12)
        return max(abs(np.log(d1)), abs(np.log(d2)))

    rng = child_rng(cfg.seed, "lipd", l_a.digest, l_b.digest)
    starts = [np.zeros(d)]
    for _ in range(max(0, cfg.lipd_starts - 1)):
        starts.append(rng.standard_normal(d) * 0.7)
    for u in extra_unitaries:
        starts.append(_k_from_unitary(as_matrix(u), kbasis))

    candidates = []
    for k0 in starts:
        res = minimize(
            objective,
            k0,
            method="Powell",
            options={"maxfev": cfg.lipd_maxfev, "xtol": 1e-3, "ftol": 1e-4},
        )
        candidates.append((float(res.fun), res.x))
    candidates.sort(key=lambda t: t[0])

    best_val, best_k = np.inf, candidates[0][1]
    for fun, k in candidates[: min(3, len(candidates))]:
        d1, d2 = dils(k, cfg)
        d1, d2 = max(d1, 1e-12), max(d2, 1e-12)
        val = max(abs(np.log(d1)), abs(np.log(d2)))
        if val < best_val:
            best_val, best_k = val, k
    flags: tuple[str, ...] = (f"starts={len(starts)}",)
    if floored:
        flags = flags + ("dilation-floored",)
    u_best = UnitaryMap(_unitary_from_k(best_k, kbasis))
    if swapped:
        u_best = u_best.inverse()
    return MetricReport(best_val, "upper-bound", None, best_val, flags, prov), u_best


def lipd_propinquity_rhs(lipd_value: float, diam_a: float, diam_b: float) -> float:
    """Propinquity bound implied by a Lipschitz-distance bound: |1-e^t|(1/2+max diam)."""
    return abs(1.0 - np.exp(lipd_value)) * (0.5 + max(diam_a, diam_b))
