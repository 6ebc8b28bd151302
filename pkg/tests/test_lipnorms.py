"""Seminorm families: evaluation formulas, kernel checks, product inequalities."""

import numpy as np
import pytest

import qmetric as qm
from qmetric.core import child_rng
from qmetric.errors import InvalidInputError, NotALipNormError, SingularInputError
from qmetric.lipnorms import (
    CallableF,
    admissibility_defect,
    spec_from_json,
    spec_to_json,
)

from conftest import TWO_POINT_D, amplified_dirac


def test_two_point_commutator_value(two_point):
    alg, lip = two_point
    # [D, diag(x, y)] has singular value |x - y| when D is the flip
    for x, y in [(3.0, 1.0), (0.0, 0.0), (-2.0, 5.0)]:
        assert lip.eval(np.diag([x, y])) == pytest.approx(abs(x - y), abs=1e-12)


def test_unit_always_in_kernel(two_point):
    _, lip = two_point
    specs = {
        "dirac": lip,
        "scaled": qm.LipNorm(qm.Scaled(3.0, lip.spec), lip.algebra),
    }
    for l in specs.values():
        assert l.eval(np.eye(2)) == pytest.approx(0.0, abs=1e-12)


def test_scaled_homogeneity_exact(two_point):
    alg, lip = two_point
    doubled = qm.LipNorm(qm.Scaled(2.0, lip.spec), alg)
    a = np.diag([1.3, -0.4])
    assert doubled.eval(a) == 2.0 * lip.eval(a)


def test_perturbed_with_zero_omega_matches_base(two_point):
    alg, lip = two_point
    pert = qm.LipNorm(qm.Perturbed(TWO_POINT_D, np.zeros((2, 2))), alg)
    for seed in range(4):
        a = alg.project(qm.random_hermitian(seed, 2).mat)
        assert pert.eval(a) == pytest.approx(lip.eval(a), abs=1e-14)


def test_conformal_with_unit_h_reduces_exactly():
    alg = qm.AlgebraSpec((2,))
    d = qm.random_hermitian(3, 4).mat
    base = qm.LipNorm(qm.DiracCommutator(d, amplification=2), alg)
    conf = qm.LipNorm(qm.Conformal(d, np.eye(2), amplification=2), alg)
    a = qm.random_hermitian(5, 2).mat
    assert conf.eval(a) == base.eval(a)


def test_conformal_rejects_singular_h():
    alg = qm.AlgebraSpec((2,))
    d = qm.random_hermitian(3, 2).mat
    with pytest.raises(SingularInputError):
        qm.LipNorm(qm.Conformal(d, np.diag([1.0, 0.0])), alg)


def test_curved_single_generator_matches_commutator(two_point):
    alg, _ = two_point
    x = TWO_POINT_D  # off-diagonal generator: the shift direction
    lip = qm.LipNorm(qm.Curved([x], np.eye(1)), alg)
    for seed in range(3):
        a = alg.project(qm.random_hermitian(seed, 2).mat)
        want = qm.operator_norm(1j * (x @ a - a @ x))
        assert lip.eval(a) == pytest.approx(want, abs=1e-12)


def test_curved_unitary_mix_preserves_values():
    # conjugation-covariance of the commutator family
    alg = qm.AlgebraSpec((2,))
    d = qm.random_hermitian(21, 2).mat
    u = qm.random_unitary(22, 2)
    base = qm.LipNorm(qm.DiracCommutator(d), alg)
    moved = qm.LipNorm(qm.DiracCommutator(u.apply(d)), alg)
    for seed in range(4):
        a = qm.random_hermitian(seed + 30, 2).mat
        assert moved.eval(u.apply(a)) == pytest.approx(base.eval(a), abs=1e-9)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_gamma_matrices_satisfy_clifford_relations(m):
    gs = qm.gamma_matrices(m)
    assert len(gs) == m
    size = 2 ** (m // 2)
    eye = np.eye(size)
    for i, g in enumerate(gs):
        assert g.shape == (size, size)
        assert np.abs(g - g.conj().T).max() < 1e-12
        for j, h in enumerate(gs):
            anti = g @ h + h @ g
            want = 2.0 * eye if i == j else 0.0 * eye
            assert np.abs(anti - want).max() < 1e-12


# -- seminorm properties -----------------------------------------------------


def _family(seed):
    alg2 = qm.AlgebraSpec((2,))
    d4 = qm.random_hermitian(seed, 4).mat
    d2 = qm.random_hermitian(seed + 1, 2).mat
    h = qm.random_hermitian(seed + 2, 2).mat + 3.0 * np.eye(2)
    x1 = qm.random_hermitian(seed + 3, 2).mat
    x1 = x1 - np.trace(x1) / 2 * np.eye(2)
    x2 = qm.random_hermitian(seed + 4, 2).mat
    x2 = x2 - np.trace(x2) / 2 * np.eye(2)
    return [
        qm.LipNorm(qm.DiracCommutator(d4, amplification=2), alg2),
        qm.LipNorm(qm.Perturbed(d4, qm.random_hermitian(seed + 5, 4).mat, 2), alg2),
        qm.LipNorm(qm.Conformal(d2, h), alg2),
        qm.LipNorm(qm.Curved([x1, x2], np.array([[1.0, 0.2], [-0.1, 0.8]])), alg2),
        qm.LipNorm(qm.Scaled(0.7, qm.DiracCommutator(d4, amplification=2)), alg2),
    ]


def test_seminorm_axioms_all_variants():
    rng = child_rng(0, "seminorm-axioms")
    for lip in _family(60):
        n = lip.dim
        for _ in range(50):
            a = _herm(rng, n)
            b = _herm(rng, n)
            t = rng.uniform(-3, 3)
            assert lip.eval(t * a) == pytest.approx(abs(t) * lip.eval(a), abs=1e-9)
            assert lip.eval(a + b) <= lip.eval(a) + lip.eval(b) + 1e-9


def _g(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def _herm(rng, n):
    g = _g(rng, n)
    return 0.5 * (g + g.conj().T)


def test_perturbation_lipschitz_bound():
    alg = qm.AlgebraSpec((2,))
    d = qm.random_hermitian(70, 4).mat
    rng = child_rng(1, "pert-bound")
    for _ in range(40):
        w1 = _herm(rng, 4)
        w2 = _herm(rng, 4)
        a = _herm(rng, 2)
        l1 = qm.LipNorm(qm.Perturbed(d, w1, 2), alg)
        l2 = qm.LipNorm(qm.Perturbed(d, w2, 2), alg)
        gap = abs(l1.eval(a) - l2.eval(a))
        assert gap <= 2 * qm.operator_norm(w1 - w2) * qm.operator_norm(a) + 1e-9


# -- kernel check -------------------------------------------------------------


def test_kernel_check_two_point_flip(two_point):
    _, lip = two_point
    res = qm.kernel_check(lip)
    assert res.ok
    # oracle: on the 1-dim traceless sphere the minimum is attained at
    # +-diag(1,-1)/sqrt(2), where the value is sqrt(2)
    assert res.min_on_sphere == pytest.approx(np.sqrt(2.0), rel=1e-6)


def test_kernel_check_zero_dirac_fails(two_point):
    alg, _ = two_point
    lip = qm.LipNorm(qm.DiracCommutator(np.zeros((2, 2))), alg)
    res = qm.kernel_check(lip)
    assert not res.ok
    assert res.witness is not None
    assert lip.eval(res.witness.mat) == pytest.approx(0.0, abs=1e-10)


def test_kernel_check_identity_rep_on_full_algebra_fails():
    # D commutes with itself, so the commutator seminorm with the identity
    # representation always has a nontrivial kernel on a full matrix algebra
    alg = qm.AlgebraSpec((2,))
    d = qm.random_hermitian(80, 2).mat
    lip = qm.LipNorm(qm.DiracCommutator(d), alg)
    res = qm.kernel_check(lip)
    assert not res.ok


def test_kernel_check_amplified_rep_passes():
    lip = amplified_dirac(81, 2)
    assert qm.kernel_check(lip).ok
    lip3 = amplified_dirac(82, 3)
    assert qm.kernel_check(lip3).ok


def test_kernel_check_curved_two_point(two_point):
    alg, _ = two_point
    lip = qm.LipNorm(qm.Curved([TWO_POINT_D], np.array([[0.8]])), alg)
    res = qm.kernel_check(lip)
    assert res.ok
    # 1-dim oracle: value at the unit traceless direction
    direction = np.diag([1.0, -1.0]) / np.sqrt(2)
    assert res.min_on_sphere == pytest.approx(lip.eval(direction), rel=1e-6)


def test_metric_ops_reject_non_lipnorms(two_point, cfg):
    alg, _ = two_point
    lip = qm.LipNorm(qm.DiracCommutator(np.zeros((2, 2))), alg)
    with pytest.raises(NotALipNormError):
        qm.mk_distance(lip, qm.pure_state([1, 0]), qm.pure_state([0, 1]), cfg)


# -- quasi-Leibniz -------------------------------------------------------------


def test_leibniz_defect_nonpositive_for_commutator_norms():
    rng = child_rng(2, "leibniz")
    f = qm.LeibnizF()
    for n in (2, 3):
        lip = amplified_dirac(90 + n, n)
        for _ in range(100):
            a, b = _herm(rng, n), _herm(rng, n)
            assert qm.quasi_leibniz_defect(lip, f, a, b) <= 1e-9


def test_conformal_defect_with_scaled_leibniz():
    alg = qm.AlgebraSpec((3,))
    d = qm.random_hermitian(95, 3).mat
    h = qm.random_hermitian(96, 3).mat + 3.5 * np.eye(3)
    lip = qm.LipNorm(qm.Conformal(d, h), alg)
    w = np.linalg.eigvalsh(h)
    m = (np.max(np.abs(w)) / np.min(np.abs(w))) ** 2
    f = qm.ScaledLeibnizF(m)
    rng = child_rng(3, "conf-defect")
    for _ in range(100):
        a, b = _herm(rng, 3), _herm(rng, 3)
        assert qm.quasi_leibniz_defect(lip, f, a, b) <= 1e-9


def test_defect_at_unit_is_zero(two_point):
    _, lip = two_point
    eye = np.eye(2)
    assert qm.quasi_leibniz_defect(lip, qm.LeibnizF(), eye, eye) == pytest.approx(
        0.0, abs=1e-12
    )


def test_admissibility_sampler():
    assert admissibility_defect(qm.LeibnizF(), 0) <= 0
    assert admissibility_defect(qm.ScaledLeibnizF(2.0), 0) <= 0
    bad = CallableF(lambda x, y, lx, ly: 0.0)
    assert admissibility_defect(bad, 0) > 0
    with pytest.raises(InvalidInputError):
        qm.ScaledLeibnizF(0.5)


# -- domain norm and serialization -------------------------------------------


def test_domain_norm_examples(two_point):
    _, lip = two_point
    assert qm.domain_norm(lip, np.eye(2)) == pytest.approx(1.0, abs=1e-12)
    assert qm.domain_norm(lip, np.zeros((2, 2))) == pytest.approx(0.0, abs=1e-12)
    assert qm.domain_norm(lip, np.diag([1.0, -1.0])) == pytest.approx(3.0, abs=1e-12)


def test_spec_json_round_trip():
    alg = qm.AlgebraSpec((2,))
    for lip in _family(110):
        back = qm.LipNorm(spec_from_json(spec_to_json(lip.spec)), alg)
        a = _herm(child_rng(4, "rt"), 2)
        assert back.eval(a) == pytest.approx(lip.eval(a), abs=1e-12)
        assert back.digest == lip.digest
