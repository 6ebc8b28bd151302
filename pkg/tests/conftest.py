import numpy as np
import pytest

import qmetric as qm

TWO_POINT_D = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


@pytest.fixture
def two_point():
    """The two-point space: diagonal algebra C^2 with the off-diagonal Dirac."""
    alg = qm.AlgebraSpec((1, 1))
    lip = qm.LipNorm(qm.DiracCommutator(TWO_POINT_D), alg)
    return alg, lip


@pytest.fixture
def cfg():
    return qm.SolverConfig(seed=42, restarts=8, hauslip_directions=24)


def amplified_dirac(seed: int, n: int, amp: int = 2) -> qm.LipNorm:
    """Random Dirac-commutator seminorm on M_n with an amplified representation.

    With the identity representation the operator D itself commutes with D,
    so the kernel check can only pass on a full matrix algebra when the
    representation is amplified.
    """
    alg = qm.AlgebraSpec((n,))
    d = qm.random_hermitian(seed, n * amp).mat
    return qm.LipNorm(qm.DiracCommutator(d, amplification=amp), alg)


def first_point_state() -> qm.DensityState:
    return qm.pure_state([1.0, 0.0])
