import json

import numpy as np
import pytest

from pgfermi import finite_level as fl
from pgfermi.errors import DegenerateSpectrum, SingularBasis, WeightLengthMismatch
from pgfermi.fermion import shift_matrix

PSI_SKEW = np.array([[1, 1, 0], [0, 1, 0], [0, 0, 1]], dtype=complex)


def test_from_spectrum_examples():
    sys = fl.from_spectrum([0, 1, 2], np.eye(3))
    assert np.allclose(sys.H, np.diag([0, 1, 2])) and np.allclose(sys.Phi, np.eye(3))
    sys = fl.from_spectrum([0, 1, 4], PSI_SKEW)
    assert np.allclose(sys.Phi, np.linalg.inv(PSI_SKEW).conj().T)
    assert not np.allclose(sys.H, sys.H.conj().T)
    assert np.allclose(np.sort(np.linalg.eigvals(sys.H).real), [0, 1, 4])
    fl.from_spectrum([1, 1j, -1j], np.eye(3))


def test_from_spectrum_errors():
    with pytest.raises(DegenerateSpectrum):
        fl.from_spectrum([0, 1, 1], np.eye(3))
    with pytest.raises(SingularBasis):
        fl.from_spectrum([0, 1, 2], np.ones((3, 3)))


def test_ladders():
    sys = fl.from_spectrum([0, 1, 2, 3], np.eye(4))
    unit = fl.unit_ladder(sys)
    assert np.allclose(unit.a, shift_matrix(4)) and np.allclose(unit.b, shift_matrix(4).T)
    sys2 = fl.from_spectrum([0, 1, 4], np.eye(3))
    a = fl.general_ladder(sys2, fl.LadderWeights.from_rho([1, 4])).a
    assert np.allclose(a, [[0, 1, 0], [0, 0, 2], [0, 0, 0]])
    with pytest.raises(WeightLengthMismatch):
        fl.general_ladder(sys2, fl.LadderWeights.unit(3))


def test_q_weights():
    assert np.allclose(fl.q_weights(1).rho, [1])
    assert np.allclose(fl.q_weights(2).rho, [1, 1])
    assert np.allclose(fl.q_weights(3).rho, [1, np.sqrt(2), 1])
    sys = fl.from_spectrum([0, 1, 2], PSI_SKEW)
    assert np.allclose(fl.general_ladder(sys, fl.q_weights(2)).a, fl.unit_ladder(sys).a)


@pytest.mark.parametrize("eps, shift", [([0, 1, 4], 0), ([2, 3, 6], 2)])
def test_factorize_examples(eps, shift):
    sys = fl.from_spectrum(eps, np.eye(3))
    w, s = fl.factor_weights(sys)
    assert np.allclose(w.rho, [1, 4]) and s == shift
    pair, s = fl.factorize(sys)
    assert np.allclose(pair.b @ pair.a + s * np.eye(3), np.diag(eps))


def test_factorize_two_level(rng):
    Psi = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    pair, s = fl.factorize(fl.from_spectrum([0, 1], Psi))
    assert pair.n == 1


def test_expansion_examples():
    sys = fl.from_spectrum([0, 1, 4], np.eye(3))
    assert np.allclose(fl.expand_ladder_in_pf(sys, fl.LadderWeights.from_rho([1, 4])), [1, 1])
    sys4 = fl.from_spectrum([0, 1, 2, 3, 4], np.eye(5))
    assert np.allclose(fl.expand_ladder_in_pf(sys4, fl.LadderWeights.unit(4)), [1, 0, 0, 0])


def test_sigma_sign_flip_is_irrelevant(rng):
    sys = fl.random_system(4, rng, real=False)
    w, shift = fl.factor_weights(sys)
    for k in range(sys.n):
        sigma = list(w.sigma)
        sigma[k] = -sigma[k]
        flipped = fl.LadderWeights(w.rho, tuple(sigma))
        pair = fl.general_ladder(sys, flipped)
        resid = np.max(np.abs(pair.b @ pair.a + shift * np.eye(sys.dim) - sys.H))
        assert resid < 1e-10 * max(1.0, np.max(np.abs(sys.H)))
        fl.expand_ladder_in_pf(sys, flipped)


def test_structure_on_random_systems(rng):
    for real in (True, False):
        for n in range(1, 6):
            rep = fl.structure_checks(fl.random_system(n, rng, real=real))
            assert rep.overall, rep.to_table()
            assert ("pseudo_hermiticity" in [c.name for c in rep.checks]) == real


def test_equidistant_spectrum(rng):
    Psi = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    sys = fl.from_spectrum([0, 2, 4], Psi)
    rep = fl.structure_checks(sys)
    assert rep["equidistant_Npf"].ok and rep.notes["equidistant_step"] == [2.0, 0.0]
    N = sum(np.linalg.matrix_power(fl.unit_ladder(sys).b, k)
            @ np.linalg.matrix_power(fl.unit_ladder(sys).a, k) for k in (1, 2))
    assert np.allclose(sys.H, 2 * N)


def test_json_round_trip(rng):
    sys = fl.random_system(3, rng, real=False)
    back = fl.FiniteLevelSystem.from_json(json.loads(json.dumps(sys.to_json())))
    assert np.allclose(back.H, sys.H)
    assert np.allclose(fl.FiniteLevelSystem.from_json({"eps": [0, 1]}).Psi, np.eye(2))
