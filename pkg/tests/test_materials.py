import numpy as np
import pytest

from conftest import random_frames, random_rotation
from mechforge.errors import ExponentOverflow, NonPositiveJacobian
from mechforge.materials import (DemirayMaterial, FungMaterial, GuccioneMaterial,
                                 HolzapfelOgdenMaterial, LinearIsoMaterial, NeoHookeMaterial,
                                 NewtonianFluid, guccione_coefficients, kinematics,
                                 linear_iso_stress, newtonian_cauchy)

FUNG_B = np.array([[4.0, 0.5, 0.2, 0.0, 0.1, 0.0],
                   [0.5, 2.0, 0.3, 0.0, 0.0, 0.1],
                   [0.2, 0.3, 2.0, 0.1, 0.0, 0.0],
                   [0.0, 0.0, 0.1, 3.0, 0.0, 0.0],
                   [0.1, 0.0, 0.0, 0.0, 2.5, 0.2],
                   [0.0, 0.1, 0.0, 0.0, 0.2, 2.5]])


def hyperelastic_models(frame, incompressible):
    kappa = None if incompressible else 20.0
    kw = dict(kappa=kappa, incompressible=incompressible)
    return {
        "neo_hooke": NeoHookeMaterial(1.5, **kw),
        "demiray": DemirayMaterial(1.2, 2.0, **kw),
        "fung": FungMaterial(2.0, FUNG_B, **kw).at(frame),
        "guccione": GuccioneMaterial(10.0, 8.0, 2.0, 4.0, **kw).at(frame),
        "holzapfel_ogden": HolzapfelOgdenMaterial(0.5, 5.0, 2.0, 3.0, 1.0, 4.0, 0.3, 2.0,
                                                  **kw).at(frame),
    }


def all_models(frame):
    out = {}
    for inc in (False, True):
        for name, m in hyperelastic_models(frame, inc).items():
            out[f"{name}-{'inc' if inc else 'comp'}"] = m
    return out


def random_F(rng, lo=0.8, hi=1.3):
    while True:
        F = np.eye(3) + 0.2 * rng.standard_normal((3, 3))
        if lo <= np.linalg.det(F) <= hi:
            return F


MODEL_NAMES = sorted(all_models(np.eye(3)))


def model(name, frame):
    return all_models(frame)[name]


# -- closed-form values -----------------------------------------------------------------


def test_linear_iso_zero_and_example():
    assert np.array_equal(linear_iso_stress(np.zeros((3, 3)), 1.0, 1.0), np.zeros((3, 3)))
    s = linear_iso_stress(np.diag([0.01, 0.0, 0.0]), 1.0, 1.0)
    assert np.allclose(s, np.diag([0.03, 0.01, 0.01]), rtol=0, atol=1e-15)


def test_linear_iso_trace_identity(rng):
    mu, la = 1.3, 0.7
    for _ in range(10):
        e = rng.standard_normal((3, 3))
        e = 0.5 * (e + e.T)
        s = linear_iso_stress(e, mu, la)
        assert np.allclose(s, s.T)
        assert np.trace(s) == pytest.approx((3 * la + 2 * mu) * np.trace(e), rel=1e-12)


def test_neo_hooke_identity_and_uniaxial():
    m = NeoHookeMaterial(1.0, incompressible=True)
    assert m.strain_energy(np.eye(3)) == 0.0
    lam = 2.0
    F = np.diag([lam, lam ** -0.5, lam ** -0.5])
    assert kinematics(F).I1 == pytest.approx(5.0, rel=1e-15)
    assert m.strain_energy(F) == pytest.approx(1.0, rel=1e-14)
    P = m.pk1_stress(F, p=1.0 / lam)
    assert P[0, 0] == pytest.approx(1.75, rel=1e-12)
    assert abs(P[1, 1]) < 1e-12 and abs(P[2, 2]) < 1e-12


def test_demiray_values():
    m = DemirayMaterial(2.0, 1.0, incompressible=True)
    assert m.strain_energy(np.eye(3)) == 0.0
    F = np.diag([np.sqrt(2.0), 1.0, 1.0])
    assert m.strain_energy(F) == pytest.approx(np.e - 1.0, rel=1e-14)
    # P(I) = 2 dW/dI1 I, so dW/dI1 at I1 = 3 is a/2
    P, _ = m.pk1_and_tangent(np.eye(3))
    assert np.allclose(P, 2 * (2.0 / 2) * np.eye(3), atol=1e-14)


def test_guccione_fiber_strain(rng):
    frame = random_rotation(rng)
    f = frame[:, 0]
    m = GuccioneMaterial(10.0, 1.0, 1.0, 1.0, incompressible=True).at(frame)
    # volume-preserving stretch along f0: E_ff = 0.1, E_ss = E_nn = (1/sqrt(1.2) - 1)/2
    lam = np.sqrt(1.2)
    F = np.eye(3) / np.sqrt(lam) + (lam - 1 / np.sqrt(lam)) * np.outer(f, f)
    et = 0.5 * (1 / lam - 1)
    assert np.allclose(kinematics(F).E, et * np.eye(3) + (0.1 - et) * np.outer(f, f), atol=1e-15)
    assert m.strain_energy(F) == pytest.approx(5 * (np.exp(0.01 + 2 * et ** 2) - 1), rel=1e-13)
    assert m.strain_energy(np.eye(3)) == 0.0


@pytest.mark.parametrize("name", ["fung", "guccione"])
def test_fung_family_ignores_volume_change(name, rng):
    frame = random_rotation(rng)
    m = hyperelastic_models(frame, True)[name]
    F = random_F(rng)
    F = F / np.cbrt(np.linalg.det(F))
    for alpha in (0.7, 1.3):
        assert m.strain_energy(alpha * F) == pytest.approx(m.strain_energy(F), rel=1e-12)


def test_guccione_frame_covariance(rng):
    frame = random_rotation(rng)
    m = GuccioneMaterial(10.0, 8.0, 2.0, 4.0, incompressible=True)
    for _ in range(10):
        F = random_F(rng)
        Q = random_rotation(rng)
        a = m.at(frame).strain_energy(F)
        b = m.at(Q @ frame).strain_energy(Q @ F @ Q.T)
        assert b == pytest.approx(a, rel=1e-12)


def test_holzapfel_ogden_identity_and_fiber_stretch():
    frame = np.eye(3)
    m = HolzapfelOgdenMaterial(0.5, 5.0, 2.0, 3.0, 1.0, 4.0, 0.3, 2.0,
                               incompressible=True).at(frame)
    assert abs(m.strain_energy(np.eye(3))) < 1e-15
    only_fiber = HolzapfelOgdenMaterial(0.0, 1.0, 1.0, 1.0, incompressible=True).at(frame)
    F = np.diag([1.1, 1.0, 1.0])
    assert only_fiber.strain_energy(F) == pytest.approx(0.5 * (np.exp(0.21 ** 2) - 1), rel=1e-12)
    assert only_fiber.strain_energy(np.diag([0.9, 1.0, 1.0])) == 0.0


def test_holzapfel_ogden_tension_switch_continuity():
    m = HolzapfelOgdenMaterial(0.5, 5.0, 2.0, 3.0, 1.0, 4.0, 0.0, 1.0,
                               incompressible=True).at(np.eye(3))
    prev = None
    for eps in (1e-2, 1e-4, 1e-6, 1e-8):
        below = np.diag([1.0 - eps, 1.0, 1.0])
        above = np.diag([1.0 + eps, 1.0, 1.0])
        dW = abs(m.strain_energy(above) - m.strain_energy(below))
        dP = np.abs(m.pk1_stress(above) - m.pk1_stress(below)).max()
        # the jump vanishes with the gap: W and P are continuous across I4 = 1
        assert dP < 50 * eps and dW < 50 * eps
        if prev is not None:
            assert dP < prev
        prev = dP


def test_newtonian_cauchy():
    assert np.allclose(newtonian_cauchy(np.zeros((3, 3)), 1.0, 1.0), -np.eye(3))
    L = np.zeros((3, 3))
    L[0, 1] = 2.0
    s = NewtonianFluid(1.0).cauchy(L, 0.0)
    assert s[0, 1] == pytest.approx(2.0) and s[1, 0] == pytest.approx(2.0)
    D = np.diag([0.3, -0.1, -0.2])
    assert np.trace(newtonian_cauchy(D, 2.0, 1.7)) == pytest.approx(-6.0, rel=1e-14)


def test_newtonian_rigid_translation_invariant(rng):
    L = rng.standard_normal((3, 3))
    # a constant superposed velocity has zero gradient, so L and sigma are unchanged
    f = NewtonianFluid(0.8)
    assert np.array_equal(f.cauchy(L + 0.0, 0.4), f.cauchy(L, 0.4))


# -- properties --------------------------------------------------------------------------


@pytest.mark.parametrize("name", MODEL_NAMES)
def test_stress_free_reference(name, rng):
    m = model(name, random_rotation(rng))
    p = m.reference_pressure() if m.incompressible else 0.0
    assert np.abs(m.pk1_stress(np.eye(3), p)).max() < 1e-12
    assert abs(m.strain_energy(np.eye(3))) < 1e-12


@pytest.mark.parametrize("name", MODEL_NAMES)
def test_objectivity(name, rng):
    m = model(name, random_rotation(rng))
    F = random_F(rng)
    W = m.strain_energy(F)
    P = m.pk1_stress(F, 0.3)
    for _ in range(20):
        Q = random_rotation(rng)
        assert m.strain_energy(Q @ F) == pytest.approx(W, rel=1e-12, abs=1e-14)
        assert np.allclose(m.pk1_stress(Q @ F, 0.3), Q @ P, rtol=0,
                           atol=1e-12 * np.abs(P).max())


@pytest.mark.parametrize("name", MODEL_NAMES)
def test_stress_is_energy_derivative(name, rng):
    m = model(name, random_rotation(rng))
    for _ in range(20):
        F = random_F(rng)
        P = m.pk1_stress(F, 0.0)
        h = 1e-6 * max(1.0, np.abs(F).max())
        fd = np.zeros((3, 3))
        for i in range(3):
            for j in range(3):
                E = np.zeros((3, 3))
                E[i, j] = h
                fd[i, j] = (m.strain_energy(F + E) - m.strain_energy(F - E)) / (2 * h)
        assert np.linalg.norm(P - fd) <= 1e-6 * max(np.linalg.norm(fd), 1e-8)


@pytest.mark.parametrize("name", MODEL_NAMES + ["linear_iso"])
def test_tangent_is_stress_derivative(name, rng):
    frame = random_rotation(rng)
    m = LinearIsoMaterial(1.0, 2.0) if name == "linear_iso" else model(name, frame)
    for _ in range(5):
        F = random_F(rng)
        p = 0.7
        _, A = m.pk1_tangent(F, p)
        h = 1e-6
        for _ in range(6):
            D = rng.standard_normal((3, 3))
            fd = (m.pk1_stress(F + h * D, p) - m.pk1_stress(F - h * D, p)) / (2 * h)
            AD = np.einsum("iJkL,kL->iJ", A, D)
            assert np.linalg.norm(AD - fd) <= 1e-6 * np.linalg.norm(fd)


def test_fung_reproduces_guccione(rng):
    frames = random_frames(rng, 50)
    bf, bt, bfs = 8.0, 2.0, 4.0
    g = GuccioneMaterial(10.0, bf, bt, bfs, incompressible=True).at(frames)
    f = FungMaterial(10.0, guccione_coefficients(bf, bt, bfs), incompressible=True).at(frames)
    F = np.stack([random_F(rng) for _ in range(50)])
    Wg, Wf = g.strain_energy(F), f.strain_energy(F)
    assert np.all(np.abs(Wf - Wg) <= 1e-12 * np.abs(Wg))
    assert np.allclose(f.pk1_stress(F), g.pk1_stress(F), rtol=1e-12, atol=0)


def test_fung_linear_in_scale(rng):
    frame = random_rotation(rng)
    F = random_F(rng)
    a = FungMaterial(1.0, FUNG_B, incompressible=True).at(frame).strain_energy(F)
    b = FungMaterial(2.0, FUNG_B, incompressible=True).at(frame).strain_energy(F)
    assert b == pytest.approx(2 * a, rel=1e-14)


def test_fung_zero_strain():
    m = FungMaterial(2.0, FUNG_B, incompressible=True).at(np.eye(3))
    assert m.strain_energy(np.eye(3)) == 0.0


def test_fung_requires_symmetric_matrix():
    B = FUNG_B.copy()
    B[0, 1] += 1
    with pytest.raises(ValueError):
        FungMaterial(1.0, B, incompressible=True)


def test_exponent_overflow_guard():
    m = DemirayMaterial(1.0, 50.0, incompressible=True)
    with pytest.raises(ExponentOverflow, match="exceeds"):
        m.pk1_stress(np.diag([5.0, 1.0, 1.0]))


def test_inverted_element_rejected():
    m = NeoHookeMaterial(1.0, kappa=1.0)
    with pytest.raises(NonPositiveJacobian):
        m.pk1_stress(np.diag([-1.0, 1.0, 1.0]))


def test_batched_evaluation_matches_single(rng):
    frames = random_frames(rng, 4)
    m = GuccioneMaterial(10.0, 8.0, 2.0, 4.0, kappa=5.0).at(frames)
    F = np.stack([random_F(rng) for _ in range(4)])
    P = m.pk1_stress(F)
    for c in range(4):
        single = GuccioneMaterial(10.0, 8.0, 2.0, 4.0, kappa=5.0).at(frames[c])
        assert np.allclose(single.pk1_stress(F[c]), P[c], rtol=1e-14, atol=1e-14)


def test_compressible_needs_kappa():
    with pytest.raises(ValueError, match="kappa"):
        NeoHookeMaterial(1.0)
