import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boussinesq_lab.errors import BranchCutError, ConstraintViolation, OffRayError
from boussinesq_lab.rh import (A_SYM, OMEGA, RAY_ANGLES, ModelJumpData, PhaseId, ReflectionSamples,
                               build_jump, chi1, delta1, delta1_split, delta_matrix, hexagon_product,
                               model_jumps, nu, phase, phase_derivative, saddle, symmetry_check,
                               symmetry_defects, v4_factors, vartheta)

GAUSS = ReflectionSamples.gaussian(0.5)
BUMP = ReflectionSamples.bump(0.7)
ZERO = ReflectionSamples.zero()
IDS = [PhaseId(2, 1), PhaseId(3, 1), PhaseId(3, 2)]


# --- phases -------------------------------------------------------------------

def test_phase_id_validation():
    with pytest.raises(ValueError):
        PhaseId(1, 2)


def test_phase_examples():
    assert phase(PhaseId(2, 1), 1.3, 0.0) == 0
    assert phase(PhaseId(2, 1), 1.0, 0.5) == pytest.approx(-0.25 * math.sqrt(3) * 1j, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5))
def test_phase21_closed_form_on_real_axis(zeta, k):
    assert phase(PhaseId(2, 1), zeta, k) == pytest.approx(-1j * math.sqrt(3) * k * (zeta - k), abs=1e-12)


def test_sign_table_of_phase21():
    for ang in np.linspace(math.pi / 3, math.pi, 50)[1:-1]:
        assert phase(PhaseId(2, 1), 1.0, cmath.exp(1j * ang)).real > 0
    for ang in np.linspace(math.pi, 5 * math.pi / 3, 50)[1:-1]:
        assert phase(PhaseId(2, 1), 1.0, cmath.exp(1j * ang)).real < 0


@pytest.mark.parametrize("pid", IDS)
@pytest.mark.parametrize("zeta", [-2.0, 0.7, 3.1])
def test_saddle_points(pid, zeta):
    k0 = saddle(pid, zeta)
    assert abs(phase_derivative(pid, zeta, k0)) <= 1e-12
    # derivative against a central difference at a generic point
    k = 0.3 + 0.4j
    h = 1e-6
    num = (phase(pid, zeta, k + h) - phase(pid, zeta, k - h)) / (2 * h)
    assert phase_derivative(pid, zeta, k) == pytest.approx(num, abs=1e-8)


def test_phase21_saddle_is_half_zeta_with_rotations():
    zeta = 1.4
    assert saddle(PhaseId(2, 1), zeta) == pytest.approx(zeta / 2, abs=1e-15)
    rotated = {complex(round(saddle(p, zeta).real, 12), round(saddle(p, zeta).imag, 12)) for p in IDS}
    expect = {complex(round(z.real, 12), round(z.imag, 12))
              for z in (zeta / 2, OMEGA * zeta / 2, OMEGA**2 * zeta / 2)}
    assert rotated == expect


def test_vartheta_is_phase_in_x_t():
    x, t, k = 3.0, 2.0, 0.4 + 0.1j
    assert vartheta(2, 1, x, t, k) == pytest.approx(t * phase(PhaseId(2, 1), x / t, k), abs=1e-14)


# --- reflection presets -------------------------------------------------------

def test_presets_reject_large_amplitude():
    for make in (ReflectionSamples.gaussian, ReflectionSamples.bump):
        with pytest.raises(ValueError, match="amplitude violates"):
            make(1.0)


def test_bump_is_compact():
    assert BUMP.r1(2.0) == 0 and BUMP.r1(0.0) == pytest.approx(0.7)


# --- jump matrices ------------------------------------------------------------

def _ray_point(ray, rho):
    return rho * cmath.exp(1j * RAY_ANGLES[ray - 1])


@pytest.mark.parametrize("ray", range(1, 7))
def test_zero_reflection_gives_identity(ray):
    v = build_jump(ray, 1.0, 2.0, _ray_point(ray, 0.8), ZERO)
    assert np.array_equal(v.entries, np.eye(3))


@pytest.mark.parametrize("ray", range(1, 7))
@pytest.mark.parametrize("refl", [GAUSS, BUMP])
def test_unimodular(ray, refl):
    for rho in (0.05, 0.4, 1.3):
        for x, t in ((0.0, 1.0), (2.0, 3.0), (-1.5, 0.5)):
            v = build_jump(ray, x, t, _ray_point(ray, rho), refl)
            assert abs(v.det - 1) <= 1e-12


def test_first_ray_block():
    x, t, k = 1.0, 2.0, 0.7
    v = build_jump(1, x, t, k, GAUSS).entries
    r = GAUSS.r1(k)
    e = cmath.exp(vartheta(2, 1, x, t, k))
    assert v[0, 1] == pytest.approx(-r / e) and v[1, 0] == pytest.approx(r.conjugate() * e)
    assert v[1, 1] == pytest.approx(1 - abs(r)**2)
    assert v[0, 0] == 1 and v[2, 2] == 1


def test_off_ray():
    with pytest.raises(OffRayError, match="argument off ray"):
        build_jump(1, 0.0, 1.0, 0.5 + 0.1j, GAUSS)
    with pytest.raises(OffRayError):
        build_jump(2, 0.0, 1.0, -1.0, GAUSS)


def test_v4_exact_split():
    for rho in (0.2, 0.9, 1.7):
        k = _ray_point(4, rho)
        U, R, L = v4_factors(1.3, 0.8, k, GAUSS)
        v = build_jump(4, 1.3, 0.8, k, GAUSS).entries
        assert np.max(np.abs(U @ R @ L - v)) <= 1e-14
        assert np.array_equal(R, np.eye(3))


def test_v4_partial_split_is_still_a_factorization_of_something_unimodular():
    k = _ray_point(4, 0.6)
    U, R, L = v4_factors(0.4, 1.1, k, GAUSS, analytic_fraction=0.5)
    for m in (U, R, L):
        assert abs(np.linalg.det(m) - 1) <= 1e-14


# --- delta functions ----------------------------------------------------------

def test_zero_reflection_delta():
    assert nu(ZERO) == 0
    assert delta1(1j, ZERO) == pytest.approx(1.0, abs=1e-15)
    assert np.allclose(delta_matrix(0.3 + 0.5j, ZERO), np.eye(3), atol=1e-15)


def _mp_delta1(k, refl, upper):
    f = lambda s: mp.log(1 - abs(complex(refl.r1(float(s))))**2) / (s - k)
    val = mp.quad(f, [0, 0.5, 1, 2, 4, upper], method="tanh-sinh")
    return complex(mp.exp(val / (2j * mp.pi)))


@pytest.mark.parametrize("k", [1j, -1.0, 0.5 + 0.2j, -2 - 3j])
def test_delta1_dual_quadrature(k):
    got = delta1(k, GAUSS, 1e-10)
    assert abs(got - _mp_delta1(k, GAUSS, 28.0)) <= 1e-10


def test_delta1_bump_dual_quadrature():
    assert abs(delta1(1j, BUMP) - _mp_delta1(1j, BUMP, 2.0)) <= 1e-10


def test_branch_cut():
    with pytest.raises(BranchCutError, match="k on branch cut"):
        delta1(1.0, GAUSS)
    with pytest.raises(BranchCutError):
        delta_matrix(OMEGA * 2.0, GAUSS)


@pytest.mark.parametrize("refl", [GAUSS, BUMP, ReflectionSamples.gaussian(0.9, 0.5, 2.0)])
@pytest.mark.parametrize("k", [0.3, 1.0, 1.6])
def test_plemelj_jump(refl, k):
    eps = 1e-8
    ratio = delta1(k + 1j * eps, refl) / delta1(k - 1j * eps, refl)
    assert abs(ratio - (1 - abs(refl.r1(k))**2)) <= 1e-6


@pytest.mark.parametrize("k", [1j, -0.5 + 0.1j, 2 - 1j])
def test_split_form_agrees(k):
    assert abs(delta1_split(k, GAUSS) - delta1(k, GAUSS)) <= 1e-12


def test_delta_matrix_det_and_rotation():
    k = 0.4 + 0.9j
    D = delta_matrix(k, GAUSS)
    assert abs(np.prod(np.diag(D)) - 1) <= 1e-12
    Dr = delta_matrix(OMEGA * k, GAUSS)
    # at omega k: delta1 -> delta5, delta3 -> delta1, delta5 -> delta3
    d = np.diag(D)
    assert np.allclose(np.diag(Dr), [d[1], d[2], d[0]], atol=1e-12)


@pytest.mark.parametrize("ang", [math.pi / 4, math.pi / 2, 3 * math.pi / 4])
@pytest.mark.parametrize("refl", [GAUSS, BUMP])
def test_chi1_modulus_of_continuity(refl, ang):
    c0 = chi1(0, refl)
    ratios = []
    for r in (1e-1, 1e-2, 1e-3, 1e-4):
        k = r * cmath.exp(1j * ang)
        ratios.append(abs(chi1(k, refl) - c0) / (r * (1 + abs(math.log(r)))))
    assert max(ratios) < 1.0
    assert ratios[-1] <= ratios[0] * 1.5


# --- model problem ------------------------------------------------------------

def test_constrained_data_from_real_r1():
    d = ModelJumpData.from_r1(0.2)
    assert d.s == pytest.approx((0.2, -0.2, 1 / 6, -1 / 6), abs=1e-15)
    assert d.constraint_defect() <= 1e-15
    assert d.symmetry_defect() <= 1e-15


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 0.8), st.floats(-math.pi, math.pi))
def test_constraint_closure(m, ph):
    d = ModelJumpData.from_r1(m * cmath.exp(1j * ph))
    assert d.constraint_defect() <= 1e-12
    assert np.max(np.abs(hexagon_product(d) - np.eye(3))) <= 1e-13


@settings(max_examples=50, deadline=None)
@given(st.floats(0.8, 0.99), st.floats(-math.pi, math.pi))
def test_constraint_closure_near_unit_modulus(m, ph):
    # r2(0) grows like 1/(1 - |r1|^2); round-off in the product grows with |s|^3
    d = ModelJumpData.from_r1(m * cmath.exp(1j * ph))
    size = 1 + max(abs(v) for v in d.s)
    assert np.max(np.abs(hexagon_product(d) - np.eye(3))) <= 1e-15 * size**3


def test_zero_data_identity():
    for m in model_jumps(ModelJumpData(0, 0, 0, 0), 0.7, 0.3 + 0.2j):
        assert np.array_equal(m.entries, np.eye(3))


def test_model_jump_structure():
    d = ModelJumpData.from_r1(0.3 + 0.1j)
    mats = model_jumps(d, 0.5, 0.2 - 0.1j)
    assert [m.index for m in mats] == list(range(1, 16))
    for m in mats[6:12]:
        assert np.array_equal(m.entries, np.eye(3))
    assert np.allclose(mats[12].entries, mats[5].entries @ mats[0].entries)
    for m in mats:
        assert abs(m.det - 1) <= 1e-12


def test_constraint_violation():
    with pytest.raises(ConstraintViolation, match="constraint violated"):
        model_jumps(ModelJumpData.from_reflection(0.2, 0.1), 0.0, 0.0)


def test_symmetries_hold_for_constrained_data():
    d = ModelJumpData.from_r1(0.2)
    assert symmetry_check(d, 0.4, 0.3 + 0.1j) <= 1e-12
    d2 = ModelJumpData.from_r1(0.5 * cmath.exp(0.8j))
    assert symmetry_check(d2, -0.2, 0.15 - 0.05j) <= 1e-12


def test_identity_matrices_have_no_defect():
    assert symmetry_check(ModelJumpData(0, 0, 0, 0), 1.0, 0.3 + 0.1j) == 0.0


def test_perturbed_s2_breaks_symmetry():
    d = ModelJumpData.from_r1(0.2)
    bad = ModelJumpData(d.s1, d.s2 + 0.3 - 0.2j, d.s3, d.s4)
    z3, z2 = symmetry_defects(bad, 0.4, 0.3 + 0.1j)
    assert symmetry_check(bad, 0.4, 0.3 + 0.1j) > 1e-3
    assert z2 > 1e-3


def test_z3_matrix_is_cyclic():
    assert np.allclose(np.linalg.matrix_power(A_SYM, 3), np.eye(3))
