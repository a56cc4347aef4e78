import numpy as np
import pytest

from combo_fft.tensors import (
    SQRT2,
    det3,
    from_mandel,
    mandel_to_matrix9,
    isotropic_mandel,
)
from combo_fft.materials import (
    NeoHookeanParams,
    LinearElasticParams,
    NeoHookeanLaw,
    LinearElasticLaw,
    lame_parameters,
)
from combo_fft.laminate import (
    BadLambda,
    NoConvergence,
    ComboMeta,
    LaminateTolerance,
    LaminateSolver,
    mix_voigt,
    mix_reuss,
    mix_hill,
    milton_laminate,
    small_strain_jump,
    phase_strains,
    small_strain_stiffness,
    phase_gradients,
    traction_residual,
    jump_hessian,
    admissibility_bounds,
    back_project,
    finite_strain_solve,
    thermal_jump,
    thermal_phase_gradients,
)


@pytest.fixture
def rng():
    yield np.random.default_rng(7)


@pytest.fixture
def random_spd(rng):
    def _create(size=6, shift=1.0):
        m = rng.normal(size=(size, size))
        return m @ m.T + shift * np.eye(size)
    yield _create


@pytest.fixture
def neo_hookean_laws():
    yield (
        NeoHookeanLaw(NeoHookeanParams(E=10.0, nu=0.3)),
        NeoHookeanLaw(NeoHookeanParams(E=1.0, nu=0.0)),
    )


def _unit(vector):
    vector = np.asarray(vector, dtype=float)
    return vector / np.linalg.norm(vector)


def _min_eigenvalue(matrix):
    return float(np.min(np.linalg.eigvalsh(0.5 * (matrix + matrix.T))))


def _isotropic(young, poisson):
    return isotropic_mandel(*lame_parameters(young, poisson))


def test_mixing_rules_of_identical_phases(random_spd):
    stiffness = random_spd()
    for rule in (mix_voigt, mix_reuss, mix_hill):
        assert np.allclose(rule(stiffness, stiffness, 0.3), stiffness)
        assert np.allclose(rule(stiffness, random_spd(), 1.0), stiffness)


def test_mixing_rules_are_ordered(random_spd):
    plus, minus = random_spd(), random_spd()
    voigt = mix_voigt(plus, minus, 0.4)
    reuss = mix_reuss(plus, minus, 0.4)
    hill = mix_hill(plus, minus, 0.4)
    assert _min_eigenvalue(hill - reuss) >= -1e-10
    assert _min_eigenvalue(voigt - hill) >= -1e-10


def test_milton_laminate_of_identical_phases(random_spd):
    stiffness = random_spd()
    result = milton_laminate(stiffness, stiffness, 0.3, [0.0, 0.6, 0.8])
    assert np.allclose(result, stiffness, rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize("normal", [[1.0, 0.0, 0.0], [1.0, 2.0, 2.0]])
def test_milton_laminate_matches_closed_form(normal):
    plus, minus = _isotropic(10.0, 0.3), _isotropic(1.0, 0.0)
    meta = ComboMeta.from_direction(normal, 0.35)
    closed_form = small_strain_stiffness(plus, minus, meta)
    milton = milton_laminate(plus, minus, 0.35, meta.normal)
    error = np.linalg.norm(milton - closed_form) / np.linalg.norm(
        closed_form)
    assert error <= 1e-8, f"Implicit rule deviates by {error:.3e}"

    largest = np.max(np.linalg.eigvalsh(plus))
    doubled = milton_laminate(plus, minus, 0.35, meta.normal, 2.02 * largest)
    error = np.linalg.norm(doubled - milton) / np.linalg.norm(milton)
    assert error <= 1e-8, "Result depends on the auxiliary parameter"


def test_milton_laminate_rejects_small_lambda():
    plus, minus = _isotropic(10.0, 0.3), _isotropic(1.0, 0.0)
    with pytest.raises(BadLambda):
        milton_laminate(plus, minus, 0.5, [1.0, 0.0, 0.0], 1.0)


def test_small_strain_jump_trivial_cases(random_spd):
    stiffness = random_spd()
    meta = ComboMeta.from_direction([1.0, 1.0, 0.0], 0.4)
    strain = np.diag([1e-3, 0.0, 0.0])
    assert np.array_equal(
        small_strain_jump(strain, stiffness, stiffness, meta), np.zeros(3)
    )
    assert np.array_equal(
        small_strain_jump(np.zeros((3, 3)), stiffness, random_spd(), meta),
        np.zeros(3)
    )


def test_small_strain_jump_balances_tractions(rng):
    plus = _isotropic(rng.uniform(5, 20), 0.3)
    minus = _isotropic(rng.uniform(0.5, 2), 0.2)
    meta = ComboMeta([1.0, 0.0, 0.0], 0.3)
    strain = np.diag([1e-3, 0.0, 0.0])
    a = small_strain_jump(strain, plus, minus, meta)
    strain_plus, strain_minus = phase_strains(strain, a, meta)
    traction_plus = from_mandel(plus @ strain_plus) @ meta.normal
    traction_minus = from_mandel(minus @ strain_minus) @ meta.normal
    scale = np.linalg.norm(traction_plus)
    assert np.linalg.norm(traction_plus - traction_minus) <= 1e-10 * scale


def test_small_strain_stiffness_single_phase_limit(random_spd):
    plus, minus = random_spd(), random_spd()
    meta = ComboMeta.from_direction([0.3, -0.2, 0.9], 1.0 - 1e-9)
    result = small_strain_stiffness(plus, minus, meta)
    assert np.linalg.norm(result - plus) <= 1e-6 * np.linalg.norm(plus)


def _matlab_reference(stiffness_0, stiffness_1, c_0, normal):
    # Voigt notation with engineering shear strains
    scale = np.diag([1.0, 1.0, 1.0, SQRT2, SQRT2, SQRT2])
    scale_inv = np.linalg.inv(scale)
    voigt_0 = scale_inv @ stiffness_0 @ scale_inv
    voigt_1 = scale_inv @ stiffness_1 @ scale_inv
    n1, n2, n3 = normal
    jump = np.array([
        [n1, 0, 0],
        [0, n2, 0],
        [0, 0, n3],
        [n2, n1, 0],
        [n3, 0, n1],
        [0, n3, n2],
    ])
    c_1 = 1.0 - c_0
    compliance = np.linalg.inv(
        jump.T @ (voigt_0 / c_0 + voigt_1 / c_1) @ jump
    )
    contrast = voigt_0 - voigt_1
    result = (
        c_0 * voigt_0 + c_1 * voigt_1
        - contrast @ jump @ compliance @ jump.T @ contrast
    )
    return scale @ result @ scale


def test_small_strain_stiffness_matches_reference_algebra(rng, random_spd):
    for _ in range(10):
        plus, minus = random_spd(), random_spd()
        meta = ComboMeta.from_direction(rng.normal(size=3),
                                        rng.uniform(0.05, 0.95))
        result = small_strain_stiffness(plus, minus, meta)
        expected = _matlab_reference(plus, minus, meta.c_plus, meta.normal)
        error = np.linalg.norm(result - expected) / np.linalg.norm(expected)
        assert error <= 1e-12, f"Mismatch {error:.3e}"

        reuss = mix_reuss(plus, minus, meta.c_plus)
        voigt = mix_voigt(plus, minus, meta.c_plus)
        assert _min_eigenvalue(result - reuss) >= -1e-10
        assert _min_eigenvalue(voigt - result) >= -1e-10


def test_admissibility_bounds_of_identity():
    meta = ComboMeta([1.0, 0.0, 0.0], 0.5)
    m_beta, beta_plus, beta_minus = admissibility_bounds(np.eye(3), meta)
    assert np.allclose(m_beta, [1.0, 0.0, 0.0])
    assert beta_plus == pytest.approx(-0.5)
    assert beta_minus == pytest.approx(0.5)


def test_admissible_jumps_keep_positive_jacobians(rng):
    for _ in range(10):
        F_box = np.eye(3) + 0.3 * rng.uniform(-1, 1, size=(3, 3))
        meta = ComboMeta.from_direction(rng.normal(size=3),
                                        rng.uniform(0.05, 0.95))
        m_beta, beta_plus, beta_minus = admissibility_bounds(F_box, meta)
        assert beta_plus < 0.0 < beta_minus

        betas = rng.uniform(beta_plus, beta_minus, size=100)
        perpendicular = rng.normal(size=(100, 3))
        perpendicular -= np.outer(perpendicular @ m_beta, m_beta)
        a = betas[:, None] * m_beta + perpendicular
        F_plus, F_minus = phase_gradients(
            F_box, a, meta.normal, meta.c_plus)
        assert np.all(det3(F_plus) > 0.0)
        assert np.all(det3(F_minus) > 0.0)

        for bound, index in ((beta_plus, 0), (beta_minus, 1)):
            on_bound = bound * m_beta + perpendicular[0]
            jacobians = phase_gradients(
                F_box, on_bound, meta.normal, meta.c_plus)
            assert abs(det3(jacobians[index])) <= 1e-10


def test_back_project_hand_example():
    result = back_project(
        np.array([-0.9, 0.3, 0.0]), np.zeros(3),
        np.array([1.0, 0.0, 0.0]), -0.5, 0.5
    )
    assert np.allclose(result, [-0.25, 0.3, 0.0], atol=1e-15)


def test_back_project_keeps_orthogonal_part(rng):
    for _ in range(50):
        m_beta = _unit(rng.normal(size=3))
        beta_plus, beta_minus = -rng.uniform(0.1, 1), rng.uniform(0.1, 1)
        a0 = rng.uniform(beta_plus, beta_minus) * m_beta
        a1 = rng.normal(size=3)
        a1 += (beta_minus + 0.1 - a1 @ m_beta) * m_beta
        result = back_project(a1, a0, m_beta, beta_plus, beta_minus)
        projector = np.eye(3) - np.outer(m_beta, m_beta)
        assert np.allclose(projector @ result, projector @ a1, atol=1e-12)
        assert beta_plus < result @ m_beta < beta_minus


def test_volume_is_preserved(rng):
    count = 10000
    F_box = np.eye(3) + 0.2 * rng.uniform(-1, 1, size=(count, 3, 3))
    normal = rng.normal(size=(count, 3))
    normal /= np.linalg.norm(normal, axis=1)[:, None]
    c_plus = rng.uniform(0.05, 0.95, size=count)
    direction = np.einsum("nJi,nJ->ni", np.linalg.inv(F_box), normal)
    length = np.linalg.norm(direction, axis=1)
    betas = 0.9 * rng.uniform(-c_plus, 1.0 - c_plus) / length
    a = betas[:, None] * direction / length[:, None]

    F_plus, F_minus = phase_gradients(F_box, a, normal, c_plus)
    weight = c_plus[:, None, None]
    average = weight * F_plus + (1.0 - weight) * F_minus
    assert np.max(np.abs(average - F_box)) <= 1e-13
    j_box = det3(F_box)
    volume = c_plus * det3(F_plus) + (1.0 - c_plus) * det3(F_minus)
    assert np.all(np.abs(volume - j_box) <= 1e-12 * np.abs(j_box))


def test_homogeneous_boxel_needs_no_iterations(neo_hookean_laws):
    law = neo_hookean_laws[0]
    F_box = np.eye(3)
    F_box[0, 1] = 0.2
    meta = ComboMeta.from_direction([1.0, 1.0, 0.0], 0.4)
    result, state = finite_strain_solve(F_box, law, law, meta)
    assert state.iterations == 0
    assert np.array_equal(state.a, np.zeros(3))
    assert np.allclose(result.F_plus, F_box)
    assert np.allclose(result.F_minus, F_box)
    _, tangent = law.stress_and_tangent(F_box)
    assert np.allclose(result.A_box, tangent, rtol=1e-10, atol=1e-10)


def test_reference_state_is_stress_free(neo_hookean_laws):
    meta = ComboMeta.from_direction([1.0, 2.0, 0.5], 0.3)
    result, state = finite_strain_solve(np.eye(3), *neo_hookean_laws, meta)
    assert np.allclose(state.a, 0.0)
    assert np.allclose(result.P_box, 0.0, atol=1e-14)


def test_small_load_limit_of_linear_phases():
    plus = LinearElasticParams.from_engineering(10.0, 0.3)
    minus = LinearElasticParams.from_engineering(1.0, 0.0)
    meta = ComboMeta.from_direction([1.0, 0.5, -0.3], 0.6)
    H = np.zeros((3, 3))
    H[0, 1] = 1e-6
    result, state = finite_strain_solve(
        np.eye(3) + H, LinearElasticLaw(plus), LinearElasticLaw(minus), meta
    )
    expected = small_strain_jump(
        0.5 * (H + H.T), plus.stiffness, minus.stiffness, meta)
    assert state.iterations == 1
    error = np.linalg.norm(state.a - expected) / np.linalg.norm(expected)
    assert error <= 1e-8, f"Jump deviates by {error:.3e}"

    stiffness = small_strain_stiffness(plus.stiffness, minus.stiffness, meta)
    embedded = mandel_to_matrix9(stiffness)
    error = np.linalg.norm(result.A_box - embedded) / np.linalg.norm(
        embedded)
    assert error <= 1e-10


def _high_contrast_case():
    F_box = np.eye(3)
    F_box[0, 1] = 0.5
    meta = ComboMeta.from_direction([1.0, -1.0, 0.0], 0.99625)
    return F_box, meta


def test_naive_update_leaves_admissible_set(neo_hookean_laws):
    law_plus, law_minus = neo_hookean_laws
    F_box, meta = _high_contrast_case()
    P_plus, A_plus = law_plus.stress_and_tangent(F_box)
    P_minus, A_minus = law_minus.stress_and_tangent(F_box)
    f = traction_residual(P_plus, P_minus, meta.normal)
    hessian = jump_hessian(A_plus, A_minus, meta.normal, meta.c_plus)
    a1 = -np.linalg.solve(hessian, f)
    F_plus, F_minus = phase_gradients(F_box, a1, meta.normal, meta.c_plus)
    assert min(det3(F_plus), det3(F_minus)) <= 0.0, (
        "First naive iterate is expected to invert phase −"
    )

    naive = LaminateSolver(
        law_plus, law_minus, LaminateTolerance(back_projection=False))
    batch = naive.solve(F_box[None], meta.normal[None], [meta.c_plus])
    assert not batch.converged[0]


def test_back_projection_converges(printer, neo_hookean_laws):
    F_box, meta = _high_contrast_case()
    result, state = finite_strain_solve(F_box, *neo_hookean_laws, meta)
    printer(f"iterations {state.iterations}, residual {state.residual:.3e}"
            f", back-projections {state.back_projections}")
    assert state.converged
    assert state.iterations <= 10
    assert state.back_projections >= 1
    scale = max(np.linalg.norm(result.P_plus @ meta.normal),
                np.linalg.norm(result.P_minus @ meta.normal))
    assert state.residual <= 1e-10 * scale
    assert det3(result.F_plus) > 0.0 and det3(result.F_minus) > 0.0

    # Warm start from the converged jump
    _, warm = finite_strain_solve(F_box, *neo_hookean_laws, meta, state.a)
    assert warm.iterations <= 1


def test_no_convergence_carries_best_state(neo_hookean_laws):
    F_box, meta = _high_contrast_case()
    with pytest.raises(NoConvergence) as exc_info:
        finite_strain_solve(
            F_box, *neo_hookean_laws, meta,
            tolerance=LaminateTolerance(max_iter=1)
        )
    result, state = exc_info.value.best_state
    assert not state.converged
    assert np.isfinite(state.residual)


def test_tangent_matches_finite_differences(rng, neo_hookean_laws):
    tolerance = LaminateTolerance(tol_rel=1e-13)
    solver = LaminateSolver(*neo_hookean_laws, tolerance)
    step = 1e-5
    for _ in range(20):
        F_box = np.eye(3) + 0.1 * rng.uniform(-1, 1, size=(3, 3))
        normal = _unit(rng.normal(size=3))
        c_plus = rng.uniform(0.2, 0.8)
        base = solver.solve(F_box[None], normal[None], [c_plus])
        assert base.converged[0]

        perturbed = np.repeat(F_box[None], 18, axis=0)
        for q in range(9):
            perturbed[2 * q].flat[q] += step
            perturbed[2 * q + 1].flat[q] -= step
        batch = solver.solve(
            perturbed, np.repeat(normal[None], 18, axis=0),
            np.full(18, c_plus), np.repeat(base.a, 18, axis=0),
            tangent=False,
        )
        assert np.all(batch.converged)
        stress = batch.P_box.reshape(9, 2, 9)
        fd = ((stress[:, 0] - stress[:, 1]) / (2.0 * step)).T
        error = np.linalg.norm(base.A_box[0] - fd) / np.linalg.norm(fd)
        assert error <= 1e-5, f"Tangent deviates by {error:.3e}"


def test_thermal_identical_phases():
    kappa = np.diag([1.0, 2.0, 3.0])
    meta = ComboMeta.from_direction([1.0, 1.0, 1.0], 0.4)
    jump, flux, kappa_box = thermal_jump([1.0, 0.5, 0.0], kappa, kappa, meta)
    assert jump == pytest.approx(0.0, abs=1e-15)
    assert np.allclose(kappa_box, kappa, atol=1e-14)
    assert np.allclose(flux, -kappa @ [1.0, 0.5, 0.0])


def test_thermal_isotropic_laminate_means():
    k_plus, k_minus, c_plus = 5.0, 0.5, 0.3
    meta = ComboMeta([1.0, 0.0, 0.0], c_plus)
    _, _, kappa_box = thermal_jump(
        [1.0, 1.0, 1.0], k_plus * np.eye(3), k_minus * np.eye(3), meta)
    c_minus = 1.0 - c_plus
    harmonic = k_plus * k_minus / (c_plus * k_minus + c_minus * k_plus)
    arithmetic = c_plus * k_plus + c_minus * k_minus
    assert abs(kappa_box[0, 0] - harmonic) <= 1e-12 * harmonic
    assert abs(kappa_box[1, 1] - arithmetic) <= 1e-12 * arithmetic
    assert abs(kappa_box[2, 2] - arithmetic) <= 1e-12 * arithmetic


def test_thermal_flux_continuity(rng, random_spd):
    for _ in range(20):
        kappa_plus, kappa_minus = random_spd(3), random_spd(3)
        meta = ComboMeta.from_direction(rng.normal(size=3),
                                        rng.uniform(0.05, 0.95))
        gradient = rng.normal(size=3)
        jump, flux, kappa_box = thermal_jump(
            gradient, kappa_plus, kappa_minus, meta)
        g_plus, g_minus = thermal_phase_gradients(gradient, jump, meta)
        q_plus, q_minus = -kappa_plus @ g_plus, -kappa_minus @ g_minus
        scale = np.linalg.norm(q_plus)
        assert abs((q_plus - q_minus) @ meta.normal) <= 1e-12 * scale
        average = meta.c_plus * g_plus + meta.c_minus * g_minus
        assert np.allclose(average, gradient, atol=1e-14)
        assert np.allclose(flux, -kappa_box @ gradient, atol=1e-12)
