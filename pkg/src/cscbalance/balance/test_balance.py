import numpy as np
import pytest
from numpy.linalg import norm
from cscbalance._exceptions import ConfigurationError, DomainError
from cscbalance.balance import (
    SolverOptions,
    SolveStatus,
    bisect_two_points,
    check_conditions,
    rebalance_orbit,
    s_jacobian,
    s_map,
    solve_balance,
    target_heights,
    total_potential,
    two_point_configuration,
)
from cscbalance.models import LeBrunProfileModel, ProjectiveTorusModel

RNG_SEED = 1729
EPS = 1.0e-6


def fixed_point_triple():
    model = ProjectiveTorusModel(2)
    return model, model.configuration(np.eye(3), [1.0, 1.0, 1.0])


def unstable_pair():
    model = ProjectiveTorusModel(2)
    return model, model.configuration([[1.0, 0.0, 0.0], [1.0, EPS, EPS]], [1.0, 1.0])


def lebrun_pair(z1=-0.5, z2=0.2, a1=1.0, a2=1.0, m=2, model=None):
    model = model if model else LeBrunProfileModel()
    return model, two_point_configuration(model, z1, z2, a1, a2, m)


def balanced_heights(z1, z2, c1, c2):
    """Balanced representative of (z1, z2) under psi = (1 - z^2)/2 on [-1, 1]

    Flowing shifts artanh(z) by t/2, so artanh(z2) - artanh(z1) = D is invariant and
    u = z1(t) solves c1 T u^2 + (c1 + c2) u + c2 T = 0 with T = tanh(D).
    """
    T = np.tanh(np.arctanh(z2) - np.arctanh(z1))
    u = -2.0 * c2 * T / ((c1 + c2) + np.sqrt((c1 + c2) ** 2 - 4.0 * c1 * c2 * T * T))
    return u, (u + T) / (1.0 + u * T)


def random_config(rng, model, n, m=2):
    return model.configuration(
        model.sample_points(rng, n), rng.uniform(0.5, 2.0, size=n), m=m,
        labels=[f"p{j}" for j in range(n)],
    )


# --------------------------------------------------------------------------- conditions


def test_fixed_point_triple_conditions():
    model, config = fixed_point_triple()
    report = check_conditions(model, config)
    assert report.genericity and report.rank == 2
    assert report.balancing and report.residual <= 1e-15
    assert not report.general_position
    assert not report.all_hold
    assert np.allclose(s_jacobian(model, config, np.zeros(3)), 0.0)


def test_lebrun_target_pair_satisfies_all_conditions():
    model, config = lebrun_pair(-1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0))
    report = check_conditions(model, config)
    assert report.all_hold
    assert report.to_dict()["all_hold"] is True


def test_endpoint_pair_is_not_in_general_position():
    model, config = lebrun_pair(1.0, 1.0)
    report = check_conditions(model, config)
    assert not report.general_position
    assert report.min_eigenvalue == 0.0


def test_general_position_ignores_weights():
    rng = np.random.default_rng(RNG_SEED)
    model = ProjectiveTorusModel(2)
    bases = [
        np.eye(3),
        np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]]),
        np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 2.0, 1.0]]),
        model.sample_points(rng, 3),
    ]
    for pts in bases:
        verdicts = set()
        for _ in range(20):
            config = model.configuration(pts, rng.uniform(0.1, 10.0, size=3))
            verdicts.add(check_conditions(model, config).general_position)
        assert len(verdicts) == 1


# --------------------------------------------------------------------------- s_map and derivatives


def test_s_map_examples():
    model, config = fixed_point_triple()
    assert np.allclose(s_map(model, config, np.zeros(3)), 0.0)
    model, config = lebrun_pair()
    assert s_map(model, config, [0.0])[0] == pytest.approx(-0.3)
    t = np.arctanh(0.5) - np.arctanh(0.2)
    assert abs(s_map(model, config, [t])[0]) <= 1e-10
    assert s_jacobian(model, config, [0.0])[0, 0] == pytest.approx(0.855)


def test_jacobian_matches_central_differences():
    rng = np.random.default_rng(RNG_SEED)
    models = [ProjectiveTorusModel(2), ProjectiveTorusModel(3), LeBrunProfileModel(), LeBrunProfileModel(-2.0, 1.0)]
    h = 1e-6
    for trial in range(100):
        model = models[trial % len(models)]
        config = random_config(rng, model, int(rng.integers(2, 6)), m=model.complex_dim or 2)
        s = rng.normal(size=model.dim_d)
        J = s_jacobian(model, config, s)
        fd = np.empty_like(J)
        for k in range(model.dim_d):
            e = np.zeros(model.dim_d)
            e[k] = h
            fd[:, k] = (s_map(model, config, s + e) - s_map(model, config, s - e)) / (2 * h)
        assert np.allclose(J, J.T)
        assert np.allclose(fd, J, atol=1e-6)


def test_potential_gradient_and_hessian():
    rng = np.random.default_rng(RNG_SEED)
    for model in (ProjectiveTorusModel(2), LeBrunProfileModel()):
        for _ in range(10):
            config = random_config(rng, model, 4, m=model.complex_dim or 3)
            s = rng.normal(size=model.dim_d)
            d = model.dim_d
            grad = np.empty(d)
            hess = np.empty((d, d))
            h = 1e-5
            for k in range(d):
                e = np.zeros(d)
                e[k] = h
                grad[k] = (total_potential(model, config, s + e) - total_potential(model, config, s - e)) / (2 * h)
                hess[:, k] = (s_map(model, config, s + e) - s_map(model, config, s - e)) / (2 * h)
            g = s_map(model, config, s)
            assert norm(grad - g) <= 1e-8 * (1.0 + norm(g))
            assert np.allclose(hess, s_jacobian(model, config, s), atol=1e-5)


# --------------------------------------------------------------------------- damped Newton


def test_balanced_config_needs_no_step():
    model, config = lebrun_pair(-1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0))
    report = solve_balance(model, config)
    assert report.status is SolveStatus.BALANCED
    assert report.newton_steps == 0
    assert np.array_equal(report.s_star, [0.0])
    report = rebalance_orbit(model, config)
    assert report.balanced
    assert np.allclose(report.flowed_configuration(config).points, config.points)


def test_lebrun_example_balances():
    model, config = lebrun_pair()
    report = solve_balance(model, config)
    assert report.status is SolveStatus.BALANCED
    assert report.s_star[0] == pytest.approx(np.arctanh(0.5) - np.arctanh(0.2), abs=1e-9)
    assert report.residual <= 1e-10
    assert report.to_dict()["status"] == "BALANCED"


def test_unstable_pair_diverges():
    model, config = unstable_pair()
    report = solve_balance(model, config)
    assert report.status is SolveStatus.DIVERGED_UNSTABLE
    assert norm(report.s_star) > 50.0
    assert min(report.residual_history) >= 1.0 / 3.0 - 1e-12
    report = rebalance_orbit(model, config)
    assert report.status is SolveStatus.DIVERGED_UNSTABLE
    assert not report.balanced


def test_fixed_points_give_singular_jacobian():
    model = ProjectiveTorusModel(2)
    config = model.configuration([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], [1.0, 1.0])
    report = solve_balance(model, config)
    assert report.status is SolveStatus.SINGULAR_JACOBIAN
    assert report.newton_steps == 0


def test_zero_tol_pd_still_reports_singular_jacobian():
    model = ProjectiveTorusModel(2)
    config = model.configuration([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], [1.0, 1.0])
    opts = SolverOptions(tol_pd=0.0)
    report = solve_balance(model, config, opts)
    assert report.status is SolveStatus.SINGULAR_JACOBIAN
    assert report.min_eigenvalue == pytest.approx(0.0, abs=1e-15)
    assert not check_conditions(model, config, tol_pd=0.0).general_position
    report = solve_balance(*unstable_pair(), opts)
    assert report.status is not SolveStatus.BALANCED
    assert np.all(np.isfinite(report.s_star))


def test_perturbed_fixed_points_balance():
    rng = np.random.default_rng(RNG_SEED)
    model, config = fixed_point_triple()
    noisy = np.eye(3) + 1e-2 * rng.dirichlet(np.ones(3), size=3)
    config = model.configuration(noisy, [1.0, 1.0, 1.0])
    assert check_conditions(model, config).general_position
    report = solve_balance(model, config)
    assert report.status is SolveStatus.BALANCED
    assert report.residual <= 1e-10
    assert report.newton_steps <= 20
    assert check_conditions(model, report.flowed_configuration(config)).balancing


def test_max_iter_is_reported():
    model, config = lebrun_pair(-0.9, 0.95, 2.0, 0.5, 3)
    report = solve_balance(model, config, SolverOptions(max_iter=1))
    assert report.status is SolveStatus.MAX_ITER
    assert len(report.residual_history) == 2


def test_newton_converges_quadratically():
    model = ProjectiveTorusModel(2)
    pts = np.array([[1.0, 2.0, 3.0], [3.0, 1.0, 2.0], [2.0, 3.0, 1.0], [1.0, 1.0, 5.0]])
    config = model.configuration(pts, [1.0, 1.2, 0.8, 1.1])
    report = solve_balance(model, config)
    assert report.balanced
    r = report.residual_history
    ratios = [r[k + 1] / r[k] ** 2 for k in range(len(r) - 1) if r[k] < 1e-3 and r[k + 1] > 1e-14]
    assert all(c < 1e3 for c in ratios)


def test_solution_is_equivariant():
    rng = np.random.default_rng(RNG_SEED)
    model = ProjectiveTorusModel(3)
    for _ in range(10):
        config = random_config(rng, model, 5, m=3)
        s0 = rng.normal(size=4)
        moved = config.with_points(model.flow(config.points, s0))
        direct = solve_balance(model, config)
        shifted = solve_balance(model, moved)
        assert direct.balanced and shifted.balanced
        gap = model.nontrivial_basis.T @ (s0 + shifted.s_star - direct.s_star)
        assert norm(gap) <= 1e-8


def test_rebalancing_random_triples():
    rng = np.random.default_rng(RNG_SEED)
    model = ProjectiveTorusModel(2)
    ok = 0
    for _ in range(200):
        config = model.configuration(model.sample_points(rng, 3), [1.0, 1.0, 1.0])
        report = rebalance_orbit(model, config)
        if report.balanced:
            ok += 1
            assert check_conditions(model, report.flowed_configuration(config)).balancing
    assert ok / 200 >= 0.95


def test_solver_matches_closed_form_oracle():
    rng = np.random.default_rng(RNG_SEED)
    model = LeBrunProfileModel()
    for _ in range(1000):
        z = rng.uniform(-0.95, 0.95, size=2)
        a = rng.uniform(0.5, 2.0, size=2)
        m = int(rng.integers(2, 5))
        _, config = lebrun_pair(z[0], z[1], a[0], a[1], m, model)
        report = solve_balance(model, config)
        assert report.balanced
        c = a ** (m - 1)
        expected = balanced_heights(z[0], z[1], c[0], c[1])
        assert np.allclose(report.flowed_points[:, 0], expected, atol=1e-8)


def test_options_are_validated():
    for bad in (
        SolverOptions(tol_res=0.0),
        SolverOptions(tol_pd=-1.0),
        SolverOptions(max_iter=0),
        SolverOptions(divergence_bound=-1.0),
        SolverOptions(armijo=1.0),
        SolverOptions(backtrack=0.0),
        SolverOptions(min_step=2.0),
    ):
        with pytest.raises(ConfigurationError):
            bad.validate()


# --------------------------------------------------------------------------- two points


def test_target_heights_example():
    z1, z2 = target_heights(-1.0, 1.0, 1.0, 1.0, 2)
    assert z1 == pytest.approx(-1.0 / np.sqrt(2.0), abs=1e-15)
    assert z2 == pytest.approx(1.0 / np.sqrt(2.0), abs=1e-15)
    z1, z2 = target_heights(-2.0, 1.0, 1.0, 2.0, 3)
    assert -2.0 < z1 < 0.0 < z2 < 1.0


def test_target_heights_balance_and_stay_inside():
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(1000):
        a_minus, a_plus = -rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0)
        a1, a2 = rng.uniform(0.5, 2.0, size=2)
        m = int(rng.integers(2, 4))
        z1, z2 = target_heights(a_minus, a_plus, a1, a2, m)
        c1, c2 = a1 ** (m - 1), a2 ** (m - 1)
        assert abs(c1 * z1 + c2 * z2) <= 1e-14
        assert a_minus < z1 < 0.0 < z2 < a_plus


def test_target_heights_reject_invalid_input():
    with pytest.raises(DomainError):
        target_heights(0.5, 1.0, 1.0, 1.0, 2)
    with pytest.raises(ConfigurationError):
        target_heights(-1.0, 1.0, 0.0, 1.0, 2)
    with pytest.raises(ConfigurationError):
        target_heights(-1.0, 1.0, 1.0, 1.0, 1)


def test_bisection_examples():
    model = LeBrunProfileModel()
    report = bisect_two_points(model, -0.4, 0.4, 1.0, 1.0, 2)
    assert report.balanced
    assert report.s_star[0] == 0.0
    report = bisect_two_points(model, -0.5, 0.2, 1.0, 1.0, 2)
    assert report.balanced
    assert report.s_star[0] == pytest.approx(np.arctanh(0.5) - np.arctanh(0.2), abs=1e-12)
    height = np.tanh(0.5 * (np.arctanh(0.5) + np.arctanh(0.2)))
    assert np.allclose(report.flowed_points[:, 0], [-height, height], atol=1e-12)
    z1, z2 = target_heights(-1.0, 1.0, 1.0, 1.0, 2)
    report = bisect_two_points(model, z1, z2, 1.0, 1.0, 2)
    assert report.balanced and report.newton_steps == 0


def test_bisection_on_one_endpoint_section_diverges():
    model = LeBrunProfileModel()
    for z in (-1.0, 1.0):
        report = bisect_two_points(model, z, z, 1.0, 2.0, 3)
        assert report.status is SolveStatus.DIVERGED_UNSTABLE


def test_bisection_rejects_wrong_model():
    with pytest.raises(DomainError):
        bisect_two_points(ProjectiveTorusModel(2), 0.1, 0.2, 1.0, 1.0, 2)


def test_bisection_agrees_with_newton():
    rng = np.random.default_rng(RNG_SEED)
    for model in (LeBrunProfileModel(), LeBrunProfileModel(-2.0, 0.5)):
        for _ in range(500):
            z = rng.uniform(0.95 * model.a_minus, 0.95 * model.a_plus, size=2)
            a = rng.uniform(0.5, 2.0, size=2)
            m = int(rng.integers(2, 5))
            _, config = lebrun_pair(z[0], z[1], a[0], a[1], m, model)
            newton = solve_balance(model, config)
            bisected = bisect_two_points(model, z[0], z[1], a[0], a[1], m)
            assert newton.balanced and bisected.balanced
            assert np.allclose(newton.flowed_points, bisected.flowed_points, atol=1e-8)


def test_bisection_with_sine_profile():
    model = LeBrunProfileModel(-1.0, 1.0, "sine")
    report = bisect_two_points(model, -0.6, 0.3, 1.0, 1.5, 2)
    assert report.balanced
    z = report.flowed_points[:, 0]
    assert abs(z[0] + 1.5 * z[1]) <= 1e-10
