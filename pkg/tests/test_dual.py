"""Dual objective, derivatives, and the damped Newton solve."""

import numpy as np
import pytest

from entromin import (
    DomainViolationError,
    ValidationError,
    build_rule,
    builtin_entropy,
    constant_density,
    dual_gradient,
    dual_hessian,
    dual_value,
    instance_from_density,
    monomial_basis,
    pulse_density,
    solve_dual,
)

RULE = build_rule((0.0, 1.0), (0.5,))


def single_constraint(entropy_name, b=0.5):
    """a_1 identically 1 on [0,1] with a prescribed first moment."""
    return instance_from_density(
        builtin_entropy(entropy_name), monomial_basis(1), RULE, constant_density(b)
    )


def pulse_instance(entropy_name, n):
    return instance_from_density(
        builtin_entropy(entropy_name), monomial_basis(n), RULE, pulse_density(0.5)
    )


class TestDualValue:
    def test_l2_closed_form(self):
        # phi*b - integral of (phi^2/2): 1/4 - 1/8
        inst = single_constraint("l2_norm")
        assert dual_value(inst, [0.5]) == pytest.approx(0.125, abs=1e-14)

    @pytest.mark.parametrize("name", ["l2_norm", "boltzmann_shannon",
                                      "translated_boltzmann_shannon", "cosh", "fermi_dirac"])
    def test_zero_multipliers_give_minus_conjugate_at_zero(self, name):
        inst = single_constraint(name)
        expected = -float(inst.entropy.f_star(0.0))  # interval has length 1
        assert dual_value(inst, [0.0]) == pytest.approx(expected, rel=1e-13)

    def test_translated_bs_closed_form(self):
        inst = single_constraint("translated_boltzmann_shannon")
        phi = np.log(0.5)
        expected = 0.5 * np.log(0.5) - 0.5  # phi*b - integral of e^phi
        assert dual_value(inst, [phi]) == pytest.approx(expected, rel=1e-13)

    def test_domain_violation_carries_node(self):
        inst = single_constraint("burg")
        with pytest.raises(DomainViolationError) as err:
            dual_value(inst, [0.5])  # dual field positive everywhere
        assert err.value.node is not None

    def test_zero_multipliers_scale_with_interval_length(self):
        # on [0, tau] the zero-multiplier dual value is -tau * f*(0)
        rule2 = build_rule((0.0, 2.0))
        inst = instance_from_density(
            builtin_entropy("translated_boltzmann_shannon"),
            monomial_basis(1, (0.0, 2.0)), rule2, constant_density(0.5),
        )
        assert dual_value(inst, [0.0]) == pytest.approx(-2.0, rel=1e-13)
        solution = solve_dual(inst)
        # e^mu * tau = b * tau  ->  same mu as on the unit interval
        assert solution.multipliers[0] == pytest.approx(np.log(0.5), abs=1e-9)


class TestDualGradient:
    def test_l2_stationary_at_half(self):
        inst = single_constraint("l2_norm")
        np.testing.assert_allclose(dual_gradient(inst, [0.5]), [0.0], atol=1e-15)

    def test_translated_bs_stationary_at_log_half(self):
        inst = single_constraint("translated_boltzmann_shannon")
        np.testing.assert_allclose(dual_gradient(inst, [np.log(0.5)]), [0.0], atol=1e-14)

    @pytest.mark.parametrize("n", [1, 3])
    def test_matches_finite_differences(self, n):
        inst = pulse_instance("translated_boltzmann_shannon", n)
        rng = np.random.default_rng(11)
        for _ in range(20):
            phi = rng.uniform(-0.5, 0.5, n)
            grad = dual_gradient(inst, phi)
            fd = np.empty(n)
            for k in range(n):
                h = 1e-6
                e = np.zeros(n)
                e[k] = h
                fd[k] = (dual_value(inst, phi + e) - dual_value(inst, phi - e)) / (2 * h)
            scale = max(1.0, float(np.max(np.abs(grad))))
            assert np.max(np.abs(fd - grad)) / scale <= 1e-5


class TestDualHessian:
    def test_l2_hessian_is_negative_gram(self):
        inst = pulse_instance("l2_norm", 2)
        expected = -np.array([[1.0, 0.5], [0.5, 1.0 / 3.0]])
        for phi in ([0.0, 0.0], [0.3, -1.2]):
            np.testing.assert_allclose(dual_hessian(inst, phi), expected, atol=1e-14)

    def test_translated_bs_at_zero(self):
        inst = single_constraint("translated_boltzmann_shannon")
        np.testing.assert_allclose(dual_hessian(inst, [0.0]), [[-1.0]], rtol=1e-13)

    def test_exact_symmetry(self):
        inst = pulse_instance("translated_boltzmann_shannon", 4)
        hess = dual_hessian(inst, np.array([0.1, -0.3, 0.2, 0.05]))
        np.testing.assert_array_equal(hess, hess.T)

    def test_matches_finite_differences_of_gradient(self):
        inst = pulse_instance("translated_boltzmann_shannon", 3)
        rng = np.random.default_rng(23)
        for _ in range(10):
            phi = rng.uniform(-0.5, 0.5, 3)
            hess = dual_hessian(inst, phi)
            fd = np.empty((3, 3))
            for k in range(3):
                h = 1e-6
                e = np.zeros(3)
                e[k] = h
                fd[:, k] = (dual_gradient(inst, phi + e) - dual_gradient(inst, phi - e)) / (2 * h)
            scale = max(1.0, float(np.max(np.abs(hess))))
            assert np.max(np.abs(fd - hess)) / scale <= 1e-4

    def test_concavity(self):
        inst = pulse_instance("translated_boltzmann_shannon", 4)
        rng = np.random.default_rng(3)
        for _ in range(10):
            phi = rng.uniform(-0.5, 0.5, 4)
            assert np.linalg.eigvalsh(dual_hessian(inst, phi))[-1] <= 1e-10


# (entropy, target b, optimal multiplier); each derived by hand from (f*)':
#   l2:    (f*)'(v) = v          -> mu = 1/2
#   BS:    (f*)'(v) = e^(v-1)    -> mu = 1 - log 2
#   tBS:   (f*)'(v) = e^v        -> mu = log(1/2)
#   burg:  (f*)'(v) = -1/v       -> mu = -2
#   cosh:  (f*)'(v) = arcsinh(v) -> mu = sinh(1/2)
#   FD:    (f*)'(v) = expit(v)   -> mu = 0
CLOSED_FORM = [
    ("l2_norm", 0.5, 0.5),
    ("boltzmann_shannon", 0.5, 1.0 - np.log(2.0)),
    ("translated_boltzmann_shannon", 0.5, np.log(0.5)),
    ("burg", 0.5, -2.0),
    ("cosh", 0.5, np.sinh(0.5)),
    ("fermi_dirac", 0.5, 0.0),
]


class TestSolveDual:
    @pytest.mark.parametrize("name,b,mu_star", CLOSED_FORM)
    def test_single_constraint_closed_forms(self, name, b, mu_star):
        solution = solve_dual(single_constraint(name, b))
        assert solution.converged
        assert solution.iterations <= 25
        assert abs(solution.multipliers[0] - mu_star) <= 1e-9

    def test_l2_converges_in_two_newton_steps(self):
        solution = solve_dual(single_constraint("l2_norm"))
        assert solution.converged and solution.iterations <= 2

    def test_trace_values_nondecreasing(self):
        solution = solve_dual(pulse_instance("translated_boltzmann_shannon", 4))
        values = [row.dual_value for row in solution.trace]
        assert all(b >= a for a, b in zip(values, values[1:]))
        assert solution.trace[0].iteration == 0 and solution.trace[0].step == 0.0

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_pulse_benchmark_residuals(self, n):
        solution = solve_dual(pulse_instance("translated_boltzmann_shannon", n))
        assert solution.converged
        assert solution.residual_inf <= 1e-8

    @pytest.mark.parametrize("n", [2, 4])
    def test_resolution_robustness(self, n):
        base = solve_dual(pulse_instance("translated_boltzmann_shannon", n))
        fine_rule = build_rule((0.0, 1.0), (0.5,), panels_per_segment=16)
        fine_inst = instance_from_density(
            builtin_entropy("translated_boltzmann_shannon"),
            monomial_basis(n), fine_rule, pulse_density(0.5),
        )
        fine = solve_dual(fine_inst)
        assert np.max(np.abs(base.multipliers - fine.multipliers)) <= 1e-6

    def test_zero_iteration_budget(self):
        solution = solve_dual(single_constraint("l2_norm"), max_iter=0)
        assert not solution.converged
        assert solution.iterations == 0
        assert "budget" in solution.message

    def test_burg_automatic_start(self):
        # the conjugate domain excludes 0, so the start makes the field -1
        solution = solve_dual(single_constraint("burg"))
        assert solution.converged
        assert solution.multipliers[0] == pytest.approx(-2.0, abs=1e-9)

    def test_infeasible_phi0_raises(self):
        with pytest.raises(DomainViolationError):
            solve_dual(single_constraint("burg"), phi0=[1.0])

    def test_bad_shapes_and_tolerances(self):
        inst = single_constraint("l2_norm")
        with pytest.raises(ValidationError):
            solve_dual(inst, phi0=[1.0, 2.0])
        with pytest.raises(ValidationError):
            solve_dual(inst, tol=0.0)
        with pytest.raises(ValidationError):
            solve_dual(inst, max_iter=-1)

    def test_burg_requires_constant_first_function_for_auto_start(self):
        # a_1(s) = s is not identically 1: no safe automatic start exists
        basis = monomial_basis(2)
        shifted = instance_from_density(
            builtin_entropy("burg"),
            type(basis)(functions=basis.functions[::-1], breakpoints=(),
                        sup_bound=basis.sup_bound, kind="monomial", interval=(0.0, 1.0)),
            RULE, constant_density(0.5),
        )
        with pytest.raises(ValidationError, match="phi0"):
            solve_dual(shifted)
