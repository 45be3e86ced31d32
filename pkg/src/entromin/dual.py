"""Damped Newton ascent for the finite dual of the entropy problem.

Minimizing the entropy functional subject to n moment constraints reduces,
when strong duality holds, to maximizing the concave function

    D(phi) = <phi, b> - integral of f*(sum_k phi_k a_k(s)) ds

over phi in R^n.  Its gradient components are the constraint residuals

    dD/dphi_k = b_k - integral of (f*)'(sum_j phi_j a_j(s)) a_k(s) ds,

so a stationary point of D is exactly a multiplier vector for which the
reconstructed density reproduces the target moments.  The Hessian is the
negative of a Gram matrix weighted by (f*)'' and comes almost for free
alongside the gradient quadrature, which is why Newton is the natural
choice here.

The solver stops on the infinity norm of the gradient (the violation of
the stationarity system itself) rather than on step size.  Backtracking
halves the step until the dual value does not decrease and every node
stays inside the conjugate domain; conjugate-domain violations surface as
exceptions from the evaluation layer and are treated as ordinary
line-search rejections.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from .errors import DomainViolationError, NonFiniteIntegrandError, ValidationError
from .moments import ProblemInstance
from .quadrature import integrate_values

__all__ = ["DualSolution", "IterationRecord", "dual_value", "dual_gradient",
           "dual_hessian", "solve_dual", "default_start"]

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100

_MIN_STEP = 2.0 ** -60          # give up on the line search below this
_REG_START = 1e-12              # Hessian shift ladder, relative to ||H||
_REG_LIMIT = 1e-4


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    residual_inf: float
    step: float
    dual_value: float


@dataclass
class DualSolution:
    """Result of a dual solve, converged or not.

    `residual_inf` is the infinity norm of the dual gradient at
    `multipliers`, i.e. the worst violation of the stationarity system.
    The trace records one row per accepted iterate; the dual values along
    it are nondecreasing because only ascent steps are accepted.
    """

    multipliers: np.ndarray
    residual_inf: float
    dual_value: float
    iterations: int
    converged: bool
    trace: list = field(default_factory=list)
    message: str = ""


def _dual_field(instance: ProblemInstance, phi: np.ndarray) -> np.ndarray:
    """sum_k phi_k a_k at all quadrature nodes, domain-checked."""
    v = instance.design.T @ phi
    ok = instance.entropy.f_star_domain.contains(v)
    if not np.all(ok):
        idx = int(np.argmin(ok))
        raise DomainViolationError(
            f"dual field {v[idx]!r} at node s={instance.rule.nodes[idx]!r} is outside "
            f"the conjugate domain {instance.entropy.f_star_domain} of {instance.entropy.name}",
            argument="phi",
            value=float(v[idx]),
            node=float(instance.rule.nodes[idx]),
        )
    return v


def dual_value(instance: ProblemInstance, phi) -> float:
    """<phi, b> minus the integral of f* composed with the dual field."""
    phi = np.asarray(phi, dtype=float)
    v = _dual_field(instance, phi)
    return float(phi @ instance.target_moments
                 - integrate_values(instance.rule, instance.entropy.f_star(v)))


def dual_gradient(instance: ProblemInstance, phi) -> np.ndarray:
    """Componentwise b_k minus the moments of the reconstructed density."""
    phi = np.asarray(phi, dtype=float)
    v = _dual_field(instance, phi)
    density = instance.entropy.f_star_d1(v)
    if not np.all(np.isfinite(density)):
        idx = int(np.argmin(np.isfinite(density)))
        raise NonFiniteIntegrandError(
            f"(f*)' is {density[idx]!r} at node s={instance.rule.nodes[idx]!r}",
            node=float(instance.rule.nodes[idx]),
            value=float(density[idx]),
        )
    return instance.target_moments - instance.design @ (instance.rule.weights * density)


def dual_hessian(instance: ProblemInstance, phi) -> np.ndarray:
    """Negative (f*)''-weighted Gram matrix of the moment functions."""
    phi = np.asarray(phi, dtype=float)
    v = _dual_field(instance, phi)
    curvature = instance.entropy.f_star_d2(v)
    if not np.all(np.isfinite(curvature)):
        idx = int(np.argmin(np.isfinite(curvature)))
        raise NonFiniteIntegrandError(
            f"(f*)'' is {curvature[idx]!r} at node s={instance.rule.nodes[idx]!r}",
            node=float(instance.rule.nodes[idx]),
            value=float(curvature[idx]),
        )
    hess = -(instance.design * (instance.rule.weights * curvature)) @ instance.design.T
    return 0.5 * (hess + hess.T)


def default_start(instance: ProblemInstance) -> np.ndarray:
    """Feasible initial multipliers.

    Zero works whenever 0 lies in the conjugate domain (every built-in
    entropy except Burg).  For a conjugate domain of negative reals the
    start is chosen so the dual field is identically -1, which requires
    the first moment function to be the constant 1.
    """
    n = instance.n
    if instance.entropy.f_star_domain.contains(0.0):
        return np.zeros(n)
    first_row = instance.design[0]
    if np.max(np.abs(first_row - 1.0)) <= 1e-12 and instance.entropy.f_star_domain.contains(-1.0):
        phi = np.zeros(n)
        phi[0] = -1.0
        return phi
    raise ValidationError(
        f"no automatic start for entropy {instance.entropy.name!r}: 0 is outside the "
        f"conjugate domain and the first moment function is not identically 1; "
        f"pass phi0 explicitly"
    )


def _newton_direction(hess: np.ndarray, grad: np.ndarray):
    """Solve H d = -g for the ascent direction, shifting H if needed.

    Returns (direction, shift_used).  Falls back to the gradient direction
    when the shift ladder exhausts without a usable factorization.
    """
    neg = -hess
    try:
        return cho_solve(cho_factor(neg), grad), 0.0
    except (LinAlgError, np.linalg.LinAlgError):
        pass
    scale = float(np.linalg.norm(hess, np.inf)) or 1.0
    shift = _REG_START * scale
    eye = np.eye(hess.shape[0])
    while shift <= _REG_LIMIT * scale:
        try:
            return cho_solve(cho_factor(neg + shift * eye), grad), shift
        except (LinAlgError, np.linalg.LinAlgError):
            shift *= 10.0
    return grad.copy(), -1.0  # gradient ascent for this iteration


def solve_dual(instance: ProblemInstance, phi0=None, tol: float = DEFAULT_TOL,
               max_iter: int = DEFAULT_MAX_ITER) -> DualSolution:
    """Maximize the dual by damped Newton ascent.

    Stops when the gradient infinity norm drops to `tol`.  An exhausted
    iteration budget returns a non-converged solution with diagnostics
    rather than raising; an infeasible `phi0` raises a domain error.
    """
    if tol <= 0:
        raise ValidationError(f"tolerance must be positive, got {tol}")
    if max_iter < 0:
        raise ValidationError(f"max_iter must be nonnegative, got {max_iter}")
    phi = np.array(phi0, dtype=float) if phi0 is not None else default_start(instance)
    if phi.shape != (instance.n,):
        raise ValidationError(f"phi0 has shape {phi.shape}, expected ({instance.n},)")

    value = dual_value(instance, phi)  # raises if phi0 infeasible
    grad = dual_gradient(instance, phi)
    residual = float(np.max(np.abs(grad)))
    trace = [IterationRecord(0, residual, 0.0, value)]
    iterations = 0
    message = ""

    while residual > tol:
        if iterations >= max_iter:
            message = f"iteration budget {max_iter} exhausted with residual {residual:.3e}"
            break
        direction, _shift = _newton_direction(dual_hessian(instance, phi), grad)
        step = 1.0
        accepted = False
        while step >= _MIN_STEP:
            candidate = phi + step * direction
            try:
                candidate_value = dual_value(instance, candidate)
            except (DomainViolationError, NonFiniteIntegrandError):
                step *= 0.5
                continue
            if candidate_value >= value:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            message = f"line search stalled at residual {residual:.3e}"
            break
        phi, value = candidate, candidate_value
        iterations += 1
        grad = dual_gradient(instance, phi)
        residual = float(np.max(np.abs(grad)))
        trace.append(IterationRecord(iterations, residual, step, value))

    return DualSolution(
        multipliers=phi,
        residual_inf=residual,
        dual_value=value,
        iterations=iterations,
        converged=bool(residual <= tol),
        trace=trace,
        message=message,
    )
