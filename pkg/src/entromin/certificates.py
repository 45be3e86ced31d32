"""Constructive strong-duality certificates.

Strong duality for the constrained entropy problem needs the target moment
vector to lie in the core of the image of the entropy's effective domain
under the moment map.  Both certificates built here witness that
membership constructively, starting from the same geometric ingredient: a
"margin interval" on which the reference density stays strictly inside its
admissible value band, and on which the moment functions are linearly
independent.  Independence is needed nowhere else, which is what lets
moment families that degenerate elsewhere (the piecewise-flat family) pass.

Core certificate.  For every direction eta in R^n one can perturb the
density by t * sum_k y_k, where the y_k are "direction functions"
supported on the margin interval with <y_k, a_j> = eta_k when j = k and 0
otherwise.  The certificate packages the y_k (built once for the unit
direction and rescaled, since they are linear in eta), a bound Delta on
their sup, and the step rule t(eta) that keeps the perturbed density
inside the band.  Verification replays the construction for randomized
directions and checks both conclusions: the perturbed density stays in the
band (P1) and its moments move exactly to b + t*eta (P2).

Quasi-relative-interior certificate.  Clip the density into the open band
at level 1/m, correct the clipped moments back to b with a function v
supported on the margin interval, and accept the first m whose correction
is small against the margin (sup |v| < delta/2) while the witness
y = x_m - v stays strictly above the lower bound.  The resulting y has the
same moments as the density and a positive clearance eps, which is exactly
what the certificate asserts.  The clearance is one-sided by construction: for a
two-valued density such as the pulse with band (0, 1), the correction
necessarily pushes y above the upper bound somewhere, so only the lower
clearance can be certified.  When the upper bound is finite the measured
upper clearance is reported alongside for inspection.

All membership checks are sample-based (dense grids plus quadrature
nodes), so a certificate is strong numerical evidence, not an
almost-everywhere proof; solver output labels it as such.

Numerical note: the direction-function coefficients solve Gram systems
whose conditioning grows like Hilbert matrices (about 1e10 for six
monomials on half the unit interval).  Construction therefore runs in
extended precision with iterative refinement; in plain float64 the
orthogonality defect lands within a factor of four of the 1e-8 audit
tolerance, which is too close to trust.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .entropies import EntropySpec
from .errors import (
    CertificateError,
    DependentBasisError,
    NoMarginIntervalError,
    ValidationError,
)
from .moments import (
    MomentBasis,
    ProblemInstance,
    design_matrix,
    linearly_independent_on,
    subinterval_rule,
)
from .quadrature import QuadratureRule, build_rule

__all__ = [
    "MarginInterval",
    "DirectionFunctions",
    "CoreCertificate",
    "QriCertificate",
    "CertificateVerification",
    "within_bounds",
    "find_margin_interval",
    "build_direction_functions",
    "direction_inner_products",
    "build_core_certificate",
    "verify_core_certificate",
    "build_qri_certificate",
]

_LD = np.longdouble

MARGIN_SCAN_SAMPLES = 2001      # per segment between breakpoints
MEMBERSHIP_SAMPLES = 2001
CONFIRM_SAMPLES = 1001          # minimum for the margin value range
SAFETY_FACTOR = 0.99            # strictness slack in the step rule
P2_TOL = 1e-8
P1_SLACK = 1e-12


@dataclass(frozen=True)
class MarginInterval:
    """A subinterval where the density keeps clear of its value bounds.

    `val_lo`/`val_hi` are the observed minimum and maximum of the density
    over at least 1001 uniform samples of [lo, hi] plus every quadrature
    node inside it.
    """

    lo: float
    hi: float
    val_lo: float
    val_hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo


def within_bounds(entropy: EntropySpec, x, lower: float, upper: float,
                  rule: QuadratureRule, num: int = MEMBERSHIP_SAMPLES) -> bool:
    """Check x(s) in [lower, upper] at all nodes and a dense uniform grid.

    [lower, upper] must sit inside the entropy domain; that is a
    configuration error, not a certificate failure.
    """
    if not entropy.f_domain.contains_interval(lower, upper):
        raise ValidationError(
            f"band [{lower}, {upper}] is not contained in the domain "
            f"{entropy.f_domain} of {entropy.name}"
        )
    samples = np.concatenate([
        np.linspace(rule.interval[0], rule.interval[1], max(int(num), 2)),
        rule.nodes,
    ])
    values = np.asarray(x(samples), dtype=float)
    ok_lo = values >= lower
    ok_hi = values <= upper if np.isfinite(upper) else np.ones_like(values, dtype=bool)
    return bool(np.all(ok_lo & ok_hi))


def _longest_run(mask: np.ndarray):
    """(start, stop) indices of the longest run of True, or None."""
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return None
    gaps = np.flatnonzero(np.diff(idx) > 1)
    starts = np.concatenate([[0], gaps + 1])
    stops = np.concatenate([gaps, [idx.size - 1]])
    lengths = idx[stops] - idx[starts]
    best = int(np.argmax(lengths))
    return int(idx[starts[best]]), int(idx[stops[best]])


def find_margin_interval(x, lower: float, upper: float, interval,
                         breakpoints=(), min_width: Optional[float] = None,
                         nodes=None, one_sided: bool = False) -> MarginInterval:
    """Locate the widest interval on which x stays clear of its bounds.

    Scans each segment between breakpoints on a dense grid, trying margins
    eps from a geometric grid (largest first) and returning the widest
    interval of width at least `min_width` (default: 1% of the interval)
    on which x(s) stays in [lower + eps, upper - eps].  With
    `one_sided=True` only the lower clearance constrains the scan, which
    is what the quasi-relative-interior construction needs: its conclusion
    certifies clearance above the lower bound only, so a density pinned to
    the upper bound (the pulse with band (0, 1)) must still admit a
    witness interval.

    `nodes` (quadrature nodes, when available) join the confirmation
    samples that set the certified value range.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if min_width is None:
        min_width = (hi - lo) / 100.0
    if min_width <= 0:
        raise ValidationError(f"min_width must be positive, got {min_width}")

    if np.isfinite(upper):
        eps_grid = [(upper - lower) / 2.0 ** k for k in range(1, 60)]
    else:
        eps_grid = [2.0 ** -k for k in range(0, 60)]

    edges = [lo, *sorted(b for b in breakpoints if lo < b < hi), hi]
    segments = []
    spacing = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        grid = np.linspace(a, b, MARGIN_SCAN_SAMPLES + 2)[1:-1]  # interior only
        spacing = max(spacing, float(grid[1] - grid[0]))
        segments.append((grid, np.asarray(x(grid), dtype=float)))

    for eps in eps_grid:
        if lower + eps == lower or (np.isfinite(upper) and upper - eps == upper):
            break  # eps rounds away against the bounds: nothing left to scan
        best = None
        for grid, values in segments:
            ok = values >= lower + eps
            if np.isfinite(upper) and not one_sided:
                ok &= values <= upper - eps
            run = _longest_run(ok)
            if run is None:
                continue
            z1, z2 = float(grid[run[0]]), float(grid[run[1]])
            if best is None or (z2 - z1) > (best[1] - best[0]):
                best = (z1, z2)
        # slack of 1.5 grid steps: a run clipped to interior samples measures
        # up to one spacing shorter than the interval it certifies, and the
        # boundary case ties to the last ulp
        if best is not None and best[1] - best[0] >= min_width - 1.5 * spacing:
            z1, z2 = best
            samples = [np.linspace(z1, z2, CONFIRM_SAMPLES)]
            if nodes is not None:
                nodes = np.asarray(nodes, dtype=float)
                samples.append(nodes[(nodes >= z1) & (nodes <= z2)])
            values = np.asarray(x(np.concatenate(samples)), dtype=float)
            return MarginInterval(z1, z2, float(np.min(values)), float(np.max(values)))

    raise NoMarginIntervalError(
        f"no margin interval of width >= {min_width} found on [{lo}, {hi}]: "
        f"the density never clears its bounds ({lower}, {upper}) at this resolution"
    )


@dataclass
class DirectionFunctions:
    """Functions y_1..y_n in the span of the moment family on a margin
    interval, with <y_k, a_j> = eta_k when j = k and 0 otherwise.

    Each row of `coeffs` holds the expansion of one y_k over a_1..a_n,
    restricted to [margin.lo, margin.hi] (zero outside).  Coefficients and
    the Gram matrix are kept in extended precision; see the module note.
    """

    margin: MarginInterval
    basis: MomentBasis
    eta: np.ndarray
    coeffs: np.ndarray = field(repr=False)          # (n, n) longdouble
    gram: np.ndarray = field(repr=False)            # (n, n) longdouble
    sub_nodes: np.ndarray = field(repr=False)
    sub_weights: np.ndarray = field(repr=False)

    def evaluate_all(self, s) -> np.ndarray:
        """Values of every y_k at the points s, shape (n, len(s))."""
        s = np.asarray(s, dtype=float)
        design = design_matrix(self.basis, s.astype(_LD))
        inside = (s >= self.margin.lo) & (s <= self.margin.hi)
        return np.where(inside, (self.coeffs @ design).astype(float), 0.0)

    def evaluate_combined(self, s, weights=None) -> np.ndarray:
        """Value of sum_k w_k y_k at the points s (w defaults to all-ones)."""
        w = np.ones(len(self.coeffs), dtype=_LD) if weights is None else np.asarray(weights, dtype=_LD)
        s = np.asarray(s, dtype=float)
        design = design_matrix(self.basis, s.astype(_LD))
        inside = (s >= self.margin.lo) & (s <= self.margin.hi)
        return np.where(inside, ((w @ self.coeffs) @ design).astype(float), 0.0)


def _refined_solve(matrix_ld: np.ndarray, rhs_ld: np.ndarray, refinements: int = 3) -> np.ndarray:
    """Solve in float64, then polish with extended-precision residuals."""
    matrix64 = matrix_ld.astype(float)
    solution = np.linalg.solve(matrix64, rhs_ld.astype(float)).astype(_LD)
    for _ in range(refinements):
        residual = rhs_ld - matrix_ld @ solution
        solution = solution + np.linalg.solve(matrix64, residual.astype(float)).astype(_LD)
    return solution


def build_direction_functions(basis: MomentBasis, rule: QuadratureRule,
                              margin: MarginInterval, eta) -> DirectionFunctions:
    """Construct the y_k for a direction eta on the margin interval.

    For each k with eta_k != 0, the component of a_k orthogonal to the
    span of the remaining functions (an (n-1)-dimensional Gram solve) is
    rescaled so its inner product with a_k equals eta_k.  Zero components
    of eta yield identically zero y_k.
    """
    eta = np.asarray(eta, dtype=float)
    n = basis.n
    if eta.shape != (n,):
        raise ValidationError(f"direction has shape {eta.shape}, expected ({n},)")
    report = linearly_independent_on(basis, rule, (margin.lo, margin.hi))
    if not report.independent:
        raise DependentBasisError(
            f"moment functions are numerically dependent on "
            f"[{margin.lo}, {margin.hi}] (smallest Gram eigenvalue "
            f"{report.min_eigenvalue:.3e} <= threshold {report.threshold:.3e}); "
            f"reduce the family or choose a different interval"
        )
    sub = subinterval_rule(basis, rule, (margin.lo, margin.hi))
    nodes_ld = sub.nodes.astype(_LD)
    weights_ld = sub.weights.astype(_LD)
    design_ld = design_matrix(basis, nodes_ld).astype(_LD)
    gram_ld = (design_ld * weights_ld) @ design_ld.T
    gram_ld = 0.5 * (gram_ld + gram_ld.T)

    coeffs = np.zeros((n, n), dtype=_LD)
    for k in range(n):
        if eta[k] == 0.0:
            continue
        others = [j for j in range(n) if j != k]
        v = np.zeros(n, dtype=_LD)
        v[k] = 1.0
        if others:
            c = _refined_solve(gram_ld[np.ix_(others, others)], gram_ld[others, k])
            v[others] = -c
        denom = gram_ld[k] @ v  # == <a_k, v> == ||component of a_k off the others||^2
        coeffs[k] = (_LD(eta[k]) / denom) * v

    return DirectionFunctions(
        margin=margin,
        basis=basis,
        eta=eta,
        coeffs=coeffs,
        gram=gram_ld,
        sub_nodes=sub.nodes,
        sub_weights=sub.weights,
    )


def direction_inner_products(directions: DirectionFunctions) -> np.ndarray:
    """The matrix <y_k, a_j> under the margin-interval inner product."""
    return (directions.coeffs @ directions.gram).astype(float)


@dataclass
class CoreCertificate:
    """Constructive witness that the target moments are a core point.

    Built once for the all-ones direction; the y_k scale linearly in their
    own component of eta, so `delta_for`/`t_for` recover the bound and
    admissible step for any direction.  `t_unit` is the step for a
    direction at the sup bound (delta_for == delta).
    """

    margin: MarginInterval
    directions: DirectionFunctions
    sup_unit: np.ndarray            # per-k sup |y_k| for the unit direction
    delta: float
    lower: float
    upper: float
    clearance: float
    t_unit: float
    verification: Optional["CertificateVerification"] = None

    def delta_for(self, eta) -> float:
        eta = np.asarray(eta, dtype=float)
        return float(np.max(np.abs(eta) * self.sup_unit))

    def t_for(self, eta) -> float:
        """Step length keeping x + t * sum y_k strictly inside the band."""
        bound = self.delta_for(eta)
        if bound == 0.0:
            return 0.0
        return SAFETY_FACTOR * self.clearance / (len(self.sup_unit) * bound)

    def combined_coeffs(self, eta, t: float) -> np.ndarray:
        """Expansion of t * sum_k eta_k y_k over the moment functions."""
        return (_LD(t) * (np.asarray(eta, dtype=_LD) @ self.directions.coeffs))


@dataclass(frozen=True)
class CertificateVerification:
    """Replay report for randomized directions; see verify_core_certificate."""

    trials: int
    p1_passes: int
    p2_passes: int
    worst_p1_violation: float
    worst_p2_residual: float
    p2_tol: float = P2_TOL

    @property
    def all_passed(self) -> bool:
        return self.p1_passes == self.trials and self.p2_passes == self.trials


def _confirmed_margin(x, candidate, nodes) -> MarginInterval:
    z1, z2 = float(candidate[0]), float(candidate[1])
    if not z1 < z2:
        raise ValidationError(f"empty candidate interval [{z1}, {z2}]")
    samples = [np.linspace(z1, z2, CONFIRM_SAMPLES)]
    nodes = np.asarray(nodes, dtype=float)
    samples.append(nodes[(nodes >= z1) & (nodes <= z2)])
    values = np.asarray(x(np.concatenate(samples)), dtype=float)
    return MarginInterval(z1, z2, float(np.min(values)), float(np.max(values)))


def build_core_certificate(instance: ProblemInstance, x, lower: float, upper: float,
                           candidate_interval=None,
                           min_width: Optional[float] = None) -> CoreCertificate:
    """Assemble the core certificate for the density x and band [lower, upper].

    Fails with a :class:`CertificateError` naming the hypothesis that does
    not hold: band membership, existence of a margin interval, or linear
    independence on it.  With an explicit `candidate_interval` the
    independence of the moment family there is examined first, since that
    is the hypothesis a caller overriding the scan is usually probing.
    """
    basis, rule = instance.basis, instance.rule
    if not within_bounds(instance.entropy, x, lower, upper, rule):
        raise CertificateError(
            f"the density leaves the band [{lower}, {upper}] somewhere on "
            f"{rule.interval}", hypothesis="admissible band",
        )
    if candidate_interval is not None:
        report = linearly_independent_on(basis, rule, candidate_interval)
        if not report.independent:
            raise DependentBasisError(
                f"moment functions are numerically dependent on the candidate "
                f"interval {tuple(candidate_interval)} (smallest Gram eigenvalue "
                f"{report.min_eigenvalue:.3e} <= threshold {report.threshold:.3e})"
            )
        margin = _confirmed_margin(x, candidate_interval, rule.nodes)
        interior = margin.val_lo > lower and (not np.isfinite(upper) or margin.val_hi < upper)
        if not interior:
            raise CertificateError(
                f"density range [{margin.val_lo}, {margin.val_hi}] on the candidate "
                f"interval is not strictly inside ({lower}, {upper})",
                hypothesis="margin interval",
            )
    else:
        margin = find_margin_interval(
            x, lower, upper, rule.interval, breakpoints=rule.breakpoints,
            min_width=min_width, nodes=rule.nodes,
        )

    directions = build_direction_functions(basis, rule, margin, np.ones(basis.n))

    sample_points = np.concatenate([
        np.linspace(margin.lo, margin.hi, MARGIN_SCAN_SAMPLES),
        directions.sub_nodes,
    ])
    sup_unit = np.max(np.abs(directions.evaluate_all(sample_points)), axis=1)
    sup_unit = sup_unit * (1.0 + 1e-9)  # strict upper bound on the sampled sup
    delta = float(np.max(sup_unit))
    if np.isfinite(upper):
        clearance = min(margin.val_lo - lower, upper - margin.val_hi)
    else:
        clearance = margin.val_lo - lower
    cert = CoreCertificate(
        margin=margin,
        directions=directions,
        sup_unit=sup_unit,
        delta=delta,
        lower=float(lower),
        upper=float(upper),
        clearance=float(clearance),
        t_unit=SAFETY_FACTOR * float(clearance) / (basis.n * delta),
    )
    return cert


def _verification_rule(instance: ProblemInstance, margin: MarginInterval) -> QuadratureRule:
    """Instance rule refined with the margin endpoints as breakpoints.

    Perturbations are supported exactly on the margin interval, so their
    moments are only integrated accurately when the panel edges include
    its endpoints.
    """
    lo, hi = instance.rule.interval
    bps = set(instance.rule.breakpoints)
    for z in (margin.lo, margin.hi):
        if lo < z < hi and all(abs(z - b) > 1e-12 for b in bps):
            bps.add(z)
    return build_rule((lo, hi), tuple(sorted(bps)),
                      instance.rule.nodes_per_panel, instance.rule.panels_per_segment)


def verify_core_certificate(instance: ProblemInstance, x, cert: CoreCertificate,
                            trials: int = 100, seed: int = 0,
                            t_scale: float = 1.0) -> CertificateVerification:
    """Replay the core construction for seeded random unit directions.

    For each direction eta the perturbation y = t(eta) * sum_k eta_k y_k
    is checked for both conclusions: the perturbed density stays inside
    the band on a dense sample (P1), and its moments equal b + t*eta to
    within 1e-8 (P2), integrating over a rule refined with the margin
    endpoints.  `t_scale` deliberately over- or under-drives the step rule
    (useful as a negative control: beyond the certified bound, P1 must
    eventually fail on a tight margin).
    """
    rng = np.random.default_rng(seed)
    ver_rule = _verification_rule(instance, cert.margin)
    ver_design = design_matrix(instance.basis, ver_rule.nodes)
    x_ver = np.asarray(x(ver_rule.nodes), dtype=float)
    b = instance.target_moments

    grid = np.concatenate([
        np.linspace(*instance.rule.interval, MEMBERSHIP_SAMPLES + 2),
        ver_rule.nodes,
    ])
    x_grid = np.asarray(x(grid), dtype=float)

    p1_passes = p2_passes = 0
    worst_p1 = 0.0
    worst_p2 = 0.0
    for _ in range(int(trials)):
        eta = rng.standard_normal(instance.n)
        eta /= np.linalg.norm(eta)
        t = t_scale * cert.t_for(eta)
        coeffs = cert.combined_coeffs(eta, t)

        perturbed = x_grid + _eval_coeffs(cert.directions, grid, coeffs)
        violation = max(float(np.max(cert.lower - perturbed)), 0.0)
        if np.isfinite(cert.upper):
            violation = max(violation, float(np.max(perturbed - cert.upper)))
        worst_p1 = max(worst_p1, violation)
        if violation <= P1_SLACK:
            p1_passes += 1

        y_ver = _eval_coeffs(cert.directions, ver_rule.nodes, coeffs)
        moments = ver_design @ (ver_rule.weights * (x_ver + y_ver))
        residual = float(np.max(np.abs(moments - (b + t * eta))))
        worst_p2 = max(worst_p2, residual)
        if residual <= P2_TOL:
            p2_passes += 1

    report = CertificateVerification(
        trials=int(trials),
        p1_passes=p1_passes,
        p2_passes=p2_passes,
        worst_p1_violation=worst_p1,
        worst_p2_residual=worst_p2,
    )
    cert.verification = report
    return report


def _eval_coeffs(directions: DirectionFunctions, s, coeffs_ld) -> np.ndarray:
    """Evaluate a single expansion over the moment functions on the margin."""
    s = np.asarray(s, dtype=float)
    design = design_matrix(directions.basis, s.astype(_LD))
    inside = (s >= directions.margin.lo) & (s <= directions.margin.hi)
    return np.where(inside, (np.asarray(coeffs_ld, dtype=_LD) @ design).astype(float), 0.0)


@dataclass
class QriCertificate:
    """A witness with the same moments as the density and positive lower
    clearance, built by clipping and correcting on the margin interval.

    `eps` certifies y(s) >= lower + eps at every sample.  When the band's
    upper end is finite, `upper_clearance` records min(upper - y); it can
    be negative (see the module note on one-sidedness) and is informative
    only.
    """

    m: int
    y: Callable = field(repr=False)
    eps: float
    moment_match_residual: float
    margin: MarginInterval
    upper_clearance: float
    correction_sup: float


DEFAULT_M_MAX = 4000    # covers the benchmark families; the clip level must
                        # outrun an amplification constant that grows with n


def build_qri_certificate(instance: ProblemInstance, x, lower: float, upper: float,
                          m_max: int = DEFAULT_M_MAX,
                          min_width: Optional[float] = None) -> QriCertificate:
    """Run the clip-and-correct construction until a witness is accepted.

    For m = 3, 4, ... the density is clipped into the band at depth 1/m
    (below only when the band is unbounded above), the moment defect of
    the clipped density is computed, and a correction v carrying exactly
    that defect is built on the margin interval.  The first m whose
    correction satisfies sup |v| < delta/2 (delta being the certified
    lower clearance of the density on the margin interval) and whose
    witness y = x_m - v keeps a positive lower clearance is returned.

    Raises a :class:`CertificateError` describing the decay of the moment
    defect when the budget m_max is exhausted.
    """
    basis, rule = instance.basis, instance.rule
    margin = find_margin_interval(
        x, lower, upper, rule.interval, breakpoints=rule.breakpoints,
        min_width=min_width, nodes=rule.nodes, one_sided=True,
    )
    delta = margin.val_lo - lower
    unit_directions = build_direction_functions(basis, rule, margin, np.ones(basis.n))

    ver_rule = _verification_rule(instance, margin)
    ver_design = design_matrix(basis, ver_rule.nodes)
    x_ver = np.asarray(x(ver_rule.nodes), dtype=float)
    b = instance.target_moments

    margin_grid = np.concatenate([
        np.linspace(margin.lo, margin.hi, MARGIN_SCAN_SAMPLES),
        unit_directions.sub_nodes,
    ])
    full_grid = np.concatenate([
        np.linspace(*rule.interval, MEMBERSHIP_SAMPLES + 2),
        ver_rule.nodes,
    ])
    x_full = np.asarray(x(full_grid), dtype=float)

    # the m-scan reuses these designs every iteration; build them once
    margin_design = design_matrix(basis, margin_grid.astype(_LD))
    full_design = design_matrix(basis, full_grid.astype(_LD))
    full_inside = (full_grid >= margin.lo) & (full_grid <= margin.hi)

    two_sided = np.isfinite(upper)
    width = (upper - lower) if two_sided else None
    history = []

    def clip(values, m):
        if two_sided:
            return np.clip(values, lower + width / m, upper - width / m)
        return np.maximum(values, lower + 1.0 / m)

    for m in range(3, int(m_max) + 1):
        defect = ver_design @ (ver_rule.weights * (clip(x_ver, m) - x_ver))
        coeffs = np.asarray(defect, dtype=_LD) @ unit_directions.coeffs
        correction_margin = (coeffs @ margin_design).astype(float)
        sup_v = float(np.max(np.abs(correction_margin))) if correction_margin.size else 0.0
        if sup_v >= delta / 2.0:
            if m == 3 or m % 25 == 0:
                history.append((m, float(np.max(np.abs(defect))), sup_v))
            continue
        correction_full = np.where(full_inside, (coeffs @ full_design).astype(float), 0.0)
        y_full = clip(x_full, m) - correction_full
        eps = float(np.min(y_full - lower))
        if eps <= 0.0:
            history.append((m, float(np.max(np.abs(defect))), sup_v))
            continue
        upper_clearance = float(np.min(upper - y_full)) if two_sided else float("inf")

        def y(s, _m=m, _coeffs=coeffs):
            return clip(np.asarray(x(s), dtype=float), _m) \
                - _eval_coeffs(unit_directions, s, _coeffs)

        residual = float(np.max(np.abs(
            ver_design @ (ver_rule.weights * y(ver_rule.nodes)) - b
        )))
        return QriCertificate(
            m=m,
            y=y,
            eps=eps,
            moment_match_residual=residual,
            margin=margin,
            upper_clearance=upper_clearance,
            correction_sup=sup_v,
        )

    decay = "; ".join(f"m={m}: |defect|={d:.3e}, sup|v|={sv:.3e}" for m, d, sv in history[-6:])
    raise CertificateError(
        f"no acceptable witness up to m={m_max} (need sup|v| < {delta / 2.0:.3e} "
        f"with positive lower clearance); defect decay: {decay}",
        hypothesis="witness acceptance",
    )
