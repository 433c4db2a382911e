"""Log-barrier machinery over a ball intersected with halfspaces.

The search region is P = {x : |x| < rho} intersected with cuts {x : a_i.x >= b_i}
(unit normals).  Its barrier is

    F(x) = -sum_i log(a_i.x - b_i) - log(rho^2 - x.x)

and the analytic center is the unique minimizer of F over the interior.
Setting the gradient to zero gives

    omega = (rho^2 - omega.omega)/2 * sum_i a_i / (a_i.omega - b_i),

so the center is automatically a nonnegative (conic) combination of the cut
normals with coefficients lambda_i = (rho^2 - omega.omega) / (2 (a_i.omega - b_i)).
That conic certificate is what the direction-search reduction leans on, so it
is recomputed and exposed after every center computation.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import CannotDrop, EmptyInterior, NoConvergence, NotInterior, ZeroDirection

logger = logging.getLogger(__name__)

TOL_ZERO = 1e-12
TOL_NEWTON = 1e-10       # gradient-norm target at the center
TOL_DECREMENT = 1e-8     # Newton-decrement fallback; see analytic_center()
CONIC_RESIDUAL_SCALE = 1e-7   # certificate: |omega - sum lambda_i a_i| <= scale*(1+|omega|)
PURE_PHASE = 0.25        # decrement below which full Newton steps are safe
ARMIJO = 0.01
MAX_NEWTON_ITERS = 200
KIND_TOL = 1e-12

DEEP = "deep"
CENTRAL = "central"
SHALLOW = "shallow"


@dataclass(frozen=True, eq=False)
class Cut:
    """Halfspace {x : normal.x >= offset} with a unit normal.

    ``kind`` is assigned when the cut is placed into a region, by comparing
    the offset with normal.center of the pre-cut region: offset above the
    center value excludes the center (deep), equal passes through it
    (central), below keeps it strictly inside (shallow).  ``protected`` cuts
    are never removed by drop_least_binding.
    """

    normal: np.ndarray
    offset: float
    kind: str | None = None
    protected: bool = False

    def __post_init__(self):
        a = np.asarray(self.normal, dtype=float)
        norm = float(np.linalg.norm(a))
        if norm < TOL_ZERO:
            raise ZeroDirection("cut normal is numerically zero")
        if abs(norm - 1.0) > 1e-12:
            a = a / norm
            object.__setattr__(self, "offset", self.offset / norm)
        a = np.array(a)
        a.setflags(write=False)
        object.__setattr__(self, "normal", a)


@dataclass(eq=False)
class OuterApprox:
    """Ball-plus-cuts search region with cached center data.

    ``center`` and ``conic`` are set by analytic_center() and invalidated by
    add_cut(); ``hint`` keeps the previous center (and its minimum slack) as
    a warm-start seed for the recovery step after a central cut.
    """

    dimension: int
    ball_radius: float = 1.0
    cuts: tuple = ()
    center: np.ndarray | None = None
    conic: np.ndarray | None = None
    hint: tuple | None = field(default=None, repr=False)

    def cut_slacks(self, x):
        if not self.cuts:
            return np.empty(0)
        A = np.stack([c.normal for c in self.cuts])
        b = np.array([c.offset for c in self.cuts])
        return A @ x - b

    def ball_slack(self, x):
        return self.ball_radius - float(np.linalg.norm(x))

    def min_slack(self, x):
        s = self.ball_slack(x)
        slacks = self.cut_slacks(x)
        if slacks.size:
            s = min(s, float(slacks.min()))
        return s

    def is_interior(self, x, margin=0.0):
        return self.min_slack(x) > margin


def barrier_value(P: OuterApprox, x) -> float:
    """F(x); raises NotInterior (with the violated constraint index, -1 for
    the ball) when x is not strictly inside."""
    x = np.asarray(x, dtype=float)
    q = P.ball_radius**2 - float(x @ x)
    if q <= 0.0:
        raise NotInterior("point on or outside the bounding ball", index=-1)
    slacks = P.cut_slacks(x)
    if slacks.size and slacks.min() <= 0.0:
        raise NotInterior("point violates a cut", index=int(np.argmin(slacks)))
    return float(-np.sum(np.log(slacks)) - np.log(q)) if slacks.size else float(-np.log(q))


def barrier_gradient(P: OuterApprox, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    q = P.ball_radius**2 - float(x @ x)
    g = (2.0 / q) * x
    if P.cuts:
        A = np.stack([c.normal for c in P.cuts])
        slacks = P.cut_slacks(x)
        g = g - A.T @ (1.0 / slacks)
    return g


def barrier_hessian(P: OuterApprox, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = P.dimension
    q = P.ball_radius**2 - float(x @ x)
    H = (2.0 / q) * np.eye(n) + (4.0 / q**2) * np.outer(x, x)
    if P.cuts:
        A = np.stack([c.normal for c in P.cuts])
        slacks = P.cut_slacks(x)
        H = H + (A / slacks[:, None]**2).T @ A
    return H


def _conic_coefficients(P: OuterApprox, omega) -> np.ndarray:
    q = P.ball_radius**2 - float(omega @ omega)
    slacks = P.cut_slacks(omega)
    return q / (2.0 * slacks) if slacks.size else np.empty(0)


def conic_residual(P: OuterApprox, omega, lambdas) -> float:
    """Norm of omega - sum_i lambda_i a_i (zero at an exact center)."""
    recon = np.zeros(P.dimension)
    for lam, cut in zip(lambdas, P.cuts):
        recon += lam * cut.normal
    return float(np.linalg.norm(omega - recon))


def _recover_interior(P: OuterApprox, start=None):
    """Find a strictly interior point, or raise EmptyInterior.

    Preference order: the caller's start, then the stored hint stepped into
    the newest cut's halfspace by half the hint's old slack (a central cut
    leaves the old center exactly on the new boundary, and that step keeps
    every old constraint slack positive), then a subgradient phase-1 that
    maximizes the minimum slack with damped steps.
    """
    margin = 1e-12 * P.ball_radius
    if start is not None and P.is_interior(start, margin):
        return np.asarray(start, dtype=float).copy()
    if P.hint is not None and P.cuts:
        old_center, old_slack = P.hint
        step = 0.5 * old_slack
        candidate = old_center + step * P.cuts[-1].normal
        if P.is_interior(candidate, margin):
            return candidate
    zero = np.zeros(P.dimension)
    if P.is_interior(zero, margin):
        return zero
    return _phase1(P)


def _phase1(P: OuterApprox, iterations=600):
    """Maximize the minimum slack by subgradient ascent with damped steps."""
    x = np.zeros(P.dimension)
    if P.hint is not None:
        x = P.hint[0].copy()
    best = x.copy()
    best_phi = P.min_slack(x)
    for k in range(iterations):
        ball = P.ball_slack(x)
        slacks = P.cut_slacks(x)
        if slacks.size and float(slacks.min()) < ball:
            idx = int(np.argmin(slacks))
            phi = float(slacks[idx])
            direction = P.cuts[idx].normal
        else:
            phi = ball
            nx = float(np.linalg.norm(x))
            direction = -x / nx if nx > TOL_ZERO else np.zeros(P.dimension)
        if phi > best_phi:
            best_phi = phi
            best = x.copy()
        if phi > 1e-9 * P.ball_radius:
            return x
        x = x + (P.ball_radius / (5.0 + k)) * direction
    if best_phi > TOL_ZERO:
        return best
    raise EmptyInterior(
        f"no interior point found (best minimum slack {best_phi:.3e})"
    )


def analytic_center(P: OuterApprox, warm_start=None, record_iterates=None):
    """Damped-Newton minimization of the barrier; returns (omega, lambdas).

    Converges when the gradient norm drops below 1e-10 or, for thin regions
    where that absolute target is below float granularity (the Hessian norm
    scales like 1/slack^2), when the Newton decrement drops below 1e-8 and
    the conic-reconstruction residual meets its 1e-7 * (1 + |omega|) bound.
    The result is cached on P.  Determinism: same region and warm start give
    bitwise-identical centers.  ``record_iterates`` (a list, if given)
    receives a copy of every Newton iterate, for diagnostics.
    """
    if warm_start is not None and not P.is_interior(np.asarray(warm_start, dtype=float)):
        raise NotInterior("warm start is not strictly interior")
    x = _recover_interior(P, warm_start)

    for it in range(MAX_NEWTON_ITERS):
        if record_iterates is not None:
            record_iterates.append(x.copy())
        g = barrier_gradient(P, x)
        gnorm = float(np.linalg.norm(g))
        H = barrier_hessian(P, x)
        try:
            factor = cho_factor(H, lower=True)
        except np.linalg.LinAlgError as exc:  # strict convexity should prevent this
            raise NoConvergence(f"Hessian factorization failed: {exc}") from exc
        step = cho_solve(factor, -g)
        decrement = float(np.sqrt(max(0.0, -g @ step)))
        # the conic reconstruction residual equals (q/2)*|grad F|, so the
        # decrement-based stop additionally requires the certificate bound
        # (with 2x margin); the absolute gradient target implies it anyway
        q = P.ball_radius**2 - float(x @ x)
        residual_ok = 0.5 * q * gnorm <= 0.5 * CONIC_RESIDUAL_SCALE * (1.0 + np.linalg.norm(x))
        if gnorm <= TOL_NEWTON or (decrement <= TOL_DECREMENT and residual_ok):
            break

        if decrement <= PURE_PHASE:
            # quadratic-convergence region of the self-concordant barrier:
            # take full steps; an Armijo test here would drown in the noise
            # floor of evaluating F and stall the iteration
            candidate = x + step
            if P.is_interior(candidate):
                x = candidate
                continue
            # float dust can push the full step onto the boundary; damp once
            if P.is_interior(x + 0.5 * step):
                x = x + 0.5 * step
                continue
            raise NoConvergence(
                f"full Newton step left the region at iteration {it} "
                f"(decrement {decrement:.3e})", iterations=it, last_point=x)

        fx = barrier_value(P, x)
        slope = float(g @ step)
        t = 1.0
        while t > 1e-18:
            candidate = x + t * step
            if P.is_interior(candidate) and barrier_value(P, candidate) <= fx + ARMIJO * t * slope:
                break
            t *= 0.5
        else:
            raise NoConvergence(
                f"line search stalled at iteration {it} (decrement {decrement:.3e})",
                iterations=it, last_point=x,
            )
        x = x + t * step
    else:
        raise NoConvergence(
            f"no center after {MAX_NEWTON_ITERS} Newton iterations "
            f"(gradient norm {gnorm:.3e})",
            iterations=MAX_NEWTON_ITERS, last_point=x,
        )

    logger.debug("center after %d Newton steps (|grad| %.2e)", it, gnorm)
    lambdas = _conic_coefficients(P, x)
    P.center = x
    P.conic = lambdas
    P.hint = (x.copy(), P.min_slack(x))
    return x, lambdas


def add_cut(P: OuterApprox, cut: Cut) -> OuterApprox:
    """Append a cut; returns a new region with the center caches invalidated.

    The cut's kind is classified against the pre-cut center (the exact ball
    center when no center has been computed yet): offsets above the center
    value cut it away (deep), equal offsets pass through it (central), lower
    offsets leave it interior (shallow).
    """
    reference = P.center if P.center is not None else np.zeros(P.dimension)
    value = float(cut.normal @ reference)
    if cut.offset > value + KIND_TOL:
        kind = DEEP
    elif cut.offset < value - KIND_TOL:
        kind = SHALLOW
    else:
        kind = CENTRAL
    placed = replace(cut, kind=kind)
    hint = (P.center.copy(), P.min_slack(P.center)) if P.center is not None else P.hint
    return OuterApprox(
        dimension=P.dimension,
        ball_radius=P.ball_radius,
        cuts=P.cuts + (placed,),
        center=None,
        conic=None,
        hint=hint,
    )


def drop_least_binding(P: OuterApprox, max_cuts: int) -> OuterApprox:
    """Discard slack cuts until at most ``max_cuts`` remain.

    The drop ranking is the barrier weight per unit slack, lambda_i / s_i
    (equivalently: largest slack first, since both lambda_i and the ratio
    decrease in s_i).  Protected cuts are never dropped.  No-op when the cut
    count is already within budget; raises CannotDrop when a drop is needed
    but at most one cut exists or only protected cuts remain.
    """
    if len(P.cuts) <= max_cuts:
        return P
    if P.center is None or P.conic is None:
        raise ValueError("drop_least_binding needs a computed center")

    region = P
    omega = P.center
    while len(region.cuts) > max_cuts:
        if len(region.cuts) <= 1:
            raise CannotDrop("refusing to drop below a single cut")
        slacks = region.cut_slacks(omega)
        lambdas = region.conic
        candidates = [i for i, c in enumerate(region.cuts) if not c.protected]
        if not candidates:
            raise CannotDrop("all remaining cuts are protected")
        victim = min(candidates, key=lambda i: lambdas[i] / slacks[i])
        kept = tuple(c for i, c in enumerate(region.cuts) if i != victim)
        region = OuterApprox(
            dimension=region.dimension,
            ball_radius=region.ball_radius,
            cuts=kept,
            hint=(omega.copy(), region.min_slack(omega)),
        )
        # removing constraints keeps omega interior, so it warm-starts Newton
        omega, _ = analytic_center(region, warm_start=omega)
    return region


def inscribed_radius_estimate(P: OuterApprox) -> float:
    """Lower bound on the inscribed radius: the minimum slack at the center.

    The ball centered at omega with this radius fits inside P, so the value
    never exceeds the true inscribed radius; it undershoots by at most a
    factor around sqrt(n) * (h + 1) for h cuts, which is good enough for the
    size-floor stopping rule (never used in correctness claims).
    """
    if P.center is None:
        raise ValueError("inscribed_radius_estimate needs a computed center")
    return max(0.0, P.min_slack(P.center))
