"""Measured quantities along trajectories: moments and the weighted norm,
the integral mass-balance reconstruction, residuals of the time-integrated
weak formulation for a family of test functions, distances between states,
log-log decay fits, and the analytic growth envelopes the long-time
experiments certify against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .coefficients import CoefficientSet, DaughterDistribution
from .operators import StateVector

MOMENT_CSV_COLUMNS = ("t", "M0", "M1", "M2", "weighted_norm",
                      "overflow_mass", "renewal_number", "renewal_mass_artifact")


@dataclass(frozen=True)
class MomentRecord:
    """Moments of order 0, 1, 2 and the (1+u)-weighted norm at one time."""

    t: float
    m0: float
    m1: float
    m2: float
    weighted_norm: float


def moment(state: StateVector, gamma: float) -> float:
    """Order-gamma moment by pivot quadrature; gamma must be >= 0 (the
    quadrature diverges near zero size otherwise)."""
    if gamma < 0.0:
        raise ValueError(f"moment: order must be >= 0, got {gamma}")
    x = state.grid.pivots
    return float(np.dot(x ** gamma, state.xi * state.grid.widths))


def weighted_norm(state: StateVector) -> float:
    x = state.grid.pivots
    return float(np.dot(1.0 + x, state.xi * state.grid.widths))


def moment_record(state: StateVector) -> MomentRecord:
    return MomentRecord(state.t, moment(state, 0.0), moment(state, 1.0),
                        moment(state, 2.0), weighted_norm(state))


def weighted_difference_norm(a: StateVector, b: StateVector) -> float:
    """(1+u)-weighted L1 distance between two states on the same grid."""
    if not a.grid.same_as(b.grid):
        raise ValueError("weighted difference: states live on different grids")
    x = a.grid.pivots
    return float(np.dot((1.0 + x) * a.grid.widths, np.abs(a.xi - b.xi)))


# ---------------------------------------------------------------------------
# Mass balance reconstruction
# ---------------------------------------------------------------------------

def mass_balance_residual(traj, coeffs: CoefficientSet, t1: float, t2: float):
    """Residual of the first-moment balance between two output times:

        M1(t2) - M1(t1) = int_{t1}^{t2} sum_i (g(x_i) - x_i mu(x_i)) xi_i w_i ds
                          + renewal mass artifact - overflow - clamped

    with the time integral taken by trapezoid over the stored snapshots.
    Returns (residual, residual relative to M1(t1)).
    """
    if t2 < t1:
        raise ValueError("mass balance: need t1 <= t2")
    i1, i2 = traj.index_of(t1), traj.index_of(t2)
    x = traj.grid.pivots
    w = traj.grid.widths
    g_piv = np.asarray(coeffs.growth(x), dtype=float)
    mu_piv = np.asarray(coeffs.death(x), dtype=float)
    kernel = (g_piv - x * mu_piv) * w
    rates = [float(np.dot(kernel, traj.snapshots[k].xi)) for k in range(i1, i2 + 1)]
    times = traj.times[i1: i2 + 1]
    growth_death = float(np.trapezoid(rates, times))

    led1, led2 = traj.ledgers[i1], traj.ledgers[i2]
    m1_1, m1_2 = traj.moments[i1].m1, traj.moments[i2].m1
    residual = (m1_2 - m1_1 - growth_death
                - (led2.renewal_mass - led1.renewal_mass)
                + (led2.overflow_mass - led1.overflow_mass)
                + (led2.clamped_mass - led1.clamped_mass))
    return residual, abs(residual) / max(abs(m1_1), 1e-300)


def ledger_closure_residual(traj, t: float):
    """Exact-accounting residual: change of M1 against the discrete
    transport mass gain, renewal artifact, death, overflow and clamp
    ledgers.  Closes to roundoff for any run."""
    i = traj.index_of(t)
    led = traj.ledgers[i]
    m1_0, m1_t = traj.moments[0].m1, traj.moments[i].m1
    residual = (m1_t - m1_0 - led.growth_mass_gain - led.renewal_mass
                + led.death_mass + led.overflow_mass + led.clamped_mass)
    return residual, abs(residual) / max(abs(m1_0), 1e-300)


# ---------------------------------------------------------------------------
# Test functions for the weak-form residual
# ---------------------------------------------------------------------------

class TestFunction:
    """Bounded test function with bounded derivative.

    Subclasses provide value/derivative/value0; psi(parent, daughter) is
    the daughter-weighted average minus the parent value, computed in
    closed form where available and by adaptive quadrature otherwise.
    is_c1 records whether the function is continuously differentiable
    (the capped-linear member is only Lipschitz).
    """

    kind = "abstract"
    is_c1 = True

    def value(self, u):
        raise NotImplementedError

    def derivative(self, u):
        raise NotImplementedError

    @property
    def value0(self):
        return float(self.value(0.0))

    def tilde(self, u, u1):
        """value(u+u1) - value(u) - value(u1)."""
        return self.value(u + u1) - self.value(u) - self.value(u1)

    def psi(self, parents, daughter: DaughterDistribution):
        parents = np.atleast_1d(np.asarray(parents, dtype=float))
        out = np.empty_like(parents)
        for idx, p in enumerate(parents):
            q, _ = integrate.quad(lambda s: float(self.value(s)) * float(daughter(s, p)),
                                  0.0, p, epsabs=1e-10, epsrel=1e-10)
            out[idx] = q - float(self.value(p))
        return out


@dataclass(frozen=True)
class ExpDecay(TestFunction):
    """value(u) = exp(-k u), k > 0."""

    k: float = 1.0
    kind = "exp_decay"

    def __post_init__(self):
        if not self.k > 0.0:
            raise ValueError(f"exp test function: k must be > 0, got {self.k}")

    def value(self, u):
        return np.exp(-self.k * np.asarray(u, dtype=float))

    def derivative(self, u):
        return -self.k * np.exp(-self.k * np.asarray(u, dtype=float))

    def psi(self, parents, daughter: DaughterDistribution):
        # integral of exp(-k u) u^nu over (0, p) via the lower incomplete
        # gamma function; nu+1 lies in (0, 1]
        p = np.asarray(parents, dtype=float)
        nu = daughter.nu
        s = nu + 1.0
        lower_gamma = special.gammainc(s, self.k * p) * special.gamma(s)
        integral = (nu + 2.0) / p ** s * self.k ** (-s) * lower_gamma
        return integral - np.exp(-self.k * p)


@dataclass(frozen=True)
class CappedLinear(TestFunction):
    """value(u) = min(u, cap); Lipschitz but not C1 at the cap."""

    cap: float = 1.0
    kind = "capped_linear"
    is_c1 = False

    def __post_init__(self):
        if not self.cap > 0.0:
            raise ValueError(f"capped-linear test function: cap must be > 0, got {self.cap}")

    def value(self, u):
        return np.minimum(np.asarray(u, dtype=float), self.cap)

    def derivative(self, u):
        return (np.asarray(u, dtype=float) < self.cap).astype(float)

    def psi(self, parents, daughter: DaughterDistribution):
        # below the cap the daughter mass identity makes psi vanish
        p = np.asarray(parents, dtype=float)
        nu = daughter.nu
        cap = self.cap
        mass_below = np.where(p <= cap, p, cap ** (nu + 2.0) / p ** (nu + 1.0))
        n_above = np.where(p <= cap, 0.0,
                           (nu + 2.0) / (nu + 1.0)
                           * (p ** (nu + 1.0) - np.minimum(p, cap) ** (nu + 1.0)) / p ** (nu + 1.0))
        return mass_below + cap * n_above - np.minimum(p, cap)


@dataclass(frozen=True)
class SmoothBump(TestFunction):
    """Compactly supported C-infinity bump on (center-width, center+width).

    Requires width <= center so that the support stays inside (0, inf).
    """

    center: float = 2.0
    width: float = 1.0
    kind = "smooth_bump"

    def __post_init__(self):
        if not (0.0 < self.width <= self.center):
            raise ValueError("smooth bump: need 0 < width <= center")

    def value(self, u):
        z = (np.asarray(u, dtype=float) - self.center) / self.width
        inside = np.abs(z) < 1.0
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            val = np.exp(1.0 - 1.0 / (1.0 - z ** 2))
        return np.where(inside, val, 0.0)

    def derivative(self, u):
        z = (np.asarray(u, dtype=float) - self.center) / self.width
        inside = np.abs(z) < 1.0
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            val = np.exp(1.0 - 1.0 / (1.0 - z ** 2))
            der = val * (-2.0 * z) / (self.width * (1.0 - z ** 2) ** 2)
        return np.where(inside, der, 0.0)


def weak_form_residual(traj, coeffs: CoefficientSet, theta: TestFunction, t: float):
    """Absolute gap between the two sides of the time-integrated weak
    formulation at output time t, with the time integrals taken by
    trapezoid over the stored snapshots.

    Returns (residual, info) where info records the test-function class
    used (continuously differentiable or Lipschitz-only).
    """
    i_t = traj.index_of(t)
    grid = traj.grid
    x, w = grid.pivots, grid.widths
    th = np.asarray(theta.value(x), dtype=float)
    dth = np.asarray(theta.derivative(x), dtype=float)
    th0 = theta.value0

    g_piv = np.asarray(coeffs.growth(x), dtype=float)
    mu_piv = np.asarray(coeffs.death(x), dtype=float)
    a_piv = np.asarray(coeffs.birth(x), dtype=float)
    alpha_piv = np.asarray(coeffs.frag(x), dtype=float)
    psi_piv = np.asarray(theta.psi(x, coeffs.daughter), dtype=float)
    X, Y = np.meshgrid(x, x, indexing="ij")
    ktilde = np.asarray(coeffs.coag(X, Y), dtype=float) * theta.tilde(X, Y)

    def rate(state):
        xw = state.xi * w
        transport = float(np.dot(dth * g_piv, xw))
        renewal = th0 * float(np.dot(a_piv, xw))
        death = -float(np.dot(mu_piv * th, xw))
        frag = float(np.dot(psi_piv * alpha_piv, xw))
        coag = 0.5 * float(xw @ ktilde @ xw)
        return transport + renewal + death + frag + coag

    rates = [rate(traj.snapshots[k]) for k in range(i_t + 1)]
    integral = float(np.trapezoid(rates, traj.times[: i_t + 1]))
    left = float(np.dot(th, traj.snapshots[i_t].xi * w))
    right = float(np.dot(th, traj.snapshots[0].xi * w)) + integral
    return abs(left - right), {"test_function": theta.kind,
                               "class": "C1" if theta.is_c1 else "Lipschitz"}


# ---------------------------------------------------------------------------
# Decay fits and analytic envelopes
# ---------------------------------------------------------------------------

def decay_fit(moments, which: str, window):
    """Least-squares slope and prefactor of log M against log t.

    moments - sequence of MomentRecord
    which   - "M0" or "M1"
    window  - (t_lo, t_hi), needs at least 5 positive records inside
    """
    attr = {"M0": "m0", "M1": "m1"}.get(which)
    if attr is None:
        raise ValueError(f"decay fit: which must be M0 or M1, got {which!r}")
    t_lo, t_hi = window
    pts = [(r.t, getattr(r, attr)) for r in moments if t_lo <= r.t <= t_hi]
    if len(pts) < 5:
        raise ValueError(f"decay fit: need >= 5 records in window, got {len(pts)}")
    t = np.array([p[0] for p in pts])
    m = np.array([p[1] for p in pts])
    if np.any(t <= 0.0):
        raise ValueError("decay fit: window must contain only positive times")
    if np.any(m <= 0.0):
        raise ValueError("decay fit: moment values must be positive")
    slope, intercept = np.polyfit(np.log(t), np.log(m), 1)
    return float(slope), float(math.exp(intercept))


def weighted_norm_envelope(c1: float, growth_rate: float, t):
    """c1 * exp(growth_rate * t), the admissible-coefficient bound on the
    weighted norm with the fitted envelope rate."""
    return c1 * np.exp(growth_rate * np.asarray(t, dtype=float))


def second_moment_envelope(m2_initial: float, c1: float, growth_rate: float,
                           upsilon0: float, upsilon1: float, g_sup: float, t):
    """Gronwall bound on the second moment over [0, t] assembled from the
    fitted kernel and growth constants; generous by construction."""
    T = np.asarray(t, dtype=float)
    e1 = np.exp(growth_rate * T)
    lk = T * (3.0 * (1.0 + g_sup) + (8.0 * upsilon0 + 2.0 * upsilon1) * c1 * e1)
    base = m2_initial + upsilon0 * T * (c1 * e1) ** 2 + (1.0 + g_sup) * T * c1 * e1
    return base * np.exp(lk)
