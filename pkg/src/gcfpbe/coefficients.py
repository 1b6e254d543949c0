"""Model coefficients: merge kernel, breakup rate, daughter distribution,
growth, death and birth rates, plus sampling-based certification of the
structural bounds the solver and experiments rely on.

Classes:
LinearShear, NonlinearShear, Gravitational, ModifiedSmoluchowski,
ActivatedSludge, ProductKernel, ConstantKernel, TableKernel
FragmentationRate
DaughterDistribution
Affine, PowerLaw, ConstantRate, TableRate
CoefficientSet
ProbeSpec, HypothesisCheck, AssumptionReport

Functions:
verify_assumptions
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np
from scipy import integrate

_THIRD = 1.0 / 3.0


def _as_positive(name, u):
    arr = np.asarray(u, dtype=float)
    if np.any(arr <= 0.0):
        raise ValueError(f"{name} requires strictly positive sizes")
    return arr


def _as_nonnegative(name, u):
    arr = np.asarray(u, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError(f"{name} requires nonnegative sizes")
    return arr


# ---------------------------------------------------------------------------
# Merge (coagulation) kernels
# ---------------------------------------------------------------------------

class CoagulationKernel:
    """Base class for symmetric, nonnegative merge-rate kernels K(u, u1).

    All concrete kernels are written so that evaluation is bitwise
    symmetric in (u, u1); tests rely on exact symmetry, not tolerance.
    """

    kind = "abstract"

    def __call__(self, u, u1):
        u = _as_positive("coagulation kernel", u)
        u1 = _as_positive("coagulation kernel", u1)
        return self._eval(u, u1)

    def _eval(self, u, u1):
        raise NotImplementedError


@dataclass(frozen=True)
class LinearShear(CoagulationKernel):
    """K(u, u1) = (u^{1/3} + u1^{1/3})^3."""

    kind = "linear_shear"

    def _eval(self, u, u1):
        return (u ** _THIRD + u1 ** _THIRD) ** 3


@dataclass(frozen=True)
class NonlinearShear(CoagulationKernel):
    """K(u, u1) = (u^{1/3} + u1^{1/3})^{7/3}."""

    kind = "nonlinear_shear"

    def _eval(self, u, u1):
        return (u ** _THIRD + u1 ** _THIRD) ** (7.0 / 3.0)


@dataclass(frozen=True)
class Gravitational(CoagulationKernel):
    """K(u, u1) = (u^{1/3} + u1^{1/3})^2 |u^{1/3} - u1^{1/3}|."""

    kind = "gravitational"

    def _eval(self, u, u1):
        a = u ** _THIRD
        b = u1 ** _THIRD
        return (a + b) ** 2 * np.abs(a - b)


@dataclass(frozen=True)
class ModifiedSmoluchowski(CoagulationKernel):
    """K(u, u1) = (u^{1/3} + u1^{1/3})^2 / (u^{1/3} u1^{1/3} + c), c > 0."""

    kind = "modified_smoluchowski"
    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0.0:
            raise ValueError(f"modified_smoluchowski: c must be > 0, got {self.c}")

    def _eval(self, u, u1):
        a = u ** _THIRD
        b = u1 ** _THIRD
        return (a + b) ** 2 / (a * b + self.c)


@dataclass(frozen=True)
class ActivatedSludge(CoagulationKernel):
    """Flocculation kernel (u^{1/3}+u1^{1/3})^q / (1 + ((u^{1/3}+u1^{1/3}) / (2 u_c^{1/3}))^3).

    Requires 0 <= q < 3 and u_c > 0.
    """

    kind = "activated_sludge"
    q: float = 1.0
    u_c: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.q < 3.0):
            raise ValueError(f"activated_sludge: q must lie in [0, 3), got {self.q}")
        if not self.u_c > 0.0:
            raise ValueError(f"activated_sludge: u_c must be > 0, got {self.u_c}")

    def _eval(self, u, u1):
        s = u ** _THIRD + u1 ** _THIRD
        return s ** self.q / (1.0 + (s / (2.0 * self.u_c ** _THIRD)) ** 3)


@dataclass(frozen=True)
class ProductKernel(CoagulationKernel):
    """K(u, u1) = (u u1)^omega with 0 <= omega < 1.

    omega = 1 is rejected: the sub-multiplicative tail condition
    r(u)/u -> 0 fails there.
    """

    kind = "product"
    omega: float = 0.5

    def __post_init__(self):
        if not (0.0 <= self.omega < 1.0):
            raise ValueError(f"product: omega must lie in [0, 1), got {self.omega}")

    def _eval(self, u, u1):
        return (u * u1) ** self.omega


@dataclass(frozen=True)
class ConstantKernel(CoagulationKernel):
    """K(u, u1) = value >= 0."""

    kind = "constant"
    value: float = 1.0

    def __post_init__(self):
        if not self.value >= 0.0:
            raise ValueError(f"constant kernel: value must be >= 0, got {self.value}")

    def _eval(self, u, u1):
        return np.broadcast_to(np.float64(self.value), np.broadcast_shapes(np.shape(u), np.shape(u1))).copy()


@dataclass(frozen=True)
class TableKernel(CoagulationKernel):
    """Bilinear interpolation of sampled kernel values on a size grid.

    `points` are strictly increasing positive sizes, `values` the sampled
    rates on points x points.  Evaluation clamps to the table edges and is
    symmetrized by averaging K(u, u1) and K(u1, u), so exact symmetry holds
    even for an asymmetric table.
    """

    kind = "table"
    points: tuple = ()
    values: tuple = ()

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("table kernel: need at least two sample points")
        if np.any(pts <= 0) or np.any(np.diff(pts) <= 0):
            raise ValueError("table kernel: points must be positive and strictly increasing")
        if vals.shape != (pts.size, pts.size):
            raise ValueError("table kernel: values must be square with one row per point")
        if np.any(vals < 0) or not np.all(np.isfinite(vals)):
            raise ValueError("table kernel: values must be finite and nonnegative")
        object.__setattr__(self, "points", tuple(pts))
        object.__setattr__(self, "values", tuple(map(tuple, vals)))
        object.__setattr__(self, "_pts", pts)
        object.__setattr__(self, "_vals", vals)

    def _interp(self, u, u1):
        pts = self._pts
        uu = np.clip(u, pts[0], pts[-1])
        vv = np.clip(u1, pts[0], pts[-1])
        i = np.clip(np.searchsorted(pts, uu) - 1, 0, pts.size - 2)
        j = np.clip(np.searchsorted(pts, vv) - 1, 0, pts.size - 2)
        s = (uu - pts[i]) / (pts[i + 1] - pts[i])
        t = (vv - pts[j]) / (pts[j + 1] - pts[j])
        v = self._vals
        return ((1 - s) * (1 - t) * v[i, j] + s * (1 - t) * v[i + 1, j]
                + (1 - s) * t * v[i, j + 1] + s * t * v[i + 1, j + 1])

    def _eval(self, u, u1):
        return 0.5 * (self._interp(u, u1) + self._interp(u1, u))


def eval_coagulation(kernel: CoagulationKernel, u, u1):
    """Evaluate a merge kernel at (u, u1); sizes must be positive."""
    return kernel(u, u1)


# ---------------------------------------------------------------------------
# Breakup rate and daughter distribution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FragmentationRate:
    """Power-law breakup rate l0 * u^l1 with l0 >= 0 and 0 <= l1 <= 1.

    The convention 0^0 = 1 makes l1 = 0 the constant-rate case.  The
    linear bound l0*u + l0 always dominates the rate since u^l1 <= 1 + u.
    """

    l0: float = 0.0
    l1: float = 0.0

    def __post_init__(self):
        if not self.l0 >= 0.0:
            raise ValueError(f"fragmentation: l0 must be >= 0, got {self.l0}")
        if not (0.0 <= self.l1 <= 1.0):
            raise ValueError(f"fragmentation: l1 must lie in [0, 1], got {self.l1}")

    def __call__(self, u):
        u = _as_nonnegative("fragmentation rate", u)
        return self.l0 * u ** self.l1

    def linear_bound(self):
        """(P, Q) with rate(u) <= P*u + Q for all u >= 0."""
        return self.l0, self.l0


def eval_fragmentation_rate(spec: FragmentationRate, u):
    return spec(u)


@dataclass(frozen=True)
class DaughterDistribution:
    """Power-law daughter density (nu+2) u^nu / u1^(nu+1) on 0 < u < u1.

    nu must lie in (-1, 0]; at nu = -1 the expected daughter count
    (nu+2)/(nu+1) diverges.  Mass is conserved exactly:
    the integral of u * beta(u|u1) over (0, u1) equals u1.
    """

    nu: float = 0.0

    def __post_init__(self):
        if not (-1.0 < self.nu <= 0.0):
            raise ValueError(f"daughter distribution: nu must lie in (-1, 0], got {self.nu}")

    def __call__(self, u, u1):
        u1a = _as_positive("daughter distribution", u1)
        ua = np.asarray(u, dtype=float)
        inside = (ua > 0.0) & (ua < u1a)
        nu = self.nu
        with np.errstate(divide="ignore", invalid="ignore"):
            dens = (nu + 2.0) * ua ** nu / u1a ** (nu + 1.0)
        return np.where(inside, dens, 0.0)

    def count(self):
        """Expected daughter count per breakup, independent of parent size."""
        return (self.nu + 2.0) / (self.nu + 1.0)

    def number_integral(self, a, b, parent):
        """Integral of beta(u | parent) over (a, b) in closed form.

        Bounds are clipped to [0, parent]."""
        a, b, parent = self._clip(a, b, parent)
        nu = self.nu
        return (nu + 2.0) / (nu + 1.0) * (b ** (nu + 1.0) - a ** (nu + 1.0)) / parent ** (nu + 1.0)

    def mass_integral(self, a, b, parent):
        """Integral of u * beta(u | parent) over (a, b) in closed form."""
        a, b, parent = self._clip(a, b, parent)
        nu = self.nu
        return (b ** (nu + 2.0) - a ** (nu + 2.0)) / parent ** (nu + 1.0)

    def _clip(self, a, b, parent):
        parent = np.asarray(parent, dtype=float)
        if np.any(parent <= 0):
            raise ValueError("daughter distribution: parent size must be positive")
        a = np.clip(np.asarray(a, dtype=float), 0.0, parent)
        b = np.clip(np.asarray(b, dtype=float), 0.0, parent)
        return a, b, parent


def eval_daughter(spec: DaughterDistribution, u, u1):
    return spec(u, u1)


def daughter_count(spec: DaughterDistribution):
    return spec.count()


# ---------------------------------------------------------------------------
# Growth, death, birth rate families
# ---------------------------------------------------------------------------

class Rate:
    """Base for nonnegative scalar rate functions of size."""

    kind = "abstract"

    def __call__(self, u):
        u = _as_nonnegative(self.kind, u)
        return self._eval(u)

    def _eval(self, u):
        raise NotImplementedError

    def linear_bound(self):
        """(P, Q) with rate(u) <= P*u + Q."""
        raise NotImplementedError

    def affine_bound(self):
        """Smallest sampled-free constant c with rate(u) <= c*(1+u)."""
        p, q = self.linear_bound()
        return max(p, q)


@dataclass(frozen=True)
class Affine(Rate):
    """rate(u) = slope*u + intercept, both nonnegative."""

    kind = "affine"
    slope: float = 0.0
    intercept: float = 0.0

    def __post_init__(self):
        if self.slope < 0.0 or self.intercept < 0.0:
            raise ValueError(f"affine rate: slope and intercept must be >= 0, "
                             f"got ({self.slope}, {self.intercept})")

    def _eval(self, u):
        return self.slope * u + self.intercept

    def linear_bound(self):
        return self.slope, self.intercept


@dataclass(frozen=True)
class PowerLaw(Rate):
    """rate(u) = coef * u^exponent with coef >= 0 and exponent in [0, 1]."""

    kind = "power_law"
    coef: float = 0.0
    exponent: float = 1.0

    def __post_init__(self):
        if self.coef < 0.0:
            raise ValueError(f"power-law rate: coef must be >= 0, got {self.coef}")
        if not (0.0 <= self.exponent <= 1.0):
            raise ValueError(f"power-law rate: exponent must lie in [0, 1], got {self.exponent}")

    def _eval(self, u):
        return self.coef * u ** self.exponent

    def linear_bound(self):
        # u^p <= 1 + u on [0, inf) for p in [0, 1]
        return self.coef, self.coef


@dataclass(frozen=True)
class ConstantRate(Rate):
    """rate(u) = value >= 0."""

    kind = "constant"
    value: float = 0.0

    def __post_init__(self):
        if self.value < 0.0:
            raise ValueError(f"constant rate: value must be >= 0, got {self.value}")

    def _eval(self, u):
        return np.broadcast_to(np.float64(self.value), np.shape(u)).copy() if np.ndim(u) else float(self.value)

    def linear_bound(self):
        return 0.0, self.value


@dataclass(frozen=True)
class TableRate(Rate):
    """Piecewise-linear rate through (points, values), clamped at the ends."""

    kind = "table"
    points: tuple = ()
    values: tuple = ()

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if pts.ndim != 1 or pts.size < 2 or vals.shape != pts.shape:
            raise ValueError("table rate: points and values must be 1-D of equal length >= 2")
        if np.any(np.diff(pts) <= 0) or np.any(pts < 0):
            raise ValueError("table rate: points must be nonnegative and strictly increasing")
        if np.any(vals < 0) or not np.all(np.isfinite(vals)):
            raise ValueError("table rate: values must be finite and nonnegative")
        object.__setattr__(self, "points", tuple(pts))
        object.__setattr__(self, "values", tuple(vals))
        object.__setattr__(self, "_pts", pts)
        object.__setattr__(self, "_vals", vals)

    def _eval(self, u):
        return np.interp(u, self._pts, self._vals)

    def linear_bound(self):
        c = float(np.max(self._vals / (1.0 + self._pts)))
        return c, c


ZERO_RATE = ConstantRate(0.0)


# ---------------------------------------------------------------------------
# Coefficient set
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoefficientSet:
    """The six model coefficients of the full evolution problem."""

    coag: CoagulationKernel
    frag: FragmentationRate
    daughter: DaughterDistribution
    growth: Rate
    death: Rate
    birth: Rate

    def replace(self, **kw):
        current = {f.name: getattr(self, f.name) for f in fields(self)}
        current.update(kw)
        return CoefficientSet(**current)


# ---------------------------------------------------------------------------
# Hypothesis certification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProbeSpec:
    """Log-spaced probe grid over (u_lo, u_hi), u_lo > 0."""

    u_lo: float = 1e-6
    u_hi: float = 1e3
    n: int = 48

    def __post_init__(self):
        if not self.u_lo > 0.0:
            raise ValueError(f"probes: u_lo must be > 0, got {self.u_lo}")
        if not self.u_hi > self.u_lo:
            raise ValueError("probes: u_hi must exceed u_lo")
        if self.n < 4:
            raise ValueError("probes: need at least 4 points")

    def samples(self):
        return np.geomspace(self.u_lo, self.u_hi, self.n)


@dataclass
class HypothesisCheck:
    """Outcome of one sampled structural-bound check."""

    hypothesis: str
    name: str
    satisfied: bool
    constants: dict = field(default_factory=dict)
    worst_point: Optional[tuple] = None

    def to_dict(self):
        d = {"hypothesis": self.hypothesis, "name": self.name,
             "satisfied": bool(self.satisfied),
             "constants": {k: float(v) for k, v in self.constants.items()}}
        if self.worst_point is not None:
            d["worst_point"] = [float(x) for x in self.worst_point]
        return d


@dataclass
class AssumptionReport:
    """Per-hypothesis certification of a coefficient set over a probe grid.

    Deterministic: the same probes always produce an identical report.
    """

    checks: dict

    def __getitem__(self, hyp_id):
        return self.checks[hyp_id]

    def satisfied(self, hyp_id):
        return self.checks[hyp_id].satisfied

    def constant(self, hyp_id, name):
        return self.checks[hyp_id].constants[name]

    def to_json(self, indent=2):
        return json.dumps({k: v.to_dict() for k, v in self.checks.items()}, indent=indent)

    def weighted_sup_constants(self):
        """Fitted sup-norm constants (relative to 1+u) for the growth
        envelope: birth, growth, and daughter-count * breakup constants."""
        return {
            "a_sup": self.constant("2.11", "a1"),
            "g_sup": self.constant("2.10", "g_sup"),
            "M": self.constant("2.5", "M"),
            "alpha_linear": max(self.constant("2.7", "P_alpha"),
                                self.constant("2.7", "Q_alpha")),
        }

    def envelope_growth_rate(self):
        """Exponential growth constant for the weighted norm: the sum of
        the birth, growth, and daughter-weighted breakup sup constants,
        plus one unit of slack."""
        c = self.weighted_sup_constants()
        return c["a_sup"] + c["g_sup"] + c["M"] * c["alpha_linear"] + 1.0


def _fit_sup(values, u, v=None):
    """Max of sampled values with its arg point."""
    idx = int(np.argmax(values))
    if v is None:
        return float(values.flat[idx]), (float(u.flat[idx]),)
    return float(values.flat[idx]), (float(u.flat[idx]), float(v.flat[idx]))


def verify_assumptions(coeffs: CoefficientSet, probes: ProbeSpec = ProbeSpec(),
                       lower_bound_thetas=None, power_lower_lambda=None,
                       daughter_quadrature=False) -> AssumptionReport:
    """Certify the structural bounds of a coefficient set by sampling.

    Fitted constants are minimal over the probe grid (e.g. the product
    bound constant is the sampled max of K(u,u1)/((1+u)(1+u1))).  A failed
    check is reported, not raised.  `lower_bound_thetas` activates the
    kernel-floor check on (theta, inf)^2; `power_lower_lambda` activates
    the power-law kernel lower bound for the given exponent.
    """
    u = probes.samples()
    U, V = np.meshgrid(u, u, indexing="ij")
    K = coeffs.coag(U, V)
    checks = {}

    # product-form upper bound: K <= c (1+u)(1+u1)
    ratio = K / ((1.0 + U) * (1.0 + V))
    c0, pt = _fit_sup(ratio, U, V)
    checks["2.1"] = HypothesisCheck("2.1", "kernel_product_bound",
                                    np.isfinite(c0), {"Upsilon0": c0},
                                    pt + (c0,))

    # additive upper bound on (1, inf)^2: K <= c (u + u1)
    mask = (U > 1.0) & (V > 1.0)
    if np.any(mask):
        r = np.where(mask, K / (U + V), 0.0)
        c1, pt = _fit_sup(r, U, V)
        checks["2.2"] = HypothesisCheck("2.2", "kernel_additive_bound",
                                        np.isfinite(c1), {"Upsilon1": c1},
                                        pt + (c1,))
    else:
        checks["2.2"] = HypothesisCheck("2.2", "kernel_additive_bound", True,
                                        {"Upsilon1": 0.0})

    # sub-multiplicative bound via the diagonal surrogate r(u) = sqrt(K(u,u)),
    # with the tail condition r(u)/u -> 0 checked over the last probe decade
    r_diag = np.sqrt(coeffs.coag(u, u))
    rr = np.outer(r_diag, r_diag)
    with np.errstate(divide="ignore", invalid="ignore"):
        excess = np.where(rr > 0, K / rr, np.where(K > 0, np.inf, 1.0))
    worst = float(np.nanmax(excess))
    sub_ok = worst <= 1.0 + 1e-9
    tail = u >= u[-1] / 10.0
    tail_ratio = r_diag[tail] / u[tail]
    tail_ok = bool(np.all(np.diff(tail_ratio) < 0.0))
    bounded_ok = np.isfinite(np.max(r_diag / (1.0 + u)))
    idx = int(np.nanargmax(excess))
    checks["2.3-2.4"] = HypothesisCheck(
        "2.3-2.4", "kernel_submultiplicative_bound",
        sub_ok and tail_ok and bounded_ok,
        {"r_over_1pu_sup": float(np.max(r_diag / (1.0 + u))),
         "tail_r_over_u": float(tail_ratio[-1])},
        (float(U.flat[idx]), float(V.flat[idx]), worst))

    # finite expected daughter count
    M = coeffs.daughter.count()
    checks["2.5"] = HypothesisCheck("2.5", "daughter_count_finite",
                                    np.isfinite(M), {"M": M})

    # daughter mass conservation: closed form, optionally cross-checked by
    # adaptive quadrature over the probe parents
    mass_dev = 0.0
    worst_parent = None
    for parent in u[:: max(1, len(u) // 8)]:
        exact = coeffs.daughter.mass_integral(0.0, parent, parent)
        dev = abs(exact - parent) / parent
        if daughter_quadrature:
            q, _ = integrate.quad(lambda x: x * float(coeffs.daughter(x, parent)),
                                  0.0, parent, epsabs=1e-12, epsrel=1e-12)
            dev = max(dev, abs(q - parent) / parent)
        if dev > mass_dev:
            mass_dev, worst_parent = dev, parent
    checks["2.6"] = HypothesisCheck("2.6", "daughter_mass_conservation",
                                    mass_dev <= 1e-8,
                                    {"max_rel_deviation": mass_dev},
                                    None if worst_parent is None else (worst_parent, worst_parent, mass_dev))

    # linear bounds on breakup, death, growth; affine bound on birth
    for hyp, name, rate, keys in (
        ("2.7", "fragmentation_linear_bound", coeffs.frag, ("P_alpha", "Q_alpha")),
        ("2.9", "death_linear_bound", coeffs.death, ("P_mu", "Q_mu")),
    ):
        vals = rate(u)
        c = float(np.max(vals / (1.0 + u)))
        idx = int(np.argmax(vals / (1.0 + u)))
        checks[hyp] = HypothesisCheck(hyp, name, np.isfinite(c),
                                      {keys[0]: c, keys[1]: c},
                                      (float(u[idx]), float(u[idx]), c))
    gvals = coeffs.growth(u)
    g_sup = float(np.max(gvals / (1.0 + u)))
    checks["2.10"] = HypothesisCheck("2.10", "growth_linear_bound",
                                     np.isfinite(g_sup),
                                     {"g1": g_sup, "g0": g_sup, "g_sup": g_sup})
    avals = coeffs.birth(u)
    a1 = float(np.max(avals / (1.0 + u)))
    checks["2.11"] = HypothesisCheck("2.11", "birth_affine_bound",
                                     np.isfinite(a1), {"a1": a1})

    # death dominates growth pointwise: g(u) <= u * mu(u)
    mu_u = coeffs.death(u)
    slack = gvals - u * mu_u
    bad = slack > 1e-12 * np.maximum(1.0, u * mu_u)
    if np.any(bad):
        i = int(np.argmax(slack))
        checks["2.18"] = HypothesisCheck("2.18", "death_dominates_growth", False,
                                         {"max_excess": float(slack[i])},
                                         (float(u[i]), float(u[i]), float(gvals[i])))
    else:
        checks["2.18"] = HypothesisCheck("2.18", "death_dominates_growth", True,
                                         {"max_excess": float(np.max(slack))})

    # kernel floor on (theta, inf)^2
    if lower_bound_thetas is not None:
        consts = {}
        ok = True
        worst = None
        for theta in lower_bound_thetas:
            m = (U > theta) & (V > theta)
            if not np.any(m):
                continue
            dmin = float(np.min(np.where(m, K, np.inf)))
            consts[f"delta_{theta:g}"] = dmin
            if dmin <= 0.0:
                ok = False
                idx = int(np.argmin(np.where(m, K, np.inf)))
                worst = (float(U.flat[idx]), float(V.flat[idx]), dmin)
        checks["2.19"] = HypothesisCheck("2.19", "kernel_lower_bound", ok, consts, worst)

    # power-law kernel lower bound K >= c (u u1)^(lambda/2)
    if power_lower_lambda is not None:
        lam = float(power_lower_lambda)
        if not (1.0 < lam <= 2.0):
            raise ValueError(f"power lower bound: lambda must lie in (1, 2], got {lam}")
        ratio = K / (U * V) ** (lam / 2.0)
        c2 = float(np.min(ratio))
        idx = int(np.argmin(ratio))
        checks["2.21"] = HypothesisCheck("2.21", "kernel_power_lower_bound",
                                         c2 > 0.0,
                                         {"lambda": lam, "Upsilon2": c2},
                                         (float(U.flat[idx]), float(V.flat[idx]), c2))

    return AssumptionReport(checks)


def death_is_bounded(death: Rate, probes: ProbeSpec = ProbeSpec()) -> bool:
    """Sampled surrogate for mu being bounded: the tail values must not
    keep climbing over the last probe decade."""
    u = probes.samples()
    vals = death(u)
    head = float(np.max(vals[u <= probes.u_hi / 10.0], initial=0.0))
    tail = float(np.max(vals[u > probes.u_hi / 10.0], initial=0.0))
    return tail <= max(head, 1e-300) * 1.0001


def growth_lipschitz_constant(growth: Rate, probes: ProbeSpec = ProbeSpec()):
    """Lipschitz constant of the growth rate, or None if the sampled
    difference quotients keep growing (not Lipschitz near zero)."""
    if isinstance(growth, Affine):
        return growth.slope
    if isinstance(growth, ConstantRate):
        return 0.0
    if isinstance(growth, PowerLaw):
        if growth.exponent == 1.0 or growth.coef == 0.0:
            return growth.coef
        return None
    u = probes.samples()
    vals = growth(u)
    quot = np.abs(np.diff(vals)) / np.diff(u)
    return float(np.max(quot)) if np.all(np.isfinite(quot)) else None
