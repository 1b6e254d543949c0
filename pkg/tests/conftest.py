"""Shared helpers: initial data builders, coefficient set factories, and
the randomized admissible-config generators used by the property suites."""

import numpy as np
import pytest

from gcfpbe import (ActivatedSludge, Affine, CoefficientSet, ConstantKernel,
                    ConstantRate, DaughterDistribution, FragmentationRate,
                    Gravitational, LinearShear, ModifiedSmoluchowski,
                    NonlinearShear, PowerLaw, ProductKernel, build_grid)

TABLE_KERNELS = {
    "linear_shear": LinearShear(),
    "nonlinear_shear": NonlinearShear(),
    "gravitational": Gravitational(),
    "modified_smoluchowski": ModifiedSmoluchowski(c=1.0),
    "activated_sludge": ActivatedSludge(q=1.5, u_c=1.0),
    "product": ProductKernel(omega=0.5),
}


def exp_average(grid, scale=1.0, amplitude=1.0):
    """Exact cell averages of amplitude * exp(-u/scale)."""
    e = grid.edges
    return amplitude * scale * (np.exp(-e[:-1] / scale) - np.exp(-e[1:] / scale)) / grid.widths


def zero_coeffs(**overrides):
    base = dict(coag=ConstantKernel(0.0), frag=FragmentationRate(0.0, 0.0),
                daughter=DaughterDistribution(0.0), growth=ConstantRate(0.0),
                death=ConstantRate(0.0), birth=ConstantRate(0.0))
    base.update(overrides)
    return CoefficientSet(**base)


def random_kernel(rng):
    pick = rng.integers(0, 7)
    if pick == 0:
        return LinearShear()
    if pick == 1:
        return NonlinearShear()
    if pick == 2:
        return Gravitational()
    if pick == 3:
        return ModifiedSmoluchowski(c=float(rng.uniform(0.5, 2.0)))
    if pick == 4:
        return ActivatedSludge(q=float(rng.uniform(0.0, 2.9)),
                               u_c=float(rng.uniform(0.5, 2.0)))
    if pick == 5:
        return ProductKernel(omega=float(rng.uniform(0.0, 0.95)))
    return ConstantKernel(float(rng.uniform(0.0, 2.0)))


def random_rate(rng, cap=0.5):
    pick = rng.integers(0, 3)
    if pick == 0:
        return Affine(float(rng.uniform(0.0, cap)), float(rng.uniform(0.0, cap)))
    if pick == 1:
        return PowerLaw(float(rng.uniform(0.0, cap)), float(rng.uniform(0.0, 1.0)))
    return ConstantRate(float(rng.uniform(0.0, cap)))


def random_admissible_set(rng):
    """Coefficients satisfying the structural bounds with modest constants."""
    return CoefficientSet(
        coag=random_kernel(rng),
        frag=FragmentationRate(float(rng.uniform(0.0, 1.0)),
                               float(rng.choice([0.0, 0.5, 1.0]))),
        daughter=DaughterDistribution(float(rng.uniform(-0.9, 0.0))),
        growth=random_rate(rng),
        death=random_rate(rng),
        birth=random_rate(rng),
    )


def random_death_dominated_set(rng):
    """Breakup-free coefficients with a strict cellwise dominance margin of
    the death term over the discrete transport flux, so the tracked
    moments are provably nonincreasing for the scheme."""
    g1 = float(rng.uniform(0.0, 0.3))
    c = 2.5 * g1 + float(rng.uniform(0.1, 0.5))
    a0 = float(rng.uniform(0.0, 0.3)) * c
    kernels = (ConstantKernel(float(rng.uniform(0.2, 2.0))),
               ModifiedSmoluchowski(c=1.0),
               ActivatedSludge(q=1.0, u_c=1.0))
    return CoefficientSet(
        coag=kernels[rng.integers(0, 3)],
        frag=FragmentationRate(0.0, 0.0),
        daughter=DaughterDistribution(0.0),
        growth=Affine(g1, 0.0),
        death=ConstantRate(c),
        birth=ConstantRate(a0),
    )


@pytest.fixture
def small_uniform_grid():
    return build_grid(1.0, 4, "uniform")


@pytest.fixture
def medium_uniform_grid():
    return build_grid(10.0, 80, "uniform")
