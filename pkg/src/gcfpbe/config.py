"""JSON run configuration: strict schema, all violations reported at once
with their path, unknown keys rejected.

The coefficient groups share the shape {"kind": ..., "params": {...}} and
default to inactive (zero-rate) members; the grid has no default and must
be given.  Range checking is delegated to the coefficient constructors so
the allowed ranges are stated in one place.
"""

from __future__ import annotations

import hashlib
import json
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from . import coefficients as cf
from .coefficients import CoefficientSet, ProbeSpec
from .grid import SizeGrid, build_grid
from .integrator import StepperConfig


class ConfigError(ValueError):
    """Invalid configuration document; `violations` lists every problem."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid configuration:\n" +
                         "\n".join(f"  - {v}" for v in self.violations))


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _construct(factory, params):
    """Run a coefficient constructor, converting its ValueError into a
    pydantic-visible error so all violations are collected."""
    try:
        return factory(**params)
    except ValueError as exc:
        raise ValueError(str(exc)) from None
    except TypeError as exc:
        raise ValueError(str(exc)) from None


# --- coefficient groups -----------------------------------------------------

class KernelConfig(_Strict):
    kind: Literal["linear_shear", "nonlinear_shear", "gravitational",
                  "modified_smoluchowski", "activated_sludge", "product",
                  "constant", "table"] = "constant"
    params: dict = Field(default_factory=dict)

    _FACTORIES = {
        "linear_shear": cf.LinearShear,
        "nonlinear_shear": cf.NonlinearShear,
        "gravitational": cf.Gravitational,
        "modified_smoluchowski": cf.ModifiedSmoluchowski,
        "activated_sludge": cf.ActivatedSludge,
        "product": cf.ProductKernel,
        "constant": cf.ConstantKernel,
        "table": cf.TableKernel,
    }

    @model_validator(mode="after")
    def _check(self):
        self._built = _construct(self._FACTORIES[self.kind], self.params)
        return self

    def build(self):
        return self._built


class FragmentationConfig(_Strict):
    kind: Literal["power_law"] = "power_law"
    params: dict = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check(self):
        self._built = _construct(cf.FragmentationRate, self.params)
        return self

    def build(self):
        return self._built


class DaughterConfig(_Strict):
    kind: Literal["power_law"] = "power_law"
    params: dict = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check(self):
        self._built = _construct(cf.DaughterDistribution, self.params)
        return self

    def build(self):
        return self._built


class RateConfig(_Strict):
    kind: Literal["affine", "power_law", "constant", "table"] = "constant"
    params: dict = Field(default_factory=dict)

    _FACTORIES = {
        "affine": cf.Affine,
        "power_law": cf.PowerLaw,
        "constant": cf.ConstantRate,
        "table": cf.TableRate,
    }

    @model_validator(mode="after")
    def _check(self):
        self._built = _construct(self._FACTORIES[self.kind], self.params)
        return self

    def build(self):
        return self._built


# --- grid, initial data, stepper --------------------------------------------

class GridConfig(_Strict):
    u_max: float
    cells: int
    scheme: Literal["uniform", "geometric"] = "geometric"
    ratio: Optional[float] = None

    @model_validator(mode="after")
    def _check(self):
        self._built = _construct(
            lambda: build_grid(self.u_max, self.cells, self.scheme, self.ratio), {})
        return self

    def build(self) -> SizeGrid:
        return self._built


class InitialConfig(_Strict):
    kind: Literal["exp_decay", "monodisperse", "table"] = "exp_decay"
    params: dict = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check(self):
        p = dict(self.params)
        if self.kind == "exp_decay":
            scale = p.pop("scale", 1.0)
            amplitude = p.pop("amplitude", 1.0)
            if p:
                raise ValueError(f"unknown initial-data params {sorted(p)}")
            if not scale > 0.0:
                raise ValueError(f"initial exp_decay: scale must be > 0, got {scale}")
            if amplitude < 0.0:
                raise ValueError(f"initial exp_decay: amplitude must be >= 0, got {amplitude}")
        elif self.kind == "monodisperse":
            cell = p.pop("cell", None)
            density = p.pop("density", None)
            if p:
                raise ValueError(f"unknown initial-data params {sorted(p)}")
            if cell is None or density is None:
                raise ValueError("initial monodisperse: needs cell and density")
            if not isinstance(cell, int) or cell < 0:
                raise ValueError(f"initial monodisperse: cell must be a nonnegative integer, got {cell}")
            if density < 0.0:
                raise ValueError(f"initial monodisperse: density must be >= 0, got {density}")
        elif self.kind == "table":
            us = p.pop("u", None)
            xis = p.pop("xi", None)
            if p:
                raise ValueError(f"unknown initial-data params {sorted(p)}")
            if not us or xis is None or len(us) != len(xis) or len(us) < 2:
                raise ValueError("initial table: needs equal-length u and xi lists (>= 2 points)")
            if any(b <= a for a, b in zip(us, us[1:])):
                raise ValueError("initial table: u must be strictly increasing")
            if any(v < 0 for v in xis):
                raise ValueError("initial table: xi values must be >= 0")
        return self

    def build(self, grid: SizeGrid) -> np.ndarray:
        p = self.params
        if self.kind == "exp_decay":
            s = float(p.get("scale", 1.0))
            amp = float(p.get("amplitude", 1.0))
            e = grid.edges
            # exact cell averages of amp * exp(-u/s)
            return amp * s * (np.exp(-e[:-1] / s) - np.exp(-e[1:] / s)) / grid.widths
        if self.kind == "monodisperse":
            xi = np.zeros(grid.n_cells)
            cell = int(p["cell"])
            if cell >= grid.n_cells:
                raise ConfigError([f"initial.params.cell: {cell} outside grid with {grid.n_cells} cells"])
            xi[cell] = float(p["density"])
            return xi
        us = np.asarray(p["u"], dtype=float)
        xis = np.asarray(p["xi"], dtype=float)
        return np.interp(grid.pivots, us, xis, left=0.0, right=0.0)


class StepperConfigModel(_Strict):
    t_end: float = 1.0
    output_spacing: Optional[float] = None
    output_times: Optional[List[float]] = None
    safety: float = 0.9
    dt_max: float = 0.1
    method: Literal["euler", "ssprk2"] = "ssprk2"

    @model_validator(mode="after")
    def _check(self):
        if self.t_end < 0.0:
            raise ValueError(f"stepper: t_end must be >= 0, got {self.t_end}")
        if self.output_spacing is not None and not self.output_spacing > 0.0:
            raise ValueError(f"stepper: output_spacing must be > 0, got {self.output_spacing}")
        if self.output_times is not None and self.output_spacing is not None:
            raise ValueError("stepper: give output_spacing or output_times, not both")
        self._built = _construct(lambda: self._build_stepper(), {})
        return self

    def _build_stepper(self) -> StepperConfig:
        if self.output_times is not None:
            times = tuple(float(t) for t in self.output_times)
        elif self.t_end == 0.0:
            times = (0.0,)
        else:
            spacing = self.output_spacing if self.output_spacing is not None \
                else self.t_end / 10.0
            n = max(1, int(round(self.t_end / spacing)))
            times = tuple(np.linspace(0.0, self.t_end, n + 1))
        return StepperConfig(t_end=self.t_end, output_times=times,
                             safety=self.safety, dt_max=self.dt_max,
                             method=self.method)

    def build(self) -> StepperConfig:
        return self._built


class ProbesConfig(_Strict):
    u_lo: Optional[float] = None
    u_hi: Optional[float] = None
    n: int = 64

    def build(self, grid: SizeGrid) -> ProbeSpec:
        u_lo = self.u_lo if self.u_lo is not None else max(grid.pivots[0] * 0.5, 1e-300)
        u_hi = self.u_hi if self.u_hi is not None else grid.u_max
        return _construct(lambda: ProbeSpec(u_lo=u_lo, u_hi=u_hi, n=self.n), {})


class ExperimentOptions(_Strict):
    select: Optional[List[Literal["truncation_convergence", "stability",
                                  "longtime_zeroth", "longtime_first",
                                  "constant_kernel_benchmark"]]] = None
    levels: List[float] = Field(default_factory=lambda: [5.0, 10.0, 20.0, 40.0])
    epsilons: List[float] = Field(default_factory=lambda: [1e-2, 1e-3, 1e-4])
    power_lambda: float = Field(default=1.5, alias="lambda")
    growth_floor: bool = True
    truncation_tolerance: float = 1e-3
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class RunConfig(_Strict):
    """Validated run configuration; grid is required, everything else has
    documented defaults (inactive coefficients, exp_decay initial data)."""

    coagulation: KernelConfig = Field(default_factory=KernelConfig)
    fragmentation: FragmentationConfig = Field(default_factory=FragmentationConfig)
    daughter: DaughterConfig = Field(default_factory=DaughterConfig)
    growth: RateConfig = Field(default_factory=RateConfig)
    death: RateConfig = Field(default_factory=RateConfig)
    birth: RateConfig = Field(default_factory=RateConfig)
    grid: GridConfig
    initial: InitialConfig = Field(default_factory=InitialConfig)
    stepper: StepperConfigModel = Field(default_factory=StepperConfigModel)
    probes: ProbesConfig = Field(default_factory=ProbesConfig)
    experiments: ExperimentOptions = Field(default_factory=ExperimentOptions)
    output_dir: str = "out"
    seed: int = 0  # reserved; the solver is deterministic

    def coefficient_set(self) -> CoefficientSet:
        return CoefficientSet(
            coag=self.coagulation.build(),
            frag=self.fragmentation.build(),
            daughter=self.daughter.build(),
            growth=self.growth.build(),
            death=self.death.build(),
            birth=self.birth.build(),
        )

    def build_grid(self) -> SizeGrid:
        return self.grid.build()

    def initial_xi(self, grid: SizeGrid) -> np.ndarray:
        return self.initial.build(grid)

    def stepper_config(self) -> StepperConfig:
        return self.stepper.build()


def _format_violation(err) -> str:
    loc = ".".join(str(p) for p in err["loc"] if p != "_check")
    msg = err["msg"]
    # pydantic prefixes custom validator messages with "Value error, "
    msg = msg.removeprefix("Value error, ")
    got = err.get("input")
    if isinstance(got, (int, float, str, bool)) and "got" not in msg:
        return f"{loc}: {msg} (got {got!r})"
    return f"{loc}: {msg}"


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON configuration document.

    Raises ConfigError with a line/column message for malformed JSON, or
    with one entry per violation for schema problems.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"]) from None
    if not isinstance(doc, dict):
        raise ConfigError(["top level must be a JSON object"])
    try:
        return RunConfig.model_validate(doc)
    except ValidationError as exc:
        raise ConfigError([_format_violation(e) for e in exc.errors()]) from None


def config_digest(text: str) -> str:
    """Stable content hash of the canonicalized JSON document."""
    doc = json.loads(text)
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]
