"""Scenario configuration: one JSON document driving the CLI.

Parsing is strict: unknown keys, missing seeds, and out-of-range values are
rejected so that two runs can only differ when their configs differ.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .equation import CoordinatewiseOddPower, IdentityPotential, LinearSymmetricPSD
from .errors import SpecValidationError
from .integral import DiscreteMeasureSpace
from .projector import Projector
from .sets import ConvexSetSpec, set_from_json_obj

__all__ = [
    "Tolerances",
    "Budgets",
    "RGridRel",
    "ScenarioConfig",
    "parse_config",
    "load_config",
]


@dataclass(frozen=True)
class Tolerances:
    fixed_point: float = 1e-12
    bisection: float = 1e-10
    optimizer: float = 1e-9
    report: float = 1e-9

    def __post_init__(self):
        for name in ("fixed_point", "bisection", "optimizer", "report"):
            v = float(getattr(self, name))
            if not v > 0.0:
                raise SpecValidationError(f"tolerances.{name} must be > 0")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class Budgets:
    n_starts: int = 32
    max_iter: int = 100_000
    n_samples: int = 1000

    def __post_init__(self):
        for name in ("n_starts", "max_iter", "n_samples"):
            v = int(getattr(self, name))
            if v < 1:
                raise SpecValidationError(f"budgets.{name} must be >= 1")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class RGridRel:
    """Relative level grid: fractions of ||P(0)||^2, so configs stay valid
    across sets."""

    min: float = 0.05
    max: float = 0.95
    count: int = 19

    def __post_init__(self):
        lo, hi, n = float(self.min), float(self.max), int(self.count)
        if not (0.0 < lo < 1.0 and 0.0 < hi < 1.0 and lo <= hi):
            raise SpecValidationError("r_grid_rel.min/max must satisfy 0 < min <= max < 1")
        if n < 1:
            raise SpecValidationError("r_grid_rel.count must be >= 1")
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)
        object.__setattr__(self, "count", n)


def _record(obj, cls, label):
    if obj is None:
        return cls()
    if not isinstance(obj, dict):
        raise SpecValidationError(f"{label} must be a JSON object")
    allowed = set(cls.__dataclass_fields__)
    unknown = set(obj) - allowed
    if unknown:
        raise SpecValidationError(f"unknown {label} fields: {sorted(unknown)}")
    return cls(**obj)


def _parse_potential(obj):
    if not isinstance(obj, dict) or "variant" not in obj:
        raise SpecValidationError("potential must be an object with a 'variant'")
    variant = obj["variant"]
    extra = {k: v for k, v in obj.items() if k != "variant"}
    bound = {"lipschitz_bound": float(extra.pop("lipschitz_bound"))} if "lipschitz_bound" in extra else {}
    if variant == "identity":
        if extra:
            raise SpecValidationError(f"unknown potential fields: {sorted(extra)}")
        return IdentityPotential(**bound)
    if variant == "linear_symmetric_psd":
        matrix = extra.pop("matrix", None)
        if matrix is None or extra:
            raise SpecValidationError("linear_symmetric_psd needs exactly a 'matrix'")
        return LinearSymmetricPSD(np.asarray(matrix, dtype=np.float64), **bound)
    if variant == "coordinatewise_odd_power":
        exponent = extra.pop("exponent", None)
        scale = extra.pop("scale", 1.0)
        if exponent is None or extra:
            raise SpecValidationError("coordinatewise_odd_power needs an 'exponent' (and optional 'scale')")
        return CoordinatewiseOddPower(int(exponent), float(scale), **bound)
    raise SpecValidationError(f"unknown potential variant '{variant}'")


def _parse_space(obj):
    if not isinstance(obj, dict):
        raise SpecValidationError("measure_space must be a JSON object")
    unknown = set(obj) - {"atoms", "p"}
    if unknown:
        raise SpecValidationError(f"unknown measure_space fields: {sorted(unknown)}")
    atoms = obj.get("atoms")
    if not isinstance(atoms, list) or not atoms:
        raise SpecValidationError("measure_space.atoms must be a nonempty list")
    mu, eta = [], []
    for a in atoms:
        if not isinstance(a, dict) or set(a) != {"mu", "eta"}:
            raise SpecValidationError("each atom must be an object {mu, eta}")
        mu.append(float(a["mu"]))
        eta.append(float(a["eta"]))
    return DiscreteMeasureSpace(mu, eta, exponent=float(obj.get("p", 2.0)))


_TOP_KEYS = {
    "dimension", "set", "tolerances", "seed", "r_grid_rel", "lambda_grid",
    "h_lambda_grid", "measure_space", "potential", "budgets",
}


@dataclass(frozen=True)
class ScenarioConfig:
    dimension: int
    set_spec: ConvexSetSpec
    seed: int
    tolerances: Tolerances = field(default_factory=Tolerances)
    r_grid_rel: RGridRel = field(default_factory=RGridRel)
    lambda_grid: tuple = ()
    h_lambda_grid: tuple = ()
    measure_space: DiscreteMeasureSpace | None = None
    potential: object | None = None
    budgets: Budgets = field(default_factory=Budgets)

    def __post_init__(self):
        if int(self.dimension) != self.set_spec.dim:
            raise SpecValidationError(
                f"dimension {self.dimension} does not match the set's dimension {self.set_spec.dim}"
            )
        object.__setattr__(self, "dimension", int(self.dimension))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "lambda_grid", tuple(float(v) for v in self.lambda_grid))
        object.__setattr__(self, "h_lambda_grid", tuple(float(v) for v in self.h_lambda_grid))

    def make_projector(self):
        return Projector(self.set_spec)

    def r_grid(self, p0_norm_sq):
        g = self.r_grid_rel
        return np.linspace(g.min, g.max, g.count) * float(p0_norm_sq)


def parse_config(obj):
    """Validate a decoded JSON document into a ScenarioConfig."""
    if not isinstance(obj, dict):
        raise SpecValidationError("config must be a JSON object")
    unknown = set(obj) - _TOP_KEYS
    if unknown:
        raise SpecValidationError(f"unknown config fields: {sorted(unknown)}")
    for key in ("dimension", "set", "seed"):
        if key not in obj:
            raise SpecValidationError(f"config missing required field '{key}'")
    lambda_grid = obj.get("lambda_grid", [])
    h_grid = obj.get("h_lambda_grid", [])
    if not isinstance(lambda_grid, list) or not isinstance(h_grid, list):
        raise SpecValidationError("lambda grids must be JSON lists")
    return ScenarioConfig(
        dimension=obj["dimension"],
        set_spec=set_from_json_obj(obj["set"]),
        seed=obj["seed"],
        tolerances=_record(obj.get("tolerances"), Tolerances, "tolerances"),
        r_grid_rel=_record(obj.get("r_grid_rel"), RGridRel, "r_grid_rel"),
        lambda_grid=lambda_grid,
        h_lambda_grid=h_grid,
        measure_space=_parse_space(obj["measure_space"]) if "measure_space" in obj else None,
        potential=_parse_potential(obj["potential"]) if "potential" in obj else None,
        budgets=_record(obj.get("budgets"), Budgets, "budgets"),
    )


def load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fp:
            obj = json.load(fp)
    except OSError as exc:
        raise SpecValidationError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecValidationError(f"config is not valid JSON: {exc}") from exc
    return parse_config(obj)
