"""Tunable constants controlling the cleanup and cycle pipelines.

Two presets ship:

* ``paper``: the asymptotic constants. Vacuous at bench scale (walk
  lengths round to zero, floors sit at 1e7) but kept for fidelity; the
  formulas are what matter.
* ``desk``: same formula shapes with constants rescaled so that graphs
  with hundreds to thousands of vertices exercise every branch.

Several constants are coefficients of n-dependent formulas; the ``*_at``
helpers evaluate them. Natural log throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from .errors import PreconditionError


@dataclass(frozen=True)
class ConstantsProfile:
    preset: str
    # cleanup: almost-regularity band and degree-loss budgets
    almost_reg_K0: float            # output of the regularization step is K0-almost-regular
    almost_reg_degree_divisor: float  # avg degree kept >= d / (this * ln n)
    degree_divisor_total: float       # end-to-end: d(out) >= d(in) / (this * ln n)
    expander_lambda: float            # claimed expansion 1 / (this * ln n)
    lambda_step: float                # density-increment lambda = 1 / (this * ln n)
    K_final: float                    # final almost-regularity bound
    min_avg_degree: float | None      # input floor; None means ln(n)^2
    # star forests
    star_count_divisor: float         # stars per forest = n / (this * d)
    star_size_divisor: float          # leaves per star = d / this
    forest_count_divisor: float       # forests = d / this
    min_degree_floor: float           # required min degree for star extraction
    # walks
    beta: float                       # walk-length coefficient
    walk_length_divisor: float        # t ~ beta^2 n / (this * k)
    intersection_constant: float      # tail threshold |X| t / (this * k * n)
    cross_edge_constant: float        # cross-edge threshold t^2 d / (this * k^2 n)

    def _ln(self, n: int) -> float:
        if n < 2:
            raise PreconditionError(f"log-scaled constants need n >= 2, got {n}")
        return math.log(n)

    def expander_lambda_at(self, n: int) -> float:
        return 1.0 / (self.expander_lambda * self._ln(n))

    def lambda_step_at(self, n: int) -> float:
        return 1.0 / (self.lambda_step * self._ln(n))

    def almost_reg_divisor_at(self, n: int) -> float:
        return self.almost_reg_degree_divisor * self._ln(n)

    def total_divisor_at(self, n: int) -> float:
        return self.degree_divisor_total * self._ln(n)

    def min_avg_degree_at(self, n: int) -> float:
        if self.min_avg_degree is None:
            return self._ln(n) ** 2
        return self.min_avg_degree

    def star_count(self, n: int, d: int) -> int:
        return int(n / (self.star_count_divisor * d))

    def star_size(self, d: int) -> int:
        return int(d / self.star_size_divisor)

    def forest_count(self, d: int) -> int:
        return int(d / self.forest_count_divisor)

    def intersection_threshold(self, x_size: int, t: int, k: int, n: int) -> float:
        return x_size * t / (self.intersection_constant * k * n)

    def cross_edge_threshold(self, t: int, d: float, k: int, n: int) -> float:
        return t * t * d / (self.cross_edge_constant * k * k * n)


PAPER = ConstantsProfile(
    preset="paper",
    almost_reg_K0=6,
    almost_reg_degree_divisor=100,
    degree_divisor_total=600,
    expander_lambda=10,
    lambda_step=2,
    K_final=100,
    min_avg_degree=None,
    star_count_divisor=1e5,
    star_size_divisor=1e7,
    forest_count_divisor=10,
    min_degree_floor=1e7,
    beta=1e-28,
    walk_length_divisor=1e6,
    intersection_constant=1e9,
    cross_edge_constant=1e32,
)

# Desk scaling notes: lambda_step = 3/(4 ln n) keeps the certified
# expansion lambda_step/3 equal to the claimed expander_lambda = 1/(4 ln n).
# The unstated-at-desk constants (intersection, cross-edge) shrink to keep
# the thresholds nontrivial at n in the hundreds.
DESK = ConstantsProfile(
    preset="desk",
    almost_reg_K0=6,
    almost_reg_degree_divisor=4,
    degree_divisor_total=4,
    expander_lambda=4,
    lambda_step=4 / 3,
    K_final=8,
    min_avg_degree=8,
    star_count_divisor=4,
    star_size_divisor=16,
    forest_count_divisor=4,
    min_degree_floor=32,
    beta=0.25,
    walk_length_divisor=4,
    intersection_constant=4,
    cross_edge_constant=64,
)

_PRESETS = {"paper": PAPER, "desk": DESK}
_FIELD_NAMES = {f.name for f in fields(ConstantsProfile)}


def get_preset(name: str) -> ConstantsProfile:
    try:
        return _PRESETS[name]
    except KeyError:
        raise PreconditionError(
            f"unknown preset {name!r}; choose from {sorted(_PRESETS)}")


def apply_overrides(profile: ConstantsProfile, pairs: dict[str, str]) -> ConstantsProfile:
    """Apply key=value overrides (already split); values parse as floats."""
    updates = {}
    for key, raw in pairs.items():
        if key == "preset" or key not in _FIELD_NAMES:
            raise PreconditionError(f"unknown constants field {key!r}")
        try:
            updates[key] = float(raw)
        except ValueError:
            raise PreconditionError(f"field {key} needs a numeric value, got {raw!r}")
    return replace(profile, **updates)


def parse_config(text: str, base: ConstantsProfile) -> ConstantsProfile:
    """Flat key=value config file, '#' comments."""
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PreconditionError(f"config line {lineno}: expected key=value")
        key, val = line.split("=", 1)
        pairs[key.strip()] = val.strip()
    return apply_overrides(base, pairs)


def profile_to_dict(profile: ConstantsProfile) -> dict:
    return {f.name: getattr(profile, f.name) for f in fields(ConstantsProfile)}
