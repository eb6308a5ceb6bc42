"""Experiment plans: a validated pydantic model read from INI-style plan files.

Grammar (frozen, see docs/plan-file-format.md):

    [plan]          flavor, k, n_grid, p_list, trials, master_seed
    [tolerances]    any name = positive real (bulk_c1, edge_c2 are used by the studies)
    [estimator]     epsilon, restarts, max_iters

Lists are comma-separated. ``inf`` is accepted in p_list.
"""

import configparser
import logging
import math
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_serializer, field_validator

from config import (
    DEFAULT_EPSILON,
    DEFAULT_RESTARTS,
    DEFAULT_TOLERANCES,
    DEFAULT_TRIALS,
    MAX_ITERATIONS,
    MIN_RESTARTS,
)
from errors import DomainError, PlanError
from models import UINT64_MAX, EnsembleFlavor, SchattenIndex, SeedSpec

logger = logging.getLogger(__name__)

SECTIONS = {
    "plan": ("flavor", "k", "n_grid", "p_list", "trials", "master_seed"),
    "tolerances": None,
    "estimator": ("epsilon", "restarts", "max_iters"),
}
LIST_FIELDS = ("n_grid", "p_list")


class ExperimentPlan(BaseModel):
    """Everything a study needs; together with master_seed it fixes every observable."""

    model_config = ConfigDict(frozen=True)

    flavor: EnsembleFlavor = EnsembleFlavor.GUE
    k: int = Field(ge=2)
    n_grid: list[int] = Field(min_length=1)
    p_list: list[float] = Field(default_factory=lambda: [2.0])
    trials: int = Field(default=DEFAULT_TRIALS, ge=1)
    master_seed: int | None = Field(default=None, ge=0, le=UINT64_MAX)
    tolerances: dict[str, float] = Field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    epsilon: float = Field(default=DEFAULT_EPSILON, gt=0.0, lt=1.0)
    restarts: int = Field(default=DEFAULT_RESTARTS, ge=MIN_RESTARTS)
    max_iters: int = Field(default=MAX_ITERATIONS, ge=1)

    @field_validator("flavor", mode="before")
    @classmethod
    def _parse_flavor(cls, value):
        try:
            return EnsembleFlavor.parse(value)
        except DomainError as e:
            raise ValueError(str(e)) from e

    @field_validator("n_grid")
    @classmethod
    def _ascending(cls, value: list[int]) -> list[int]:
        if any(n < 2 for n in value):
            raise ValueError("every n must be >= 2")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("n_grid must be strictly ascending")
        return value

    @field_validator("p_list", mode="before")
    @classmethod
    def _parse_p(cls, value):
        try:
            return [SchattenIndex.parse(p).p for p in value]
        except DomainError as e:
            raise ValueError(str(e)) from e

    @field_validator("tolerances")
    @classmethod
    def _positive(cls, value: dict[str, float]) -> dict[str, float]:
        bad = [name for name, tol in value.items() if not tol > 0]
        if bad:
            raise ValueError(f"tolerances must be positive: {', '.join(bad)}")
        merged = dict(DEFAULT_TOLERANCES)
        merged.update(value)
        return merged

    @field_serializer("p_list")
    def _dump_p(self, value: list[float]) -> list[str]:
        return [SchattenIndex(p).label() for p in value]

    @property
    def indices(self) -> list[SchattenIndex]:
        return [SchattenIndex(p) for p in self.p_list]

    def seed_spec(self) -> SeedSpec:
        if self.master_seed is None:
            raise DomainError("plan has no master_seed")
        return SeedSpec(self.master_seed)

    def tolerance_band(self, n: int) -> float:
        """max(c1·n^{-1/2}, c2·n^{-2/3})."""
        return max(self.tolerances["bulk_c1"] / math.sqrt(n), self.tolerances["edge_c2"] * n ** (-2.0 / 3.0))

    def echo(self) -> dict:
        return self.model_dump(mode="json")


def _key_lines(text: str) -> dict[tuple[str, str], int]:
    lines, section = {}, None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
        elif section and ("=" in line or ":" in line) and not line.startswith(("#", ";")):
            key = line.replace(":", "=", 1).split("=", 1)[0].strip().lower()
            lines[(section, key)] = lineno
    return lines


def _header_line(text: str, section: str) -> int | None:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]") and line[1:-1].strip().lower() == section:
            return lineno
    return None


def _parse_error_line(e: configparser.Error) -> int | None:
    if getattr(e, "lineno", None) is not None:
        return e.lineno
    errors = getattr(e, "errors", None)
    if errors:
        return errors[0][0]
    return None


def parse_plan(text: str) -> ExperimentPlan:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise PlanError(str(e).splitlines()[0], line=_parse_error_line(e)) from e

    lines = _key_lines(text)
    for section in parser.sections():
        if section not in SECTIONS:
            line = _header_line(text, section)
            raise PlanError(f"unknown section [{section}]", line=line)
    if not parser.has_section("plan"):
        raise PlanError("missing [plan] section", field="plan")

    values: dict = {}
    for section, allowed in SECTIONS.items():
        if not parser.has_section(section):
            continue
        for key, raw in parser.items(section):
            if allowed is not None and key not in allowed:
                raise PlanError(f"unknown key {key!r} in [{section}]", line=lines.get((section, key)))
            if section == "tolerances":
                try:
                    values.setdefault("tolerances", {})[key] = float(raw)
                except ValueError as e:
                    raise PlanError(f"not a number: {raw!r}", line=lines.get((section, key))) from e
            elif key in LIST_FIELDS:
                values[key] = [item.strip() for item in raw.split(",") if item.strip()]
            else:
                values[key] = raw.strip()

    try:
        return ExperimentPlan.model_validate(values)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or "plan"
        raise PlanError(first["msg"], field=field) from e


def load_plan(path) -> ExperimentPlan:
    """Read and validate a plan file; defaults come from config."""
    text = Path(path).read_text(encoding="utf-8")
    plan = parse_plan(text)
    logger.info(f"Loaded plan {path}: k={plan.k} n_grid={plan.n_grid} trials={plan.trials}")
    return plan


def dump_plan(plan: ExperimentPlan, path=None) -> str:
    """Plan file text that load_plan reads back into an equal plan."""
    echo = plan.echo()
    out = ["[plan]", f"flavor = {echo['flavor']}", f"k = {plan.k}"]
    out.append("n_grid = " + ", ".join(str(n) for n in plan.n_grid))
    out.append("p_list = " + ", ".join(echo["p_list"]))
    out.append(f"trials = {plan.trials}")
    if plan.master_seed is not None:
        out.append(f"master_seed = {plan.master_seed}")
    out += ["", "[tolerances]"]
    out += [f"{name} = {tol!r}" for name, tol in sorted(plan.tolerances.items())]
    out += ["", "[estimator]", f"epsilon = {plan.epsilon!r}", f"restarts = {plan.restarts}", f"max_iters = {plan.max_iters}"]
    text = "\n".join(out) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
