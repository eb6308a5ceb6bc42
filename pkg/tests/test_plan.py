import math

import pytest

from errors import DomainError, PlanError
from experiments import ExperimentPlan, dump_plan, load_plan, parse_plan
from models import EnsembleFlavor

MINIMAL = """\
[plan]
flavor = gue
k = 4
n_grid = 200
"""


def test_minimal_plan_takes_defaults():
    plan = parse_plan(MINIMAL)
    assert plan.k == 4
    assert plan.n_grid == [200]
    assert plan.p_list == [2.0]
    assert plan.trials == 10
    assert plan.restarts == 8
    assert plan.epsilon == 0.3
    assert plan.tolerances == {"bulk_c1": 2.0, "edge_c2": 4.0}
    assert plan.master_seed is None
    with pytest.raises(DomainError):
        plan.seed_spec()


def test_full_plan():
    text = """\
[plan]
flavor = ginibre
k = 8
n_grid = 100, 200, 400
p_list = 2, 3.5, inf
trials = 3
master_seed = 42

[tolerances]
edge_c2 = 6
extra = 0.5

[estimator]
epsilon = 0.25
restarts = 4
max_iters = 50
"""
    plan = parse_plan(text)
    assert plan.flavor is EnsembleFlavor.GINIBRE
    assert plan.n_grid == [100, 200, 400]
    assert plan.p_list[:2] == [2.0, 3.5] and math.isinf(plan.p_list[2])
    assert [p.label() for p in plan.indices] == ["2", "3.5", "inf"]
    assert plan.tolerances == {"bulk_c1": 2.0, "edge_c2": 6.0, "extra": 0.5}
    assert plan.seed_spec().master_seed == 42
    assert (plan.epsilon, plan.restarts, plan.max_iters) == (0.25, 4, 50)


def test_round_trip(tmp_path):
    plan = ExperimentPlan(flavor="ge", k=5, n_grid=[50, 80], p_list=["inf", 1.5], trials=2, master_seed=2**63 + 5)
    path = tmp_path / "plan.ini"
    dump_plan(plan, path)
    assert load_plan(path) == plan
    assert dump_plan(load_plan(path)) == path.read_text(encoding="utf-8")


def test_tolerance_band():
    plan = parse_plan(MINIMAL)
    assert abs(plan.tolerance_band(1000) - 2.0 / math.sqrt(1000)) < 1e-15
    assert abs(plan.tolerance_band(8) - 1.0) < 1e-15


@pytest.mark.parametrize("line,value", [
    ("k = 1", "k"),
    ("n_grid = 200, 100", "n_grid"),
    ("n_grid = 1", "n_grid"),
    ("p_list = 0.5", "p_list"),
    ("flavor = goe", "flavor"),
    ("trials = 0", "trials"),
])
def test_field_errors(line, value):
    key = line.split("=")[0].strip()
    lines = [row for row in MINIMAL.splitlines() if not row.startswith(key)]
    with pytest.raises(PlanError) as info:
        parse_plan("\n".join(lines + [line]) + "\n")
    assert info.value.field == value
    assert str(info.value).startswith(f"{value}: ")


def test_estimator_field_errors():
    with pytest.raises(PlanError) as info:
        parse_plan(MINIMAL + "[estimator]\nrestarts = 2\n")
    assert info.value.field == "restarts"
    with pytest.raises(PlanError) as info:
        parse_plan(MINIMAL + "[tolerances]\nbulk_c1 = -1\n")
    assert info.value.field == "tolerances"


def test_syntax_error_reports_line():
    with pytest.raises(PlanError) as info:
        parse_plan("[plan]\nk = 4\nthis line has no delimiter\n")
    assert info.value.line == 3
    assert str(info.value).startswith("line 3: ")


def test_unknown_keys_and_sections():
    with pytest.raises(PlanError) as info:
        parse_plan(MINIMAL + "colour = red\n")
    assert info.value.line == 5
    with pytest.raises(PlanError) as info:
        parse_plan(MINIMAL + "\n[output]\nformat = csv\n")
    assert info.value.line == 6
    with pytest.raises(PlanError) as info:
        parse_plan("[estimator]\nrestarts = 4\n")
    assert info.value.field == "plan"
    with pytest.raises(PlanError) as info:
        parse_plan(MINIMAL + "[tolerances]\nbulk_c1 = wide\n")
    assert info.value.line == 6
