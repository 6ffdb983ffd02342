import json
import math
from pathlib import Path

import numpy as np
import pytest

from qcopt.core import (
    ModelProfile,
    RoutingInstance,
    Section,
    estimated_cost,
    estimated_latency,
    estimated_output_tokens,
    fits,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    plan_from_choices,
    save_instance,
    table1_profile,
)
from qcopt.errors import ConfigurationError, ScoreRangeError, UnknownKeyError, ValidationError


def model(**kw):
    base = dict(id="m", input_cost_per_token=0.0, output_cost_per_token=0.0)
    base.update(kw)
    return ModelProfile(**base)


def section(n_in, p=1, model_id="m"):
    return Section(id="s", input_tokens_per_model={model_id: n_in}, summary_sentences=p)


@pytest.mark.parametrize("p, avg, expected", [(5, 20, 100), (1, 1, 1), (3, 17.5, 53)])
def test_output_tokens(p, avg, expected):
    assert estimated_output_tokens(section(0, p), model(avg_tokens_per_sentence=avg)) == expected


def test_cost_table1_rates():
    m = table1_profile("gpt-3.5-turbo-4k", avg_tokens_per_sentence=100)
    assert estimated_cost(section(1000, 5, m.id), m) == pytest.approx(0.0025, abs=1e-12)


def test_cost_edge_cases():
    assert estimated_cost(section(1234, 3), model()) == 0.0
    assert estimated_cost(section(0, 1), model(fixed_cost=0.01)) == pytest.approx(0.01)


def test_latency_examples():
    m = model(latency_per_token=0.001, avg_tokens_per_sentence=100)
    assert estimated_latency(section(1000, 5), m) == pytest.approx(1.5)
    assert estimated_latency(section(1000, 5), model()) == 0.0
    assert estimated_latency(section(0, 1), model(latency_per_token=2.0, avg_tokens_per_sentence=1)) == 2.0


def test_cost_monotone_in_every_input():
    base = dict(input_cost_per_token=0.001, output_cost_per_token=0.002, fixed_cost=0.01)
    c0 = estimated_cost(section(100, 2), model(**base))
    for key in base:
        bumped = dict(base, **{key: base[key] * 2})
        assert estimated_cost(section(100, 2), model(**bumped)) >= c0
    assert estimated_cost(section(101, 2), model(**base)) >= c0
    assert estimated_cost(section(100, 3), model(**base)) >= c0


def test_missing_token_length_names_section_and_model():
    with pytest.raises(ConfigurationError, match="'s'.*'other'"):
        estimated_cost(section(10), model(id="other"))


@pytest.mark.parametrize(
    "kw",
    [
        {"input_cost_per_token": -1.0},
        {"latency_per_token": math.inf},
        {"avg_tokens_per_sentence": 0},
        {"fixed_cost": float("nan")},
    ],
)
def test_model_profile_rejects_bad_fields(kw):
    with pytest.raises(ValidationError):
        model(**kw)


def test_section_rejects_bad_fields():
    with pytest.raises(ValidationError):
        Section("s", {"m": -1})
    with pytest.raises(ValidationError):
        Section("s", {"m": 1}, summary_sentences=0)


def small_instance(**kw):
    models = [model(id="a", input_cost_per_token=1.0), model(id="b", input_cost_per_token=2.0)]
    sections = [Section(f"s{j}", {"a": 1, "b": 1}) for j in range(2)]
    args = dict(models=models, sections=sections, scores=[[0.1, 0.2], [0.3, 0.4]], budget=10.0)
    args.update(kw)
    return RoutingInstance(**args)


def test_instance_validation():
    with pytest.raises(ScoreRangeError) as exc:
        small_instance(scores=[[0.1, 1.2], [0.3, 0.4]])
    assert exc.value.section_id == "s0" and exc.value.model_id == "b"
    with pytest.raises(ValidationError):
        small_instance(budget=None)
    with pytest.raises(ValueError):
        small_instance(scores=[[0.1, 0.2, 0.3]])
    inst = small_instance()
    with pytest.raises(ValueError):
        inst.scores[0, 0] = 0.5


def test_plan_totals_and_violation():
    inst = small_instance(budget=3.0)
    plan = plan_from_choices(inst, [1, 1])
    assert plan.assignment == {"s0": "b", "s1": "b"}
    assert plan.total_cost == 4.0
    assert plan.objective == pytest.approx(0.6)
    assert plan.budget_violation_fraction == pytest.approx(1 / 3)
    assert plan_from_choices(inst, [0, 0]).budget_violation_fraction == 0.0
    partial = plan_from_choices(inst, [0, None])
    assert partial.unassigned_sections == ["s1"] and not partial.feasible


def test_fits_tolerance():
    assert fits(1.0 + 1e-12, 1.0)
    assert not fits(1.0 + 1e-6, 1.0)


def test_json_roundtrip(tmp_path):
    inst = small_instance(latency_sla=3.0)
    path = tmp_path / "inst.json"
    save_instance(inst, path)
    back = load_instance(path)
    assert instance_to_dict(back) == instance_to_dict(inst)
    np.testing.assert_array_equal(back.costs, inst.costs)


def test_json_rejects_unknown_keys():
    data = instance_to_dict(small_instance())
    data["extra"] = 1
    with pytest.raises(UnknownKeyError):
        instance_from_dict(data)
    data = instance_to_dict(small_instance())
    data["models"][0]["price"] = 1
    with pytest.raises(UnknownKeyError):
        instance_from_dict(data)


def test_json_text_sections_are_tokenized(vocab):
    data = json.loads((Path(__file__).parent / "data" / "small_instance.json").read_text())
    inst = instance_from_dict(data)
    text = data["sections"][2]["text"]
    assert inst.sections[2].input_tokens_per_model == {"cheap": vocab.count(text), "strong": vocab.count(text)}


def test_json_missing_length_without_text():
    data = instance_to_dict(small_instance())
    del data["sections"][0]["input_tokens_per_model"]["b"]
    with pytest.raises(ConfigurationError):
        instance_from_dict(data)
