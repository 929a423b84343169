import json

import numpy as np
import pytest

from aoif.config import load_system, parse_service, parse_system, system_to_dict
from aoif.errors import ConfigError
from aoif.phase_type import erlang, exponential


def test_service_kinds():
    assert parse_service({"type": "erlang", "mean": 1.0, "order": 3}) == erlang(1.0, 3)
    assert parse_service({"type": "exponential", "rate": 2.0}) == exponential(2.0)
    assert parse_service({"type": "fit", "mean": 0.5, "scv": 0.25}) == erlang(0.5, 4)
    assert parse_service({"type": "hyperexp_balanced", "mean": 1.0, "scv": 2.0}).order == 2
    ph = parse_service({"type": "ph", "sigma": [1, 0], "S": [[-2, 1], [0, -3]]})
    assert ph.S.tolist() == [[-2, 1], [0, -3]]


@pytest.mark.parametrize("obj,path", [
    ({"type": "gamma"}, "service.type"),
    ({"type": "erlang", "mean": 1.0}, "service.order"),
    ({"type": "erlang", "mean": 1.0, "order": 1.5}, "service.order"),
    ({"type": "fit", "mean": "x", "scv": 1}, "service.mean"),
    ({"mean": 1.0}, "service.type"),
])
def test_service_errors_carry_path(obj, path):
    with pytest.raises(ConfigError) as info:
        parse_service(obj)
    assert info.value.path == path


def _two_sources(**extra):
    obj = {"sources": [{"lambda": 1, "service": {"type": "exponential", "rate": 2}},
                       {"lambda": 2, "service": {"type": "exponential", "rate": 2},
                        "error_prob": 0.1, "retx_prob": 0.5}]}
    obj.update(extra)
    return obj


def test_defaults():
    s = parse_system(_two_sources())
    assert np.array_equal(s.preemption, np.zeros((2, 2)))
    assert s.tagged == 1
    assert s.sources[1].error_prob == 0.1


def test_preset_and_matrix():
    assert np.array_equal(parse_system(_two_sources(preemption={"preset": "global"})).preemption, np.ones((2, 2)))
    P = [[0.5, 0.2], [0.0, 1.0]]
    assert parse_system(_two_sources(preemption=P)).preemption.tolist() == P


@pytest.mark.parametrize("obj,path", [
    ({}, "sources"),
    ({"sources": []}, "sources"),
    ({"sources": [{"lambda": 1}]}, "sources[0].service"),
    ({"sources": [{"lambda": -1, "service": {"type": "exponential", "rate": 1}}]}, "sources[0].lambda"),
    (_two_sources(preemption={"preset": "nope"}), "preemption.preset"),
    (_two_sources(preemption=[[1, 0]]), "preemption"),
    (_two_sources(tagged=3), "tagged"),
])
def test_system_errors_carry_path(obj, path):
    with pytest.raises(ConfigError) as info:
        parse_system(obj)
    assert info.value.path == path


def test_round_trip(tmp_path):
    s = parse_system(_two_sources(preemption={"preset": "prioritized"}, tagged=2))
    f = tmp_path / "sys.json"
    f.write_text(json.dumps(system_to_dict(s)))
    assert load_system(f) == s


def test_unreadable_and_malformed(tmp_path):
    with pytest.raises(ConfigError):
        load_system(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_system(bad)
