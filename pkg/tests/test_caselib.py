import numpy as np
import pytest
import yaml

from droopalloc.caselib import (LINE_DATA, ScenarioId, all_ids, builtin, bundled_text,
                                load_builtin, load_case, resolve, serialize)
from droopalloc.errors import CaseValidationError, InvalidArgumentError

MINIMAL = """
schema_version: 1
buses: {count: 2, slack: 2}
lines: [{from: 1, to: 2, conductance: 0.0, susceptance: -5.0}]
devices: [{bus: 1, kind: gfm, p_star: 0.5, q_star: 0.1}]
"""

# tabulated admittances, conductance and susceptance per line (1-2, 1-3, 2-3)
TABLES = {
    "base": [(0.0917, -3.0275), (3.4910, -12.7422), (3.4910, -12.7422)],
    "low_impedance": [(0.1387, -4.1620), (4.717, -16.5093), (4.717, -16.5093)],
    "high_impedance": [(0.0736, -2.3787), (2.9626, -10.2552), (2.9626, -10.2552)],
}


def test_minimal_document_loads_with_defaults():
    case = load_case(MINIMAL)
    assert case.n_buses == 2 and case.slack_bus == 2
    assert case.lines[0].y == complex(0.0, -5.0)
    assert case.devices[0].params.p_star == 0.5
    assert case.unified_devices() == []
    assert case.simulation.horizon == 5.0


@pytest.mark.parametrize("name", TABLES)
def test_line_data(name):
    case = load_builtin(name)
    assert [(ln.from_bus, ln.to_bus) for ln in case.lines] == [(1, 2), (1, 3), (2, 3)]
    assert [(ln.y.real, ln.y.imag) for ln in case.lines] == TABLES[name]
    assert list(LINE_DATA[name]) == TABLES[name]


def test_setpoints_bounds_and_nominal_gains():
    case = load_builtin("base")
    assert [(d.params.p_star, d.params.q_star) for d in case.devices] == [(0.8, 0.25), (0.2, 0.25)]
    lo, hi = case.bounds()
    assert lo.tolist() == [0.0, 0.0] and hi.tolist() == [1200.0, 1200.0]
    assert case.nominal_gains().tolist() == [10.0, 10.0]
    assert case.slack_bus == 3


def test_mixed_scenarios_place_devices_in_order():
    case = load_builtin("high_impedance/gfm-gfl")
    assert [d.kind for d in case.devices] == ["gfm", "gfl"]
    assert case.optimization is None or not case.unified_devices()


def _reactance(y):
    return (1 / y).imag


def test_alternate_impedance_sets_scale_the_reactances():
    base = load_builtin("base").lines
    for name, sign in (("low_impedance", -1), ("high_impedance", 1)):
        other = load_builtin(name).lines
        for a, b in zip(base, other):
            change = (_reactance(b.y) - _reactance(a.y)) / _reactance(a.y)
            assert sign * change > 0.2


@pytest.mark.parametrize("sid", [str(s) for s in all_ids()])
def test_round_trip_and_bundled_files(sid):
    case = load_builtin(sid)
    text = serialize(case)
    assert serialize(load_case(text)) == text
    assert bundled_text(sid) == text
    assert resolve(sid) == case


def test_scenario_ids():
    assert ScenarioId.parse("base") == ScenarioId("base", "unified-unified")
    assert str(ScenarioId.parse("low_impedance/gfl-gfm")) == "low_impedance/gfl-gfm"
    with pytest.raises(InvalidArgumentError):
        ScenarioId.parse("medium")
    with pytest.raises(InvalidArgumentError):
        ScenarioId.parse("base/gfl")
    assert len(all_ids()) == 15


def _doc(**changes):
    doc = builtin("base")
    for path, value in changes.items():
        node = doc
        keys = path.split("__")
        for k in keys[:-1]:
            node = node[int(k)] if k.isdigit() else node[k]
        last = keys[-1]
        if value is KeyError:
            del node[last]
        else:
            node[int(last) if last.isdigit() else last] = value
    return yaml.safe_dump(doc)


@pytest.mark.parametrize("change,path", [
    ({"devices__1__kind": "battery"}, "devices[1].kind"),
    ({"lines__0__conductance": "high"}, "lines[0].conductance"),
    ({"buses__count": 0}, "buses.count"),
    ({"devices__0__bus": KeyError}, "devices[0]"),
    ({"optimization__epsilon": -1.0}, "optimization.epsilon"),
    ({"devices__0__params": {"L_f": 0.1, "bogus": 1.0}}, "devices[0].params"),
])
def test_errors_name_the_offending_entry(change, path):
    with pytest.raises(CaseValidationError) as info:
        load_case(_doc(**change))
    assert info.value.path.startswith(path)


def test_weight_matrices_must_be_positive_definite():
    doc = builtin("base")
    doc["optimization"]["weights"] = {"Q": (-np.eye(24)).tolist()}
    with pytest.raises(CaseValidationError, match="Q"):
        load_case(yaml.safe_dump(doc))
    doc["optimization"]["weights"] = {"S": np.eye(3).tolist()}
    with pytest.raises(CaseValidationError, match="S"):
        load_case(yaml.safe_dump(doc))


def test_optimization_block_needs_unified_devices():
    doc = builtin("base/gfl-gfm")
    doc["optimization"] = builtin("base")["optimization"]
    with pytest.raises(CaseValidationError, match="optimization"):
        load_case(yaml.safe_dump(doc))


def test_unreadable_text():
    with pytest.raises(CaseValidationError):
        load_case("devices: [unclosed")
    with pytest.raises(CaseValidationError):
        load_case("- just a list")
