import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levyhunt import Atoms, IsotropicStable, LevyTriplet, LineDensity, PowerTerm, ProcessSpec, RadialDensity
from levyhunt import validate_triplet
from levyhunt.io import SpecErrors, dumps, load_spec, parse_spec, serialize, write_atomic

DIAGONAL_SPEC = """{
  "dim": 2,
  "a": [1, -1],
  "Q": [[2, 2], [2, 2]],
  "mu": []
}"""


def test_parse_diagonal_example():
    spec = parse_spec(DIAGONAL_SPEC)
    np.testing.assert_array_equal(spec.triplet.a, [1.0, -1.0])
    np.testing.assert_array_equal(spec.triplet.Q, [[2.0, 2.0], [2.0, 2.0]])
    assert not any(spec.assertions.values())


def test_empty_mu_is_gaussian_only():
    spec = parse_spec('{"dim": 1, "a": [0], "Q": [[1]], "mu": []}')
    assert spec.triplet.mu.is_empty


def test_non_symmetric_q_names_entry():
    with pytest.raises(SpecErrors) as e:
        parse_spec('{"dim": 2, "a": [0, 0],\n "Q": [[1, 0.5], [0, 1]]}')
    (err,) = e.value.errors
    assert err.path == "Q[0][1]" and err.line == 2


@pytest.mark.parametrize(
    "text",
    [
        '{"dim": 1, "a": [0], "extra": 1}',
        '{"dim": 2, "a": [0]}',
        '{"dim": 1, "a": [0], "Q": [[-1]]}',
        '{"dim": 1, "a": [0], "mu": [{"kind": "atoms", "locations": [[0]], "weights": [1]}]}',
        '{"dim": 1, "a": [0], "mu": [{"kind": "lineDensity", "direction": [1], "positive": [{"coef": 1, "alpha": 2.5}]}]}',
        '{"dim": 1, "a": [0], "mu": [{"kind": "isotropicStable", "alpha": 2.0, "intensity": 1}]}',
        '{"dim": 1, "a": [0], "assertions": {"isHunt": true}}',
        '{"dim": 1, "a": [0]',
    ],
)
def test_invalid_specs_rejected(text):
    with pytest.raises(SpecErrors) as e:
        parse_spec(text)
    assert e.value.errors and all(err.message for err in e.value.errors)


def test_validate_reports_each_problem():
    t = LevyTriplet([0.0, 0.0], [[1.0, 0.0], [0.0, -1.0]], [Atoms([[0.0, 0.0]], [-1.0])])
    rep = validate_triplet(t)
    names = {c.name for c in rep.failures()}
    assert "Q positive semidefinite" in names
    assert any("weights > 0" in n for n in names) and any("origin" in n for n in names)


finite = st.floats(-5, 5, allow_nan=False).map(lambda x: round(x, 6))


@st.composite
def specs(draw):
    n = draw(st.integers(1, 3))
    a = draw(st.lists(finite, min_size=n, max_size=n))
    A = np.array(draw(st.lists(finite, min_size=n * n, max_size=n * n))).reshape(n, n)
    comps = []
    if draw(st.booleans()):
        k = draw(st.integers(1, 3))
        loc = np.array(draw(st.lists(finite.filter(lambda x: abs(x) > 0.01), min_size=k * n, max_size=k * n)))
        comps.append(Atoms(loc.reshape(k, n), draw(st.lists(st.floats(0.1, 3), min_size=k, max_size=k))))
    if draw(st.booleans()):
        d = np.zeros(n)
        d[draw(st.integers(0, n - 1))] = 1.0
        terms = [PowerTerm(draw(st.floats(0.1, 2)), draw(st.floats(0.05, 1.95)), 0.0, draw(st.sampled_from([1.0, math.inf])))]
        comps.append(LineDensity(d, RadialDensity(terms)))
    if draw(st.booleans()):
        comps.append(IsotropicStable(draw(st.floats(0.1, 1.9)), draw(st.floats(0.1, 2)), n, rmin=draw(st.sampled_from([0.0, 0.5]))))
    flags = {"hasResolventDensities": draw(st.booleans())}
    return ProcessSpec(LevyTriplet(a, A @ A.T, comps), flags)


@settings(max_examples=60, deadline=None)
@given(specs())
def test_round_trip(spec):
    text = serialize(spec)
    back = parse_spec(text)
    assert back.triplet.equals(spec.triplet)
    assert back.assertions == spec.assertions
    assert serialize(back) == text


def test_dumps_non_finite_and_deterministic():
    obj = {"x": math.inf, "y": [math.nan, 0.1], "z": np.float64(1 / 3)}
    text = dumps(obj)
    assert json.loads(text) == {"x": "inf", "y": ["nan", 0.1], "z": 1 / 3}
    assert dumps(obj) == text


def test_write_atomic_and_load(tmp_path):
    p = tmp_path / "spec.json"
    write_atomic(p, DIAGONAL_SPEC)
    assert load_spec(p).triplet.dim == 2
    assert [f.name for f in tmp_path.iterdir()] == ["spec.json"]
