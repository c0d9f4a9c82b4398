import json

import numpy as np
import pytest

from tugofwar import (
    GameGraph,
    GameSpec,
    build_segment,
    build_star,
    spec_from_json,
    spec_to_json,
    validate,
)
from tugofwar.graphs import SchemaError


def test_build_segment_smallest():
    spec = build_segment(1, 0, 10, 1)
    g = spec.graph
    assert g.num_nodes == 3
    assert g.interior == (1,)
    assert g.terminal == (0, 2)
    assert g.payoffs[0] == 0 and g.payoffs[2] == 10


def test_build_segment_edges():
    g = build_segment(2, 0, 30, 1).graph
    assert g.num_nodes == 4
    assert g.neighbors == ((1,), (0, 2), (1, 3), (2,))


def test_build_segment_symmetric():
    g = build_segment(3, 0, 0, 1).graph
    assert g.num_nodes == 5
    assert g.payoffs[0] == g.payoffs[4] == 0
    assert g.interior == (1, 2, 3)


@pytest.mark.parametrize("n,eps", [(0, 1.0), (-3, 1.0), (2, 0.0), (2, -1.0)])
def test_build_segment_rejects_bad_arguments(n, eps):
    with pytest.raises(ValueError):
        build_segment(n, 0, 1, eps)


def test_build_star_two_arms_is_a_segment():
    star = build_star([1, 1], [0, 10], 1).graph
    # relabel along the path from the first terminal; must match a segment
    segment = build_segment(1, 0, 10, 1).graph
    start = star.terminal[0]
    order = [start]
    prev = None
    while True:
        nxt = [x for x in star.neighbors[order[-1]] if x != prev]
        if not nxt:
            break
        prev = order[-1]
        order.append(nxt[0])
    relabel = {old: new for new, old in enumerate(order)}
    edges = {tuple(sorted((relabel[i], relabel[j]))) for i in range(3) for j in star.neighbors[i]}
    seg_edges = {tuple(sorted((i, j))) for i in range(3) for j in segment.neighbors[i]}
    assert edges == seg_edges
    assert sorted(star.payoffs[t] for t in star.terminal) == [0, 10]


def test_build_star_y_graph():
    spec = build_star([2, 2, 2], [0, 0, 6], 1)
    g = spec.graph
    assert g.num_nodes == 7
    assert len(g.neighbors[0]) == 3
    assert len(g.terminal) == 3
    assert validate(spec) == []


def test_build_star_minimal_y():
    g = build_star([1, 1, 1], [1.5, -2.0, 3.0], 0.5).graph
    assert g.interior == (0,)
    assert g.neighbors[0] == (1, 2, 3)
    assert [g.payoffs[t] for t in g.terminal] == [1.5, -2.0, 3.0]


@pytest.mark.parametrize(
    "lengths,payoffs,eps",
    [([1], [0], 1.0), ([1, 2], [0], 1.0), ([1, 0], [0, 1], 1.0), ([1, 1], [0, 1], 0.0)],
)
def test_build_star_rejects_bad_arguments(lengths, payoffs, eps):
    with pytest.raises(ValueError):
        build_star(lengths, payoffs, eps)


def test_validate_clean_segment():
    assert validate(build_segment(4, -1, 2, 0.5)) == []


@pytest.mark.parametrize("n", [1, 7, 33, 10_000])
def test_validate_segments_across_sizes(n):
    assert validate(build_segment(n, 0.0, 1.0, 1.0)) == []


def test_validate_reports_unreachable_interior():
    g = GameGraph.from_edges(4, [(0, 1), (2, 3)], {0: 1.0})
    spec = GameSpec(g, 1.0)
    msgs = validate(spec)
    assert any("unreachable" in m for m in msgs)


def test_validate_reports_nonpositive_eps():
    spec = GameSpec(build_segment(1, 0, 1, 1).graph, 0.0)
    assert "eps must be positive" in validate(spec)


def test_json_round_trip():
    spec = build_star([2, 1, 3], [0.5, -1.0, 4.0], 0.25)
    text = json.dumps(spec_to_json(spec))
    back = spec_from_json(json.loads(text))
    assert back == spec


@pytest.mark.parametrize(
    "obj",
    [
        [],
        {"epsilon": 1, "nodes": []},
        {"epsilon": "x", "nodes": [], "edges": []},
        {"epsilon": 1, "nodes": [{"id": 0, "terminal": True}], "edges": []},
        {"epsilon": 1, "nodes": [{"id": 0, "terminal": False, "payoff": 1}], "edges": []},
        {"epsilon": 1, "nodes": [{"id": 1, "terminal": False}], "edges": []},
        {"epsilon": 1, "nodes": [{"id": 0, "terminal": False}], "edges": [[0, 3]]},
    ],
)
def test_schema_errors(obj):
    with pytest.raises(SchemaError):
        spec_from_json(obj)


def test_graphs_are_immutable_values():
    a = build_segment(2, 0, 1, 1)
    b = build_segment(2, 0, 1, 1)
    assert a == b
    assert hash(a.graph) == hash(b.graph)
    with pytest.raises(AttributeError):
        a.eps = 2.0


def test_payoff_array_marks_interior_with_nan():
    arr = build_segment(2, 3, 4, 1).graph.payoff_array()
    assert arr[0] == 3 and arr[3] == 4
    assert np.isnan(arr[1]) and np.isnan(arr[2])
