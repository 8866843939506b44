import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from naive_reference import adjacency_dict, naive_cooc_weights
from tagwalk.cooc import (CoocGraph, build_from_posts, build_from_traces,
                          merge)
from tagwalk.errors import ContractError, ParameterError
from tagwalk.substrate import generate_watts_strogatz
from tagwalk.walker import PowerLawLength, simulate_walks


def weight_map(g: CoocGraph) -> dict:
    return {(int(i), int(j)): int(w)
            for i, j, w in zip(g.src, g.dst, g.weights)}


# ---------------------------------------------------------------------------
# Projection from traces
# ---------------------------------------------------------------------------

def test_single_walk_clique():
    g = build_from_traces([[0, 1, 2]])
    assert g.node_count == 3
    assert weight_map(g) == {(0, 1): 1, (0, 2): 1, (1, 2): 1}


def test_revisits_count_once():
    g = build_from_traces([[0, 1, 0, 1, 2, 1]])
    assert weight_map(g) == {(0, 1): 1, (0, 2): 1, (1, 2): 1}


def test_shared_pair_accumulates():
    g = build_from_traces([[0, 1, 2], [2, 1, 3]])
    assert weight_map(g) == {(0, 1): 1, (0, 2): 1, (1, 2): 2,
                             (1, 3): 1, (2, 3): 1}


def test_zero_step_walks_add_no_edges():
    g = build_from_traces([[4], [4], [4]], node_count=5)
    assert g.edge_count == 0
    assert g.node_count == 1          # vocabulary is just the visited node


def test_count_origin_false_drops_origin():
    ens_like = [[0, 1, 2], [0, 2, 3]]
    g = build_from_traces(ens_like, count_origin=False)
    want = naive_cooc_weights(ens_like, origin=0, count_origin=False)
    assert weight_map(g) == want
    assert 0 not in set(g.node_ids.tolist())


def test_build_from_walk_ensemble_matches_sequences():
    graph = generate_watts_strogatz(60, 4, 0.2, seed=4)
    ens = simulate_walks(graph, 0, 150, PowerLawLength(2.5, 1, 25), seed=9)
    direct = build_from_traces(ens)
    via_lists = build_from_traces([ens.trace(w).tolist()
                                   for w in range(ens.walk_count)])
    assert np.array_equal(direct.node_ids, via_lists.node_ids)
    assert weight_map(direct) == weight_map(via_lists)


@given(st.lists(st.lists(st.integers(0, 12), min_size=1, max_size=8),
                max_size=25), st.booleans())
@settings(max_examples=80, deadline=None)
def test_projection_matches_naive_counting(traces, count_origin):
    g = build_from_traces(traces, count_origin=count_origin)
    want = naive_cooc_weights(traces, origin=traces[0][0] if traces else None,
                              count_origin=count_origin)
    assert weight_map(g) == want
    g.validate()
    # total weight identity: sum over walks of C(distinct, 2)
    assert g.total_weight == sum(want.values())


def test_empty_trace_rejected():
    with pytest.raises(ParameterError):
        build_from_traces([[0, 1], []])


# ---------------------------------------------------------------------------
# Projection from posts
# ---------------------------------------------------------------------------

def test_single_post_triangle():
    g = build_from_posts([{"t", "a", "b", "c"}], focus_tag="t")
    assert g.labels == ("a", "b", "c")
    assert weight_map(g) == {(0, 1): 1, (0, 2): 1, (1, 2): 1}


def test_posts_share_pair():
    g = build_from_posts([{"t", "a", "b"}, {"t", "b", "a"}], focus_tag="t")
    assert weight_map(g) == {(0, 1): 2}


def test_post_missing_focus_rejected():
    with pytest.raises(ContractError):
        build_from_posts([{"t", "a"}, {"a", "b"}], focus_tag="t")


def test_focus_only_posts_make_empty_graph():
    g = build_from_posts([{"t"}, {"t"}], focus_tag="t")
    assert g.node_count == 0 and g.edge_count == 0


# ---------------------------------------------------------------------------
# Merge
# ---------------------------------------------------------------------------

def test_merge_equals_joint_build():
    t1 = [[0, 1, 2], [1, 3]]
    t2 = [[2, 3, 4], [0, 1]]
    merged = merge(build_from_traces(t1), build_from_traces(t2))
    joint = build_from_traces(t1 + t2)
    assert np.array_equal(merged.node_ids, joint.node_ids)
    assert weight_map(merged) == weight_map(joint)


def test_merge_with_empty_is_identity():
    g = build_from_traces([[0, 1, 2]])
    empty = build_from_traces([[5]], node_count=6)
    merged = merge(g, empty)
    assert set(merged.node_ids.tolist()) == {0, 1, 2, 5}
    assert weight_map(merged) == weight_map(g)


def test_merge_label_compatibility():
    a = build_from_posts([{"t", "x", "y"}], "t")
    b = build_from_posts([{"t", "x", "y"}], "t")
    c = build_from_posts([{"t", "x", "z"}], "t")
    merged = merge(a, b)
    assert weight_map(merged) == {(0, 1): 2}
    with pytest.raises(ParameterError):
        merge(a, c)
    with pytest.raises(ParameterError):
        merge(a, build_from_traces([[0, 1]]))


@given(st.lists(st.lists(st.integers(0, 9), min_size=1, max_size=6),
                max_size=12),
       st.lists(st.lists(st.integers(0, 9), min_size=1, max_size=6),
                max_size=12))
@settings(max_examples=40, deadline=None)
def test_merge_is_concatenation(t1, t2):
    merged = merge(build_from_traces(t1), build_from_traces(t2))
    joint = build_from_traces(t1 + t2)
    assert np.array_equal(merged.node_ids, joint.node_ids)
    assert weight_map(merged) == weight_map(joint)


# ---------------------------------------------------------------------------
# Degrees, strengths, validation
# ---------------------------------------------------------------------------

def test_degrees_and_strengths_match_adjacency():
    traces = [[0, 1, 2], [1, 2, 3], [0, 2]]
    g = build_from_traces(traces)
    adj = adjacency_dict(naive_cooc_weights(traces))
    for pos, node in enumerate(g.node_ids.tolist()):
        assert g.degrees()[pos] == len(adj.get(node, {}))
        assert g.strengths()[pos] == sum(adj.get(node, {}).values())


def test_validate_rejects_corrupt_graphs():
    g = build_from_traces([[0, 1, 2]])
    bad = CoocGraph(node_ids=g.node_ids, src=g.src, dst=g.dst,
                    weights=np.asarray([1, 0, 1], dtype=np.int64),
                    labels=None)
    with pytest.raises(ContractError):
        bad.validate()
    swapped = CoocGraph(node_ids=g.node_ids, src=g.dst, dst=g.src,
                        weights=g.weights, labels=None)
    with pytest.raises(ContractError):
        swapped.validate()


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def test_edge_list_round_trip(tmp_path):
    g = build_from_traces([[0, 1, 2], [1, 2, 7], [2, 7]])
    path = tmp_path / "cooc.edges"
    g.write_edge_list(path)
    back = CoocGraph.read_edge_list(path)
    assert np.array_equal(back.node_ids, g.node_ids)
    assert weight_map(back) == weight_map(g)
    header = path.read_text().splitlines()[0]
    assert header == (f"# nodes={g.node_count} edges={g.edge_count} "
                      f"total_weight={g.total_weight}")


def test_labels_file(tmp_path):
    g = build_from_posts([{"t", "b", "a"}], "t")
    path = tmp_path / "labels.tsv"
    g.write_labels(path)
    assert path.read_text() == "id\tlabel\n0\ta\n1\tb\n"
    unlabeled = build_from_traces([[0, 1]])
    with pytest.raises(ParameterError):
        unlabeled.write_labels(tmp_path / "nope.tsv")


def test_read_edge_list_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.edges"
    path.write_text("# nodes=1 edges=1 total_weight=1\n0\t1\t1\n")
    with pytest.raises(ContractError):
        CoocGraph.read_edge_list(path)
