import io

import numpy as np
import pytest

from hopdist.errors import ParseError
from hopdist.graph import build_graph, parse_edge_list, write_edge_list

from conftest import gnp_graph, needs_facebook, facebook_path


def test_two_edge_path():
    g, rep = parse_edge_list(["0 1", "1 2"])
    assert g.node_count == 3
    assert g.edge_count == 2
    assert g.neighbors(1).tolist() == [0, 2]
    assert rep.edges_kept == 2


def test_dedup_and_self_loop_rules():
    g, rep = parse_edge_list(["a b", "b a", "a a"])
    assert g.edge_count == 1
    assert rep.duplicates_dropped == 1
    assert rep.self_loops_dropped == 1
    assert rep.edges_kept == 1


def test_comments_and_blank_lines_ignored():
    g, rep = parse_edge_list(["# header", "", "0 1", "   ", "# trailing"])
    assert g.edge_count == 1
    assert rep.lines_read == 5
    assert rep.edges_kept + rep.self_loops_dropped + rep.duplicates_dropped <= rep.lines_read


def test_malformed_line_reports_line_number():
    with pytest.raises(ParseError, match="line 2"):
        parse_edge_list(["0 1", "0 1 2"])
    with pytest.raises(ParseError, match="line 1"):
        parse_edge_list(["justone"])


def test_empty_graph_is_an_error():
    with pytest.raises(ParseError):
        parse_edge_list([])
    with pytest.raises(ParseError):
        parse_edge_list(["# nothing", ""])


def test_first_seen_label_order():
    g, _ = parse_edge_list(["b a", "c b"])
    assert g.labels == ["b", "a", "c"]
    assert g.index_of("c") == 2


def test_isolated_node_via_self_loop_only():
    g, _ = parse_edge_list(["0 1", "2 2"])
    assert g.node_count == 3
    assert g.neighbors(2).tolist() == []
    assert g.degree(2) == 0


def test_degree_examples():
    path, _ = parse_edge_list(["0 1", "1 2"])
    assert path.degree(0) == 1
    k4 = build_graph(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
    assert all(k4.degree(v) == 3 for v in range(4))


def test_neighbor_and_degree_index_errors():
    g, _ = parse_edge_list(["0 1"])
    with pytest.raises(IndexError):
        g.neighbors(2)
    with pytest.raises(IndexError):
        g.degree(-1)


def test_degree_sum_is_twice_edge_count_on_random_graph():
    g = gnp_graph(50, 0.1, seed=7)
    # independent count: degrees summed one by one against the stored m
    total = sum(g.degree(v) for v in range(g.node_count))
    assert total == 2 * g.edge_count


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_adjacency_invariants_on_random_graphs(seed):
    g = gnp_graph(60, 0.08, seed=seed)
    for v in range(g.node_count):
        row = g.neighbors(v)
        assert (np.diff(row) > 0).all()  # sorted strictly ascending
        assert v not in row
        for w in row:
            assert v in g.neighbors(int(w))  # symmetry
    assert int(g.degrees().sum()) == 2 * g.edge_count


def test_edge_list_round_trip():
    g = gnp_graph(40, 0.12, seed=3)
    buf = io.StringIO()
    m = write_edge_list(g, buf)
    assert m == g.edge_count
    buf.seek(0)
    g2, _ = parse_edge_list(buf)
    assert g2.node_count == g.node_count
    assert g2.edge_count == g.edge_count
    assert sorted(g.degrees().tolist()) == sorted(g2.degrees().tolist())


def test_build_graph_matches_parser():
    edges = [(0, 1), (1, 2), (2, 0), (2, 3)]
    g1 = build_graph(4, edges)
    g2, _ = parse_edge_list(f"{a} {b}" for a, b in edges)
    assert np.array_equal(g1.indptr, g2.indptr)
    assert np.array_equal(g1.indices, g2.indices)


@needs_facebook
def test_facebook_statistics():
    from hopdist.graph import load_edge_list

    g, _ = load_edge_list(facebook_path())
    assert g.node_count == 4039
    assert g.edge_count == 88234


@needs_facebook
def test_facebook_max_degree_matches_brute_force():
    # brute force over the raw file, independent of the CSR construction
    from collections import Counter

    counts: Counter[str] = Counter()
    seen = set()
    with open(facebook_path()) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            a, b = line.split()
            if a == b:
                continue
            key = (a, b) if a < b else (b, a)
            if key in seen:
                continue
            seen.add(key)
            counts[a] += 1
            counts[b] += 1
    from hopdist.graph import load_edge_list

    g, _ = load_edge_list(facebook_path())
    max_deg = max(counts.values())
    v = g.index_of(max(counts, key=counts.get))
    assert g.degree(v) == max_deg
    assert len(g.neighbors(v)) == max_deg
    assert int(g.degrees().max()) == max_deg
