import numpy as np
import pytest

from hopdist.errors import ConfigError
from hopdist.graph import build_graph
from hopdist.node2vec import WalkConfig, generate_walks

from conftest import gnp_graph, path_graph


def test_walk_count_contract():
    g = gnp_graph(100, 0.05, seed=0)
    corpus = generate_walks(g, WalkConfig(walks_per_node=10, walk_length=20, seed=1))
    assert len(corpus) == 1000
    assert corpus.walks.shape == (1000, 20)


def test_walk_validity_every_step_is_an_edge():
    g = gnp_graph(60, 0.07, seed=3)
    corpus = generate_walks(g, WalkConfig(walks_per_node=4, walk_length=15, seed=2))
    for walk in corpus:
        for a, b in zip(walk[:-1], walk[1:]):
            assert b in g.neighbors(int(a))


def test_walk_length_cap_and_isolated_truncation():
    g = build_graph(3, [(0, 1)])  # node 2 isolated
    corpus = generate_walks(g, WalkConfig(walks_per_node=2, walk_length=9, seed=0))
    lengths = corpus.lengths.reshape(2, 3)
    assert (lengths <= 9).all()
    assert (lengths[:, 2] == 1).all()  # isolated start truncates immediately
    assert (lengths[:, :2] == 9).all()  # connected component walks run out the cap


def test_walks_deterministic_given_seed():
    g = gnp_graph(40, 0.1, seed=5)
    cfg = WalkConfig(walks_per_node=3, walk_length=12, seed=77)
    a = generate_walks(g, cfg)
    b = generate_walks(g, cfg)
    assert np.array_equal(a.walks, b.walks)
    c = generate_walks(g, WalkConfig(walks_per_node=3, walk_length=12, seed=78))
    assert not np.array_equal(a.walks, c.walks)


def test_interior_transitions_uniform_when_unbiased():
    # p=q=1 on a path: from the interior node both neighbors are equally
    # likely; binomial 3-sigma band over all observed transitions
    g = path_graph(3)
    corpus = generate_walks(g, WalkConfig(walks_per_node=200, walk_length=40, seed=9))
    to_left = 0
    total = 0
    for walk in corpus:
        for a, b in zip(walk[:-1], walk[1:]):
            if a == 1:
                total += 1
                to_left += b == 0
    assert total >= 10_000
    sigma = np.sqrt(total * 0.25)
    assert abs(to_left - total / 2) <= 3 * sigma


def test_large_q_avoids_outward_steps():
    # triangle 0-1-2 with tail 2-3: with q=1000 the walk almost never moves
    # to a node at distance 2 from the previous node
    g = build_graph(4, [(0, 1), (0, 2), (1, 2), (2, 3)])
    cfg = WalkConfig(walks_per_node=150, walk_length=60, inout_param=1000.0, seed=4)
    corpus = generate_walks(g, cfg)
    outward = 0
    total = 0
    for walk in corpus:
        for i in range(2, len(walk)):
            t, x = int(walk[i - 2]), int(walk[i])
            total += 1
            if x != t and x not in g.neighbors(t):
                outward += 1
    assert total > 5000
    assert outward / total < 0.01


def test_walk_config_validation():
    with pytest.raises(ConfigError):
        WalkConfig(walks_per_node=0)
    with pytest.raises(ConfigError):
        WalkConfig(walk_length=1)
    with pytest.raises(ConfigError):
        WalkConfig(return_param=0.0)
    with pytest.raises(ConfigError):
        WalkConfig(inout_param=-2.0)


def test_corpus_iteration_trims_padding():
    g = build_graph(3, [(0, 1)])
    corpus = generate_walks(g, WalkConfig(walks_per_node=1, walk_length=5, seed=0))
    walks = list(corpus)
    assert len(walks) == 3
    assert walks[2].tolist() == [2]
    assert corpus.token_count == sum(len(w) for w in walks)
