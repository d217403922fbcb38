import io

import numpy as np
import pytest

from hopdist.errors import DataError
from hopdist.graph import build_graph
from hopdist.pairs import (
    PairDataset,
    balance,
    build_pairs,
    compose,
    compose_batch,
    dataset_from_triples,
    feature_dim,
    feature_matrix,
    read_pairs,
    split_disjoint,
    write_pairs,
)
from hopdist.sssp import LandmarkSet, all_pairs_oracle, select_landmarks

from conftest import gnp_graph, path_graph


def landmark_set(nodes):
    return LandmarkSet(nodes=np.asarray(nodes, dtype=np.int64), strategy="uniform", seed=0)


def as_set(ds):
    return {(int(u), int(v), int(d)) for u, v, d in zip(ds.u, ds.v, ds.d)}


def test_build_pairs_path_graph_no_harvest():
    g = path_graph(5)
    ds = build_pairs(g, landmark_set([0]), length_cap=5, harvest_subpaths=False)
    assert as_set(ds) == {(0, 2, 2), (0, 3, 3), (0, 4, 4)}


def test_build_pairs_path_graph_with_harvest():
    g = path_graph(5)
    ds = build_pairs(g, landmark_set([0]), length_cap=5, harvest_subpaths=True)
    assert as_set(ds) == {
        (0, 2, 2), (0, 3, 3), (0, 4, 4),
        (1, 3, 2), (1, 4, 3), (2, 4, 2),
    }


def test_build_pairs_respects_cap_and_omits_direct_neighbors():
    g = path_graph(8)
    ds = build_pairs(g, landmark_set([0]), length_cap=3, harvest_subpaths=True)
    assert (ds.d >= 2).all() and (ds.d <= 3).all()
    # d=1 pairs never appear
    for u, v in zip(ds.u, ds.v):
        assert abs(int(u) - int(v)) >= 2


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_all_emitted_distances_are_exact(seed):
    g = gnp_graph(150, 0.03, seed=seed)
    lm = select_landmarks(g, 6, "uniform", seed=seed)
    ds = build_pairs(g, lm, length_cap=6, harvest_subpaths=True)
    oracle = all_pairs_oracle(g)
    assert len(ds) > 0
    for u, v, d in zip(ds.u, ds.v, ds.d):
        assert int(oracle[int(u), int(v)]) == int(d)
    assert (ds.d >= 2).all() and (ds.d <= 6).all()


def test_pairs_are_deduplicated_and_normalized():
    g = gnp_graph(80, 0.08, seed=5)
    lm = select_landmarks(g, 5, "uniform", seed=5)
    ds = build_pairs(g, lm, length_cap=5)
    assert (ds.u < ds.v).all()
    keys = ds.keys(g.node_count)
    assert len(np.unique(keys)) == len(keys)


def test_build_pairs_argument_errors():
    g = path_graph(4)
    with pytest.raises(ValueError):
        build_pairs(g, landmark_set([]), length_cap=5)
    with pytest.raises(ValueError):
        build_pairs(g, landmark_set([0]), length_cap=1)


def synthetic_dataset(hist: dict[int, int]) -> PairDataset:
    d = np.concatenate([np.full(c, length, dtype=np.int64) for length, c in hist.items()])
    n = len(d)
    u = np.arange(n, dtype=np.int64)
    v = u + n  # fake but distinct
    return PairDataset(u=u, v=v, d=d, length_cap=int(d.max()))


def test_balance_caps_only_oversized_classes():
    ds = synthetic_dataset({2: 1000, 3: 10})
    out = balance(ds, per_class_target=100, seed=0)
    assert out.histogram == {2: 100, 3: 10}


def test_balance_noop_when_target_exceeds_counts():
    ds = synthetic_dataset({2: 40, 3: 25})
    out = balance(ds, per_class_target=1000, seed=0)
    assert out.histogram == {2: 40, 3: 25}
    assert np.array_equal(out.u, ds.u)


def test_balance_default_target_is_smallest_class_above_one_percent():
    # 1% of 5083 is ~50.8: class 4 (3 pairs) is below the line and survives
    # whole; the target becomes the smallest eligible class, 80
    ds = synthetic_dataset({2: 5000, 3: 80, 4: 3})
    out = balance(ds, seed=1)
    assert out.histogram == {2: 80, 3: 80, 4: 3}


def test_balance_deterministic_and_validates():
    ds = synthetic_dataset({2: 100, 3: 100})
    a = balance(ds, per_class_target=10, seed=3)
    b = balance(ds, per_class_target=10, seed=3)
    assert np.array_equal(a.u, b.u)
    with pytest.raises(ValueError):
        balance(PairDataset(np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0, np.int64), 5))
    with pytest.raises(ValueError):
        balance(ds, per_class_target=0)


def test_split_disjoint_contract():
    g = gnp_graph(120, 0.05, seed=9)
    train, test = split_disjoint(g, l_train=8, l_test=3, cap=5, seed=4)
    n = g.node_count
    assert len(train) > 0 and len(test) > 0
    assert not set(train.keys(n).tolist()) & set(test.keys(n).tolist())
    # landmark draws are disjoint too
    assert not set(train.landmarks.nodes.tolist()) & set(test.landmarks.nodes.tolist())
    t2, s2 = split_disjoint(g, l_train=8, l_test=3, cap=5, seed=4)
    assert np.array_equal(train.u, t2.u) and np.array_equal(test.v, s2.v)


def test_compose_table_identities():
    x = np.array([1.0, 3.0])
    assert compose(x, x, "sub").tolist() == [0.0, 0.0]
    assert compose(np.array([1.0, 3.0]), np.array([3.0, 1.0]), "avg").tolist() == [2.0, 2.0]
    assert compose(np.array([2.0, 0.0]), np.array([3.0, 5.0]), "hadamard").tolist() == [6.0, 0.0]
    assert len(compose(x, x, "concat")) == 4


def test_compose_symmetries():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a = rng.normal(size=8)
        b = rng.normal(size=8)
        assert np.array_equal(compose(a, b, "sub"), -compose(b, a, "sub"))
        assert np.array_equal(compose(a, b, "avg"), compose(b, a, "avg"))
        assert np.array_equal(compose(a, b, "hadamard"), compose(b, a, "hadamard"))
        assert np.array_equal(
            compose(a, b, "concat"), np.concatenate([a, b])
        )


def test_compose_errors():
    with pytest.raises(ValueError):
        compose(np.zeros(3), np.zeros(4), "sub")
    with pytest.raises(ValueError):
        compose(np.zeros(3), np.zeros(3), "plus")


def test_compose_batch_matches_scalar_compose():
    rng = np.random.default_rng(1)
    vecs = rng.normal(size=(10, 6))
    u = np.array([0, 3, 5])
    v = np.array([9, 2, 5])
    for op in ("sub", "concat", "avg", "hadamard"):
        batch = compose_batch(vecs, u, v, op)
        for i in range(3):
            assert np.array_equal(batch[i], compose(vecs[u[i]], vecs[v[i]], op))
        assert batch.shape[1] == feature_dim(6, op)


def test_feature_matrix_augment_sub_doubles_rows():
    ds = synthetic_dataset({2: 5})
    ds = PairDataset(u=np.arange(5), v=np.arange(5, 10), d=ds.d, length_cap=2)
    vecs = np.random.default_rng(0).normal(size=(10, 4))
    X, y = feature_matrix(ds, vecs, "sub", augment_sub=True)
    assert X.shape == (10, 4)
    assert np.array_equal(X[5:], -X[:5])
    assert np.array_equal(y[5:], y[:5])
    X2, _ = feature_matrix(ds, vecs, "avg", augment_sub=True)
    assert X2.shape == (5, 4)  # augmentation only applies to sub


def test_unreachable_nodes_produce_no_pairs():
    # two components: landmarks in the first can never pair with the second
    g = build_graph(8, [(0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (6, 7)])
    ds = build_pairs(g, landmark_set([0]), length_cap=7, harvest_subpaths=True)
    touched = set(ds.u.tolist()) | set(ds.v.tolist())
    assert touched <= {0, 1, 2, 3}
    assert as_set(ds) == {(0, 2, 2), (0, 3, 3), (1, 3, 2)}


def test_pair_file_exact_content_on_path_fixture():
    g = path_graph(5)
    ds = build_pairs(g, landmark_set([0]), length_cap=5, harvest_subpaths=True)
    buf = io.StringIO()
    write_pairs(buf, ds, g.labels)
    assert buf.getvalue() == (
        "0\t2\t2\n0\t3\t3\n0\t4\t4\n1\t3\t2\n1\t4\t3\n2\t4\t2\n"
    )


def test_pair_file_round_trip_and_unknown_label():
    g = path_graph(6)
    ds = build_pairs(g, landmark_set([0]), length_cap=5)
    buf = io.StringIO()
    write_pairs(buf, ds, g.labels)
    buf.seek(0)
    triples = read_pairs(buf)
    index = {lab: i for i, lab in enumerate(g.labels)}
    back = dataset_from_triples(triples, index)
    assert as_set(back) == as_set(ds)
    with pytest.raises(DataError):
        dataset_from_triples([("0", "zzz", 2)], index)
    with pytest.raises(DataError):
        read_pairs(io.StringIO("a\tb\n"))
