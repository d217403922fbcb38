import io

import numpy as np
import pytest

from hopdist.embedding_io import (
    load_embedding,
    read_embedding,
    save_embedding,
    write_embedding,
)
from hopdist.errors import DataError, ParseError


def test_round_trip_euclidean():
    rng = np.random.default_rng(0)
    labels = ["a", "b", "c"]
    vecs = rng.normal(size=(3, 4))
    buf = io.StringIO()
    write_embedding(buf, labels, vecs)
    text = buf.getvalue()
    assert text.splitlines()[0] == "3 4"
    emb = read_embedding(io.StringIO(text))
    assert emb.labels == labels
    assert emb.space == "euclidean"
    assert np.array_equal(emb.vectors, vecs)  # repr round-trips float64 exactly


def test_round_trip_poincare_header():
    vecs = np.array([[0.1, -0.2], [0.0, 0.5]])
    buf = io.StringIO()
    write_embedding(buf, ["x", "y"], vecs, space="poincare")
    lines = buf.getvalue().splitlines()
    assert lines[0] == "#space=poincare"
    assert lines[1] == "2 2"
    emb = read_embedding(io.StringIO(buf.getvalue()))
    assert emb.space == "poincare"
    assert np.array_equal(emb.vectors, vecs)


def test_vector_for_label():
    emb = read_embedding(io.StringIO("2 2\nu 1.0 2.0\nv 3.0 4.0\n"))
    assert emb.vector_for("v").tolist() == [3.0, 4.0]
    with pytest.raises(DataError):
        emb.vector_for("w")


@pytest.mark.parametrize(
    "text",
    [
        "",  # no header
        "3\nu 1.0\n",  # bad header
        "1 2\nu 1.0\n",  # wrong component count
        "2 2\nu 1.0 2.0\n",  # truncated
        "1 2\nu 1.0 2.0\nv 3.0 4.0\n",  # extra rows
        "1 1\nu notafloat\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        read_embedding(io.StringIO(text))


def test_save_and_load_paths(tmp_path):
    rng = np.random.default_rng(1)
    vecs = rng.normal(size=(5, 3))
    labels = [f"n{i}" for i in range(5)]
    out = tmp_path / "emb.txt"
    save_embedding(out, labels, vecs)
    emb = load_embedding(out)
    assert emb.labels == labels
    assert np.array_equal(emb.vectors, vecs)
    assert not list(tmp_path.glob("*.tmp"))  # atomic writer cleaned up
