"""word2vec-style text embedding files.

First line "n d", then one line per node: "<label> <f1> ... <fd>". A leading
comment "#space=poincare" marks ball-constrained vectors so downstream
consumers can tell the geometries apart; Euclidean files carry no comment.
"""
from __future__ import annotations

import os
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import TextIO

import numpy as np

from .errors import DataError, ParseError


@dataclass
class EmbeddingFile:
    labels: list[str]
    vectors: np.ndarray  # (n, d) float64
    space: str = "euclidean"  # "euclidean" | "poincare"
    _label_index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._label_index = {lab: i for i, lab in enumerate(self.labels)}

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def label_index(self) -> dict[str, int]:
        return self._label_index

    def vector_for(self, label: str) -> np.ndarray:
        try:
            return self.vectors[self._label_index[label]]
        except KeyError:
            raise DataError(f"unknown node label {label!r} in embedding") from None


def write_embedding(sink: TextIO, labels: list[str], vectors: np.ndarray, space: str = "euclidean") -> None:
    if len(labels) != vectors.shape[0]:
        raise ValueError("label count and vector rows disagree")
    if space == "poincare":
        sink.write("#space=poincare\n")
    elif space != "euclidean":
        raise ValueError(f"unknown embedding space {space!r}")
    n, d = vectors.shape
    sink.write(f"{n} {d}\n")
    for lab, row in zip(labels, vectors):
        sink.write(lab + " " + " ".join(repr(float(x)) for x in row) + "\n")


def read_embedding(stream: TextIO) -> EmbeddingFile:
    space = "euclidean"
    header = None
    lineno = 0
    for raw in stream:
        lineno += 1
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line == "#space=poincare":
                space = "poincare"
            continue
        header = line
        break
    if header is None:
        raise ParseError("embedding file has no header line")
    parts = header.split()
    if len(parts) != 2:
        raise ParseError(f"embedding header must be 'n d', got {header!r}")
    try:
        n, d = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(f"embedding header must be 'n d', got {header!r}") from None
    labels: list[str] = []
    vectors = np.empty((n, d), dtype=np.float64)
    row = 0
    for raw in stream:
        lineno += 1
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != d + 1:
            raise ParseError(f"line {lineno}: expected label plus {d} floats, got {len(tokens)} tokens")
        if row >= n:
            raise ParseError(f"embedding file has more than {n} vector rows")
        labels.append(tokens[0])
        try:
            vectors[row] = [float(t) for t in tokens[1:]]
        except ValueError:
            raise ParseError(f"line {lineno}: non-numeric vector component") from None
        row += 1
    if row != n:
        raise ParseError(f"embedding file declares {n} rows but contains {row}")
    return EmbeddingFile(labels=labels, vectors=vectors, space=space)


def load_embedding(path: str | Path) -> EmbeddingFile:
    with open(path, "r", encoding="utf-8") as f:
        return read_embedding(f)


def save_embedding(path: str | Path, labels: list[str], vectors: np.ndarray, space: str = "euclidean") -> None:
    with atomic_text_writer(path) as f:
        write_embedding(f, labels, vectors, space)


@contextmanager
def atomic_text_writer(path: str | Path):
    """Write to a temp file in the target directory, then rename into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            yield f
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
