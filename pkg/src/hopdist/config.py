"""Run configuration: defaults, key = value config files, seed derivation.

Config files are INI-style with one section per pipeline stage; unknown
sections or keys are rejected. CLI flags override file values. All
randomness flows from the single root seed, expanded per stage with
derive_seed, so one number reproduces an entire run.
"""
from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, fields
from typing import Any

import numpy as np

from .errors import ConfigError
from .graph import Graph
from .pairs import OPERATORS
from .sssp import bfs, UNREACHABLE

EMBEDDING_KINDS = ("node2vec", "poincare")
LANDMARK_STRATEGIES = ("uniform", "degree")


@dataclass
class RunConfig:
    # [run]
    graph: str | None = None
    kind: str = "node2vec"
    dim: int = 128
    operator: str = "avg"
    landmarks: int = 100
    test_landmarks: int = 5
    cap: int | None = None  # None -> auto: 5 if mean distance < 3 else 7
    seed: int = 1
    workers: int = 1
    # [walks]
    walks_per_node: int = 10
    walk_length: int = 80
    p: float = 1.0
    q: float = 1.0
    # [skipgram]
    sg_window: int = 5
    sg_negatives: int = 5
    sg_epochs: int = 5
    sg_lr: float = 0.025
    sg_final_lr: float = 1e-4
    # [poincare]
    po_epochs: int = 50
    po_lr: float = 0.01
    po_negatives: int = 10
    po_burn_in: int = 10
    po_margin: float = 1e-5
    # [pairs]
    pair_strategy: str = "uniform"
    pair_harvest: bool = True
    pair_balance: bool = True
    per_class_target: int | None = None  # None -> smallest class holding >= 1%
    augment_sub: bool = False
    # [train]
    hidden: int = 100
    mlp_lr: float = 0.01
    mlp_epochs: int = 15
    batch_size: int = 64
    baseline: bool = False
    ridge: float = 1e-6

    def validate(self) -> None:
        if self.kind not in EMBEDDING_KINDS:
            raise ConfigError(f"kind must be one of {EMBEDDING_KINDS}, got {self.kind!r}")
        if self.operator not in OPERATORS:
            raise ConfigError(f"operator must be one of {OPERATORS}, got {self.operator!r}")
        if self.pair_strategy not in LANDMARK_STRATEGIES:
            raise ConfigError(
                f"pair_strategy must be one of {LANDMARK_STRATEGIES}, got {self.pair_strategy!r}"
            )
        if self.dim < 1:
            raise ConfigError("dim must be >= 1")
        if self.cap is not None and self.cap < 2:
            raise ConfigError("cap must be >= 2")
        if self.landmarks < 1 or self.test_landmarks < 1:
            raise ConfigError("landmarks and test_landmarks must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")


# (section, key) -> (RunConfig field, parser)
_SCHEMA: dict[tuple[str, str], tuple[str, str]] = {
    ("run", "graph"): ("graph", "str"),
    ("run", "kind"): ("kind", "str"),
    ("run", "dim"): ("dim", "int"),
    ("run", "operator"): ("operator", "str"),
    ("run", "landmarks"): ("landmarks", "int"),
    ("run", "test_landmarks"): ("test_landmarks", "int"),
    ("run", "cap"): ("cap", "optint"),
    ("run", "seed"): ("seed", "int"),
    ("run", "workers"): ("workers", "int"),
    ("walks", "walks_per_node"): ("walks_per_node", "int"),
    ("walks", "walk_length"): ("walk_length", "int"),
    ("walks", "p"): ("p", "float"),
    ("walks", "q"): ("q", "float"),
    ("skipgram", "window"): ("sg_window", "int"),
    ("skipgram", "negatives"): ("sg_negatives", "int"),
    ("skipgram", "epochs"): ("sg_epochs", "int"),
    ("skipgram", "lr"): ("sg_lr", "float"),
    ("skipgram", "final_lr"): ("sg_final_lr", "float"),
    ("poincare", "epochs"): ("po_epochs", "int"),
    ("poincare", "lr"): ("po_lr", "float"),
    ("poincare", "negatives"): ("po_negatives", "int"),
    ("poincare", "burn_in"): ("po_burn_in", "int"),
    ("poincare", "margin"): ("po_margin", "float"),
    ("pairs", "strategy"): ("pair_strategy", "str"),
    ("pairs", "harvest"): ("pair_harvest", "bool"),
    ("pairs", "balance"): ("pair_balance", "bool"),
    ("pairs", "per_class_target"): ("per_class_target", "optint"),
    ("pairs", "augment_sub"): ("augment_sub", "bool"),
    ("train", "hidden"): ("hidden", "int"),
    ("train", "lr"): ("mlp_lr", "float"),
    ("train", "epochs"): ("mlp_epochs", "int"),
    ("train", "batch_size"): ("batch_size", "int"),
    ("train", "baseline"): ("baseline", "bool"),
    ("train", "ridge"): ("ridge", "float"),
}

_BOOL_WORDS = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _parse_value(raw: str, kind: str, where: str) -> Any:
    raw = raw.strip()
    try:
        if kind == "str":
            return raw
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            return _BOOL_WORDS[raw.lower()]
        if kind == "optint":
            return None if raw.lower() in ("auto", "none", "") else int(raw)
    except (ValueError, KeyError):
        pass
    raise ConfigError(f"bad value for {where}: {raw!r} (expected {kind})")


def load_config_file(path: str) -> RunConfig:
    parser = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8") as f:
            parser.read_file(f)
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from None
    except configparser.Error as e:
        raise ConfigError(f"malformed config file {path}: {e}") from None
    cfg = RunConfig()
    for section in parser.sections():
        for key, raw in parser.items(section):
            entry = _SCHEMA.get((section, key))
            if entry is None:
                raise ConfigError(f"unknown config key [{section}] {key}")
            name, kind = entry
            setattr(cfg, name, _parse_value(raw, kind, f"[{section}] {key}"))
    return cfg


def derive_seed(root_seed: int, label: str) -> int:
    """Deterministic per-stage seed from the root seed and a stage label."""
    digest = hashlib.blake2b(f"{root_seed}:{label}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") & (2**63 - 1)


def default_length_cap(g: Graph, seed: int, probes: int = 8) -> int:
    """5 when the estimated mean hop distance is below 3, else 7.

    The mean is estimated from BFS out of a few seeded probe nodes, which is
    exact enough to pick between the two regimes.
    """
    rng = np.random.default_rng(derive_seed(seed, "cap-probe"))
    sources = rng.choice(g.node_count, size=min(probes, g.node_count), replace=False)
    total = 0.0
    count = 0
    for s in sources:
        dist = bfs(g, int(s))
        reached = dist[(dist != UNREACHABLE) & (dist > 0)]
        total += float(reached.sum())
        count += len(reached)
    mean = total / count if count else float("inf")
    return 5 if mean < 3.0 else 7


def config_field_names() -> set[str]:
    return {f.name for f in fields(RunConfig)}
