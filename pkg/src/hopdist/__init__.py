"""Approximate shortest-path hop distances with embeddings and a regressor.

Pipeline: parse an edge list, learn node embeddings (biased random walks +
skip-gram negative sampling, or Poincare-ball Riemannian SGD), build exact
(pair, hop distance) datasets from landmark BFS trees, compose pair features
with a binary operator, and fit a small feedforward regressor whose queries
run in constant time regardless of graph size.
"""

from .config import RunConfig, default_length_cap, derive_seed, load_config_file
from .embedding_io import EmbeddingFile, load_embedding, read_embedding, save_embedding, write_embedding
from .errors import ConfigError, DataError, HopdistError, NumericalError, ParseError
from .graph import Graph, ParseReport, build_graph, load_edge_list, parse_edge_list, write_edge_list
from .metrics import EvalReport, evaluate, report_per_length_csv, write_metrics_csv
from .node2vec import (
    Corpus,
    EmbeddingMatrix,
    SkipGramConfig,
    WalkConfig,
    generate_walks,
    sgns_pair_grads,
    sgns_pair_loss,
    train_skipgram,
)
from .pairs import (
    OPERATORS,
    PairDataset,
    balance,
    build_pairs,
    compose,
    compose_batch,
    feature_dim,
    feature_matrix,
    split_disjoint,
)
from .poincare import (
    PoincareConfig,
    PoincareEmbedding,
    poincare_distance,
    poincare_distances,
    poincare_pair_grads,
    poincare_pair_loss,
    train_poincare,
)
from .predictor import (
    LinRegModel,
    MlpConfig,
    MlpModel,
    TrainReport,
    fit_linreg,
    forward,
    forward_batch,
    init_mlp,
    linreg_predict,
    load_model,
    mlp_loss_and_grads,
    predict_distance,
    predict_distances,
    save_model,
    train_mlp,
)
from .sssp import UNREACHABLE, LandmarkSet, all_pairs_oracle, bfs, bfs_with_parents, select_landmarks

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
