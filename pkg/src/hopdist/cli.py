"""Command-line pipeline: embed -> pairs -> train -> eval, plus query/oracle.

Subcommands are composable and idempotent: identical config and seeds give
byte-identical output files (workers=1, the default). The pipeline
subcommand chains the four stages with the same code paths, so its outputs
match running them by hand.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .config import RunConfig, default_length_cap, derive_seed, load_config_file
from .embedding_io import atomic_text_writer, load_embedding, save_embedding
from .errors import ConfigError, DataError, HopdistError, NumericalError
from .graph import Graph, load_edge_list
from .metrics import evaluate, report_per_length_csv, write_metrics_csv
from .node2vec import SkipGramConfig, WalkConfig, generate_walks, train_skipgram
from .pairs import (
    balance,
    compose,
    dataset_from_triples,
    feature_dim,
    feature_matrix,
    read_pairs,
    split_disjoint,
    write_features_csv,
    write_pairs,
)
from .poincare import PoincareConfig, train_poincare
from .predictor import (
    LinRegModel,
    MlpConfig,
    MlpModel,
    fit_linreg,
    init_mlp,
    linreg_predict,
    load_model_path,
    predict_distance,
    predict_distances,
    save_model,
    train_mlp,
)
from .sssp import UNREACHABLE, bfs


def _load_graph(path: str | None) -> Graph:
    if not path:
        raise ConfigError("no graph file given (use --graph or [run] graph in the config)")
    g, rep = load_edge_list(path)
    print(
        f"graph {path}: n={g.node_count} m={g.edge_count} "
        f"(dropped {rep.self_loops_dropped} self-loops, {rep.duplicates_dropped} duplicates)"
    )
    return g


def run_embed(cfg: RunConfig, out_path: str) -> None:
    g = _load_graph(cfg.graph)
    t0 = time.perf_counter()
    if cfg.kind == "node2vec":
        walks = generate_walks(
            g,
            WalkConfig(
                walks_per_node=cfg.walks_per_node,
                walk_length=cfg.walk_length,
                return_param=cfg.p,
                inout_param=cfg.q,
                seed=derive_seed(cfg.seed, "walks"),
            ),
        )
        emb = train_skipgram(
            walks,
            SkipGramConfig(
                dim=cfg.dim,
                window=cfg.sg_window,
                negatives=cfg.sg_negatives,
                epochs=cfg.sg_epochs,
                initial_lr=cfg.sg_lr,
                final_lr=cfg.sg_final_lr,
                seed=derive_seed(cfg.seed, "skipgram"),
                workers=cfg.workers,
            ),
        )
        vectors, space = emb.vectors, "euclidean"
    else:
        emb = train_poincare(
            g,
            PoincareConfig(
                dim=cfg.dim,
                epochs=cfg.po_epochs,
                lr=cfg.po_lr,
                negatives=cfg.po_negatives,
                burn_in_epochs=cfg.po_burn_in,
                ball_margin=cfg.po_margin,
                seed=derive_seed(cfg.seed, "poincare"),
                workers=cfg.workers,
            ),
        )
        vectors, space = emb.vectors, "poincare"
    save_embedding(out_path, g.labels, vectors, space)
    print(f"embed: wrote {out_path} wall_time_s={time.perf_counter() - t0:.3f}")


def run_pairs(cfg: RunConfig, out_prefix: str) -> tuple[str, str]:
    g = _load_graph(cfg.graph)
    t0 = time.perf_counter()
    cap = cfg.cap if cfg.cap is not None else default_length_cap(g, cfg.seed)
    train, test = split_disjoint(
        g,
        cfg.landmarks,
        cfg.test_landmarks,
        cap,
        seed=derive_seed(cfg.seed, "landmarks"),
        strategy=cfg.pair_strategy,
        harvest_subpaths=cfg.pair_harvest,
    )
    if cfg.pair_balance:
        train = balance(train, cfg.per_class_target, seed=derive_seed(cfg.seed, "balance"))
    train_path = out_prefix + ".train.tsv"
    test_path = out_prefix + ".test.tsv"
    with atomic_text_writer(train_path) as f:
        write_pairs(f, train, g.labels)
    with atomic_text_writer(test_path) as f:
        write_pairs(f, test, g.labels)
    with atomic_text_writer(out_prefix + ".hist.csv") as f:
        f.write("split,length,count\n")
        for name, ds in (("train", train), ("test", test)):
            for length, count in sorted(ds.histogram.items()):
                f.write(f"{name},{length},{count}\n")
    print(
        f"pairs: cap={cap} train={len(train)} test={len(test)} "
        f"wall_time_s={time.perf_counter() - t0:.3f}"
    )
    return train_path, test_path


def _load_features(
    embedding_path: str, pairs_path: str, operator: str, augment_sub: bool = False
):
    emb = load_embedding(embedding_path)
    with open(pairs_path, "r", encoding="utf-8") as f:
        triples = read_pairs(f)
    ds = dataset_from_triples(triples, emb.label_index)
    X, y = feature_matrix(ds, emb.vectors, operator, augment_sub=augment_sub)
    return emb, ds, X, y


def run_train(
    cfg: RunConfig,
    embedding_path: str,
    pairs_path: str,
    out_model: str,
    dump_features: str | None = None,
) -> None:
    emb, ds, X, y = _load_features(
        embedding_path, pairs_path, cfg.operator, augment_sub=cfg.augment_sub
    )
    if dump_features:
        with atomic_text_writer(dump_features) as f:
            write_features_csv(f, X, y)
    t0 = time.perf_counter()
    if cfg.baseline:
        model: MlpModel | LinRegModel = fit_linreg(X, y, ridge=cfg.ridge)
        residual = X @ model.w + model.b - y
        mse_rows = [(0, float(np.mean(residual**2)))]
    else:
        mcfg = MlpConfig(
            input_dim=X.shape[1],
            hidden_dim=cfg.hidden,
            lr=cfg.mlp_lr,
            epochs=cfg.mlp_epochs,
            batch_size=cfg.batch_size,
            seed=derive_seed(cfg.seed, "mlp"),
        )
        model = init_mlp(mcfg)
        report = train_mlp(model, X, y, mcfg)
        mse_rows = list(enumerate(report.per_epoch_mse))
    with atomic_text_writer(out_model) as f:
        save_model(f, model)
    with atomic_text_writer(out_model + ".mse.csv") as f:
        f.write("epoch,mse\n")
        for ep, mse in mse_rows:
            f.write(f"{ep},{repr(float(mse))}\n")
    kind = "linreg" if cfg.baseline else "mlp"
    print(
        f"train: {kind} on {len(y)} pairs (input_dim={X.shape[1]}) -> {out_model} "
        f"wall_time_s={time.perf_counter() - t0:.3f}"
    )


def run_eval(
    cfg: RunConfig, model_path: str, embedding_path: str, pairs_path: str, out_prefix: str
) -> float:
    model = load_model_path(model_path)
    emb, ds, X, y = _load_features(embedding_path, pairs_path, cfg.operator)
    expected = feature_dim(emb.dim, cfg.operator)
    if model.input_dim != expected:
        raise ConfigError(
            f"model expects input_dim={model.input_dim} but embedding dim {emb.dim} "
            f"with operator {cfg.operator!r} yields {expected}"
        )
    if isinstance(model, MlpModel):
        preds = predict_distances(model, X)
    else:
        preds = linreg_predict(model, X)
    report = evaluate(preds, ds.d)
    with atomic_text_writer(out_prefix + ".metrics.csv") as f:
        write_metrics_csv(report, f)
    with atomic_text_writer(out_prefix + ".per_length.csv") as f:
        report_per_length_csv(report, f)
    print(f"eval: n={report.n_samples} mae={report.mae:.4f} mre={report.mre:.4f}")
    return report.mae


def run_query(
    cfg: RunConfig, model_path: str, embedding_path: str, u_label: str, v_label: str
) -> int:
    model = load_model_path(model_path)
    emb = load_embedding(embedding_path)
    expected = feature_dim(emb.dim, cfg.operator)
    if model.input_dim != expected:
        raise ConfigError(
            f"model expects input_dim={model.input_dim} but embedding dim {emb.dim} "
            f"with operator {cfg.operator!r} yields {expected}"
        )
    x = compose(emb.vector_for(u_label), emb.vector_for(v_label), cfg.operator)
    if isinstance(model, MlpModel):
        pred = predict_distance(model, x)
    else:
        pred = int(linreg_predict(model, x[None, :])[0])
    print(pred)
    return pred


def run_oracle(graph_path: str | None, u_label: str, v_label: str) -> str:
    g = _load_graph(graph_path)
    dist = bfs(g, g.index_of(u_label))
    dv = dist[g.index_of(v_label)]
    answer = "unreachable" if dv == UNREACHABLE else str(int(dv))
    print(answer)
    return answer


def run_pipeline(cfg: RunConfig, out_dir: str) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    embedding = str(out / "embedding.txt")
    pair_prefix = str(out / "pairs")
    model = str(out / "model.txt")
    run_embed(cfg, embedding)
    train_path, test_path = run_pairs(cfg, pair_prefix)
    run_train(cfg, embedding, train_path, model)
    run_eval(cfg, model, embedding, test_path, str(out / "run"))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hopdist",
        description="Approximate hop distances in large graphs with embeddings "
        "and a feedforward regressor.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="INI config file; flags override its values")
        p.add_argument("--seed", type=int, help="root seed expanded per stage")
        p.add_argument("--workers", type=int, help="async workers (>1 is nondeterministic)")
        p.add_argument(
            "--deterministic",
            action="store_true",
            help="force single-threaded deterministic mode",
        )

    p = sub.add_parser("embed", help="train node embeddings and write a word2vec text file")
    p.add_argument("--graph")
    p.add_argument("--kind", choices=("node2vec", "poincare"))
    p.add_argument("--dim", type=int)
    p.add_argument("--epochs", type=int, help="embedding training epochs")
    p.add_argument("--lr", type=float, help="embedding learning rate")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("pairs", help="build disjoint train/test pair files via landmark BFS")
    p.add_argument("--graph")
    p.add_argument("--landmarks", type=int)
    p.add_argument("--test-landmarks", dest="test_landmarks", type=int)
    p.add_argument("--cap", type=int)
    p.add_argument("--out", required=True, help="output prefix for .train.tsv/.test.tsv/.hist.csv")
    common(p)
    p.set_defaults(func=_cmd_pairs)

    p = sub.add_parser("train", help="fit the regressor on composed embedding features")
    p.add_argument("--embedding", required=True)
    p.add_argument("--pairs", required=True, help="training pair TSV")
    p.add_argument("--operator", choices=("sub", "concat", "avg", "hadamard"))
    p.add_argument("--hidden", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--baseline", action="store_true", help="linear regression instead of the MLP")
    p.add_argument("--dump-features", dest="dump_features", help="debug CSV of the feature matrix")
    p.add_argument("--out", required=True, help="model file; per-epoch MSE goes to <out>.mse.csv")
    common(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="score a model on a test pair file")
    p.add_argument("--model", required=True)
    p.add_argument("--embedding", required=True)
    p.add_argument("--pairs", required=True, help="test pair TSV")
    p.add_argument("--operator", choices=("sub", "concat", "avg", "hadamard"))
    p.add_argument("--out", required=True, help="output prefix for .metrics.csv/.per_length.csv")
    common(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("query", help="predict the distance between two labeled nodes")
    p.add_argument("--model", required=True)
    p.add_argument("--embedding", required=True)
    p.add_argument("--operator", choices=("sub", "concat", "avg", "hadamard"))
    p.add_argument("u")
    p.add_argument("v")
    common(p)
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("oracle", help="exact BFS distance between two labeled nodes")
    p.add_argument("--graph")
    p.add_argument("u")
    p.add_argument("v")
    common(p)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("pipeline", help="embed + pairs + train + eval into one directory")
    p.add_argument("--graph")
    p.add_argument("--kind", choices=("node2vec", "poincare"))
    p.add_argument("--dim", type=int)
    p.add_argument("--operator", choices=("sub", "concat", "avg", "hadamard"))
    p.add_argument("--landmarks", type=int)
    p.add_argument("--test-landmarks", dest="test_landmarks", type=int)
    p.add_argument("--cap", type=int)
    p.add_argument("--hidden", type=int)
    p.add_argument("--epochs", type=int, help="regressor epochs")
    p.add_argument("--lr", type=float, help="regressor learning rate")
    p.add_argument("--baseline", action="store_true")
    p.add_argument("--out", required=True, help="output directory")
    common(p)
    p.set_defaults(func=_cmd_pipeline)

    return ap


_PLAIN_OVERRIDES = (
    "graph",
    "kind",
    "dim",
    "operator",
    "landmarks",
    "test_landmarks",
    "cap",
    "seed",
    "workers",
    "hidden",
)


def _resolve(args: argparse.Namespace) -> RunConfig:
    cfg = load_config_file(args.config) if getattr(args, "config", None) else RunConfig()
    for name in _PLAIN_OVERRIDES:
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    if getattr(args, "baseline", False):
        cfg.baseline = True
    epochs = getattr(args, "epochs", None)
    lr = getattr(args, "lr", None)
    if args.command == "embed":
        if cfg.kind == "node2vec":
            if epochs is not None:
                cfg.sg_epochs = epochs
            if lr is not None:
                cfg.sg_lr = lr
        else:
            if epochs is not None:
                cfg.po_epochs = epochs
            if lr is not None:
                cfg.po_lr = lr
    else:
        if epochs is not None:
            cfg.mlp_epochs = epochs
        if lr is not None:
            cfg.mlp_lr = lr
    if getattr(args, "deterministic", False):
        cfg.workers = 1
    cfg.validate()
    return cfg


def _cmd_embed(args) -> int:
    run_embed(_resolve(args), args.out)
    return 0


def _cmd_pairs(args) -> int:
    run_pairs(_resolve(args), args.out)
    return 0


def _cmd_train(args) -> int:
    run_train(_resolve(args), args.embedding, args.pairs, args.out, args.dump_features)
    return 0


def _cmd_eval(args) -> int:
    run_eval(_resolve(args), args.model, args.embedding, args.pairs, args.out)
    return 0


def _cmd_query(args) -> int:
    run_query(_resolve(args), args.model, args.embedding, args.u, args.v)
    return 0


def _cmd_oracle(args) -> int:
    cfg = _resolve(args)
    run_oracle(cfg.graph, args.u, args.v)
    return 0


def _cmd_pipeline(args) -> int:
    run_pipeline(_resolve(args), args.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 1
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except NumericalError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (DataError, HopdistError, ValueError, IndexError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
