"""Command-line entry points.

    sensepipe run --config FILE
    sensepipe semantify --network DIR --theta F --mode sense|supersense|word --input FILE --output FILE
    sensepipe build-embeddings --words FILE --bias FILE --network DIR --output FILE
    sensepipe synth --out DIR
"""
from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .disambiguate import MODES, semantify
from .embeddings import DEFAULT_DECAY, build_sense_table, load_embeddings
from .harness import parse_config, run_from_config
from .network import load_network, save_network
from .preprocess import DEFAULT_STOPWORDS, TagLexicon, load_stopwords

_worker_state: dict = {}


def _init_worker(network, lexicon, stopwords, theta, mode):
    _worker_state.update(net=load_network(network), lexicon=TagLexicon.load(lexicon) if lexicon else None,
                         stopwords=load_stopwords(stopwords) if stopwords else DEFAULT_STOPWORDS,
                         theta=theta, mode=mode)


def _semantify_line(line: str) -> str:
    s = _worker_state
    return " ".join(semantify(line, s["net"], s["lexicon"], s["theta"], s["mode"], s["stopwords"]).tokens)


def _add_semantify_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--network", required=True, help="directory with senses/edges/lexicalizations TSV files")
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--mode", choices=MODES, default="sense")
    p.add_argument("--input", required=True, help="one document per line")
    p.add_argument("--output", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--lexicon", help="tag lexicon TSV: surface, pos, lemma")
    p.add_argument("--stopwords", help="stopword list, one per line (default: bundled list)")


def cmd_semantify(args) -> int:
    if args.theta < 0:
        raise SystemExit("--theta must be non-negative")
    with open(args.input, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    init = (args.network, args.lexicon, args.stopwords, args.theta, args.mode)
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers, initializer=_init_worker, initargs=init) as pool:
            out = list(pool.map(_semantify_line, lines, chunksize=max(1, len(lines) // (4 * args.workers))))
    else:
        _init_worker(*init)
        out = [_semantify_line(line) for line in lines]
    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        for line in out:
            fh.write(line + "\n")
    return 0


def cmd_run(args) -> int:
    config = parse_config(args.config)
    if args.output:
        config.output = args.output
    report = run_from_config(config)
    if not config.output:
        sys.stdout.write(report.to_csv())
    return 0


def cmd_build_embeddings(args) -> int:
    words = load_embeddings(args.words, top=args.top)
    table = build_sense_table(words, args.bias, load_network(args.network), args.delta)
    table.save(args.output)
    return 0


def cmd_synth(args) -> int:
    from .synthetic import make_ambiguity_corpus

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    net, docs = make_ambiguity_corpus(n_docs=args.docs, doc_len=args.doc_len, seed=args.seed)
    save_network(net, out / "network")
    with open(out / "corpus.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for label, text in docs:
            fh.write(f"{label}\t{text}\n")
    for mode in ("word", "sense"):
        (out / f"{mode}.conf").write_text(
            f"dataset=synthetic\ndata=corpus.tsv\nnetwork=network\nmode={mode}\ninit=random\n"
            f"folds=10\nseed={args.seed}\noutput={mode}.csv\n"
            "dimension=16\nnum_filters=16\nwindow=3\npool_chunk=4\nlstm_hidden=16\ndropout=0.2\n"
            f"max_doc_len={args.doc_len + 2}\nlearning_rate=0.01\nepochs=10\nbatch_size=20\n",
            encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sensepipe")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a cross-validated experiment from a key=value config")
    p.add_argument("--config", required=True)
    p.add_argument("--output", help="CSV report path (overrides the config)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("semantify", help="replace words with sense or supersense ids")
    _add_semantify_args(p)
    p.set_defaults(func=cmd_semantify)

    p = sub.add_parser("build-embeddings", help="compose sense and supersense vectors")
    p.add_argument("--words", required=True, help="word vectors, '<count> <dim>' text format")
    p.add_argument("--bias", required=True, help="bias lists: sense_id<TAB>w1,w2,...")
    p.add_argument("--network", required=True)
    p.add_argument("--delta", type=float, default=DEFAULT_DECAY)
    p.add_argument("--top", type=int, help="keep only the first K word vectors")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_build_embeddings)

    p = sub.add_parser("synth", help="write a synthetic ambiguity corpus, network and configs")
    p.add_argument("--out", required=True)
    p.add_argument("--docs", type=int, default=200)
    p.add_argument("--doc-len", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


def semantify_main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="semantify")
    _add_semantify_args(parser)
    return cmd_semantify(parser.parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
