"""Command-line interface.

Usage:
    preflect preprocess --in sample.jsonl --reorder rules.rr --compound rules.cr --out factored
    preflect reorder --in sample.jsonl --rules rules.rr --out plain
    preflect reorder --in sample.jsonl --rules rules.rr --out jsonl \\
        | preflect factor --out jsonl | preflect compound --rules rules.cr --out factored
    preflect score bleu --hyp hyp.txt --ref ref.txt
    preflect score meteor --hyp hyp.txt --ref ref.txt --mode lemma --factor 1
    preflect stats corpus.factored
    preflect validate-rules --reorder rules.rr --compound rules.cr

Input, rule and lexicon paths may be given as ``builtin:NAME`` to use a file
shipped with the package (``builtin:sample.rr``, ``builtin:default.cr``,
``builtin:png.tsv``, ``builtin:worked_example.jsonl``).

Data goes to stdout, diagnostics to stderr. Exit status is 2 for
configuration errors and 1 for data errors under ``--strictness abort``.
"""
from __future__ import annotations

import argparse
import contextlib
import io
import json
import logging
import os
import sys
from typing import Callable

from . import data
from .compound import (CompoundError, CompoundRuleError, parse_compound_rules,
                       parse_png_lexicon)
from .corpus import (CorpusError, FactoredToken, format_factored, parse_factored_token,
                     read_records)
from .evaluate import EvaluationError, bleu, corpus_stats, meteor_lite, read_corpus
from .factorize import factorize_sentence
from .pipeline import PipelineConfig, Summary, ordered_map, process_sentence
from .reorder import RuleError, parse_ruleset, regenerate_sentence, reorder_tree

log = logging.getLogger("preflect")

EXIT_DATA = 1
EXIT_CONFIG = 2


class ConfigError(Exception):
    pass


def _read_text(spec: str) -> str:
    if spec.startswith("builtin:"):
        name = spec[len("builtin:"):]
        try:
            return data.read_text(name)
        except FileNotFoundError:
            raise ConfigError(f"no builtin data file {name!r}") from None
    try:
        with open(spec, encoding="utf-8") as f:
            return f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {spec}: {exc.strerror}") from None


def _load_reorder(spec):
    if spec is None:
        return None
    try:
        return parse_ruleset(_read_text(spec), spec)
    except RuleError as exc:
        raise ConfigError(f"{spec}: {exc}") from None


def _load_compound(spec):
    if spec is None:
        return None
    try:
        return parse_compound_rules(_read_text(spec), spec)
    except CompoundRuleError as exc:
        raise ConfigError(f"{spec}: {exc}") from None


def _load_lexicon(spec):
    if spec is None:
        return None
    try:
        return parse_png_lexicon(_read_text(spec))
    except ValueError as exc:
        raise ConfigError(f"{spec}: {exc}") from None


def _workers(args) -> int:
    env = os.environ.get("PREFLECT_WORKERS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"PREFLECT_WORKERS must be an integer, got {env!r}") from None
    else:
        n = args.workers
    if n < 1:
        raise ConfigError("worker count must be >= 1")
    return n


@contextlib.contextmanager
def _open_input(path):
    if path in (None, "-"):
        yield sys.stdin
        return
    if path.startswith("builtin:"):
        yield io.StringIO(_read_text(path))
        return
    try:
        f = open(path, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    with f:
        yield f


def _records(args, stack: contextlib.ExitStack):
    source = stack.enter_context(_open_input(args.input))
    conll = None
    if args.format == "ptbconll":
        if not args.conll:
            raise ConfigError("--format ptbconll needs --conll")
        conll = stack.enter_context(_open_input(args.conll))
    return read_records(source, args.format, conll=conll, strict=args.strictness == "abort")


# -- stage workers ----------------------------------------------------------
# each returns (output line, trace rows, SentenceResult or None)

def _record(sentence, record):
    return dict(record) if record else sentence.to_record()


def _order(sentence, record):
    order = record.get("order") if record else None
    return list(range(len(sentence))) if order is None else [int(i) for i in order]


def _trace_rows(result):
    return [{"sentence": result.sentence.id, "original_index": d.index, "target_index": d.target,
             "atom": d.atom, "rule": d.rule} for d in result.deletions]


def _reorder_worker(args, rules):
    def work(item):
        sentence, record = item
        tree, trace = reorder_tree(sentence.tree, rules)
        text, order = regenerate_sentence(tree, sentence.tokens)
        if args.out == "jsonl":
            line = json.dumps({**_record(sentence, record), "order": order}, ensure_ascii=False)
        else:
            line = text
        return line, [], None, len(trace)
    return work


def _factor_worker(args):
    def work(item):
        sentence, record = item
        factored = factorize_sentence(sentence)
        if args.out == "jsonl":
            rec = {**_record(sentence, record), "factors": [str(t) for t in factored]}
            return json.dumps(rec, ensure_ascii=False), [], None, 0
        config = PipelineConfig()
        result = process_sentence(sentence, config, order=_order(sentence, record), factored=factored)
        return result.line("factored"), [], result, 0
    return work


def _stored_factors(sentence, record):
    if not record or "factors" not in record:
        return None
    factors = [parse_factored_token(t) for t in record["factors"]]
    if len(factors) != len(sentence):
        raise CompoundError(f"sentence {sentence.id}: {len(factors)} factored tokens "
                            f"for {len(sentence)} tokens")
    return [FactoredToken(f.word, f.lemma, f.word_class, f.morphology, tok.surface)
            for f, tok in zip(factors, sentence.tokens)]


def _compound_worker(args, config):
    def work(item):
        sentence, record = item
        result = process_sentence(sentence, config, order=_order(sentence, record),
                                  factored=_stored_factors(sentence, record))
        if args.out == "jsonl":
            rec = {**_record(sentence, record),
                   "compounded": [str(t) for t in result.tokens],
                   "deleted": [d.index for d in result.deletions]}
            return json.dumps(rec, ensure_ascii=False), _trace_rows(result), result, 0
        return result.line(args.out), _trace_rows(result), result, 0
    return work


def _preprocess_worker(args, config):
    def work(item):
        sentence, _ = item
        result = process_sentence(sentence, config)
        return result.line(args.out), _trace_rows(result), result, 0
    return work


def _drive(args, make_worker: Callable) -> int:
    """Read sentences, run ``worker`` over them in order, write output,
    trace and summary."""
    summary = Summary()
    strict = args.strictness == "abort"
    with contextlib.ExitStack() as stack:
        worker = make_worker()
        workers = _workers(args)
        trace_file = None
        if getattr(args, "trace", None):
            try:
                trace_file = stack.enter_context(open(args.trace, "w", encoding="utf-8"))
            except OSError as exc:
                raise ConfigError(f"cannot write {args.trace}: {exc.strerror}") from None
        records = _records(args, stack)

        def safe(item):
            try:
                return worker(item)
            except (CompoundError, CorpusError, KeyError, TypeError, ValueError) as exc:
                if strict:
                    raise
                log.warning("skipping sentence %s: %s", item[0].id, exc)
                return None

        out = sys.stdout
        try:
            for produced in ordered_map(safe, records, workers):
                if produced is None:
                    summary.skipped += 1
                    continue
                line, trace_rows, result, fired = produced
                out.write(line + "\n")
                if trace_file is not None:
                    for row in trace_rows:
                        trace_file.write(json.dumps(row, ensure_ascii=False) + "\n")
                if result is not None:
                    summary.add(result)
                else:
                    summary.sentences += 1
                summary.reorder_fired += fired
        except (CorpusError, CompoundError, KeyError, TypeError, ValueError) as exc:
            out.flush()
            print(f"preflect: error: {exc}", file=sys.stderr)
            print(f"preflect: {summary}", file=sys.stderr)
            return EXIT_DATA
    out.flush()
    print(f"preflect: {summary}", file=sys.stderr)
    return 0


# -- commands ---------------------------------------------------------------

def cmd_preprocess(args) -> int:
    config = PipelineConfig(
        reorder_rules=_load_reorder(args.reorder),
        compound_rules=_load_compound(args.compound),
        lexicon=_load_lexicon(args.png),
        output=args.out,
        strict=args.strictness == "abort",
        trace=bool(args.trace),
    )
    return _drive(args, lambda: _preprocess_worker(args, config))


def cmd_reorder(args) -> int:
    rules = _load_reorder(args.rules)
    return _drive(args, lambda: _reorder_worker(args, rules))


def cmd_factor(args) -> int:
    return _drive(args, lambda: _factor_worker(args))


def cmd_compound(args) -> int:
    config = PipelineConfig(compound_rules=_load_compound(args.rules),
                            lexicon=_load_lexicon(args.png),
                            output="plain" if args.out == "plain" else "factored")
    return _drive(args, lambda: _compound_worker(args, config))


def _read_corpus_file(path, factor):
    with _open_input(path) as f:
        return read_corpus(f, factor)


def cmd_score(args) -> int:
    factor = args.factor
    if args.metric == "meteor" and factor is None and args.mode == "lemma":
        factor = 1
    if factor is None:
        factor = 0
    hyp = _read_corpus_file(args.hyp, factor)
    ref = _read_corpus_file(args.ref, factor)
    try:
        if args.metric == "bleu":
            report = bleu(hyp, ref, max_n=args.max_n, smoothing=args.smooth)
        else:
            report = meteor_lite(hyp, ref, mode=args.mode)
    except EvaluationError as exc:
        print(f"preflect: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(report.format())
    return 0


def cmd_stats(args) -> int:
    for path in args.files:
        with _open_input(path) as f:
            stats = corpus_stats(line.split() for line in f)
        if len(args.files) > 1:
            print(f"# {path}")
        print(stats.format())
    return 0


def cmd_validate_rules(args) -> int:
    if not (args.reorder or args.compound or args.png):
        raise ConfigError("give at least one of --reorder, --compound, --png")
    status = 0
    checks = [(args.reorder, parse_ruleset, RuleError),
              (args.compound, parse_compound_rules, CompoundRuleError),
              (args.png, parse_png_lexicon, ValueError)]
    for spec, parse, error in checks:
        if spec is None:
            continue
        try:
            parsed = parse(_read_text(spec))
        except error as exc:
            print(f"{spec}: invalid: {exc}")
            status = EXIT_DATA
            continue
        size = len(parsed.entries) if hasattr(parsed, "entries") else len(parsed)
        print(f"{spec}: ok ({size} entries)")
    return status


# -- argument parsing -------------------------------------------------------

def _add_input(p):
    p.add_argument("--in", dest="input", default="-", help="input file (default stdin)")
    p.add_argument("--format", choices=("jsonl", "ptbconll"), default="jsonl")
    p.add_argument("--conll", help="CoNLL dependency file for --format ptbconll")
    p.add_argument("--strictness", choices=("abort", "skip-bad"), default="abort")
    p.add_argument("--workers", type=int, default=1,
                   help="worker threads (PREFLECT_WORKERS overrides)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="preflect",
                                     description="Source-side preprocessing for factored SMT.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="reorder, factorize, compound and integrate")
    _add_input(p)
    p.add_argument("--reorder", help="reordering rule file")
    p.add_argument("--compound", help="compounding rule file")
    p.add_argument("--png", help="PNG lexicon (default: builtin)")
    p.add_argument("--out", choices=("factored", "plain"), default="factored")
    p.add_argument("--trace", help="write the deletion trace as JSONL to this file")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("reorder", help="apply reordering rules")
    _add_input(p)
    p.add_argument("--rules", required=True)
    p.add_argument("--out", choices=("plain", "jsonl"), default="plain")
    p.set_defaults(func=cmd_reorder)

    p = sub.add_parser("factor", help="emit four-factor tokens")
    _add_input(p)
    p.add_argument("--out", choices=("factored", "jsonl"), default="factored")
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("compound", help="apply compounding rules and integrate")
    _add_input(p)
    p.add_argument("--rules", required=True)
    p.add_argument("--png", help="PNG lexicon (default: builtin)")
    p.add_argument("--out", choices=("factored", "plain", "jsonl"), default="factored")
    p.add_argument("--trace", help="write the deletion trace as JSONL to this file")
    p.set_defaults(func=cmd_compound)

    p = sub.add_parser("score", help="BLEU or METEOR against references")
    p.add_argument("metric", choices=("bleu", "meteor"))
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--factor", type=int, help="factor index to score on for factored input")
    p.add_argument("--smooth", choices=("none", "add1"), default="none")
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--mode", choices=("surface", "lemma"), default="surface")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("stats", help="corpus statistics")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("validate-rules", help="check rule files")
    p.add_argument("--reorder")
    p.add_argument("--compound")
    p.add_argument("--png")
    p.set_defaults(func=cmd_validate_rules)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="preflect: %(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"preflect: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
