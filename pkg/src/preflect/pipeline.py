"""Per-sentence composition of the stages: reorder -> factorize ->
compound -> integrate, and an order-preserving worker pool around it."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import islice
from typing import Callable, Iterable, Iterator, Sequence, TypeVar

from .compound import (CompoundError, CompoundRuleSet, Deletion, Fold, PngLexicon,
                       compound_sentence, integrate)
from .corpus import AnnotatedSentence, FactoredToken, format_factored
from .factorize import factorize_sentence
from .reorder import ReorderRuleSet, regenerate_sentence, reorder_tree

log = logging.getLogger(__name__)

OUTPUT_FORMATS = ("factored", "plain")

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class PipelineConfig:
    reorder_rules: ReorderRuleSet | None = None
    compound_rules: CompoundRuleSet | None = None
    lexicon: PngLexicon | None = None
    output: str = "factored"
    strict: bool = True
    trace: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.output not in OUTPUT_FORMATS:
            raise ValueError(f"output must be one of {OUTPUT_FORMATS}, not {self.output!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class SentenceResult:
    sentence: AnnotatedSentence
    order: list[int]
    factored: list[FactoredToken]
    tokens: list[FactoredToken]          # integrated output
    reorder_trace: list = field(default_factory=list)
    deletions: list[Deletion] = field(default_factory=list)
    folds: list[Fold] = field(default_factory=list)

    def line(self, output: str = "factored") -> str:
        if output == "plain":
            return " ".join(t.surface or t.word for t in self.tokens)
        return format_factored(self.tokens)


def process_sentence(sentence: AnnotatedSentence, config: PipelineConfig, *,
                     order: Sequence[int] | None = None,
                     factored: Sequence[FactoredToken] | None = None) -> SentenceResult:
    """Run every enabled stage on one sentence.

    ``order`` and ``factored`` short-circuit the reorder and factorize
    stages when their results are already known.
    """
    trace = []
    if order is None:
        if config.reorder_rules is not None and len(config.reorder_rules):
            tree, trace = reorder_tree(sentence.tree, config.reorder_rules)
            _, order = regenerate_sentence(tree, sentence.tokens)
        else:
            order = list(range(len(sentence)))
    order = list(order)
    factored = factorize_sentence(sentence) if factored is None else list(factored)

    deletions, folds = [], []
    survivors = factored
    if config.compound_rules is not None and len(config.compound_rules):
        result = compound_sentence(factored, sentence, config.compound_rules, lexicon=config.lexicon)
        survivors, deletions, folds = result.tokens, result.deletions, result.folds
    tokens = integrate(survivors, order, deletions)
    return SentenceResult(sentence, order, factored, tokens, trace, deletions, folds)


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1,
                chunk: int | None = None) -> Iterator[R]:
    """``map`` over a bounded thread pool; results come back in input order."""
    if workers <= 1:
        yield from map(fn, items)
        return
    chunk = chunk or workers * 8
    it = iter(items)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        while True:
            batch = list(islice(it, chunk))
            if not batch:
                break
            yield from pool.map(fn, batch)


@dataclass
class Summary:
    sentences: int = 0
    skipped: int = 0
    tokens_in: int = 0
    tokens_out: int = 0
    reorder_fired: int = 0
    compound_fired: int = 0
    deletions: int = 0

    def add(self, result: SentenceResult) -> None:
        self.sentences += 1
        self.tokens_in += len(result.sentence)
        self.tokens_out += len(result.tokens)
        self.reorder_fired += len(result.reorder_trace)
        self.compound_fired += len(result.folds)
        self.deletions += len(result.deletions)

    def __str__(self):
        return (f"sentences={self.sentences} skipped={self.skipped} "
                f"tokens_in={self.tokens_in} tokens_out={self.tokens_out} "
                f"reorder_rules_fired={self.reorder_fired} "
                f"compound_rules_fired={self.compound_fired} deletions={self.deletions}")


def run_pipeline(sentences: Iterable[AnnotatedSentence], config: PipelineConfig,
                 summary: Summary | None = None) -> Iterator[SentenceResult]:
    """Process sentences with ``config.workers`` threads, in input order.

    With ``config.strict`` unset, sentences that fail during processing
    are logged and dropped.
    """
    def work(sentence):
        try:
            return process_sentence(sentence, config)
        except CompoundError as exc:
            if config.strict:
                raise
            log.warning("skipping sentence %s: %s", sentence.id, exc)
            return None

    for result in ordered_map(work, sentences, config.workers):
        if result is None:
            if summary is not None:
                summary.skipped += 1
            continue
        if summary is not None:
            summary.add(result)
        yield result


def preprocess_lines(sentences: Iterable[AnnotatedSentence], config: PipelineConfig) -> list[str]:
    return [r.line(config.output) for r in run_pipeline(sentences, config)]
