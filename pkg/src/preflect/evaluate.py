"""Corpus-level BLEU, a METEOR variant restricted to exact matches, and
simple corpus statistics."""
from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, TextIO

from .corpus import FACTOR_SEP, FactoredToken, split_unescaped, unescape


class EvaluationError(ValueError):
    pass


class LengthMismatch(EvaluationError):
    pass


class EmptyCorpus(EvaluationError):
    pass


def _check(hypotheses, references):
    if len(hypotheses) != len(references):
        raise LengthMismatch(f"{len(hypotheses)} hypotheses vs {len(references)} references")
    if not hypotheses:
        raise EmptyCorpus("no segments to score")


# -- BLEU -------------------------------------------------------------------

SMOOTHING = ("none", "add1")


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def clipped_counts(hyp: Sequence[str], ref: Sequence[str], n: int) -> tuple[int, int]:
    """(clipped matches, total hypothesis n-grams) for one segment."""
    h = ngrams(hyp, n)
    r = ngrams(ref, n)
    return sum(min(c, r[g]) for g, c in h.items()), sum(h.values())


@dataclass(frozen=True)
class BleuReport:
    matches: tuple[int, ...]
    totals: tuple[int, ...]
    brevity_penalty: float
    cumulative: float
    hyp_length: int
    ref_length: int
    smoothing: str = "none"

    def precision(self, n: int) -> Fraction | None:
        """Modified n-gram precision as an exact fraction; None when the
        hypotheses contain no n-grams of that order."""
        m, t = self.matches[n - 1], self.totals[n - 1]
        if t == 0:
            return None
        if self.smoothing == "add1" and n >= 2:
            return Fraction(m + 1, t + 1)
        return Fraction(m, t)

    @property
    def per_n_precision(self) -> tuple[float | None, ...]:
        return tuple(None if p is None else float(p)
                     for p in (self.precision(n) for n in range(1, len(self.totals) + 1)))

    def format(self) -> str:
        lines = []
        for n, p in enumerate(self.per_n_precision, 1):
            if p is None:
                lines.append(f"BLEU-{n}\tn/a\t({self.matches[n-1]}/{self.totals[n-1]})")
            else:
                lines.append(f"BLEU-{n}\t{p:.6f}\t{100 * p:.2f}\t({self.matches[n-1]}/{self.totals[n-1]})")
        lines.append(f"BP\t{self.brevity_penalty:.6f}\t(hyp {self.hyp_length}, ref {self.ref_length})")
        lines.append(f"BLEU\t{self.cumulative:.6f}\t{100 * self.cumulative:.2f}\tsmoothing={self.smoothing}")
        return "\n".join(lines)


def brevity_penalty(hyp_length: int, ref_length: int) -> float:
    if hyp_length == 0:
        return 0.0
    if hyp_length < ref_length:
        return math.exp(1 - ref_length / hyp_length)
    return 1.0


def bleu(hypotheses: Sequence[Sequence[str]], references: Sequence[Sequence[str]],
         max_n: int = 4, smoothing: str = "none") -> BleuReport:
    """Corpus BLEU with one reference per segment.

    Orders for which the hypotheses have no n-grams at all are left out of
    the geometric mean. ``smoothing="add1"`` adds one to the numerator and
    denominator of the precisions for n >= 2.
    """
    _check(hypotheses, references)
    if smoothing not in SMOOTHING:
        raise ValueError(f"unknown smoothing {smoothing!r}")
    matches = [0] * max_n
    totals = [0] * max_n
    hyp_len = ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, max_n + 1):
            m, t = clipped_counts(hyp, ref, n)
            matches[n - 1] += m
            totals[n - 1] += t
    report = BleuReport(tuple(matches), tuple(totals), 0.0, 0.0, hyp_len, ref_len, smoothing)
    bp = brevity_penalty(hyp_len, ref_len)
    precisions = [p for p in (report.precision(n) for n in range(1, max_n + 1)) if p is not None]
    if not precisions or any(p == 0 for p in precisions):
        score = 0.0
    else:
        score = bp * math.exp(math.fsum(math.log(p) for p in precisions) / len(precisions))
    return BleuReport(tuple(matches), tuple(totals), bp, min(score, 1.0), hyp_len, ref_len, smoothing)


# -- METEOR -----------------------------------------------------------------

# above this many reachable alignment states the chunk search falls back
# to a greedy alignment
EXACT_STATE_LIMIT = 1 << 14


@dataclass(frozen=True)
class MeteorReport:
    matches: int
    chunks: int
    hyp_length: int
    ref_length: int
    match_mode: str = "surface"
    exact: bool = True

    @property
    def precision(self) -> float:
        return self.matches / self.hyp_length if self.hyp_length else 0.0

    @property
    def recall(self) -> float:
        return self.matches / self.ref_length if self.ref_length else 0.0

    @property
    def f_mean(self) -> float:
        if self.matches == 0:
            return 0.0
        p, r = self.precision, self.recall
        return 10 * p * r / (r + 9 * p)

    @property
    def fragmentation_penalty(self) -> float:
        if self.matches == 0:
            return 0.0
        return 0.5 * (self.chunks / self.matches) ** 3

    @property
    def score(self) -> float:
        if self.matches == 0:
            return 0.0
        return self.f_mean * (1 - self.fragmentation_penalty)

    def format(self) -> str:
        return "\n".join([
            f"P\t{self.precision:.6f}",
            f"R\t{self.recall:.6f}",
            f"Fmean\t{self.f_mean:.6f}",
            f"Penalty\t{self.fragmentation_penalty:.6f}\t(chunks {self.chunks}, matches {self.matches})",
            f"METEOR\t{self.score:.6f}\t{100 * self.score:.2f}\tmode={self.match_mode}"
            + ("" if self.exact else "\t(greedy alignment)"),
        ])


def align(hyp: Sequence[str], ref: Sequence[str]) -> tuple[int, int, bool]:
    """Exact-match unigram alignment with the most matches and, among
    those, the fewest chunks.

    Returns ``(matches, chunks, exact)``; ``exact`` is False when the search
    space was too large and a greedy alignment was used instead.
    """
    hc, rc = Counter(hyp), Counter(ref)
    need = {w: min(c, rc[w]) for w, c in hc.items()}
    matches = sum(need.values())
    if matches == 0:
        return 0, 0, True
    states = 1
    for w, k in need.items():
        if k and rc[w] > 1:
            states *= 1 << rc[w]
    if states * (len(ref) + 1) > EXACT_STATE_LIMIT * 64 or len(hyp) > 400:
        return matches, _greedy_chunks(hyp, ref), False
    return matches, _exact_chunks(tuple(hyp), tuple(ref), need), True


def _exact_chunks(hyp, ref, need):
    positions = defaultdict(list)
    for j, w in enumerate(ref):
        positions[w].append(j)
    before = []
    seen = Counter()
    for w in hyp:
        before.append(seen[w])
        seen[w] += 1
    total = Counter(hyp)
    n = len(hyp)

    @lru_cache(maxsize=None)
    def best(i, prev, used):
        if i == n:
            return 0
        w = hyp[i]
        cands = positions.get(w, ())
        used_w = sum(1 for p in cands if p in used)
        still_needed = need[w] - used_w
        left_in_hyp = total[w] - before[i]
        options = []
        if left_in_hyp - 1 >= still_needed:
            options.append(best(i + 1, -2, used))
        if still_needed > 0:
            for p in cands:
                if p not in used:
                    cost = 0 if p == prev + 1 else 1
                    options.append(cost + best(i + 1, p, used | frozenset((p,))))
        return min(options)

    return best(0, -2, frozenset())


def _greedy_chunks(hyp, ref):
    free = defaultdict(list)
    for j, w in enumerate(ref):
        free[w].append(j)
    chunks, prev = 0, -2
    for w in hyp:
        slots = free.get(w)
        if not slots:
            prev = -2
            continue
        p = prev + 1 if prev + 1 in slots else slots[0]
        slots.remove(p)
        chunks += p != prev + 1
        prev = p
    return chunks


def meteor_lite(hypotheses: Sequence[Sequence[str]], references: Sequence[Sequence[str]],
                mode: str = "surface") -> MeteorReport:
    """Corpus METEOR over exact matches only.

    Matches, chunks and lengths are summed over segments before the
    precision/recall/penalty formulas are applied. ``mode`` records whether
    the inputs are surface forms or lemmas.
    """
    _check(hypotheses, references)
    if mode not in ("surface", "lemma"):
        raise ValueError(f"unknown match mode {mode!r}")
    m = ch = hl = rl = 0
    exact = True
    for hyp, ref in zip(hypotheses, references):
        a, c, e = align(hyp, ref)
        m += a
        ch += c
        exact &= e
        hl += len(hyp)
        rl += len(ref)
    return MeteorReport(m, ch, hl, rl, mode, exact)


# -- corpora ----------------------------------------------------------------

def select_factor(token: str, factor: int | None) -> str:
    if factor is None:
        return token
    parts = split_unescaped(token, FACTOR_SEP)
    if len(parts) == 1:
        return token
    if factor >= len(parts):
        raise EvaluationError(f"token {token!r} has no factor {factor}")
    return unescape(parts[factor])


def read_corpus(stream: TextIO | Iterable[str], factor: int | None = None) -> list[list[str]]:
    """Whitespace-tokenized lines; with ``factor`` set, factored tokens
    are reduced to that factor."""
    return [[select_factor(t, factor) for t in line.split()] for line in stream]


@dataclass(frozen=True)
class CorpusStats:
    sentences: int
    tokens: int
    mean_length: float
    vocabulary: tuple[int, ...]  # distinct values per factor index

    def format(self) -> str:
        vocab = " ".join(str(v) for v in self.vocabulary)
        return (f"sentences\t{self.sentences}\ntokens\t{self.tokens}\n"
                f"mean_length\t{self.mean_length:.4f}\nvocabulary\t{vocab}")


def _factor_values(token) -> tuple[str, ...]:
    if isinstance(token, FactoredToken):
        return token.factors()
    return tuple(split_unescaped(token, FACTOR_SEP))


def corpus_stats(corpus: Iterable[Sequence[FactoredToken | str]]) -> CorpusStats:
    n_sent = n_tok = 0
    vocab: list[set] = []
    for sentence in corpus:
        n_sent += 1
        for token in sentence:
            n_tok += 1
            for k, value in enumerate(_factor_values(token)):
                if k == len(vocab):
                    vocab.append(set())
                vocab[k].add(value)
    mean = n_tok / n_sent if n_sent else 0.0
    return CorpusStats(n_sent, n_tok, mean, tuple(len(v) for v in vocab))
