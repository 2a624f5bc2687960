import io
import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from preflect.compound import compound_sentence
from preflect.corpus import FactoredToken
from preflect.evaluate import (EmptyCorpus, EvaluationError, LengthMismatch, MeteorReport,
                               align, bleu, brevity_penalty, clipped_counts, corpus_stats,
                               meteor_lite, read_corpus, select_factor)
from preflect.factorize import factorize_sentence

from oracles import clipped_ngram_counts, corpus_precisions, min_chunks

VOCAB = "abcde"
segments = st.lists(st.sampled_from(VOCAB), min_size=1, max_size=8)


@st.composite
def corpora(draw, max_size=5):
    n = draw(st.integers(1, max_size))
    return draw(st.lists(segments, min_size=n, max_size=n)), draw(
        st.lists(segments, min_size=n, max_size=n))


class TestBleu:
    def test_clipped_unigrams(self):
        report = bleu(["the the the the the the the".split()], ["the cat is on the mat".split()])
        assert report.precision(1) == Fraction(2, 7)

    def test_identity(self):
        c = ["the cat sat on the mat".split(), "a dog".split()]
        report = bleu(c, c)
        assert report.cumulative == 1.0 and report.brevity_penalty == 1.0
        assert report.per_n_precision == (1.0, 1.0, 1.0, 1.0)

    def test_short_identity_skips_unavailable_orders(self):
        report = bleu([["a", "b"]], [["a", "b"]])
        assert report.precision(3) is None and report.cumulative == 1.0

    def test_zero_four_gram_overlap(self):
        hyp = ["a b c d e".split()]
        ref = ["a b c e d".split()]
        plain = bleu(hyp, ref)
        assert plain.precision(4) == 0 and plain.cumulative == 0.0
        smooth = bleu(hyp, ref, smoothing="add1")
        assert smooth.cumulative > 0 and smooth.precision(4) == Fraction(1, 3)
        assert "smoothing=add1" in smooth.format()

    def test_brevity_penalty(self):
        assert brevity_penalty(5, 5) == 1.0
        assert brevity_penalty(4, 6) == pytest.approx(math.exp(1 - 6 / 4))
        assert brevity_penalty(0, 3) == 0.0
        report = bleu([["a", "b"]], [["a", "b", "c", "d"]])
        assert report.cumulative == pytest.approx(math.exp(-1))

    def test_format_shows_both_scales(self):
        text = bleu([["a", "b"]], [["a", "c"]]).format()
        assert "BLEU-1\t0.500000\t50.00\t(1/2)" in text
        assert "BLEU-3\tn/a" in text

    def test_errors(self):
        with pytest.raises(LengthMismatch):
            bleu([["a"]], [])
        with pytest.raises(EmptyCorpus):
            bleu([], [])
        with pytest.raises(ValueError):
            bleu([["a"]], [["a"]], smoothing="add2")

    @given(segments, segments, st.integers(1, 4))
    def test_clipped_counts_match_oracle(self, h, r, n):
        assert clipped_counts(h, r, n) == clipped_ngram_counts(h, r, n)

    @given(corpora())
    def test_precisions_match_oracle(self, pair):
        hyps, refs = pair
        report = bleu(hyps, refs)
        for n, (m, t, p) in enumerate(corpus_precisions(hyps, refs), 1):
            assert (report.matches[n - 1], report.totals[n - 1]) == (m, t)
            assert report.precision(n) == p

    @given(corpora(), st.sampled_from(["none", "add1"]))
    def test_bounds(self, pair, smoothing):
        report = bleu(*pair, smoothing=smoothing)
        assert 0 <= report.cumulative <= 1
        assert all(p is None or 0 <= p <= 1 for p in report.per_n_precision)

    @given(st.lists(segments, min_size=1, max_size=5))
    def test_self_score_is_one(self, c):
        assert abs(bleu(c, c).cumulative - 1) < 1e-12

    @given(corpora(), st.randoms(use_true_random=False))
    def test_shuffle_invariance(self, pair, rnd):
        pairs = list(zip(*pair))
        rnd.shuffle(pairs)
        hyps, refs = zip(*pairs)
        assert bleu(hyps, refs) == bleu(*pair)
        assert meteor_lite(hyps, refs) == meteor_lite(*pair)

    @given(st.lists(st.sampled_from(VOCAB), min_size=2, max_size=8, unique=True),
           st.randoms(use_true_random=False))
    def test_permutation_sensitivity(self, ref, rnd):
        hyp = list(ref)
        rnd.shuffle(hyp)
        assume(hyp != ref)
        report = bleu([hyp], [ref], max_n=2)
        assert report.precision(1) == 1
        assert report.precision(2) < 1


class TestMeteor:
    def test_identical_three_tokens(self):
        s = ["the cat sat".split()]
        report = meteor_lite(s, s)
        assert (report.matches, report.chunks) == (3, 1)
        assert report.precision == report.recall == report.f_mean == 1
        assert report.fragmentation_penalty == pytest.approx(0.5 / 27)
        assert abs(report.score - 0.9814814814814815) < 1e-9

    def test_single_token(self):
        assert meteor_lite([["x"]], [["x"]]).score == 0.5

    def test_disjoint(self):
        report = meteor_lite([["a", "b"]], [["c"]])
        assert report.matches == 0 and report.score == 0 and report.f_mean == 0

    def test_f_mean_weights_recall(self):
        report = MeteorReport(matches=2, chunks=1, hyp_length=4, ref_length=2)
        p, r = 0.5, 1.0
        assert report.f_mean == pytest.approx(10 * p * r / (r + 9 * p))

    def test_chunks_prefer_contiguous(self):
        # greedy left-to-right would take the first "a" and split the run
        assert align("a b".split(), "a x a b".split()) == (2, 1, True)

    def test_corpus_aggregates_counts(self):
        report = meteor_lite([["a", "b"], ["c"]], [["b", "a"], ["c", "d"]])
        assert (report.matches, report.chunks, report.hyp_length, report.ref_length) == (3, 3, 3, 4)

    def test_lemma_mode_flagged(self):
        assert "mode=lemma" in meteor_lite([["a"]], [["a"]], mode="lemma").format()
        with pytest.raises(ValueError):
            meteor_lite([["a"]], [["a"]], mode="stem")

    def test_greedy_fallback_is_flagged(self):
        hyp = ["a"] * 30
        m, c, exact = align(hyp, list(hyp))
        assert m == 30 and not exact
        assert "greedy" in meteor_lite([hyp], [hyp]).format()

    def test_errors(self):
        with pytest.raises(LengthMismatch):
            meteor_lite([["a"]], [["a"], ["b"]])
        with pytest.raises(EmptyCorpus):
            meteor_lite([], [])

    @given(st.lists(st.sampled_from("abc"), max_size=6), st.lists(st.sampled_from("abc"), max_size=6))
    def test_chunks_match_brute_force(self, h, r):
        m, c, exact = align(h, r)
        assert exact and (m, c) == min_chunks(h, r)

    @given(corpora())
    def test_bounds(self, pair):
        report = meteor_lite(*pair)
        assert 0 <= report.score <= 1
        assert 0 <= report.fragmentation_penalty <= 0.5


class TestCorpus:
    def test_select_factor(self):
        assert select_factor("home|home|N|NN_pobj_to", 3) == "NN_pobj_to"
        assert select_factor(r"a\|b|a|N|NN", 0) == "a|b"
        assert select_factor("plain", 2) == "plain"
        assert select_factor("a|b", None) == "a|b"
        with pytest.raises(EvaluationError):
            select_factor("a|b", 3)

    def test_read_corpus(self):
        text = "i|i|PRP|PRP_nsubj bought|buy|V|VBD\n\nx y\n"
        assert read_corpus(io.StringIO(text), 1) == [["i", "buy"], [], ["x", "y"]]

    def test_empty(self):
        stats = corpus_stats([])
        assert (stats.sentences, stats.tokens, stats.mean_length, stats.vocabulary) == (0, 0, 0.0, ())

    def test_compounding_shortens(self, worked, default_cr):
        f = factorize_sentence(worked)
        after = compound_sentence(f, worked, default_cr).tokens
        assert corpus_stats([f]).tokens == 6
        assert corpus_stats([after]).tokens == 5

    def test_duplicates_keep_vocabulary(self, worked):
        f = factorize_sentence(worked)
        one, two = corpus_stats([f]), corpus_stats([f, f])
        assert one.vocabulary == two.vocabulary == (6, 6, 4, 6)
        assert two.tokens == 12 and two.mean_length == 6

    def test_strings_and_tokens_agree(self, worked):
        f = factorize_sentence(worked)
        assert corpus_stats([f]) == corpus_stats([[str(t) for t in f]])

    def test_format(self):
        text = corpus_stats([[FactoredToken("a", "a", "X", ("X",))]]).format()
        assert text.splitlines()[-1] == "vocabulary\t1 1 1 1"
