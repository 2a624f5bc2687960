import logging

import pytest
from hypothesis import given

from preflect.corpus import (AnnotatedSentence, Dependency, DependencyGraph, FACTOR_SEP,
                             Token, parse_factored_token, parse_ptb, split_unescaped)
from preflect.factorize import PENN_TO_CLASS, WORD_CLASSES, factorize_sentence, simplify_pos

from strategies import sentences

PUBLISHED_FACTORS = {
    # word: (lemma, word class, morphology)
    "i": ("i", "PRP", "PRP_nsubj"),
    "bought": ("buy", "V", "VBD"),
    "vegetables": ("vegetable", "N", "NNS_dobj"),
    "to": ("to", "PRE", "TO_prep"),
    "my": ("my", "PRP", "PRP$_poss"),
    "home": ("home", "N", "NN_pobj"),
}


@pytest.mark.parametrize("pos, cls", [
    ("VBD", "V"), ("TO", "PRE"), ("XYZ", "X"), ("NNS", "N"), ("JJR", "ADJ"),
    ("RBS", "ADV"), ("PRP$", "PRP"), ("IN", "PRE"), ("CC", "CONJ"), ("DT", "DET"),
    ("CD", "NUM"), (".", "PUNCT"), (",", "PUNCT"), ("UH", "X"),
])
def test_simplify_pos(pos, cls):
    assert simplify_pos(pos) == cls


def test_pos_map_covers_penn_inventory():
    penn = ("CC CD DT EX FW IN JJ JJR JJS LS MD NN NNS NNP NNPS PDT POS PRP PRP$ RB RBR "
            "RBS RP SYM TO UH VB VBD VBG VBN VBP VBZ WDT WP WP$ WRB").split()
    assert set(penn) <= set(PENN_TO_CLASS)
    assert set(PENN_TO_CLASS.values()) <= set(WORD_CLASSES)


def test_unknown_tag_warns(caplog):
    with caplog.at_level(logging.WARNING):
        assert simplify_pos("NOT-A-TAG") == "X"
    assert "NOT-A-TAG" in caplog.text


def test_worked_example_factors(worked):
    out = factorize_sentence(worked)
    assert [t.word for t in out] == list(PUBLISHED_FACTORS)
    for tok in out:
        lemma, cls, morph = PUBLISHED_FACTORS[tok.word]
        assert (tok.lemma, tok.word_class, "_".join(tok.morphology)) == (lemma, cls, morph)
    assert " ".join(map(str, out)) == (
        "i|i|PRP|PRP_nsubj bought|buy|V|VBD vegetables|vegetable|N|NNS_dobj "
        "to|to|PRE|TO_prep my|my|PRP|PRP$_poss home|home|N|NN_pobj")


def test_surface_casing_kept_on_the_side(worked):
    assert factorize_sentence(worked)[0].surface == "I"


def _one_token():
    return AnnotatedSentence("one", (Token(0, "home", "home", "NN"),), parse_ptb("(NP (NN home))"),
                             DependencyGraph((Dependency("root", -1, 0),)))


def test_single_root_token():
    s = _one_token()
    assert str(factorize_sentence(s)[0]) == "home|home|N|NN"
    assert str(factorize_sentence(s, label_single_root=True)[0]) == "home|home|N|NN_root"


def test_relation_is_lowercased():
    s = AnnotatedSentence("x", (Token(0, "a", "a", "DT"), Token(1, "b", "b", "NN")),
                          parse_ptb("(NP (DT a) (NN b))"),
                          DependencyGraph((Dependency("DET", 1, 0), Dependency("root", -1, 1))))
    assert factorize_sentence(s)[0].morphology == ("DT", "det")


@given(sentences())
def test_factorization_invariants(s):
    out = factorize_sentence(s)
    assert len(out) == len(s)
    for tok, ft in zip(s.tokens, out):
        text = str(ft)
        assert len(split_unescaped(text, FACTOR_SEP)) == 4
        assert parse_factored_token(text) == ft
        assert ft.word_class == simplify_pos(ft.morphology[0])
        assert ft.morphology[0] == tok.pos
        assert all(ft.morphology)


@given(sentences())
def test_refactorizing_word_factors_is_a_fixed_point(s):
    out = factorize_sentence(s)
    lowered = AnnotatedSentence(s.id, tuple(Token(t.index, f.word, t.lemma, t.pos)
                                            for t, f in zip(s.tokens, out)),
                                _relabel(s.tree, [f.word for f in out]), s.deps)
    assert factorize_sentence(lowered) == out


def _relabel(tree, words):
    from preflect.corpus import ConstituencyTree, Leaf
    def go(node):
        if isinstance(node, Leaf):
            return Leaf(node.index, words[node.index])
        return ConstituencyTree(node.label, tuple(go(c) for c in node.children))
    return go(tree)
