"""Hypothesis strategies for random annotated sentences and rule sets."""
import itertools

from hypothesis import strategies as st

from preflect.compound import Action, CompoundRule, CompoundRuleError, CompoundRuleSet, Target
from preflect.corpus import (AnnotatedSentence, ConstituencyTree, Dependency, DependencyGraph,
                             Leaf, Token, extract_productions)
from preflect.reorder import Pattern, ReorderRule, ReorderRuleSet, Symbol

POS = ["NN", "NNS", "VB", "VBD", "VBN", "MD", "TO", "IN", "DT", "JJ", "PRP", "PRP$", "RB"]
PHRASES = ["S", "NP", "VP", "PP"]
RELS = ["nsubj", "dobj", "prep", "pobj", "aux", "det", "amod", "poss", "auxpass", "nsubjpass"]
WORDS = ["the", "cat", "saw", "to", "home", "will", "have", "I", "she", "dogs", "a_b", "x|y", "#1"]


@st.composite
def trees(draw, n):
    """A random phrase-structure tree over leaves 0..n-1."""
    pos = [draw(st.sampled_from(POS)) for _ in range(n)]
    words = [draw(st.sampled_from(WORDS)) for _ in range(n)]

    def build(lo, hi, depth):
        if hi - lo == 1 and (depth > 3 or draw(st.booleans())):
            return ConstituencyTree(pos[lo], (Leaf(lo, words[lo]),))
        if hi - lo == 1:
            return ConstituencyTree(draw(st.sampled_from(PHRASES)), (build(lo, hi, depth + 1),))
        k = draw(st.integers(1, min(3, hi - lo - 1)))
        cuts = sorted(draw(st.sets(st.integers(lo + 1, hi - 1), min_size=k, max_size=k)))
        bounds = [lo] + cuts + [hi]
        kids = tuple(build(a, b, depth + 1) for a, b in zip(bounds, bounds[1:]))
        return ConstituencyTree(draw(st.sampled_from(PHRASES)), kids)

    return build(0, n, 0), words, pos


@st.composite
def sentences(draw, min_len=1, max_len=8, sid="s"):
    n = draw(st.integers(min_len, max_len))
    tree, words, pos = draw(trees(n))
    tokens = tuple(Token(i, w, w.lower(), p) for i, (w, p) in enumerate(zip(words, pos)))
    order = draw(st.permutations(range(n)))
    edges = [Dependency("root", -1, order[0])]
    for k in range(1, n):
        head = order[draw(st.integers(0, k - 1))]
        edges.append(Dependency(draw(st.sampled_from(RELS)), head, order[k]))
    edges.sort(key=lambda e: e.dep)
    return AnnotatedSentence(sid, tokens, tree, DependencyGraph(tuple(edges)))


@st.composite
def tree_rules(draw, tree, involutive=False):
    """Reordering rules built from the productions of ``tree``, with random
    permutations (symbol-consistent)."""
    rules, seen = [], set()
    for prod in extract_productions(tree):
        if not draw(st.booleans()):
            continue
        syms = tuple(Symbol(c) for c in prod.children)
        src = Pattern(prod.parent, syms)
        if src in seen:
            continue
        n = len(syms)
        if involutive:
            # permutations of equal symbols keep the child-label sequence
            groups = {}
            for i, s in enumerate(syms):
                groups.setdefault(s, []).append(i)
            mapping = list(range(n))
            for idx in groups.values():
                pairs = draw(st.permutations(idx))
                for a, b in zip(pairs[0::2], pairs[1::2]):
                    mapping[a], mapping[b] = b, a
            tgt = src
        else:
            mapping = draw(st.permutations(range(n)))
            tgt = Pattern(prod.parent, tuple(syms[s] for s in mapping))
        seen.add(src)
        rules.append(ReorderRule(src, tgt, tuple(mapping)))
    return ReorderRuleSet(tuple(rules))


TAGSETS = st.one_of(st.none(), st.frozensets(st.sampled_from(POS), min_size=1, max_size=4))


@st.composite
def compound_rules(draw, max_rules=5):
    rules = []
    for i in range(draw(st.integers(0, max_rules))):
        action = draw(st.sampled_from(list(Action)))
        delete = action is not Action.FOLD_PNG and draw(st.booleans())
        try:
            rules.append(CompoundRule(
                f"r{i}", draw(st.sampled_from(RELS + ["case"])),
                draw(st.sampled_from(list(Target))), action, delete,
                draw(TAGSETS), draw(TAGSETS)))
        except CompoundRuleError:
            continue
    try:
        return CompoundRuleSet(tuple(rules))
    except CompoundRuleError:
        return CompoundRuleSet(tuple(r for r in rules if not r.delete))
