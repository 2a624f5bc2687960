"""Four-factor representation: word | lemma | word class | morphology."""
from __future__ import annotations

import logging
from typing import Mapping

from .corpus import ROOT, AnnotatedSentence, FactoredToken

log = logging.getLogger(__name__)

WORD_CLASSES = ("N", "V", "ADJ", "ADV", "PRP", "PRE", "CONJ", "DET", "NUM", "PUNCT", "X")
CONTENT_CLASSES = frozenset({"N", "V", "ADJ", "ADV"})

PENN_TO_CLASS: dict[str, str] = {
    **dict.fromkeys(("NN", "NNS", "NNP", "NNPS"), "N"),
    **dict.fromkeys(("VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "MD"), "V"),
    **dict.fromkeys(("JJ", "JJR", "JJS"), "ADJ"),
    **dict.fromkeys(("RB", "RBR", "RBS", "WRB"), "ADV"),
    **dict.fromkeys(("PRP", "PRP$", "WP", "WP$"), "PRP"),
    **dict.fromkeys(("IN", "TO"), "PRE"),
    "CC": "CONJ",
    **dict.fromkeys(("DT", "PDT", "WDT"), "DET"),
    "CD": "NUM",
    **dict.fromkeys((".", ",", ":", "``", "''", "-LRB-", "-RRB-", "-LCB-", "-RCB-",
                     "HYPH", "NFP", "(", ")", '"'), "PUNCT"),
    **dict.fromkeys(("EX", "FW", "LS", "POS", "RP", "SYM", "UH", "$", "#", "ADD", "AFX", "GW", "XX"), "X"),
}

_warned: set[str] = set()


def simplify_pos(pos: str, mapping: Mapping[str, str] | None = None) -> str:
    table = PENN_TO_CLASS if mapping is None else mapping
    cls = table.get(pos)
    if cls is None:
        if pos not in _warned:
            _warned.add(pos)
            log.warning("unknown POS tag %r mapped to X", pos)
        return "X"
    return cls


def factorize_sentence(sentence: AnnotatedSentence, *, label_single_root: bool = False,
                       pos_map: Mapping[str, str] | None = None) -> list[FactoredToken]:
    """Factor every token of ``sentence``, in order.

    The morphology factor is the POS tag followed by the token's incoming
    dependency relation. The relation of the ROOT-attached token is left
    out; with ``label_single_root`` a one-token sentence gets ``root``.
    """
    out = []
    single = len(sentence.tokens) == 1
    for tok in sentence.tokens:
        atoms = [tok.pos]
        edge = sentence.deps.incoming(tok.index)
        if edge is not None:
            if edge.head != ROOT:
                atoms.append(edge.rel.lower())
            elif single and label_single_root:
                atoms.append("root")
        out.append(FactoredToken(
            word=tok.surface.lower(),
            lemma=tok.lemma.lower(),
            word_class=simplify_pos(tok.pos, pos_map),
            morphology=tuple(atoms),
            surface=tok.surface,
        ))
    return out
