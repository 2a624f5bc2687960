"""Dependency-triggered compounding.

A compounding rule fires on a dependency edge and appends one atom to the
morphology factor of a target token (the edge's head, or the head's
head), optionally deleting the dependent. Rule file lines look like::

    R-AUX: aux -> HEAD FOLD_SURFACE delete
    R-PREP: case dep_pos=TO,IN -> HEAD FOLD_SURFACE delete
    R-SUBJ: nsubj head_pos=VB,VBD -> HEAD FOLD_PNG

Before matching, each ``pobj(P, N)`` edge is also exposed as a derived
``case(N, P)`` edge, so that a preposition can be folded onto its object.
"""
from __future__ import annotations

import enum
import logging
import re
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .corpus import ROOT, AnnotatedSentence, Dependency, FactoredToken, Token
from .factorize import CONTENT_CLASSES, simplify_pos

log = logging.getLogger(__name__)

# relations whose dependents are function words whatever their tag
FUNCTION_RELATIONS = frozenset({"aux", "auxpass", "cop"})
CASE_REL = "case"


class CompoundError(ValueError):
    pass


class CompoundRuleError(CompoundError):
    def __init__(self, reason: str, line: int | None = None):
        self.reason = reason
        self.line = line
        super().__init__(f"line {line}: {reason}" if line is not None else reason)


class DanglingTarget(CompoundError):
    pass


class PermutationMismatch(CompoundError):
    pass


class Target(enum.Enum):
    HEAD = "HEAD"
    HEAD_OF_HEAD = "HEAD_OF_HEAD"


class Action(enum.Enum):
    FOLD_SURFACE = "FOLD_SURFACE"
    FOLD_TAG = "FOLD_TAG"
    FOLD_PNG = "FOLD_PNG"


@dataclass(frozen=True)
class CompoundRule:
    id: str
    deprel: str
    target: Target
    action: Action
    delete: bool = False
    dep_pos: frozenset[str] | None = None   # None matches any tag
    head_pos: frozenset[str] | None = None
    line: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.action is Action.FOLD_PNG and self.delete:
            raise CompoundRuleError(f"rule {self.id}: FOLD_PNG rules cannot delete", self.line)
        if self.delete and self.deprel not in FUNCTION_RELATIONS:
            if self.dep_pos is None:
                raise CompoundRuleError(
                    f"rule {self.id}: deleting on {self.deprel} needs an explicit dep_pos", self.line)
            content = sorted(t for t in self.dep_pos if simplify_pos(t) in CONTENT_CLASSES)
            if content:
                raise CompoundRuleError(
                    f"rule {self.id}: would delete content-word tags {content}", self.line)

    def triggers(self, edge: Dependency, tokens: Sequence[Token]) -> bool:
        if edge.rel != self.deprel or edge.head == ROOT:
            return False
        if self.dep_pos is not None and tokens[edge.dep].pos not in self.dep_pos:
            return False
        if self.head_pos is not None and tokens[edge.head].pos not in self.head_pos:
            return False
        return True

    def __str__(self):
        parts = [f"{self.id}: {self.deprel}"]
        if self.dep_pos is not None:
            parts.append("dep_pos=" + ",".join(sorted(self.dep_pos)))
        if self.head_pos is not None:
            parts.append("head_pos=" + ",".join(sorted(self.head_pos)))
        parts += ["->", self.target.value, self.action.value]
        if self.delete:
            parts.append("delete")
        return " ".join(parts)


@dataclass(frozen=True)
class CompoundRuleSet:
    rules: tuple[CompoundRule, ...] = ()
    path: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        ids = {}
        for r in self.rules:
            if r.id in ids:
                raise CompoundRuleError(f"duplicate rule id {r.id}", r.line)
            ids[r.id] = r
        deletable = set()
        for r in self.rules:
            if r.delete and r.dep_pos is not None:
                deletable |= r.dep_pos
        for r in self.rules:
            if r.target is Target.HEAD and r.head_pos is not None and r.head_pos & deletable:
                raise CompoundRuleError(
                    f"rule {r.id}: targets tags {sorted(r.head_pos & deletable)} that other rules delete",
                    r.line)

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)


_RULE_LINE = re.compile(r"^\s*(?P<id>[^:\s]+)\s*:\s*(?P<lhs>[^>]*?)\s*->\s*(?P<rhs>.*?)\s*$")


def _tagset(value: str, line: int) -> frozenset[str] | None:
    tags = frozenset(t for t in value.split(",") if t)
    if not tags:
        raise CompoundRuleError("empty tag list", line)
    return None if tags == {"ANY"} else tags


def parse_compound_rules(text: str, path: str | None = None) -> CompoundRuleSet:
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("//") or line.startswith("#"):
            continue
        m = _RULE_LINE.match(line)
        if not m:
            raise CompoundRuleError(f"cannot parse rule {line!r}", lineno)
        lhs = m.group("lhs").split()
        if not lhs:
            raise CompoundRuleError("missing dependency relation", lineno)
        opts = {"dep_pos": None, "head_pos": None}
        for item in lhs[1:]:
            key, eq, value = item.partition("=")
            if not eq or key not in opts:
                raise CompoundRuleError(f"unknown trigger option {item!r}", lineno)
            opts[key] = _tagset(value, lineno)
        rhs = m.group("rhs").split()
        if len(rhs) not in (2, 3) or (len(rhs) == 3 and rhs[2].lower() != "delete"):
            raise CompoundRuleError(f"expected 'TARGET ACTION [delete]', got {' '.join(rhs)!r}", lineno)
        try:
            target = Target(rhs[0].upper())
            action = Action(rhs[1].upper())
        except ValueError as exc:
            raise CompoundRuleError(str(exc), lineno) from None
        rules.append(CompoundRule(m.group("id"), lhs[0].lower(), target, action,
                                  delete=len(rhs) == 3, line=lineno, **opts))
    return CompoundRuleSet(tuple(rules), path)


def load_compound_rules(path) -> CompoundRuleSet:
    with open(path, encoding="utf-8") as f:
        return parse_compound_rules(f.read(), str(path))


# -- PNG --------------------------------------------------------------------

PNG_ATOMS = ("1s", "2s", "3s", "3sm", "3sf", "3sn", "1p", "2p", "3p")


@dataclass(frozen=True)
class PngLexicon:
    entries: dict = field(default_factory=dict)
    noun_singular: str = "3s"
    fallback: str = "3s"

    def __post_init__(self):
        bad = {k: v for k, v in self.entries.items() if v not in PNG_ATOMS}
        if bad:
            raise ValueError(f"unknown PNG atoms: {bad}")


def parse_png_lexicon(text: str, **kwargs) -> PngLexicon:
    """Parse ``word<whitespace>atom`` lines; ``//`` and ``#`` start comments."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(("//", "#")):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'word atom', got {line!r}")
        entries[parts[0].lower()] = parts[1]
    return PngLexicon(entries, **kwargs)


def extract_png(token: Token, lexicon: PngLexicon | None = None) -> str:
    if lexicon is None:
        from .data import default_png_lexicon
        lexicon = default_png_lexicon()
    for key in (token.lemma.lower(), token.surface.lower()):
        if key in lexicon.entries:
            return lexicon.entries[key]
    if token.pos in ("NNS", "NNPS"):
        return "3p"
    if token.pos in ("NN", "NNP"):
        return lexicon.noun_singular
    log.warning("no PNG entry for %r/%s, using %s", token.surface, token.pos, lexicon.fallback)
    return lexicon.fallback


# -- compounding ------------------------------------------------------------

class Deletion(NamedTuple):
    index: int
    target: int
    atom: str
    rule: str


class Fold(NamedTuple):
    target: int
    source: int
    atom: str
    rule: str


@dataclass
class CompoundResult:
    tokens: list[FactoredToken]
    indices: list[int]              # original index of each surviving token
    deletions: list[Deletion]
    folds: list[Fold]
    remaining_edges: tuple[Dependency, ...]

    def __iter__(self):
        # unpacks as (tokens, deletions)
        return iter((self.tokens, self.deletions))


def derived_edges(edges: Iterable[Dependency]) -> list[tuple[Dependency, Dependency]]:
    """``case(N, P)`` for every ``pobj(P, N)``, paired with its source edge."""
    return [(Dependency(CASE_REL, e.dep, e.head), e) for e in edges
            if e.rel == "pobj" and e.head != ROOT]


def compound_sentence(factored: Sequence[FactoredToken], sentence: AnnotatedSentence,
                      rules: CompoundRuleSet, *, lexicon: PngLexicon | None = None,
                      edges: Sequence[Dependency] | None = None,
                      indices: Sequence[int] | None = None) -> CompoundResult:
    """Fold and delete according to ``rules``.

    ``factored`` is aligned with ``indices`` (original token positions,
    default all of them). Passing a previous result's ``indices`` and
    ``remaining_edges`` re-runs compounding on its output.
    """
    indices = list(range(len(sentence.tokens))) if indices is None else list(indices)
    if len(indices) != len(factored):
        raise ValueError(f"{len(factored)} factored tokens for {len(indices)} indices")
    edges = tuple(sentence.deps.edges if edges is None else edges)
    present = set(indices)
    tokens = sentence.tokens
    heads = {e.dep: e.head for e in edges}

    candidates = [(e, None) for e in edges] + [(d, src) for d, src in derived_edges(edges)]
    fired = []
    for edge, source_edge in candidates:
        if edge.head not in present or edge.dep not in present:
            continue
        for rule in rules:
            if not rule.triggers(edge, tokens):
                continue
            target = edge.head
            if rule.target is Target.HEAD_OF_HEAD:
                target = heads.get(edge.head, ROOT)
                if target == ROOT or target not in present:
                    continue
            fired.append((edge, source_edge, rule, target))
            break

    deleted: dict[int, int] = {}
    folds: list[Fold] = []
    consumed: set[Dependency] = set()
    for edge, source_edge, rule, target in fired:
        dep = edge.dep
        if rule.delete:
            if dep in deleted:
                continue
            deleted[dep] = target
        folds.append(Fold(target, dep, _atom(rule, tokens[dep], lexicon), rule.id))
        consumed.add(source_edge or edge)

    for f in folds:
        if f.target in deleted:
            raise DanglingTarget(
                f"sentence {sentence.id}: rule {f.rule} folds onto token {f.target}, "
                f"which rule-driven deletion removes")

    folds.sort(key=lambda f: (f.target, f.source))
    extra: dict[int, list[str]] = {}
    for f in folds:
        extra.setdefault(f.target, []).append(f.atom)

    out_tokens, out_indices = [], []
    for i, ft in zip(indices, factored):
        if i in deleted:
            continue
        out_tokens.append(ft.with_atoms(*extra[i]) if i in extra else ft)
        out_indices.append(i)

    deletions = [Deletion(f.source, f.target, f.atom, f.rule) for f in folds if f.source in deleted]
    deletions.sort(key=lambda d: d.index)
    remaining = tuple(e for e in edges if e not in consumed
                      and e.dep not in deleted and e.head not in deleted)
    return CompoundResult(out_tokens, out_indices, deletions, folds, remaining)


def _atom(rule: CompoundRule, token: Token, lexicon: PngLexicon | None) -> str:
    if rule.action is Action.FOLD_SURFACE:
        return token.surface.lower()
    if rule.action is Action.FOLD_TAG:
        return token.pos
    return extract_png(token, lexicon)


def integrate(compounded: Sequence[FactoredToken], permutation: Sequence[int],
              deletions: Iterable[Deletion | int]) -> list[FactoredToken]:
    """Lay out surviving tokens in reordered order.

    ``compounded`` holds the survivors in original relative order;
    ``deletions`` are deletion records or plain original indices.
    """
    n = len(permutation)
    if sorted(permutation) != list(range(n)):
        raise PermutationMismatch(f"{list(permutation)} is not a permutation of 0..{n - 1}")
    gone = {d.index if isinstance(d, Deletion) else int(d) for d in deletions}
    if not gone <= set(range(n)):
        raise PermutationMismatch(f"deleted indices {sorted(gone)} outside 0..{n - 1}")
    survivors = [i for i in range(n) if i not in gone]
    if len(survivors) != len(compounded):
        raise PermutationMismatch(
            f"{len(compounded)} compounded tokens but {len(survivors)} survivors of {n}")
    by_index = dict(zip(survivors, compounded))
    return [by_index[i] for i in permutation if i not in gone]
