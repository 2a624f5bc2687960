"""Annotated sentences, constituency trees, dependency graphs and the
factored token representation, plus readers and writers for the
ingestion formats (JSONL and bracketed trees + CoNLL).
"""
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence, TextIO, Union

log = logging.getLogger(__name__)

ROOT = -1

FACTOR_SEP = "|"
ATOM_SEP = "_"
_ESCAPED = "\\|_#"

_WS = re.compile(r"\s")
_PTB_TOKEN = re.compile(r"\(|\)|[^\s()]+")
_PTB_BRACKETS = {"-LRB-": "(", "-RRB-": ")", "-LCB-": "{", "-RCB-": "}", "-LSB-": "[", "-RSB-": "]"}


class CorpusError(ValueError):
    pass


class TreeError(CorpusError):
    pass


class UnbalancedBrackets(TreeError):
    pass


class EmptyNode(TreeError):
    pass


class LeafUnderNonPOSNode(TreeError):
    pass


class FormatError(CorpusError):
    def __init__(self, line: int | None, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}" if line is not None else reason)


class InvariantViolation(CorpusError):
    def __init__(self, sentence_id: str | None, reason: str):
        self.sentence_id = sentence_id
        self.reason = reason
        super().__init__(f"sentence {sentence_id}: {reason}" if sentence_id is not None else reason)


# -- escaping ---------------------------------------------------------------

def escape(text: str) -> str:
    """Backslash-escape the characters that are structural in factored
    lines and rule files (``\\``, ``|``, ``_``, ``#``)."""
    return "".join("\\" + ch if ch in _ESCAPED else ch for ch in text)


def unescape(text: str) -> str:
    out = []
    chars = iter(text)
    for ch in chars:
        if ch == "\\":
            out.append(next(chars, "\\"))
        else:
            out.append(ch)
    return "".join(out)


def split_unescaped(text: str, sep: str) -> list[str]:
    """Split ``text`` on occurrences of ``sep`` not preceded by an escape.
    Pieces are returned still escaped."""
    parts, buf = [], []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            buf.append(text[i:i + 2])
            i += 2
            continue
        if ch == sep:
            parts.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
        i += 1
    parts.append("".join(buf))
    return parts


# -- tokens and trees -------------------------------------------------------

@dataclass(frozen=True)
class Token:
    index: int
    surface: str
    lemma: str
    pos: str

    def __post_init__(self):
        for name in ("surface", "lemma", "pos"):
            value = getattr(self, name)
            if not value:
                raise InvariantViolation(None, f"token {self.index}: empty {name}")
            if _WS.search(value):
                raise InvariantViolation(None, f"token {self.index}: whitespace in {name} {value!r}")


@dataclass(frozen=True)
class Leaf:
    """A terminal: the position of a token in the original sentence."""
    index: int
    word: str


@dataclass(frozen=True)
class ConstituencyTree:
    label: str
    children: tuple[Union[ConstituencyTree, Leaf], ...]

    def __post_init__(self):
        if not self.label:
            raise EmptyNode("node without a label")
        if not self.children:
            raise EmptyNode(f"node ({self.label}) has no children")
        if len(self.children) > 1 and any(isinstance(c, Leaf) for c in self.children):
            raise LeafUnderNonPOSNode(
                f"terminal directly under ({self.label}) alongside other children")

    @property
    def is_preterminal(self) -> bool:
        return isinstance(self.children[0], Leaf)

    def child_labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.children)

    def leaves(self) -> list[Leaf]:
        out: list[Leaf] = []
        stack: list[ConstituencyTree | Leaf] = [self]
        while stack:
            node = stack.pop()
            if isinstance(node, Leaf):
                out.append(node)
            else:
                stack.extend(reversed(node.children))
        return out

    def preterminals(self) -> list[ConstituencyTree]:
        return [n for n in self.iter_nodes() if n.is_preterminal]

    def iter_nodes(self) -> Iterator[ConstituencyTree]:
        """Internal nodes in pre-order."""
        stack: list[ConstituencyTree] = [self]
        while stack:
            node = stack.pop()
            yield node
            if not node.is_preterminal:
                stack.extend(reversed(node.children))

    def node_at(self, path: Sequence[int]) -> ConstituencyTree:
        node = self
        for k in path:
            node = node.children[k]
        return node

    def __str__(self) -> str:
        return serialize_ptb(self)


class Production(NamedTuple):
    parent: str
    children: tuple[str, ...]
    path: tuple[int, ...]

    def __str__(self):
        return f"{self.parent} -> {' '.join(self.children)}"


def parse_ptb(text: str) -> ConstituencyTree:
    """Parse one bracketed tree. Leaves are numbered left to right.

    A label-less outer wrapper, as in ``( (S ...) )``, is removed.
    """
    stack: list[list] = []  # [label or None, children]
    result = None
    n_leaves = 0
    for tok in _PTB_TOKEN.findall(text):
        if tok == "(":
            if result is not None:
                raise UnbalancedBrackets("material after the end of the tree")
            if stack and stack[-1][0] is None:
                stack[-1][0] = ""
            stack.append([None, []])
        elif tok == ")":
            if not stack:
                raise UnbalancedBrackets("unexpected ')'")
            label, kids = stack.pop()
            node = _make_node(label, kids, is_root=not stack)
            if stack:
                stack[-1][1].append(node)
            else:
                result = node
        else:
            if not stack or result is not None:
                raise UnbalancedBrackets(f"text {tok!r} outside brackets")
            frame = stack[-1]
            if frame[0] is None:
                frame[0] = tok
            else:
                frame[1].append(Leaf(n_leaves, tok))
                n_leaves += 1
    if stack:
        raise UnbalancedBrackets(f"{len(stack)} unclosed bracket(s)")
    if result is None:
        raise EmptyNode("no tree in input")
    return result


def _make_node(label, kids, is_root):
    if not label:
        if is_root and len(kids) == 1 and isinstance(kids[0], ConstituencyTree):
            return kids[0]
        raise EmptyNode("node without a label")
    return ConstituencyTree(label, tuple(kids))


def _ptb_word(word: str) -> str:
    return word.replace("(", "-LRB-").replace(")", "-RRB-")


def serialize_ptb(tree: ConstituencyTree) -> str:
    def write(node):
        if isinstance(node, Leaf):
            return _ptb_word(node.word)
        return "(" + node.label + " " + " ".join(write(c) for c in node.children) + ")"
    return write(tree)


def extract_productions(tree: ConstituencyTree, min_arity: int = 1) -> list[Production]:
    """Productions of every phrasal node in pre-order.

    Preterminal (POS -> word) nodes are not productions. ``min_arity=2``
    drops unary chains such as ``NP -> PRP``.
    """
    out = []
    stack = [(tree, ())]
    while stack:
        node, path = stack.pop()
        if node.is_preterminal:
            continue
        if len(node.children) >= min_arity:
            out.append(Production(node.label, node.child_labels(), path))
        for k in range(len(node.children) - 1, -1, -1):
            stack.append((node.children[k], path + (k,)))
    return out


def same_word(a: str, b: str) -> bool:
    return _PTB_BRACKETS.get(a, a) == _PTB_BRACKETS.get(b, b)


# -- dependencies -----------------------------------------------------------

class Dependency(NamedTuple):
    rel: str
    head: int
    dep: int


@dataclass(frozen=True)
class DependencyGraph:
    edges: tuple[Dependency, ...]
    _heads: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(Dependency(*e) for e in self.edges))
        heads = {}
        roots = 0
        for e in self.edges:
            if not e.rel or _WS.search(e.rel):
                raise InvariantViolation(None, f"bad relation name {e.rel!r}")
            if e.dep in heads:
                raise InvariantViolation(None, f"token {e.dep} has more than one head")
            if e.dep < 0 or e.head < ROOT:
                raise InvariantViolation(None, f"negative index in edge {tuple(e)}")
            heads[e.dep] = e
            roots += e.head == ROOT
        if roots != 1:
            raise InvariantViolation(None, f"expected exactly one ROOT edge, found {roots}")
        object.__setattr__(self, "_heads", heads)

    def incoming(self, index: int) -> Dependency | None:
        return self._heads.get(index)

    def head_of(self, index: int) -> int | None:
        e = self._heads.get(index)
        return None if e is None else e.head

    @property
    def root(self) -> int:
        return next(e.dep for e in self.edges if e.head == ROOT)


# -- sentences --------------------------------------------------------------

@dataclass(frozen=True)
class AnnotatedSentence:
    id: str
    tokens: tuple[Token, ...]
    tree: ConstituencyTree
    deps: DependencyGraph

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        try:
            self._validate()
        except InvariantViolation as exc:
            if exc.sentence_id is None:
                raise InvariantViolation(self.id, exc.reason) from None
            raise

    def _validate(self):
        n = len(self.tokens)
        for i, tok in enumerate(self.tokens):
            if tok.index != i:
                raise InvariantViolation(self.id, f"token indices not contiguous at position {i}")
        pres = self.tree.preterminals()
        if len(pres) != n:
            raise InvariantViolation(self.id, f"tree yield has {len(pres)} leaves, sentence has {n} tokens")
        for k, node in enumerate(pres):
            leaf = node.children[0]
            tok = self.tokens[leaf.index] if 0 <= leaf.index < n else None
            if leaf.index != k or tok is None:
                raise InvariantViolation(self.id, f"leaf {k} carries index {leaf.index}")
            if not same_word(leaf.word, tok.surface):
                raise InvariantViolation(self.id, f"leaf {k} is {leaf.word!r}, token is {tok.surface!r}")
            if node.label != tok.pos:
                raise InvariantViolation(self.id, f"leaf {k} tagged {node.label}, token tagged {tok.pos}")
        if self.deps.edges:
            top = max(e.dep for e in self.deps.edges)
            if top + 1 != n:
                raise InvariantViolation(self.id, f"max dependent index {top} does not fit {n} tokens")
            if any(e.head >= n for e in self.deps.edges):
                raise InvariantViolation(self.id, "dependency head out of range")

    def __len__(self):
        return len(self.tokens)

    @property
    def text(self) -> str:
        return " ".join(t.surface for t in self.tokens)

    @classmethod
    def from_record(cls, record: dict) -> AnnotatedSentence:
        """Build from a JSONL record; raises KeyError/TypeError on a
        malformed record and a CorpusError on invalid content."""
        sid = str(record["id"])
        try:
            tokens = tuple(Token(i, t["surface"], t["lemma"], t["pos"])
                           for i, t in enumerate(record["tokens"]))
            deps = DependencyGraph(tuple(Dependency(d["rel"], int(d["head"]), int(d["dep"]))
                                         for d in record["deps"]))
        except InvariantViolation as exc:
            raise InvariantViolation(sid, exc.reason) from None
        return cls(sid, tokens, parse_ptb(record["parse"]), deps)

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "tokens": [{"surface": t.surface, "lemma": t.lemma, "pos": t.pos} for t in self.tokens],
            "parse": serialize_ptb(self.tree),
            "deps": [{"rel": e.rel, "head": e.head, "dep": e.dep} for e in self.deps.edges],
        }


# -- factored tokens --------------------------------------------------------

@dataclass(frozen=True)
class FactoredToken:
    word: str
    lemma: str
    word_class: str
    morphology: tuple[str, ...]
    # original casing, kept for display only
    surface: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "morphology", tuple(self.morphology))
        if not self.morphology or any(not a for a in self.morphology):
            raise ValueError(f"empty morphology atom in {self.morphology!r}")

    def with_atoms(self, *atoms: str) -> FactoredToken:
        return FactoredToken(self.word, self.lemma, self.word_class,
                             self.morphology + tuple(atoms), self.surface)

    def factors(self) -> tuple[str, str, str, str]:
        """Escaped factor strings, morphology atoms already joined."""
        return (escape(self.word), escape(self.lemma), escape(self.word_class),
                ATOM_SEP.join(escape(a) for a in self.morphology))

    def __str__(self) -> str:
        return FACTOR_SEP.join(self.factors())


def parse_factored_token(text: str) -> FactoredToken:
    parts = split_unescaped(text, FACTOR_SEP)
    if len(parts) != 4:
        raise FormatError(None, f"expected 4 factors in {text!r}, found {len(parts)}")
    atoms = tuple(unescape(a) for a in split_unescaped(parts[3], ATOM_SEP))
    return FactoredToken(unescape(parts[0]), unescape(parts[1]), unescape(parts[2]), atoms)


def format_factored(tokens: Iterable[FactoredToken]) -> str:
    return " ".join(str(t) for t in tokens)


def parse_factored_line(line: str) -> list[FactoredToken]:
    return [parse_factored_token(t) for t in line.split()]


# -- readers ----------------------------------------------------------------

def read_sentences(source: TextIO | Iterable[str], format: str = "jsonl", *,
                   conll: TextIO | Iterable[str] | None = None,
                   strict: bool = True) -> Iterator[AnnotatedSentence]:
    """Yield validated sentences in input order.

    ``format`` is ``"jsonl"`` or ``"ptbconll"``; the latter reads one
    bracketed tree per line from ``source`` and the parallel dependency
    blocks from ``conll``. With ``strict=False`` a bad sentence is logged
    and skipped instead of raising.
    """
    for sentence, _ in read_records(source, format, conll=conll, strict=strict):
        yield sentence


def read_records(source, format="jsonl", *, conll=None, strict=True
                 ) -> Iterator[tuple[AnnotatedSentence, dict]]:
    """Like :func:`read_sentences` but also yields the raw JSON record
    (empty for ptbconll input), so extra fields can be passed through."""
    if format == "jsonl":
        records = _jsonl_records(source)
    elif format in ("ptbconll", "ptb+conll"):
        if conll is None:
            raise ValueError("ptbconll format needs a CoNLL stream")
        records = _ptbconll_records(source, conll)
    else:
        raise ValueError(f"unknown format {format!r}")

    for line, build in records:
        try:
            yield build()
        except InvariantViolation as exc:
            if strict:
                raise
            log.warning("skipping %s", exc)
        except (TreeError, FormatError) as exc:
            err = exc if isinstance(exc, FormatError) else FormatError(line, str(exc))
            if strict:
                raise err from None
            log.warning("skipping %s", err)


def _jsonl_records(source):
    for lineno, raw in enumerate(source, 1):
        if not raw.strip():
            continue
        yield lineno, _jsonl_builder(lineno, raw)


def _jsonl_builder(lineno, raw):
    def build():
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise FormatError(lineno, f"invalid JSON: {exc.msg}") from None
        if not isinstance(record, dict):
            raise FormatError(lineno, "record is not an object")
        try:
            return AnnotatedSentence.from_record(record), record
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, CorpusError):
                raise
            raise FormatError(lineno, f"malformed record: {exc!r}") from None
    return build


# CoNLL-X columns
ID, FORM, LEMMA, CPOSTAG, POSTAG, FEATS, HEAD, DEPREL = range(8)


def read_conll_blocks(stream: Iterable[str]) -> Iterator[tuple[int, list[list[str]]]]:
    """Yield (first line number, rows) per sentence block."""
    rows: list[list[str]] = []
    start = None
    for lineno, raw in enumerate(stream, 1):
        line = raw.rstrip("\r\n")
        if line.startswith("#"):
            continue
        if not line.strip():
            if rows:
                yield start, rows
                rows, start = [], None
            continue
        cols = line.split("\t")
        if len(cols) < 8:
            cols = line.split()
        if len(cols) < 8:
            raise FormatError(lineno, f"expected 10 CoNLL columns, found {len(cols)}")
        if "-" in cols[ID] or "." in cols[ID]:
            continue
        if start is None:
            start = lineno
        rows.append(cols)
    if rows:
        yield start, rows


def _ptbconll_records(trees, conll):
    tree_lines = ((n, l) for n, l in enumerate(trees, 1) if l.strip())
    blocks = read_conll_blocks(conll)
    k = 0
    for (lineno, tree_text), block in _zip_strict(tree_lines, blocks):
        k += 1
        yield lineno, _ptbconll_builder(f"sent-{k}", lineno, tree_text, block)


def _zip_strict(a, b):
    sentinel = object()
    a, b = iter(a), iter(b)
    while True:
        x, y = next(a, sentinel), next(b, sentinel)
        if x is sentinel and y is sentinel:
            return
        if x is sentinel or y is sentinel:
            raise FormatError(None, "tree file and CoNLL file have different sentence counts")
        yield x, y


def _ptbconll_builder(sid, lineno, tree_text, block):
    def build():
        _, rows = block
        tokens, edges = [], []
        for k, cols in enumerate(rows):
            try:
                ident = int(cols[ID])
                head = int(cols[HEAD])
            except ValueError:
                raise FormatError(lineno, f"non-integer ID/HEAD in CoNLL row {cols[:2]}") from None
            if ident != k + 1:
                raise InvariantViolation(sid, f"CoNLL IDs not contiguous at row {k + 1}")
            form = cols[FORM]
            lemma = cols[LEMMA] if cols[LEMMA] != "_" or form == "_" else form
            try:
                tokens.append(Token(k, form, lemma, cols[POSTAG]))
            except InvariantViolation as exc:
                raise InvariantViolation(sid, exc.reason) from None
            edges.append(Dependency(cols[DEPREL], head - 1, k))
        try:
            deps = DependencyGraph(tuple(edges))
        except InvariantViolation as exc:
            raise InvariantViolation(sid, exc.reason) from None
        return AnnotatedSentence(sid, tuple(tokens), parse_ptb(tree_text), deps), {}
    return build


def write_jsonl(sentences: Iterable[AnnotatedSentence], out: TextIO) -> None:
    for s in sentences:
        out.write(json.dumps(s.to_record(), ensure_ascii=False) + "\n")
