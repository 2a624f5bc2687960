"""Rule-driven reordering of constituency trees.

Rule file grammar, one rule per line::

    PARENT -> SYM SYM ... # PARENT -> SYM SYM ... [# t:s, t:s, ...]

The optional third unit maps each target slot to the source slot it is
filled from (``0:1`` means "target child 0 comes from source child 1").
Pairs may be separated by commas or whitespace. A symbol written ``X*``
matches a run of one or more consecutive ``X`` children, which moves as a
block. Lines starting with ``//`` and blank lines are ignored.

Rules must cover a node's whole child sequence. At each node the first
matching rule in file order fires, once, and the traversal continues
top-down into the permuted children.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
import re
from typing import Sequence

from .corpus import ConstituencyTree, Token


class RuleError(ValueError):
    def __init__(self, reason: str, line: int | None = None):
        self.reason = reason
        self.line = line
        super().__init__(f"line {line}: {reason}" if line is not None else reason)


class RuleSyntaxError(RuleError):
    pass


class BadArrow(RuleSyntaxError):
    pass


class MappingNotBijective(RuleError):
    pass


class SymbolMultisetMismatch(RuleError):
    pass


class MappingSymbolMismatch(RuleError):
    pass


class ParentLabelMismatch(RuleError):
    pass


class AmbiguousMapping(RuleError):
    pass


class DuplicateSourcePattern(RuleError):
    pass


@dataclass(frozen=True)
class Symbol:
    label: str
    star: bool = False

    @classmethod
    def parse(cls, text: str) -> Symbol:
        if text.endswith("*") and len(text) > 1:
            return cls(text[:-1], True)
        return cls(text)

    def __str__(self):
        return self.label + ("*" if self.star else "")


@dataclass(frozen=True)
class Pattern:
    parent: str
    symbols: tuple[Symbol, ...]

    def __str__(self):
        return f"{self.parent} -> {' '.join(map(str, self.symbols))}"


@dataclass(frozen=True)
class ReorderRule:
    """A reordering rule. ``mapping[t]`` is the source slot that fills
    target slot ``t``."""
    source: Pattern
    target: Pattern
    mapping: tuple[int, ...]
    line: int | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(self.mapping))
        _validate(self.source, self.target, self.mapping, self.line)

    @property
    def parent(self) -> str:
        return self.source.parent

    @property
    def is_identity(self) -> bool:
        return self.mapping == tuple(range(len(self.mapping)))

    def __str__(self):
        pairs = ",".join(f"{t}:{s}" for t, s in enumerate(self.mapping))
        return f"{self.source} # {self.target} # {pairs}"


def _validate(source: Pattern, target: Pattern, mapping, line):
    if source.parent != target.parent:
        raise ParentLabelMismatch(
            f"source parent {source.parent} differs from target parent {target.parent}", line)
    if Counter(source.symbols) != Counter(target.symbols):
        raise SymbolMultisetMismatch(
            f"target symbols [{' '.join(map(str, target.symbols))}] are not a reordering of "
            f"[{' '.join(map(str, source.symbols))}]", line)
    n = len(source.symbols)
    if len(mapping) != n or sorted(mapping) != list(range(n)):
        raise MappingNotBijective(f"mapping {list(mapping)} is not a permutation of {n} slots", line)
    for t, s in enumerate(mapping):
        if target.symbols[t] != source.symbols[s]:
            raise MappingSymbolMismatch(
                f"target slot {t} ({target.symbols[t]}) taken from source slot {s} "
                f"({source.symbols[s]})", line)


@dataclass(frozen=True)
class ReorderRuleSet:
    rules: tuple[ReorderRule, ...] = ()
    path: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        seen = {}
        for rule in self.rules:
            if rule.source in seen:
                raise DuplicateSourcePattern(
                    f"source pattern {rule.source} already defined on line {seen[rule.source]}",
                    rule.line)
            seen[rule.source] = rule.line
        by_parent: dict[str, list[tuple[int, ReorderRule]]] = {}
        for i, rule in enumerate(self.rules):
            by_parent.setdefault(rule.parent, []).append((i, rule))
        object.__setattr__(self, "_by_parent", by_parent)

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def candidates(self, parent: str) -> list[tuple[int, ReorderRule]]:
        return self._by_parent.get(parent, [])

    def to_text(self) -> str:
        return "".join(str(r) + "\n" for r in self.rules)


# -- parsing ----------------------------------------------------------------

def _parse_side(text: str, line: int) -> Pattern:
    parts = text.split("->")
    if len(parts) != 2:
        raise BadArrow(f"expected exactly one '->' in {text.strip()!r}", line)
    lhs, rhs = parts[0].split(), parts[1].split()
    if len(lhs) != 1:
        raise BadArrow(f"expected one parent label before '->', got {lhs}", line)
    if not rhs:
        raise BadArrow("no child symbols after '->'", line)
    if lhs[0].endswith("*"):
        raise BadArrow(f"parent label {lhs[0]} cannot be a wildcard", line)
    return Pattern(lhs[0], tuple(Symbol.parse(s) for s in rhs))


def _parse_mapping(text: str, n: int, line: int) -> tuple[int, ...]:
    pairs = {}
    sources = []
    for item in filter(None, re.split(r"[,\s]+", text.strip())):
        m = re.fullmatch(r"(\d+):(\d+)", item)
        if not m:
            raise RuleSyntaxError(f"bad mapping pair {item!r}", line)
        t, s = int(m.group(1)), int(m.group(2))
        if t in pairs or t >= n or s >= n:
            raise MappingNotBijective(f"mapping pair {item} is out of range or repeated", line)
        pairs[t] = s
        sources.append(s)
    if len(pairs) != n or len(set(sources)) != n:
        raise MappingNotBijective(
            f"mapping {text.strip()!r} does not pair all {n} slots one-to-one", line)
    return tuple(pairs[t] for t in range(n))


def _infer_mapping(source: Pattern, target: Pattern, line: int) -> tuple[int, ...]:
    if len(set(source.symbols)) != len(source.symbols):
        raise AmbiguousMapping(f"repeated symbols in {source}; give the mapping explicitly", line)
    if Counter(source.symbols) != Counter(target.symbols):
        raise SymbolMultisetMismatch(f"{target} is not a reordering of {source}", line)
    return tuple(source.symbols.index(sym) for sym in target.symbols)


def parse_rule(text: str, line: int | None = None) -> ReorderRule:
    units = text.split("#")
    if len(units) not in (2, 3):
        raise RuleSyntaxError(f"expected 2 or 3 '#'-separated units, found {len(units)}", line)
    source = _parse_side(units[0], line)
    target = _parse_side(units[1], line)
    if source.parent != target.parent:
        raise ParentLabelMismatch(f"{source.parent} != {target.parent}", line)
    if len(units) == 3 and units[2].strip():
        mapping = _parse_mapping(units[2], len(source.symbols), line)
    else:
        mapping = _infer_mapping(source, target, line)
    return ReorderRule(source, target, mapping, line)


def parse_ruleset(text: str, path: str | None = None) -> ReorderRuleSet:
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("//"):
            continue
        rules.append(parse_rule(line, lineno))
    return ReorderRuleSet(tuple(rules), path)


def load_ruleset(path) -> ReorderRuleSet:
    with open(path, encoding="utf-8") as f:
        return parse_ruleset(f.read(), str(path))


# -- matching and application -----------------------------------------------

Binding = tuple[tuple[int, int], ...]


def match_production(rule: ReorderRule, children: Sequence[str],
                     parent: str | None = None) -> Binding | None:
    """Match the rule's source pattern against a whole child-label sequence.

    Returns one half-open ``(start, end)`` span per source slot, or None.
    Starred slots are greedy and backtrack.
    """
    if parent is not None and parent != rule.parent:
        return None
    symbols = rule.source.symbols
    labels = tuple(children)

    def go(si, ci):
        if si == len(symbols):
            return () if ci == len(labels) else None
        sym = symbols[si]
        if not sym.star:
            if ci < len(labels) and labels[ci] == sym.label:
                rest = go(si + 1, ci + 1)
                return None if rest is None else ((ci, ci + 1),) + rest
            return None
        end = ci
        while end < len(labels) and labels[end] == sym.label:
            end += 1
        for stop in range(end, ci, -1):
            rest = go(si + 1, stop)
            if rest is not None:
                return ((ci, stop),) + rest
        return None

    return go(0, 0)


def apply_binding(rule: ReorderRule, binding: Binding, children: Sequence) -> tuple:
    out = []
    for s in rule.mapping:
        start, end = binding[s]
        out.extend(children[start:end])
    return tuple(out)


def reorder_tree(tree: ConstituencyTree, rules: ReorderRuleSet
                 ) -> tuple[ConstituencyTree, list[tuple[tuple[int, ...], int]]]:
    """Apply ``rules`` top-down, one rule per node.

    Returns the new tree and a pre-order trace of ``(path, rule index)``
    where ``path`` locates the node in the returned tree.
    """
    trace = []

    def visit(node, path):
        if node.is_preterminal:
            return node
        children = node.children
        labels = node.child_labels()
        for i, rule in rules.candidates(node.label):
            binding = match_production(rule, labels)
            if binding is not None:
                children = apply_binding(rule, binding, children)
                trace.append((path, i))
                break
        return ConstituencyTree(node.label, tuple(
            visit(c, path + (k,)) for k, c in enumerate(children)))

    return visit(tree, ()), trace


def leaf_order(tree: ConstituencyTree) -> list[int]:
    return [leaf.index for leaf in tree.leaves()]


def regenerate_sentence(tree: ConstituencyTree, tokens: Sequence[Token]) -> tuple[str, list[int]]:
    order = leaf_order(tree)
    return " ".join(tokens[i].surface for i in order), order
