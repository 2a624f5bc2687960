"""Sample rule files, fixtures and lexicons shipped with the package."""
from __future__ import annotations

from functools import lru_cache
from importlib import resources


def path(name: str):
    """Filesystem path of a shipped data file."""
    return resources.files(__name__).joinpath(name)


def read_text(name: str) -> str:
    return path(name).read_text(encoding="utf-8")


def sample_reorder_rules():
    from ..reorder import parse_ruleset
    return parse_ruleset(read_text("sample.rr"), "sample.rr")


def default_compound_rules():
    from ..compound import parse_compound_rules
    return parse_compound_rules(read_text("default.cr"), "default.cr")


@lru_cache(maxsize=None)
def default_png_lexicon():
    from ..compound import parse_png_lexicon
    return parse_png_lexicon(read_text("png.tsv"))


def worked_example():
    from ..corpus import read_sentences
    return next(read_sentences(read_text("worked_example.jsonl").splitlines()))


def reorder_fixtures() -> list[dict]:
    import json
    return [json.loads(l) for l in read_text("reorder_fixtures.jsonl").splitlines() if l.strip()]
