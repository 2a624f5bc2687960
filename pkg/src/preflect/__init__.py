"""Source-side preprocessing of English for English-Tamil factored SMT:
constituency reordering, four-factor factorization, dependency-driven
compounding, and BLEU/METEOR scoring."""

from .compound import (CompoundRule, CompoundRuleSet, Deletion, PngLexicon, compound_sentence,
                       extract_png, integrate, parse_compound_rules)
from .corpus import (AnnotatedSentence, ConstituencyTree, Dependency, DependencyGraph,
                     FactoredToken, Leaf, Token, extract_productions, parse_ptb,
                     read_sentences, serialize_ptb)
from .evaluate import BleuReport, MeteorReport, bleu, corpus_stats, meteor_lite
from .factorize import factorize_sentence, simplify_pos
from .pipeline import PipelineConfig, process_sentence, run_pipeline
from .reorder import (ReorderRule, ReorderRuleSet, match_production, parse_ruleset,
                      regenerate_sentence, reorder_tree)

__version__ = "0.1.0"
