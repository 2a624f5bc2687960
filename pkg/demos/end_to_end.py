"""
End to end: reorder, factorize, compound, integrate
===================================================

The translation-system scores this pipeline was built to feed need a
parallel corpus and a trained decoder, so the demo stops at the
preprocessed source side and shows the sentence getting shorter.
"""

from preflect import data
from preflect.evaluate import corpus_stats
from preflect.pipeline import PipelineConfig, process_sentence

sentence = data.worked_example()
config = PipelineConfig(reorder_rules=data.sample_reorder_rules(),
                        compound_rules=data.default_compound_rules())
result = process_sentence(sentence, config)

print("input:     ", sentence.text)
print("reordered: ", " ".join(sentence.tokens[i].surface for i in result.order))
print("factored:  ", result.line("factored"))
print("plain:     ", result.line("plain"))

before = corpus_stats([result.factored]).tokens
after = corpus_stats([result.tokens]).tokens
print(f"tokens: {before} -> {after}")
