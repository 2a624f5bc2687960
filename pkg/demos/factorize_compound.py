"""
Factored tokens and compounding
===============================

"""

from preflect import data
from preflect.compound import compound_sentence
from preflect.factorize import factorize_sentence

sentence = data.worked_example()

# every token becomes word|lemma|class|morphology
factored = factorize_sentence(sentence)
for tok in factored:
    print(tok)

# the default rules delete the preposition and fold it onto its object,
# and fold the subject's person/number/gender onto the verb
rules = data.default_compound_rules()
result = compound_sentence(factored, sentence, rules)
print()
for tok in result.tokens:
    print(tok)
for d in result.deletions:
    print("deleted", sentence.tokens[d.index].surface, "->", sentence.tokens[d.target].surface,
          "by", d.rule)
