"""
Reordering an English parse toward verb-final order
===================================================

"""

from preflect import data
from preflect.corpus import extract_productions
from preflect.reorder import parse_ruleset, regenerate_sentence, reorder_tree

sentence = data.worked_example()
print(sentence.text)
print(sentence.tree)

# the productions a rule can match, preterminals excluded
for prod in extract_productions(sentence.tree, min_arity=2):
    print("  ", prod)

# the shipped sample rules move the verb after its object and the
# preposition after its noun phrase
rules = data.sample_reorder_rules()
tree, trace = reorder_tree(sentence.tree, rules)
for path, i in trace:
    print("fired at", path or "root", ":", rules.rules[i])

text, order = regenerate_sentence(tree, sentence.tokens)
print(text)
print("permutation", order)

# a wildcard symbol moves a run of siblings as one block
rules = parse_ruleset("VP -> VB NP* SBAR # VP -> NP* VB SBAR")
print(rules.rules[0].mapping)
