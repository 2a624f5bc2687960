"""
BLEU and METEOR on a toy corpus
===============================

"""

from preflect.evaluate import bleu, meteor_lite

hyps = ["the cat sat on the mat".split(), "a dog barked".split()]
refs = ["the cat is on the mat".split(), "the dog barked".split()]

# clipped n-gram precisions are kept as exact fractions
report = bleu(hyps, refs)
print(report.format())
for n in range(1, 5):
    print(n, report.precision(n))

# sparse higher orders zero the score unless smoothed
print(bleu(hyps, refs, smoothing="add1").cumulative)

report = meteor_lite(hyps, refs)
print(report.format())
