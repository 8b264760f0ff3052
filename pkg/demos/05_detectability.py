"""
Perplexity-based detectability
==============================

Perplexity is computed from externally produced token log-probabilities
(natural log), never by hosting a scoring model here.  Two synthetic groups
mimic the usual picture: machine text is concentrated at low perplexity,
human text is broader and higher.
"""

import math
import random

from styleverify import TokenLogProbs, detectability_report, perplexity
from styleverify.detection import cdf_series, histogram_series

# exp(-mean(logprobs)): three sanity points
print("uniform 1/2 tokens  ->", perplexity(TokenLogProbs("a", [math.log(0.5)] * 8)))
print("certain tokens      ->", perplexity(TokenLogProbs("b", [0.0] * 8)))
print("probs .5 and .125   ->", perplexity(TokenLogProbs("c", [math.log(.5), math.log(.125)])))

rng = random.Random(11)


def fake_doc(doc_id, target_ppl, n_tokens=300):
    # mean logprob -ln(target) with small per-token noise
    base = -math.log(target_ppl)
    lps = [min(0.0, base + rng.gauss(0, 0.4)) for _ in range(n_tokens)]
    return TokenLogProbs(doc_id, lps, scorer_tag="synthetic")


groups = {
    "ai": [fake_doc(f"ai{i}", rng.lognormvariate(math.log(15), 0.18))
           for i in range(300)],
    "human": [fake_doc(f"h{i}", rng.lognormvariate(math.log(30), 0.35))
              for i in range(300)],
}

report = detectability_report(groups, thresholds=[20.0, 30.0])
print(f"\ngroup means: ai={report.group_means['ai']:.1f} "
      f"human={report.group_means['human']:.1f}")
for t, fractions in sorted(report.cdf_at.items()):
    print(f"ppl <= {t:.0f}: ai {fractions['ai']:.0%}, human {fractions['human']:.0%}")

# CSV-ready series for external plotting (shared bin edges, per-group CDF)
ppls = {g: [report.per_doc[d.id] for d in docs] for g, docs in groups.items()}
hist = histogram_series(ppls, bins=12)
print(f"\nhistogram series: {len(hist)} rows, e.g. {hist[0]}")
cdf = cdf_series(ppls)
print(f"cdf series: {len(cdf)} rows, e.g. {cdf[0]}")
