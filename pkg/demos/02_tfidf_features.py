"""
Character n-gram TF-IDF and block fusion
========================================

Fit a 3-5 gram vocabulary ranked by document frequency, inspect the TF-IDF
equation on a worked example, and fuse the sparse block with a dense
embedding block into one style vector.
"""

import math

import numpy as np

from styleverify import fit_vocabulary, fuse, vectorize_tfidf
from styleverify.corpus import Segment
from styleverify.distance import cosine_distance
from styleverify.features import NGramVocabulary, TfIdfVector

segments = [
    Segment("a", "head", "punctuation, punctuation, and more punctuation!", 6),
    Segment("b", "head", "a different segment; still punctuated, lightly.", 7),
    Segment("c", "head", "the third one shares words and punctuation.", 8),
]

vocab = fit_vocabulary(segments, max_grams=50)
print(f"fitted {len(vocab)} grams over N={vocab.corpus_size_n} documents")
print("top ten by document frequency:",
      [(g, vocab.doc_freq[g]) for g in vocab.grams[:10]])

# the worked example: "aba" occurs twice (overlapping) in "ababa", |d|=5
toy = NGramVocabulary(grams=["aba"], doc_freq={"aba": 1}, corpus_size_n=2)
vec = vectorize_tfidf("ababa", toy)
print(f"\ntfidf('aba', 'ababa') = (2/5) * ln(2/1) = {vec.entries[0]:.5f} "
      f"(expected {(2 / 5) * math.log(2):.5f})")

# grams present in every document carry zero weight through the idf term
common = vocab.index_of("unct")
weights = vectorize_tfidf(segments[0], vocab)
print(f"weight of corpus-wide gram 'unct': {weights.entries.get(common, 0.0)}")

# fusion: each block unit-normalized, embedding block scaled by alpha
rng = np.random.default_rng(0)
emb = rng.normal(size=384)
tfidf = TfIdfVector({0: 0.3, 4: 0.1}, doc_char_count=47)
for alpha in (0.0, 1.0, 1e6):
    sv = fuse(tfidf, emb, alpha=alpha)
    print(f"alpha={alpha:>9}: |tfidf block|={np.linalg.norm(sv.tfidf_values):.3f}, "
          f"|embedding block|={np.linalg.norm(sv.embedding):.3f}")

# with alpha=0 the cosine distance is decided by the sparse block alone
a = fuse(TfIdfVector({0: 1.0}, 10), rng.normal(size=384), alpha=0.0)
b = fuse(TfIdfVector({1: 1.0}, 10), rng.normal(size=384), alpha=0.0)
print(f"\ndisjoint tfidf support at alpha=0 -> cosine distance "
      f"{cosine_distance(a, b):.1f} (orthogonal)")
