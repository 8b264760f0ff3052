"""
The training-free verifier
==========================

Build the two empirical distance distributions from labeled pairs of a
synthetic two-author corpus, then classify fresh pairs by comparing the
query distance against both distributions.  Nothing is fitted: the sorted
distances ARE the model.
"""

from styleverify import build_pairs, fit_vocabulary, fuse, vectorize_tfidf
from styleverify.corpus import segment_document
from styleverify.synthetic import two_author_corpus
from styleverify.verifier import build, classify, score

docs, authors = two_author_corpus(n_docs_per_author=40, words_per_doc=1100, seed=1)
segments = [s for d in docs for s in segment_document(d)]
by_ref = {(s.doc_id, s.position): s for s in segments}

vocab = fit_vocabulary(segments, max_grams=5000)
vectors = {ref: fuse(vectorize_tfidf(seg, vocab), None, alpha=0.0)
           for ref, seg in by_ref.items()}

pairs = build_pairs(segments, n_positive=150, n_negative=150, seed=2,
                    authors=authors)
store = build(((vectors[(p.a.doc_id, p.a.position)],
                vectors[(p.b.doc_id, p.b.position)], p.label) for p in pairs),
              alpha=0.0, vocab_hash=vocab.vocab_hash)

print(f"store: {store.meta.n_same} same-author / {store.meta.n_diff} "
      f"different-author distances, metric={store.metric}")
print(f"same-author distances span   [{store.same_sorted[0]:.3f}, "
      f"{store.same_sorted[-1]:.3f}]")
print(f"different-author span        [{store.diff_sorted[0]:.3f}, "
      f"{store.diff_sorted[-1]:.3f}]")

# S = share of same-author distances above d*, D = share of different-author
# distances below d*; S > D decides same-author
for d_star in (0.25, 0.5, 0.95):
    s, d = score(store, d_star)
    print(f"d*={d_star:.2f}: S={s:.3f}, D={d:.3f} -> "
          f"{'same' if s > d else 'different'}-author")

# classify unseen pairings end to end
same_pair = classify(store, vectors[("author_a_0000", "head")],
                     vectors[("author_a_0001", "tail")])
cross_pair = classify(store, vectors[("author_a_0000", "head")],
                      vectors[("author_b_0000", "tail")])
print(f"\nsame-author query:  predicted={same_pair.predicted} "
      f"confidence={same_pair.confidence:.2f} distance={same_pair.distance:.3f}")
print(f"cross-author query: predicted={cross_pair.predicted} "
      f"confidence={cross_pair.confidence:.2f} distance={cross_pair.distance:.3f}")
