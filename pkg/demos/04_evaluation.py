"""
Evaluation metrics and a two-system comparison
==============================================

Score the verifier on held-out pairs (accuracy, F1, ROC AUC, confusion
matrix, confidence summary) and use McNemar's paired test to decide whether
two verifier variants differ significantly.

A note on metrics: with each block unit-normalized, Euclidean distance is a
monotone transform of cosine distance, so both rank pairs identically and
the verifiers agree on every prediction.  To get a non-degenerate paired
comparison we instead pit the full vocabulary against a starved 100-gram
one.
"""

from styleverify import build_pairs, evaluate, fit_vocabulary, fuse, mcnemar, vectorize_tfidf
from styleverify.corpus import segment_document
from styleverify.evaluation import render_table
from styleverify.synthetic import two_author_corpus
from styleverify.verifier import build, classify

# a harder corpus: weak bias, so the systems actually make mistakes
docs, authors = two_author_corpus(n_docs_per_author=60, words_per_doc=1100,
                                  seed=5, boost=1.35)
segments = [s for d in docs for s in segment_document(d)]
by_ref = {(s.doc_id, s.position): s for s in segments}
construction = build_pairs(segments, 200, 200, seed=6, authors=authors)
held_out = build_pairs(segments, 150, 150, seed=7, authors=authors)

systems = {}
for name, max_grams in (("full vocabulary", 5000), ("100-gram vocabulary", 100)):
    vocab = fit_vocabulary(segments, max_grams=max_grams)
    vectors = {ref: fuse(vectorize_tfidf(seg, vocab), None, alpha=0.0)
               for ref, seg in by_ref.items()}
    store = build(((vectors[(p.a.doc_id, p.a.position)],
                    vectors[(p.b.doc_id, p.b.position)], p.label)
                   for p in construction), alpha=0.0)
    verdicts = [(classify(store, vectors[(p.a.doc_id, p.a.position)],
                          vectors[(p.b.doc_id, p.b.position)]), p.label)
                for p in held_out]
    systems[name] = verdicts
    print(render_table(evaluate(verdicts),
                       title=f"{name}, 300 held-out pairs"))
    print()

# paired chi-square on discordant predictions between the two systems
truth = [label for _, label in systems["full vocabulary"]]
result = mcnemar([v.predicted for v, _ in systems["full vocabulary"]],
                 [v.predicted for v, _ in systems["100-gram vocabulary"]],
                 truth)
print(f"McNemar: n01={result.n01} n10={result.n10} chi2={result.chi2:.3f} "
      f"-> {'significant' if result.significant_at_05 else 'no significant'} "
      "difference at alpha=0.05")
