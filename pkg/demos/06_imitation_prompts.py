"""
Style-imitation prompting conditions
====================================

Extract a statistical style profile, build the four prompting conditions
(zero-shot profile, one-shot / few-shot paragraph anchors, completion), and
score recorded completions against the verifier, offline.
"""

from styleverify import build_pairs, extract_style_profile, fit_vocabulary, fuse, make_prompt, vectorize_tfidf
from styleverify.corpus import segment_document
from styleverify.imitation import (
    GenerationRecord,
    OfflineCompletions,
    run_generation,
    score_imitation,
    serialize_profile,
)
from styleverify.synthetic import two_author_corpus
from styleverify.verifier import build

docs, authors = two_author_corpus(n_docs_per_author=20, words_per_doc=1100, seed=3)
target = docs[0]

profile = extract_style_profile(target)
print("style profile of", target.id)
print(serialize_profile(profile))

for strategy in ("zero_shot", "one_shot", "few_shot", "completion"):
    spec = make_prompt(target, strategy)
    first_line = spec.user_prompt.splitlines()[0]
    print(f"\n[{strategy}] target words {spec.target_words}")
    print(" ", first_line[:96])

# offline scoring: recorded completions joined by (source_doc_id, strategy)
segments = [s for d in docs for s in segment_document(d)]
tails = {s.doc_id: s for s in segments if s.position == "tail"}
vocab = fit_vocabulary(segments, max_grams=4000)
by_ref = {(s.doc_id, s.position): s for s in segments}
pairs = build_pairs(segments, 60, 60, seed=4, authors=authors)
store = build(((fuse(vectorize_tfidf(by_ref[(p.a.doc_id, p.a.position)], vocab), None, 0.0),
                fuse(vectorize_tfidf(by_ref[(p.b.doc_id, p.b.position)], vocab), None, 0.0),
                p.label) for p in pairs), alpha=0.0)

# a "perfect imitator" replays each author's own tail; an "impostor" swaps authors
perfect = [GenerationRecord(d.id, "completion", "perfect", tails[d.id].text)
           for d in docs[:10]]
impostor = [GenerationRecord(d.id, "completion", "impostor",
                             tails["author_b_0005" if d.id.startswith("author_a")
                                   else "author_a_0005"].text)
            for d in docs[:10]]

completions = OfflineCompletions(perfect + impostor)
records, failures = run_generation(
    [make_prompt(d, "completion") for d in docs[:10]], completions)
print(f"\noffline join produced {len(records)} records, {len(failures)} failures")

table = score_imitation(perfect + impostor, segments, store, vocab)
for model, row in sorted(table.accuracy.items()):
    print(f"match accuracy {model:>8}: {row['completion']:.0%}")
