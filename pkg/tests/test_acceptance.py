"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
PASS/FAIL lines.  The synthetic end-to-end benchmark drives the real CLI on
a Markov-chain two-author corpus; everything else checks exact values and
oracle equivalences.
"""

import functools
import json
import math
import random
import time

import numpy as np
import pytest

from styleverify.cli import main
from styleverify.corpus import write_jsonl
from styleverify.distance import cosine_distance, euclidean_distance
from styleverify.detection import TokenLogProbs, perplexity
from styleverify.errors import CorruptStoreError
from styleverify.evaluation import mcnemar, roc_auc
from styleverify.features import (
    EMBEDDING_DIM,
    NGramVocabulary,
    TfIdfVector,
    fuse,
    vectorize_tfidf,
)
from styleverify.synthetic import two_author_corpus
from styleverify.verifier import (
    build_from_distances,
    classify_distance,
    load,
    save,
    score,
)


def criterion(label):
    """Print one PASS/FAIL line per acceptance criterion."""
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                result = fn(*args, **kwargs)
            except BaseException:
                print(f"\nACCEPTANCE FAIL  {label}")
                raise
            print(f"\nACCEPTANCE PASS  {label}")
            return result
        return wrapper
    return decorate


# --- synthetic end-to-end pipeline (shared by criteria 1 and 10) -------------

@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    root = tmp_path_factory.mktemp("acceptance")
    docs, _ = two_author_corpus(n_docs_per_author=400, words_per_doc=1200, seed=202)

    # 60/40 construction/evaluation split per author
    split = {"construction": [], "evaluation": []}
    for doc in docs:
        k = int(doc.id.rsplit("_", 1)[1])
        split["construction" if k < 240 else "evaluation"].append(doc)

    paths = {"root": root}
    for name, part in split.items():
        corpus = root / f"{name}.jsonl"
        write_jsonl(({"id": d.id, "text": d.text, "source_domain": d.source_domain,
                      "author_id": d.author_id} for d in part), corpus)
        paths[name] = corpus

    t0 = time.perf_counter()
    for name in ("construction", "evaluation"):
        assert main([
            "clean", "--corpus", str(paths[name]),
            "--out-reports", str(root / f"{name}_reports.jsonl"),
            "--out-segments", str(root / f"{name}_segments.jsonl"),
            "--max-misspell-ratio", "1.0",  # markov words are not dictionary words
        ]) == 0
    assert main([
        "pairs", "--segments", str(root / "construction_segments.jsonl"),
        "--corpus", str(paths["construction"]),
        "--n-positive", "1000", "--n-negative", "1000",
        "--seed", "31", "--out", str(root / "construction_pairs.jsonl"),
    ]) == 0
    assert main([
        "pairs", "--segments", str(root / "evaluation_segments.jsonl"),
        "--corpus", str(paths["evaluation"]),
        "--n-positive", "500", "--n-negative", "500",
        "--seed", "32", "--out", str(root / "evaluation_pairs.jsonl"),
    ]) == 0
    assert main([
        "build", "--segments", str(root / "construction_segments.jsonl"),
        "--pairs", str(root / "construction_pairs.jsonl"),
        "--alpha", "0",
        "--out-store", str(root / "store.json"),
        "--out-vocab", str(root / "vocab.json"),
    ]) == 0
    assert main([
        "evaluate", "--store", str(root / "store.json"),
        "--vocab", str(root / "vocab.json"),
        "--pairs", str(root / "evaluation_pairs.jsonl"),
        "--segments", str(root / "evaluation_segments.jsonl"),
        "--out-json", str(root / "eval_report.json"),
    ]) == 0
    elapsed = time.perf_counter() - t0

    report = json.loads((root / "eval_report.json").read_text())
    return {"paths": paths, "root": root, "elapsed": elapsed, "report": report}


@criterion("synthetic separation: accuracy >= 0.90, AUC >= 0.95, < 60 s")
def test_c01_synthetic_separation(pipeline):
    report = pipeline["report"]
    assert report["n"] == 1000
    assert report["accuracy"] >= 0.90, f"accuracy {report['accuracy']}"
    assert report["roc_auc"] >= 0.95, f"AUC {report['roc_auc']}"
    assert pipeline["elapsed"] < 60.0, f"pipeline took {pipeline['elapsed']:.1f}s"


@criterion("verifier oracle equivalence: binary search == brute force, exact")
def test_c02_verifier_oracle_equivalence():
    rng = random.Random(77)
    same = [rng.uniform(0.0, 0.8) for _ in range(5000)]
    diff = [rng.uniform(0.3, 1.6) for _ in range(5000)]
    store = build_from_distances(same, diff)
    same_arr = store.same_sorted
    diff_arr = store.diff_sorted

    queries = [rng.uniform(-0.2, 1.9) for _ in range(800)]
    queries += [float(same_arr[rng.randrange(5000)]) for _ in range(100)]
    queries += [float(diff_arr[rng.randrange(5000)]) for _ in range(100)]
    assert len(queries) == 1000
    for q in queries:
        s_fast, d_fast = score(store, q)
        s_brute = float(np.sum(same_arr > q)) / same_arr.size
        d_brute = float(np.sum(diff_arr < q)) / diff_arr.size
        assert s_fast == s_brute  # zero tolerance
        assert d_fast == d_brute


@criterion("decision rule: S=1/3, D=0, same_author, confidence 1.0")
def test_c03_decision_rule_conformance():
    store = build_from_distances([0.2, 0.25, 0.3], [0.6, 0.65, 0.7])
    s, d = score(store, 0.25)
    assert s == pytest.approx(1 / 3, abs=1e-15)
    assert d == 0.0
    verdict = classify_distance(store, 0.25)
    assert verdict.predicted == "same_author"
    assert verdict.confidence == pytest.approx(1.0, abs=1e-15)


@criterion("metric properties: 10,000 randomized trials within tolerances")
def test_c04_metric_properties():
    rng = random.Random(99)

    def style_vec():
        nnz = rng.randrange(1, 12)
        entries = {int(i): rng.random() + 0.05 for i in rng.sample(range(60), nnz)}
        emb = np.array([rng.gauss(0, 1) for _ in range(EMBEDDING_DIM)])
        return fuse(TfIdfVector(entries, 60), emb, alpha=rng.choice([0.5, 1.0, 2.0]))

    def densify(v):
        dense = np.zeros(60 + EMBEDDING_DIM)
        dense[v.tfidf_indices] = v.tfidf_values
        dense[60:] = v.embedding
        return dense

    for trial in range(10_000):
        if trial % 2 == 0:
            dim = rng.randrange(2, 10)
            x = np.array([rng.gauss(0, 1) for _ in range(dim)])
            y = np.array([rng.gauss(0, 1) for _ in range(dim)])
            if not x.any() or not y.any():
                continue
            dense_x, dense_y = x, y
        else:
            sx, sy = style_vec(), style_vec()
            x, y = sx, sy
            dense_x, dense_y = densify(sx), densify(sy)

        d_cos = cosine_distance(x, y)
        assert -1e-12 <= d_cos <= 2.0 + 1e-12
        c = rng.uniform(1e-3, 1e3)
        assert abs(cosine_distance(c * dense_x, dense_y) - d_cos) <= 1e-12
        assert cosine_distance(x, y) == cosine_distance(y, x)
        assert euclidean_distance(x, y) == euclidean_distance(y, x)
        d2 = euclidean_distance(x, y) ** 2
        identity = (float(dense_x @ dense_x) + float(dense_y @ dense_y)
                    - 2.0 * float(dense_x @ dense_y))
        assert abs(d2 - identity) <= 1e-9


@criterion("AUC oracle: rank-based equals O(n^2) enumeration within 1e-9")
def test_c05_auc_oracle():
    rng = random.Random(55)
    for trial in range(100):
        n_pos = rng.randrange(1, 501)
        n_neg = rng.randrange(1, 501)
        if trial % 2 == 0:  # tie-heavy sets from a small value pool
            pool = [round(rng.random(), 1) for _ in range(5)]
            pos = [rng.choice(pool) for _ in range(n_pos)]
            neg = [rng.choice(pool) for _ in range(n_neg)]
        else:
            pos = [rng.random() for _ in range(n_pos)]
            neg = [rng.random() for _ in range(n_neg)]
        p = np.asarray(pos)[:, None]
        n = np.asarray(neg)[None, :]
        oracle = float((p > n).sum() + 0.5 * (p == n).sum()) / (n_pos * n_neg)
        assert abs(roc_auc(pos, neg) - oracle) <= 1e-9


@criterion("McNemar: 49/12 significant; 0.1 and 0 not significant")
def test_c06_mcnemar():
    truth = [1] * 12
    a = [0] * 10 + [1] * 2
    b = [1] * 10 + [0] * 2
    r = mcnemar(a, b, truth)
    assert (r.n01, r.n10) == (10, 2)
    assert abs(r.chi2 - 49 / 12) <= 1e-12
    assert r.significant_at_05

    truth = [1] * 10
    r = mcnemar([0] * 5 + [1] * 5, [1] * 5 + [0] * 5, truth)
    assert abs(r.chi2 - 0.1) <= 1e-12
    assert not r.significant_at_05

    r = mcnemar([1, 0], [1, 0], [1, 0])
    assert (r.n01, r.n10, r.chi2) == (0, 0, 0.0)
    assert not r.significant_at_05


@criterion("TF-IDF conformance: (2/5)ln2 worked example; df=N weights 0")
def test_c07_tfidf_conformance():
    vocab = NGramVocabulary(grams=["aba"], doc_freq={"aba": 1}, corpus_size_n=2)
    vec = vectorize_tfidf("ababa", vocab)
    assert abs(vec.entries[0] - (2 / 5) * math.log(2)) <= 1e-12

    saturated = NGramVocabulary(grams=["aba"], doc_freq={"aba": 2}, corpus_size_n=2)
    vec = vectorize_tfidf("ababa", saturated)
    assert vec.entries.get(0, 0.0) == 0.0


@criterion("perplexity: uniform ln(1/V) -> V for V in {2, 10, 50000}; 4.0 case")
def test_c08_perplexity():
    for vocab_size in (2, 10, 50_000):
        tlp = TokenLogProbs("u", [math.log(1 / vocab_size)] * 13)
        assert abs(perplexity(tlp) - vocab_size) <= 1e-10 * vocab_size
    tlp = TokenLogProbs("g", [math.log(0.5), math.log(0.125)])
    assert abs(perplexity(tlp) - 4.0) <= 1e-10


@criterion("store round-trip: bit-identical verdicts; corrupted byte detected")
def test_c09_store_round_trip(tmp_path):
    rng = random.Random(66)
    store = build_from_distances(
        [rng.uniform(0, 0.9) for _ in range(2000)],
        [rng.uniform(0.4, 1.7) for _ in range(2000)],
        vocab_hash="cafe0123",
    )
    path = tmp_path / "store.json"
    save(store, path)
    loaded = load(path)
    for _ in range(1000):
        q = rng.uniform(-0.3, 2.0)
        assert classify_distance(loaded, q) == classify_distance(store, q)

    raw = bytearray(path.read_bytes())
    raw[len(raw) // 3] ^= 0x04  # flip one bit inside the arrays
    corrupted = tmp_path / "corrupted.json"
    corrupted.write_bytes(bytes(raw))
    with pytest.raises(CorruptStoreError):
        load(corrupted)


@criterion("imitation offline: own tails 100%; shuffled ~= verifier FP rate")
def test_c10_imitation_offline(pipeline, capsys):
    root = pipeline["root"]
    segments = [json.loads(l) for l
                in (root / "evaluation_segments.jsonl").read_text().splitlines()]
    tails = {s["doc_id"]: s["text"] for s in segments if s["position"] == "tail"}
    doc_ids = sorted(tails)

    own = root / "own_tails.jsonl"
    write_jsonl(({"source_doc_id": d, "strategy": "completion",
                  "model_tag": "copy", "text": tails[d]} for d in doc_ids), own)

    # shuffled-author completions: every text comes from the other author
    a_ids = [d for d in doc_ids if d.startswith("author_a")]
    b_ids = [d for d in doc_ids if d.startswith("author_b")]
    shuffled = root / "shuffled_tails.jsonl"
    write_jsonl(({"source_doc_id": d, "strategy": "completion",
                  "model_tag": "impostor",
                  "text": tails[(b_ids if d.startswith("author_a") else a_ids)[i % 160]]}
                 for i, d in enumerate(doc_ids)), shuffled)

    def run(completions_path):
        assert main([
            "imitate", "--store", str(root / "store.json"),
            "--vocab", str(root / "vocab.json"),
            "--segments", str(root / "evaluation_segments.jsonl"),
            "--offline", str(completions_path), "--json",
        ]) == 0
        return json.loads(capsys.readouterr().out.strip().splitlines()[-1])

    own_payload = run(own)
    assert own_payload["accuracy"]["copy"]["completion"] == 1.0

    confusion = pipeline["report"]["confusion"]
    fp_rate = confusion["fp"] / (confusion["fp"] + confusion["tn"])
    shuffled_payload = run(shuffled)
    imitation_rate = shuffled_payload["accuracy"]["impostor"]["completion"]
    assert abs(imitation_rate - fp_rate) <= 0.03, (
        f"shuffled match rate {imitation_rate} vs verifier FP rate {fp_rate}")


@criterion("construction speed: 100,000 precomputed distances in < 5 s")
def test_c11_construction_speed():
    rng = np.random.default_rng(88)
    same = rng.uniform(0.0, 0.9, size=50_000)
    diff = rng.uniform(0.3, 1.8, size=50_000)
    t0 = time.perf_counter()
    store = build_from_distances(same, diff)
    elapsed = time.perf_counter() - t0
    assert store.meta.n_same == 50_000
    assert store.meta.n_diff == 50_000
    assert elapsed < 5.0, f"construction took {elapsed:.3f}s"
