"""Cleaning, segmentation, and pair-construction behavior."""

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from styleverify.corpus import (
    CleaningConfig,
    RawDocument,
    build_pairs,
    clean_corpus,
    clean_document,
    load_wordlist,
    segment_document,
    strip_paratext,
)
from styleverify.errors import (
    ConfigError,
    DuplicateIdError,
    IneligibleDocumentError,
    InsufficientCorpusError,
)

# words guaranteed present in the bundled dictionary
POOL = ("the and for are but not you all can had her was one our out day "
        "get has him his how man new now old see two way who its did").split()


@pytest.fixture(scope="module", autouse=True)
def _pool_is_in_wordlist():
    wl = load_wordlist()
    missing = [w for w in POOL if w not in wl]
    assert not missing, f"test pool words missing from bundled list: {missing}"


def make_words(n):
    return [POOL[i % len(POOL)] for i in range(n)]


class TestCleanDocument:
    def test_400_word_essay_rejected_as_too_short(self):
        doc = RawDocument("short", " ".join(make_words(400)))
        report = clean_document(doc, CleaningConfig())
        assert not report.accepted
        assert report.reject_reasons == ["too_short"]
        assert report.word_count == 400

    def test_12_percent_digits_rejected_as_too_numeric(self):
        words = make_words(600)
        # swap in unique numeric tokens until the digit tally crosses 12%
        i = 0
        while True:
            text = " ".join(words)
            tally = sum(ch.isdigit() for ch in text) / len(text)
            if tally >= 0.12:
                break
            words[i] = str(100_000 + i)
            i += 1
        report = clean_document(RawDocument("numeric", text), CleaningConfig())
        assert report.numeric_char_ratio == pytest.approx(tally)
        assert not report.accepted
        assert report.reject_reasons == ["too_numeric"]

    def test_single_token_type_rejected_for_dominance(self):
        doc = RawDocument("mono", " ".join(["hello"] * 600))
        report = clean_document(doc, CleaningConfig())
        assert not report.accepted
        assert "token_dominance" in report.reject_reasons
        assert report.max_token_type_ratio == 1.0

    def test_clean_600_word_essay_accepted(self):
        doc = RawDocument("ok", " ".join(make_words(600)))
        report = clean_document(doc, CleaningConfig())
        assert report.accepted
        assert report.reject_reasons == []

    def test_misspelled_text_rejected(self):
        words = make_words(600)
        for i in range(0, 60):  # 10% gibberish
            words[i * 10] = f"zqxv{i}x".replace(str(i), "")  # letters only
        report = clean_document(RawDocument("typo", " ".join(words)), CleaningConfig())
        assert "too_misspelled" in report.reject_reasons

    def test_symbol_heavy_text_rejected(self):
        words = make_words(600) + ["*%$#@" for _ in range(60)]
        report = clean_document(RawDocument("sym", " ".join(words)), CleaningConfig())
        assert "too_symbolic" in report.reject_reasons

    def test_exempt_punctuation_not_counted_as_symbols(self):
        doc = RawDocument("punct", " ".join(w + "," for w in make_words(600)))
        report = clean_document(doc, CleaningConfig())
        assert report.symbol_ratio == 0.0

    def test_invalid_config_rejected(self):
        with pytest.raises(ConfigError):
            CleaningConfig(max_numeric_ratio=1.5)
        with pytest.raises(ConfigError):
            CleaningConfig(max_misspell_ratio=-0.1)
        with pytest.raises(ConfigError):
            CleaningConfig(min_words=0)

    def test_determinism(self):
        doc = RawDocument("d", " ".join(make_words(700)))
        r1 = clean_document(doc, CleaningConfig())
        r2 = clean_document(doc, CleaningConfig())
        assert r1 == r2
        assert json.dumps(vars(r1)) == json.dumps(vars(r2))

    def test_ratio_threshold_monotonicity(self):
        # lowering any ratio threshold never flips rejected -> accepted
        rng = random.Random(42)
        symbols = "*%$#@~^"
        for _ in range(50):
            words = []
            for _ in range(rng.randrange(50, 900)):
                kind = rng.random()
                if kind < 0.70:
                    words.append(rng.choice(POOL))
                elif kind < 0.80:
                    words.append(str(rng.randrange(10 ** 6)))
                elif kind < 0.90:
                    words.append("".join(rng.choice("zqxjkv") for _ in range(5)))
                else:
                    words.append(rng.choice(symbols) * rng.randrange(1, 4))
            doc = RawDocument("m", " ".join(words))
            base = CleaningConfig(
                max_numeric_ratio=rng.uniform(0.01, 1.0),
                max_misspell_ratio=rng.uniform(0.01, 1.0),
                max_token_type_ratio=rng.uniform(0.01, 1.0),
                max_symbol_ratio=rng.uniform(0.01, 1.0),
            )
            lowered = CleaningConfig(
                max_numeric_ratio=base.max_numeric_ratio * rng.uniform(0.1, 1.0),
                max_misspell_ratio=base.max_misspell_ratio * rng.uniform(0.1, 1.0),
                max_token_type_ratio=base.max_token_type_ratio * rng.uniform(0.1, 1.0),
                max_symbol_ratio=base.max_symbol_ratio * rng.uniform(0.1, 1.0),
            )
            if not clean_document(doc, base).accepted:
                assert not clean_document(doc, lowered).accepted


class TestStripParatext:
    def test_page_header_removed(self):
        stripped, removed = strip_paratext("Page 3 of 12\nThe essay body continues here.")
        assert stripped == "The essay body continues here."
        assert removed == 1

    def test_clean_input_unchanged(self):
        text = "A body line.\nAnother body line."
        stripped, removed = strip_paratext(text)
        assert stripped == text
        assert removed == 0

    def test_references_block_removed(self):
        text = "Body paragraph.\nReferences\n[1] Smith 2020\n[2] Jones 2021"
        stripped, removed = strip_paratext(text)
        assert stripped == "Body paragraph."
        assert removed == 3

    def test_works_cited_case_insensitive(self):
        stripped, removed = strip_paratext("Body.\nWORKS CITED\nSmith.")
        assert stripped == "Body."
        assert removed == 2

    def test_bare_page_numbers_removed(self):
        stripped, removed = strip_paratext("Intro.\n42\nMore text.\n123456\n")
        # five-digit-plus runs are not page numbers; trailing newline survives
        assert stripped == "Intro.\nMore text.\n123456\n"
        assert removed == 1

    @given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=400))
    @settings(max_examples=200, deadline=None)
    def test_idempotent(self, text):
        once, n1 = strip_paratext(text)
        twice, n2 = strip_paratext(once)
        assert twice == once
        assert n2 == 0


class TestHeaderFooterHeuristic:
    def test_shared_header_stripped_in_batch(self):
        body = " ".join(make_words(600))
        docs = [RawDocument(f"d{i}", f"My Essay Site\n{body} extra{i}\nCopyright Notice")
                for i in range(3)]
        reports, cleaned = clean_corpus(docs, CleaningConfig(max_misspell_ratio=1.0))
        for rep in reports:
            assert rep.paratext_lines_removed == 2
        for text in cleaned.values():
            assert "My Essay Site" not in text
            assert "Copyright Notice" not in text

    def test_disabled_for_single_document(self):
        body = " ".join(make_words(600))
        doc = RawDocument("solo", f"My Essay Site\n{body}")
        reports, cleaned = clean_corpus([doc], CleaningConfig(max_misspell_ratio=1.0))
        assert reports[0].paratext_lines_removed == 0
        assert "My Essay Site" in cleaned["solo"]


class TestSegmentDocument:
    def test_1561_word_document_blocks(self):
        words = [f"w{i}" for i in range(1, 1562)]
        head, tail = segment_document(RawDocument("m", " ".join(words)))
        assert head.text.split() == words[:500]       # words 1-500
        assert tail.text.split() == words[1061:]      # words 1062-1561
        assert head.word_count == tail.word_count == 500

    def test_exactly_1000_words_no_overlap(self):
        words = [f"w{i}" for i in range(1, 1001)]
        head, tail = segment_document(RawDocument("m", " ".join(words)))
        assert head.text.split() == words[:500]
        assert tail.text.split() == words[500:]
        assert set(head.text.split()).isdisjoint(tail.text.split())

    def test_999_words_ineligible(self):
        doc = RawDocument("short", " ".join(f"w{i}" for i in range(999)))
        with pytest.raises(IneligibleDocumentError):
            segment_document(doc)

    def test_disjoint_word_positions(self):
        rng = random.Random(9)
        for _ in range(20):
            n = rng.randrange(1000, 3000)
            words = [f"w{i}" for i in range(n)]
            head, tail = segment_document(RawDocument("m", " ".join(words)))
            head_ids = {int(w[1:]) for w in head.text.split()}
            tail_ids = {int(w[1:]) for w in tail.text.split()}
            assert head_ids.isdisjoint(tail_ids)

    def test_preserves_original_whitespace(self):
        text = "a  b\tc\nd " + " ".join(f"w{i}" for i in range(2000))
        head, _ = segment_document(RawDocument("m", text), block_words=4)
        assert head.text == "a  b\tc\nd"


def make_segments(n_docs, author=None, prefix="doc"):
    docs = []
    authors = {}
    for i in range(n_docs):
        doc_id = f"{prefix}{i:03d}"
        words = [f"{doc_id}w{k}" for k in range(1000)]
        docs.append(RawDocument(doc_id, " ".join(words), author_id=author))
        if author:
            authors[doc_id] = author
    segments = []
    for doc in docs:
        segments.extend(segment_document(doc))
    return segments, authors


class TestBuildPairs:
    def test_single_document_yields_its_head_tail_pair(self):
        segments, _ = make_segments(1)
        pairs = build_pairs(segments, n_positive=1, n_negative=0, seed=1)
        assert len(pairs) == 1
        pair = pairs[0]
        assert pair.label == "same_author"
        assert pair.a.doc_id == pair.b.doc_id
        assert {pair.a.position, pair.b.position} == {"head", "tail"}

    def test_exact_label_counts(self):
        segments, _ = make_segments(12)
        pairs = build_pairs(segments, n_positive=7, n_negative=9, seed=3)
        labels = [p.label for p in pairs]
        assert labels.count("same_author") == 7
        assert labels.count("different_author") == 9

    def test_deterministic_under_seed(self):
        segments, _ = make_segments(3)
        a = build_pairs(segments, 3, 3, seed=11)
        b = build_pairs(segments, 3, 3, seed=11)
        assert a == b

    def test_different_seeds_differ(self):
        segments, _ = make_segments(30)
        a = build_pairs(segments, 10, 10, seed=1)
        b = build_pairs(segments, 10, 10, seed=2)
        assert a != b

    def test_no_duplicate_unordered_pairs(self):
        segments, _ = make_segments(10)
        pairs = build_pairs(segments, 10, 50, seed=5)
        keys = {frozenset([p.a, p.b]) for p in pairs}
        assert len(keys) == len(pairs)

    def test_insufficient_positive_pairs(self):
        segments, _ = make_segments(4)
        with pytest.raises(InsufficientCorpusError):
            build_pairs(segments, n_positive=5, n_negative=0, seed=1)

    def test_insufficient_negative_pairs(self):
        segments, _ = make_segments(2)
        # 1 doc pair x 2 segments each = 4 possible negatives
        with pytest.raises(InsufficientCorpusError):
            build_pairs(segments, 0, 5, seed=1)

    def test_negative_pairs_span_distinct_documents(self):
        segments, _ = make_segments(8)
        pairs = build_pairs(segments, 0, 40, seed=2)
        assert all(p.a.doc_id != p.b.doc_id for p in pairs)

    def test_author_metadata_allows_cross_document_positives(self):
        seg_a, auth_a = make_segments(4, author="alice", prefix="a")
        seg_b, auth_b = make_segments(4, author="bob", prefix="b")
        authors = {**auth_a, **auth_b}
        segments = seg_a + seg_b
        # 2 groups x C(8,2)=28 -> 56 positives available, only 8 within-doc
        pairs = build_pairs(segments, 40, 10, seed=4, authors=authors)
        for p in pairs:
            if p.label == "same_author":
                assert authors[p.a.doc_id] == authors[p.b.doc_id]
            else:
                assert authors[p.a.doc_id] != authors[p.b.doc_id]

    def test_duplicate_segment_ids_rejected(self):
        segments, _ = make_segments(2)
        with pytest.raises(DuplicateIdError):
            build_pairs(segments + segments[:1], 1, 1, seed=0)


class TestCorpusIO:
    def test_load_jsonl_corpus(self, tmp_path):
        from styleverify.corpus import load_corpus

        path = tmp_path / "corpus.jsonl"
        path.write_text(
            json.dumps({"id": "d1", "text": "body one", "author_id": "x"}) + "\n"
            + json.dumps({"id": "d2", "text": "body two",
                          "source_domain": "academic"}) + "\n")
        docs = load_corpus(path)
        assert [d.id for d in docs] == ["d1", "d2"]
        assert docs[0].author_id == "x"
        assert docs[1].source_domain == "academic"

    def test_load_txt_directory_sorted_by_stem(self, tmp_path):
        from styleverify.corpus import load_corpus

        (tmp_path / "b_doc.txt").write_text("second body")
        (tmp_path / "a_doc.txt").write_text("first body")
        docs = load_corpus(tmp_path)
        assert [d.id for d in docs] == ["a_doc", "b_doc"]

    def test_duplicate_corpus_ids_rejected(self, tmp_path):
        from styleverify.corpus import load_corpus

        path = tmp_path / "corpus.jsonl"
        rec = json.dumps({"id": "dup", "text": "body"})
        path.write_text(rec + "\n" + rec + "\n")
        with pytest.raises(DuplicateIdError):
            load_corpus(path)

    def test_malformed_corpus_record_rejected(self, tmp_path):
        from styleverify.corpus import load_corpus
        from styleverify.errors import MalformedRecordError

        path = tmp_path / "corpus.jsonl"
        path.write_text('{"id": "d1"}\n')
        with pytest.raises(MalformedRecordError):
            load_corpus(path)

    def test_pairs_round_trip(self, tmp_path):
        from styleverify.corpus import read_pairs, write_pairs

        segments, _ = make_segments(4)
        pairs = build_pairs(segments, 3, 3, seed=8)
        path = tmp_path / "pairs.jsonl"
        write_pairs(pairs, path)
        assert read_pairs(path) == pairs
