"""Training-free authorship verification from fused TF-IDF character n-gram
and sentence-embedding distances, plus style-imitation prompting and
perplexity-based detectability analysis."""

from .corpus import (
    CleaningConfig,
    CleaningReport,
    RawDocument,
    Segment,
    SegmentRef,
    TextPair,
    build_pairs,
    clean_corpus,
    clean_document,
    load_corpus,
    segment_document,
    strip_paratext,
)
from .detection import PerplexityReport, TokenLogProbs, detectability_report, perplexity
from .distance import cosine_distance, distance, euclidean_distance
from .errors import StyleVerifyError
from .evaluation import (
    ConfusionMatrix,
    EvalReport,
    McNemarResult,
    evaluate,
    mcnemar,
    roc_auc,
)
from .features import (
    EMBEDDING_DIM,
    NGramVocabulary,
    StyleVector,
    TfIdfVector,
    fit_vocabulary,
    fuse,
    load_embeddings,
    vectorize_tfidf,
)
from .imitation import (
    GenerationRecord,
    PromptSpec,
    StyleProfile,
    extract_style_profile,
    make_prompt,
    score_imitation,
)
from .verifier import (
    DistanceDistribution,
    Verdict,
    build,
    build_from_distances,
    classify,
    load,
    save,
    score,
)

__version__ = "0.1.0"
