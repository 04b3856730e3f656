from .build import Corpus, Document, Vocabulary, build_corpus, load_corpus, save_corpus
from .listing import ListingConfig, fetch_public_listing
from .posts import IngestResult, RawPost, Reject, hash_author, ingest_jsonl, write_jsonl
from .preprocess import PreprocessConfig, lemmatize, preprocess, token_spans
from .synthetic import SynthResult, SynthSpec, generate_synthetic

__all__ = [
    "Corpus",
    "Document",
    "Vocabulary",
    "build_corpus",
    "load_corpus",
    "save_corpus",
    "ListingConfig",
    "fetch_public_listing",
    "IngestResult",
    "RawPost",
    "Reject",
    "hash_author",
    "ingest_jsonl",
    "write_jsonl",
    "PreprocessConfig",
    "lemmatize",
    "preprocess",
    "token_spans",
    "SynthResult",
    "SynthSpec",
    "generate_synthetic",
]
