"""Trilingual (English, Spanish, Japanese) thesaurus construction from
Wikipedia interlanguage links, disambiguated against WordNet noun senses."""

from .assignments import MCAT, VSM, SenseAssignment
from .corpus_eval import ComparableCorpus, Coverage, build_corpus, coverage
from .mcat import CategoryNeighborhood, build_neighborhood, mcat_assign
from .pipeline import PipelineConfig, PipelineError, run
from .thesaurus import (MONOSEMOUS, UNMATCHED, ThesaurusEntry, assign_target_senses, build_thesaurus,
                        combine_assignments, extract_definition)
from .tuple_extractor import TranslationTuple, build_tuples, extract_langlinks
from .vsm import NotInWordNetError, TermVector, VsmDisambiguator, cosine, vectorize, vsm_assign
from .wiki_ingest import (Article, ArticleStore, clean_text, first_section, load_stoplist, parse_dump,
                          resolve_redirect)
from .wordnet_store import Synset, WordNet, load_wordnet

__version__ = "0.1.0"

__all__ = [
    "Article", "ArticleStore", "CategoryNeighborhood", "ComparableCorpus", "Coverage", "MCAT",
    "MONOSEMOUS", "NotInWordNetError", "PipelineConfig", "PipelineError", "SenseAssignment",
    "Synset", "TermVector", "ThesaurusEntry", "TranslationTuple", "UNMATCHED", "VSM",
    "VsmDisambiguator", "WordNet", "assign_target_senses", "build_corpus", "build_neighborhood",
    "build_thesaurus", "build_tuples", "clean_text", "combine_assignments", "cosine", "coverage",
    "extract_definition", "extract_langlinks", "first_section", "load_stoplist", "load_wordnet",
    "mcat_assign", "parse_dump", "resolve_redirect", "run", "vectorize", "vsm_assign",
]
