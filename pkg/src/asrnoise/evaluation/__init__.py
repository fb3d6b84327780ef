from .lexicon import EntityLexicon, LexiconError, load_lexicon
from .metrics import PRF, corpus_entity_f1, corpus_rouge_l, entity_f1, lcs_length, rouge_l
from .similarity import IdMismatchError, SimilarityMatrix, similarity_matrix
from .sweep import SweepRow, noise_sweep

__all__ = [
    "EntityLexicon",
    "IdMismatchError",
    "LexiconError",
    "PRF",
    "SimilarityMatrix",
    "SweepRow",
    "corpus_entity_f1",
    "corpus_rouge_l",
    "entity_f1",
    "lcs_length",
    "load_lexicon",
    "noise_sweep",
    "rouge_l",
    "similarity_matrix",
]
