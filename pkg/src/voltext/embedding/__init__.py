from voltext.embedding.evaluate import (
    AnalogyReport,
    analogy,
    cosine,
    evaluate_analogy_suite,
    evaluate_similarity,
    most_similar,
    odd_one_out,
    pca_project,
)
from voltext.embedding.io import load_embedding, save_embedding
from voltext.embedding.model import (
    EmbeddingMatrix,
    cbow_loss,
    cbow_step,
    fasttext_vector,
    negative_sample,
    sgns_loss,
    sgns_pair_step,
    sigmoid,
    softmax_probabilities,
)
from voltext.embedding.subword import SubwordIndex, char_ngrams
from voltext.embedding.train import TrainedEmbedding, train
from voltext.embedding.vocab import Algo, Mode, TrainConfig, Vocabulary, build_vocab

__all__ = [
    "Algo",
    "AnalogyReport",
    "EmbeddingMatrix",
    "Mode",
    "SubwordIndex",
    "TrainConfig",
    "TrainedEmbedding",
    "Vocabulary",
    "analogy",
    "build_vocab",
    "cbow_loss",
    "cbow_step",
    "char_ngrams",
    "cosine",
    "evaluate_analogy_suite",
    "evaluate_similarity",
    "fasttext_vector",
    "load_embedding",
    "most_similar",
    "negative_sample",
    "odd_one_out",
    "pca_project",
    "save_embedding",
    "sgns_loss",
    "sgns_pair_step",
    "sigmoid",
    "softmax_probabilities",
    "train",
]
