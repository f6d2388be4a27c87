"""Vocabulary, negative sampling, gradient steps, subwords, I/O, and probes."""

import numpy as np
import pytest
from scipy import stats

from voltext.errors import EmptyVocabulary, FormatError, NoSubwords, TokenNotFound, TooFewPairs
from voltext.embedding.evaluate import (
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
    softmax_probabilities,
)
from voltext.embedding.subword import SubwordIndex, char_ngrams
from voltext.embedding.train import train
from voltext.embedding.vocab import Algo, Mode, TrainConfig, Vocabulary, build_vocab
from voltext.textprep.corpus import SentenceCorpus

from conftest import make_embedding


# -- vocabulary -------------------------------------------------------------


def test_build_vocab_min_count_filter():
    corpus = SentenceCorpus.from_sentences([["a"]] * 10 + [["b"]] * 4)
    vocab = build_vocab(corpus, TrainConfig(min_count=5))
    assert vocab.tokens == ["a"]


def test_build_vocab_deterministic_ordering():
    corpus = SentenceCorpus.from_sentences([["a", "b"]] * 10)
    v1 = build_vocab(corpus, TrainConfig(min_count=5))
    v2 = build_vocab(corpus, TrainConfig(min_count=5))
    assert v1.tokens == v2.tokens == ["a", "b"]  # tie broken by first occurrence


def test_build_vocab_max_vocab():
    corpus = SentenceCorpus.from_sentences([["a", "b", "c"]] * 5 + [["a"]])
    vocab = build_vocab(corpus, TrainConfig(min_count=5, max_vocab=2))
    assert vocab.tokens == ["a", "b"]


def test_build_vocab_empty_raises():
    corpus = SentenceCorpus.from_sentences([["x"]])
    with pytest.raises(EmptyVocabulary):
        build_vocab(corpus, TrainConfig(min_count=5))


# -- negative sampling ------------------------------------------------------


def test_negative_sample_degenerate_vocab(rng):
    vocab = Vocabulary(tokens=["only"], counts=np.array([3]))
    draws = negative_sample(vocab, rng, 7, exclude=5)
    assert (draws == 0).all()


def test_negative_sample_closed_form_frequency(rng):
    vocab = Vocabulary(tokens=["a", "b"], counts=np.array([8, 1]))
    draws = negative_sample(vocab, rng, 1_000_000, exclude=-1)
    p_a = 8**0.75 / (8**0.75 + 1.0)
    assert abs(np.mean(draws == 0) - p_a) < 0.01
    assert p_a == pytest.approx(0.8264, abs=5e-4)


def test_negative_sample_exponent_zero_uniform(rng):
    vocab = Vocabulary(tokens=list("abcd"), counts=np.array([100, 10, 1, 1]))
    draws = negative_sample(vocab, rng, 200_000, exclude=-1, ns_exponent=0.0)
    freqs = np.bincount(draws, minlength=4) / draws.size
    assert np.allclose(freqs, 0.25, atol=0.01)


def test_negative_sample_excludes(rng):
    vocab = Vocabulary(tokens=list("ab"), counts=np.array([50, 50]))
    draws = negative_sample(vocab, rng, 5000, exclude=0)
    assert (draws == 1).all()


def test_negative_sampling_chi2_goodness_of_fit(rng):
    counts = np.arange(1, 11) * 7
    vocab = Vocabulary(tokens=[f"t{i}" for i in range(10)], counts=counts)
    draws = negative_sample(vocab, rng, 1_000_000, exclude=-1)
    observed = np.bincount(draws, minlength=10)
    expected = vocab.sampling_distribution(0.75) * draws.size
    _, p = stats.chisquare(observed, expected)
    assert p > 0.01


# -- gradient steps ---------------------------------------------------------


def _rand_mats(rng, n=6, dim=5):
    return EmbeddingMatrix(
        input_vectors=rng.normal(size=(n, dim)),
        output_vectors=rng.normal(size=(n, dim)),
    )


def test_sgns_step_zero_alpha_is_noop(rng):
    mats = _rand_mats(rng)
    before_in, before_out = mats.input_vectors.copy(), mats.output_vectors.copy()
    sgns_pair_step(0, 1, np.array([2, 3]), mats, alpha=0.0)
    assert np.array_equal(mats.input_vectors, before_in)
    assert np.array_equal(mats.output_vectors, before_out)


def _numeric_grad(fn, arr, eps=1e-6):
    g = np.zeros_like(arr)
    it = np.nditer(arr, flags=["multi_index"])
    for _ in it:
        i = it.multi_index
        old = arr[i]
        arr[i] = old + eps
        hi = fn()
        arr[i] = old - eps
        lo = fn()
        arr[i] = old
        g[i] = (hi - lo) / (2 * eps)
    return g


def test_sgns_gradient_matches_finite_differences(rng):
    for _ in range(20):
        mats = _rand_mats(rng)
        target, context = 0, 1
        negatives = np.array([2, 3, 3])  # includes a duplicate on purpose

        def loss():
            return sgns_loss(
                mats.input_vectors[target],
                mats.output_vectors[context],
                mats.output_vectors[negatives],
            )

        num_in = _numeric_grad(loss, mats.input_vectors)
        num_out = _numeric_grad(loss, mats.output_vectors)
        before_in = mats.input_vectors.copy()
        before_out = mats.output_vectors.copy()
        alpha = 1e-7
        sgns_pair_step(target, context, negatives, mats, alpha)
        step_in = (before_in - mats.input_vectors) / alpha
        step_out = (before_out - mats.output_vectors) / alpha
        assert np.allclose(step_in, num_in, rtol=1e-4, atol=1e-6)
        assert np.allclose(step_out, num_out, rtol=1e-4, atol=1e-6)


def test_cbow_gradient_matches_finite_differences(rng):
    for _ in range(20):
        mats = _rand_mats(rng)
        context = np.array([0, 1, 4])
        target, negatives = 2, np.array([3, 5])

        def loss():
            return cbow_loss(
                mats.input_vectors[context],
                mats.output_vectors[target],
                mats.output_vectors[negatives],
            )

        num_in = _numeric_grad(loss, mats.input_vectors)
        num_out = _numeric_grad(loss, mats.output_vectors)
        before_in = mats.input_vectors.copy()
        before_out = mats.output_vectors.copy()
        alpha = 1e-7
        cbow_step(context, target, negatives, mats, alpha)
        assert np.allclose((before_in - mats.input_vectors) / alpha, num_in, rtol=1e-4, atol=1e-6)
        assert np.allclose((before_out - mats.output_vectors) / alpha, num_out, rtol=1e-4, atol=1e-6)


def test_cbow_single_context_equals_sgns_roles_swapped(rng):
    mats_a = _rand_mats(rng)
    mats_b = mats_a.copy()
    negatives = np.array([3, 4])
    # CBOW with one context token scores output[target] against input[context].
    cbow_step(np.array([0]), 1, negatives, mats_a, 0.05)
    sgns_pair_step(0, 1, negatives, mats_b, 0.05)
    assert np.allclose(mats_a.input_vectors, mats_b.input_vectors)
    assert np.allclose(mats_a.output_vectors, mats_b.output_vectors)


def test_cbow_empty_context_noop(rng):
    mats = _rand_mats(rng)
    before = mats.input_vectors.copy()
    cbow_step(np.array([], dtype=int), 1, np.array([2]), mats, 0.5)
    assert np.array_equal(mats.input_vectors, before)


def test_sgns_convergence_two_tokens(rng):
    from voltext.embedding.model import sigmoid

    mats = EmbeddingMatrix(
        input_vectors=(rng.random((2, 8)) - 0.5) / 8,
        output_vectors=np.zeros((2, 8)),
    )
    for _ in range(500):
        sgns_pair_step(0, 1, np.array([0]), mats, 0.1)
        sgns_pair_step(1, 0, np.array([1]), mats, 0.1)
    assert sigmoid(mats.output_vectors[1] @ mats.input_vectors[0]) > 0.95


def test_softmax_probabilities_sum_to_one(rng):
    mats = _rand_mats(rng)
    p = softmax_probabilities(mats, rng.normal(size=5), 6)
    assert p.shape == (6,)
    assert p.sum() == pytest.approx(1.0, abs=1e-12)
    assert (p > 0).all()


# -- subwords ---------------------------------------------------------------


def test_char_ngrams_profit_example():
    grams = char_ngrams("profit", 3, 3)
    assert grams == ["<pr", "pro", "rof", "ofi", "fit", "it>"]


def test_char_ngrams_exclude_full_wrapped_token():
    assert "<ab>" not in char_ngrams("ab", 3, 6)
    assert char_ngrams("ab", 3, 6) == ["<ab", "ab>"]


def _ft_setup(tokens, dim=4, seed=0):
    vocab = Vocabulary(tokens=tokens, counts=np.full(len(tokens), 9))
    idx = SubwordIndex.build(vocab, 3, 6, buckets=64)
    rng = np.random.Generator(np.random.PCG64(seed))
    mats = EmbeddingMatrix(
        input_vectors=rng.normal(size=(len(tokens) + 64, dim)),
        output_vectors=np.zeros((len(tokens), dim)),
    )
    return vocab, idx, mats


def test_fasttext_vector_is_exact_row_sum():
    vocab, idx, mats = _ft_setup(["profit", "loss"])
    v = fasttext_vector("profit", vocab, idx, mats)
    rows = idx.token_rows(0)
    assert np.array_equal(v, mats.input_vectors[rows].sum(axis=0))
    assert 0 in rows  # whole-token row included


def test_fasttext_oov_differs_by_whole_token_row():
    vocab, idx, mats = _ft_setup(["profit"])
    in_vocab = fasttext_vector("profit", vocab, idx, mats)
    oov_vocab = Vocabulary(tokens=["unrelated"], counts=np.array([9]))
    oov_idx = SubwordIndex.build(oov_vocab, 3, 6, buckets=64)
    # Same bucket table; rows shift by vocab size difference being equal (1 == 1).
    oov = fasttext_vector("profit", oov_vocab, oov_idx, mats)
    assert np.allclose(in_vocab - oov, mats.input_vectors[0])


def test_fasttext_too_short_raises():
    vocab, idx, _ = _ft_setup(["profit"])
    with pytest.raises(NoSubwords):
        idx.oov_rows("a")  # "<a>" has no n-gram of length >= 3


def test_fasttext_all_zero_subwords_zero_vector():
    vocab, idx, mats = _ft_setup(["profit"])
    mats.input_vectors[:] = 0.0
    assert np.array_equal(fasttext_vector("profit", vocab, idx, mats), np.zeros(4))


# -- training ---------------------------------------------------------------


def _tiny_corpus():
    return SentenceCorpus.from_sentences(
        [["alpha", "beta", "gamma"], ["beta", "gamma", "alpha"]] * 30
    )


def test_train_epochs_zero_equals_init():
    cfg = TrainConfig(min_count=5, dim=8, epochs=0, seed=4)
    emb = train(_tiny_corpus(), cfg)
    rng = np.random.Generator(np.random.PCG64(4))
    expected = (rng.random((len(emb.vocab), 8)) - 0.5) / 8
    assert np.array_equal(emb.mats.input_vectors, expected)
    assert not emb.mats.output_vectors.any()


def test_train_same_seed_bit_identical():
    cfg = TrainConfig(min_count=5, dim=8, epochs=2, seed=9)
    a = train(_tiny_corpus(), cfg)
    b = train(_tiny_corpus(), cfg)
    assert np.array_equal(a.mats.input_vectors, b.mats.input_vectors)
    assert np.array_equal(a.mats.output_vectors, b.mats.output_vectors)


def test_train_cbow_and_fasttext_run():
    corpus = _tiny_corpus()
    for mode in (Mode.SKIP_GRAM, Mode.CBOW):
        for algo in (Algo.WORD2VEC, Algo.FASTTEXT):
            cfg = TrainConfig(mode=mode, algo=algo, min_count=5, dim=6, epochs=1,
                              subword_buckets=128, seed=2)
            emb = train(corpus, cfg)
            assert np.isfinite(emb.token_matrix()).all()
            assert emb.resolvable("alpha")


# -- serialization ----------------------------------------------------------


def test_binary_roundtrip_bitwise(tmp_path):
    cfg = TrainConfig(min_count=5, dim=8, epochs=1, seed=3)
    emb = train(_tiny_corpus(), cfg)
    p1, p2 = tmp_path / "a.bin", tmp_path / "b.bin"
    save_embedding(emb, p1)
    loaded = load_embedding(p1)
    save_embedding(loaded, p2)
    again = load_embedding(p2)
    assert np.array_equal(loaded.mats.input_vectors, again.mats.input_vectors)
    assert np.array_equal(loaded.mats.output_vectors, again.mats.output_vectors)
    assert loaded.vocab.tokens == emb.vocab.tokens
    assert np.array_equal(loaded.vocab.counts, emb.vocab.counts)
    # float32 storage: loaded values match the trained ones at float32 precision.
    assert np.allclose(loaded.mats.input_vectors, emb.mats.input_vectors, atol=1e-6)


def test_text_format_header(tmp_path):
    vecs = np.arange(12, dtype=float).reshape(4, 3)
    emb = make_embedding(["a", "b", "c", "d"], vecs)
    path = tmp_path / "emb.txt"
    save_embedding(emb, path, format="text")
    assert path.read_text().splitlines()[0] == "4 3"
    loaded = load_embedding(path)
    assert np.array_equal(loaded.token_matrix(), vecs)


def test_truncated_binary_raises(tmp_path):
    emb = make_embedding(["a", "b"], np.eye(2))
    path = tmp_path / "emb.bin"
    save_embedding(emb, path)
    path.write_bytes(path.read_bytes()[:-5])
    with pytest.raises(FormatError):
        load_embedding(path)


def test_fasttext_binary_roundtrip_resolves_oov(tmp_path):
    cfg = TrainConfig(algo=Algo.FASTTEXT, min_count=5, dim=6, epochs=1,
                      subword_buckets=128, seed=2)
    emb = train(_tiny_corpus(), cfg)
    path = tmp_path / "ft.bin"
    save_embedding(emb, path)
    loaded = load_embedding(path)
    assert loaded.subwords is not None
    assert loaded.resolvable("alphabet")  # OOV via shared n-grams


# -- evaluation probes ------------------------------------------------------


def _geometry_embedding():
    vecs = np.array(
        [
            [1.0, 0.0, 0.0],   # king
            [1.0, 1.0, 0.0],   # queen  (king + female)
            [0.0, 0.0, 1.0],   # man
            [0.0, 1.0, 1.0],   # woman  (man + female)
            [0.3, 0.3, 0.3],   # filler
        ]
    )
    return make_embedding(["king", "queen", "man", "woman", "filler"], vecs)


def test_analogy_a_equals_b_is_neighbors_of_c():
    emb = _geometry_embedding()
    via_analogy = [t for t, _ in analogy("king", "king", "man", emb, top_n=3)]
    neighbors = [t for t, _ in most_similar("man", emb, top_n=4) if t not in ("king",)]
    assert via_analogy[0] == neighbors[0]


def test_analogy_exact_construction():
    # unit(queen) - unit(king) + unit(man) is closest to woman by construction.
    emb = _geometry_embedding()
    top = analogy("king", "queen", "man", emb, top_n=1)
    assert top[0][0] == "woman"


def test_analogy_oov_raises():
    emb = _geometry_embedding()
    with pytest.raises(TokenNotFound):
        analogy("king", "queen", "nonexistent", emb)


def test_analogy_suite_and_skipping(tmp_path):
    bench = tmp_path / "bench.txt"
    bench.write_text(
        ": royalty\nking queen man woman\n"
        ": oovs\nking queen missing woman\n"
    )
    report = evaluate_analogy_suite(bench, _geometry_embedding())
    assert report.section_accuracy["royalty"] == 1.0
    assert report.section_accuracy["oovs"] is None
    assert report.section_counts["oovs"] == (0, 0, 1)
    assert report.overall_accuracy == 1.0
    assert report.total_skipped == 1


def test_similarity_perfect_and_reversed(tmp_path):
    vecs = np.array([[1.0, 0.0], [0.9, 0.1], [0.0, 1.0]])
    emb = make_embedding(["a", "b", "c"], vecs)
    f = tmp_path / "sim.csv"
    # cosine order: (a,b) > (b,c) > (a,c)
    f.write_text("a,b,9\na,c,1\nb,c,2\n")
    rho = evaluate_similarity(f, emb)
    assert rho == pytest.approx(1.0)
    f.write_text("a,b,1\na,c,9\nb,c,5\n")
    assert evaluate_similarity(f, emb) == pytest.approx(-1.0)


def test_similarity_hand_spearman(tmp_path):
    rng = np.random.Generator(np.random.PCG64(0))
    vecs = rng.normal(size=(5, 4))
    toks = list("abcde")
    emb = make_embedding(toks, vecs)
    pairs = [("a", "b", 3.0), ("a", "c", 7.0), ("b", "d", 1.0), ("c", "e", 9.0), ("d", "e", 5.0)]
    f = tmp_path / "sim.tsv"
    f.write_text("".join(f"{x}\t{y}\t{s}\n" for x, y, s in pairs))
    sims = [cosine(emb.vector(x), emb.vector(y)) for x, y, _ in pairs]
    expected, _ = stats.spearmanr(sims, [s for _, _, s in pairs])
    assert evaluate_similarity(f, emb) == pytest.approx(float(expected))


def test_similarity_too_few_pairs(tmp_path):
    emb = make_embedding(["a", "b"], np.eye(2))
    f = tmp_path / "sim.csv"
    f.write_text("a,zzz,3\nyyy,b,4\n")
    with pytest.raises(TooFewPairs):
        evaluate_similarity(f, emb)


def test_odd_one_out_orthogonal():
    vecs = np.array([[1.0, 0.01, 0], [1.0, -0.01, 0], [0.0, 0.0, 1.0]])
    emb = make_embedding(["usdgbp", "usdcad", "euraud"], vecs)
    assert odd_one_out(["usdgbp", "euraud", "usdcad"], emb) == "euraud"


def test_odd_one_out_duplicate_never_odd():
    vecs = np.array([[1.0, 0.0], [1.0, 0.0], [0.3, 0.8]])
    emb = make_embedding(["x", "y", "z"], vecs)
    assert odd_one_out(["x", "y", "z"], emb) == "z"


def test_pca_planar_points_reconstruct_exactly():
    rng = np.random.Generator(np.random.PCG64(1))
    basis = rng.normal(size=(2, 6))
    coords = rng.normal(size=(8, 2))
    vecs = coords @ basis
    emb = make_embedding([f"t{i}" for i in range(8)], vecs)
    proj = pca_project([f"t{i}" for i in range(8)], emb)
    # Pairwise distances are preserved when the data is truly 2-D.
    from scipy.spatial.distance import pdist

    assert np.allclose(pdist(proj), pdist(vecs), atol=1e-8)


def test_pca_variance_ordering_and_oracle():
    rng = np.random.Generator(np.random.PCG64(2))
    vecs = rng.normal(size=(10, 7))
    toks = [f"w{i}" for i in range(10)]
    emb = make_embedding(toks, vecs)
    proj = pca_project(toks, emb)
    assert proj.var(axis=0)[0] >= proj.var(axis=0)[1]
    # Oracle: direct eigendecomposition of the covariance.
    centered = vecs - vecs.mean(axis=0)
    w, v = np.linalg.eigh(centered.T @ centered / 9)
    top = v[:, np.argsort(-w)[:2]]
    oracle = centered @ top
    for j in range(2):
        if not np.allclose(proj[:, j], oracle[:, j], atol=1e-8):
            assert np.allclose(proj[:, j], -oracle[:, j], atol=1e-8)


def test_ranking_scale_invariance():
    rng = np.random.Generator(np.random.PCG64(3))
    vecs = rng.normal(size=(6, 5))
    toks = [f"w{i}" for i in range(6)]
    emb_scaled = make_embedding(toks, vecs * 37.5)
    emb = make_embedding(toks, vecs)
    assert [t for t, _ in most_similar("w0", emb)] == [t for t, _ in most_similar("w0", emb_scaled)]
    assert [t for t, _ in analogy("w0", "w1", "w2", emb)] == [
        t for t, _ in analogy("w0", "w1", "w2", emb_scaled)
    ]
    assert odd_one_out(toks, emb) == odd_one_out(toks, emb_scaled)
