"""Integrated Gradients, Shapley attributions, and token reports."""

import csv
import itertools

import numpy as np
import pytest

from voltext.errors import TooManyTokens
from voltext.explain.attribution import (
    Method,
    Quadrature,
    QuadratureSpec,
    integrated_gradients,
    shapley_exact,
    shapley_sampled,
)
from voltext.explain.report import increase_decrease_counts, token_report, track_token
from voltext.nlpml.input import SentenceMatrix
from voltext.nlpml.model import CnnConfig, NlpModelParams, forward_batch

from conftest import toy_cnn

DIM = 4


def _sm(rows, max_len=12, tokens=None):
    """A SentenceMatrix with explicitly chosen embedded rows."""
    rows = np.asarray(rows, dtype=float)
    n = rows.shape[0]
    resolved = np.zeros((max_len, DIM))
    resolved[:n] = rows
    mask = np.ones(max_len, dtype=bool)
    mask[:n] = False
    ids = np.full(max_len, -1, dtype=np.int32)
    ids[:n] = np.arange(n)
    if tokens is None:
        tokens = [f"t{i}" for i in range(n)]
    return SentenceMatrix(tokens=tokens, token_ids=ids, pad_mask=mask, resolved=resolved)


def _forecast(sm, params, cfg):
    y, _ = forward_batch(sm.resolved[None], params, cfg)
    return float(y[0])


def _linear_model(max_len=12):
    """A model that is exactly linear along the zero-to-input path.

    Width-1 filters with a large positive bias keep every ReLU active, and a
    single dominant row keeps the pooling argmax fixed for all scalings.
    """
    cfg = CnnConfig(filter_widths=(1,), filters=1, max_len=max_len,
                    dropout_rate=0.0, l2_decay=0.0, seed=0)
    arrays = {
        "conv_w_1": np.array([[[1.0], [2.0], [-0.5], [0.25]]]),  # (1, DIM, 1)
        "conv_b_1": np.array([10.0]),
        "dense_w": np.array([1.5]),
        "dense_b": np.array(2.0),
        "no_news": np.zeros(DIM),
    }
    return NlpModelParams(arrays, (1,), DIM), cfg


# -- quadrature -------------------------------------------------------------


def test_quadrature_weights_sum_to_one():
    for method in Quadrature:
        nodes, weights = QuadratureSpec(method=method, steps=17).nodes_weights()
        assert weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert (nodes > 0).all() and (nodes <= 1).all()


def test_quadrature_rejects_zero_steps():
    with pytest.raises(ValueError):
        QuadratureSpec(steps=0).nodes_weights()


def test_quadratures_agree_at_high_resolution(rng):
    params, cfg = toy_cnn(dim=DIM, max_len=10)
    sm = _sm(rng.normal(size=(4, DIM)))
    gl = integrated_gradients(params, cfg, sm, QuadratureSpec(steps=200))
    ri = integrated_gradients(
        params, cfg, sm, QuadratureSpec(method=Quadrature.RIEMANN, steps=2000))
    assert np.allclose(gl.values, ri.values, atol=1e-3)


# -- integrated gradients ---------------------------------------------------


def test_ig_exact_on_linear_model():
    params, cfg = _linear_model()
    rows = np.array([[0.5, 0.25, -0.5, 1.0]])  # conv response 0.5*1+0.25*2-0.5*-0.5+1*0.25 > 0
    sm = _sm(rows)
    attribs = integrated_gradients(params, cfg, sm, QuadratureSpec(steps=5))
    f_full = _forecast(sm, params, cfg)
    f_zero = attribs.baseline_value
    assert abs(attribs.total - (f_full - f_zero)) <= 1e-12
    # All attribution sits on the one real token.
    assert abs(attribs.values[1:].sum()) <= 1e-12


def test_ig_completeness_generic_model(rng):
    params, cfg = toy_cnn(dim=DIM, max_len=12, filters=3, widths=(2, 3), seed=4)
    sm = _sm(0.5 * rng.normal(size=(6, DIM)))
    f_full = _forecast(sm, params, cfg)
    assert f_full > 0  # stay off the output ReLU kink
    attribs = integrated_gradients(params, cfg, sm, QuadratureSpec(steps=50))
    assert abs(attribs.total - (f_full - attribs.baseline_value)) <= 1e-3


def test_ig_completeness_improves_with_steps(rng):
    params, cfg = toy_cnn(dim=DIM, max_len=12, filters=3, widths=(2, 3), seed=7)
    sm = _sm(rng.normal(size=(6, DIM)))
    f_full = _forecast(sm, params, cfg)
    errs = {}
    for m in (5, 50, 200):
        a = integrated_gradients(params, cfg, sm, QuadratureSpec(steps=m))
        errs[m] = abs(a.total - (f_full - a.baseline_value))
    assert errs[50] <= errs[5] + 1e-12
    assert errs[200] <= errs[5] + 1e-12


def test_ig_zero_input_zero_attribution():
    params, cfg = toy_cnn(dim=DIM)
    sm = _sm(np.zeros((3, DIM)))
    attribs = integrated_gradients(params, cfg, sm)
    assert np.allclose(attribs.values, 0.0)


def test_ig_batch_size_invariance(rng):
    params, cfg = toy_cnn(dim=DIM, seed=5)
    sm = _sm(rng.normal(size=(4, DIM)))
    a = integrated_gradients(params, cfg, sm, QuadratureSpec(steps=50, batch=100))
    b = integrated_gradients(params, cfg, sm, QuadratureSpec(steps=50, batch=7))
    assert np.allclose(a.values, b.values, atol=1e-12)


# -- exact Shapley ----------------------------------------------------------


def _shapley_oracle(params, cfg, sm):
    """Average marginal contributions over all orderings (independent oracle)."""
    n = sm.n_real
    full = sm.resolved.copy()

    def f(coalition):
        X = np.zeros_like(full)
        for i in coalition:
            X[i] = full[i]
        y, _ = forward_batch(X[None], params, cfg)
        return float(y[0])

    values = np.zeros(n)
    perms = list(itertools.permutations(range(n)))
    for order in perms:
        members = set()
        for tok in order:
            before = f(members)
            members.add(tok)
            values[tok] += f(members) - before
    return values / len(perms)


def test_shapley_exact_matches_permutation_oracle(rng):
    params, cfg = toy_cnn(dim=DIM, max_len=10, filters=2, widths=(2,), seed=2)
    sm = _sm(rng.normal(size=(4, DIM)))
    result = shapley_exact(params, cfg, sm)
    oracle = _shapley_oracle(params, cfg, sm)
    assert np.max(np.abs(result.values[:4] - oracle)) <= 1e-10
    assert result.method is Method.SHAPLEY_EXACT


def test_shapley_local_accuracy(rng):
    params, cfg = toy_cnn(dim=DIM, max_len=10, seed=4)
    sm = _sm(rng.normal(size=(5, DIM)))
    result = shapley_exact(params, cfg, sm)
    f_full = _forecast(sm, params, cfg)
    assert abs(result.total - (f_full - result.baseline_value)) <= 1e-10


def test_shapley_null_player(rng):
    # A token embedded as the zero row is indistinguishable from padding.
    rows = rng.normal(size=(4, DIM))
    rows[2] = 0.0
    params, cfg = toy_cnn(dim=DIM, max_len=10, seed=6)
    result = shapley_exact(params, cfg, _sm(rows))
    assert abs(result.values[2]) <= 1e-12


def test_shapley_symmetry_identical_tokens(rng):
    # Width-1 filters make the model permutation-invariant over rows, so two
    # tokens with identical embeddings must receive identical values.
    params, cfg = _linear_model()
    params.arrays["conv_b_1"] = np.array([0.1])  # keep some nonlinearity reachable
    row = rng.normal(size=DIM)
    rows = np.stack([row, rng.normal(size=DIM), row])
    result = shapley_exact(params, cfg, _sm(rows))
    assert result.values[0] == pytest.approx(result.values[2], abs=1e-12)


def test_shapley_exact_cap_enforced(rng):
    params, cfg = toy_cnn(dim=DIM, max_len=20)
    sm = _sm(rng.normal(size=(13, DIM)), max_len=20)
    with pytest.raises(TooManyTokens):
        shapley_exact(params, cfg, sm)
    shapley_exact(params, cfg, sm, cap=13)  # raised cap admits it


# -- sampled Shapley --------------------------------------------------------


def test_shapley_sampled_matches_exact_within_se(rng):
    params, cfg = toy_cnn(dim=DIM, max_len=10, filters=2, seed=8)
    sm = _sm(rng.normal(size=(5, DIM)))
    exact = shapley_exact(params, cfg, sm)
    sampled = shapley_sampled(params, cfg, sm, n_permutations=300,
                              rng=np.random.Generator(np.random.PCG64(0)))
    err = np.abs(sampled.values[:5] - exact.values[:5])
    se = sampled.std_errors[:5]
    within3 = err <= 3 * se + 1e-12
    assert within3.sum() >= 4  # allow one ~3-sigma excursion
    assert (err <= 5 * se + 1e-12).all()


def test_shapley_sampled_rmse_scales_inverse_sqrt(rng):
    params, cfg = toy_cnn(dim=DIM, max_len=10, filters=2, seed=9)
    sm = _sm(rng.normal(size=(4, DIM)))
    exact = shapley_exact(params, cfg, sm).values[:4]
    sizes = [20, 80, 320]
    rmse = []
    for n_perm in sizes:
        sq = []
        for seed in range(12):
            est = shapley_sampled(params, cfg, sm, n_permutations=n_perm,
                                  rng=np.random.Generator(np.random.PCG64(seed)))
            sq.append(np.mean((est.values[:4] - exact) ** 2))
        rmse.append(np.sqrt(np.mean(sq)))
    slope = np.polyfit(np.log(sizes), np.log(rmse), 1)[0]
    assert abs(slope + 0.5) < 0.15


def test_shapley_sampled_deterministic_under_seed(rng):
    params, cfg = toy_cnn(dim=DIM, max_len=10)
    sm = _sm(rng.normal(size=(3, DIM)))
    a = shapley_sampled(params, cfg, sm, 50, np.random.Generator(np.random.PCG64(1)))
    b = shapley_sampled(params, cfg, sm, 50, np.random.Generator(np.random.PCG64(1)))
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.std_errors, b.std_errors)


def test_shapley_sampled_local_accuracy_per_permutation(rng):
    # Each permutation's contributions telescope, so the mean does too.
    params, cfg = toy_cnn(dim=DIM, max_len=10, seed=11)
    sm = _sm(rng.normal(size=(4, DIM)))
    est = shapley_sampled(params, cfg, sm, n_permutations=10,
                          rng=np.random.Generator(np.random.PCG64(2)))
    f_full = _forecast(sm, params, cfg)
    assert est.total == pytest.approx(f_full - est.baseline_value, abs=1e-10)


# -- reports ----------------------------------------------------------------


def _attrib(values, tokens, method=Method.IG):
    from voltext.explain.attribution import AttributionVector
    padded = np.zeros(8)
    padded[: len(values)] = values
    return AttributionVector(values=padded, baseline_value=0.0, method=method,
                             tokens=tokens)


def test_token_report_csv_roundtrip(tmp_path):
    tokens = ["fed", "rate_hike", "calm"]
    attribs = _attrib([0.5, -0.25, 0.0], tokens)
    path = token_report(attribs, tokens, tmp_path / "rep.csv", format="csv")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["token", "slot", "attribution"]
    assert [r[0] for r in rows[1:]] == tokens
    assert [float(r[2]) for r in rows[1:]] == [0.5, -0.25, 0.0]
    assert [int(r[1]) for r in rows[1:]] == [0, 1, 2]


def test_token_report_html_colors(tmp_path):
    tokens = ["up", "down", "<flat>"]
    attribs = _attrib([1.0, -0.5, 0.0], tokens)
    text = token_report(attribs, tokens, tmp_path / "rep.html", format="html").read_text()
    assert "rgba(255,0,0,1.000)" in text  # max positive at full opacity
    assert "rgba(0,0,255,0.500)" in text  # negative, half magnitude
    assert "&lt;flat&gt;" in text  # escaped, and unstyled
    assert text.count("rgba") == 2


def test_token_report_unknown_format(tmp_path):
    attribs = _attrib([1.0], ["x"])
    with pytest.raises(ValueError):
        token_report(attribs, ["x"], tmp_path / "rep.txt", format="txt")


def test_track_token_occurrences(rng):
    from datetime import date

    params, cfg = toy_cnn(dim=DIM, max_len=10, seed=12)
    rows = rng.normal(size=(3, DIM))
    day1 = _sm(rows, tokens=["boom", "calm", "boom"])
    day2 = _sm(rows[:2], tokens=["calm", "quiet"])
    series = [(date(2016, 1, 4), params, day1), (date(2016, 1, 5), params, day2)]
    tracked = track_token(series, "boom", cfg, QuadratureSpec(steps=10))
    assert [(d, s) for d, s, _ in tracked] == [
        (date(2016, 1, 4), 0), (date(2016, 1, 4), 2)]
    counts = increase_decrease_counts(tracked)
    assert counts["increase"] + counts["decrease"] + counts["zero"] == 2


def test_increase_decrease_counts_hand():
    from datetime import date

    d = date(2016, 1, 1)
    tracked = [(d, 0, 1.0), (d, 1, -2.0), (d, 2, 0.0), (d, 3, 0.5)]
    assert increase_decrease_counts(tracked) == {"increase": 2, "decrease": 1, "zero": 1}
