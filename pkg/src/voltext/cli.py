"""The ``voltext`` command line: pipeline orchestration plus one subcommand
per stage for ad-hoc use."""

from __future__ import annotations

import sys
import traceback
from pathlib import Path

import click
import numpy as np

from voltext.errors import VoltextError
from voltext.pipeline import PipelineConfig, emit_report, run_pipeline


@click.group()
@click.option("--seed", type=int, default=None, help="Master seed override.")
@click.option("--strict", is_flag=True, help="Fail on degenerate inputs instead of falling back.")
@click.option("--jobs", "-j", type=int, default=1, help="Parallel ticker branches.")
@click.pass_context
def cli(ctx, seed, strict, jobs):
    """Train financial word embeddings, forecast realized volatility, and
    explain news-driven forecasts."""
    ctx.obj = {"seed": seed, "strict": strict, "jobs": jobs}


@cli.command()
@click.argument("news", type=click.Path(exists=True, dir_okay=False))
@click.argument("out", type=click.Path(dir_okay=False, writable=True))
@click.option("--rules", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--bigram-passes", type=int, default=0, show_default=True)
@click.option("--no-body", is_flag=True, help="Use headlines only.")
def clean(news, out, rules, bigram_passes, no_body):
    """Clean a JSONL news corpus into a tokenized sentence corpus."""
    from voltext.textprep.corpus import build_corpus, read_news
    from voltext.textprep.phrases import detect_bigrams
    from voltext.textprep.rules import default_rules, load_rules

    rule_set = load_rules(rules) if rules else default_rules()
    corpus = build_corpus(read_news(news), rule_set, include_body=not no_body)
    for _ in range(bigram_passes):
        corpus = detect_bigrams(corpus, passes=1)
    corpus.save(out)
    click.echo(f"{len(corpus.sentences)} sentences, {corpus.total_tokens} tokens -> {out}")


@cli.group()
def embed():
    """Word-embedding training and probes."""


@embed.command("train")
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.argument("out", type=click.Path(dir_okay=False, writable=True))
@click.option("--mode", type=click.Choice(["skipgram", "cbow"]), default="skipgram", show_default=True)
@click.option("--algo", type=click.Choice(["word2vec", "fasttext"]), default="word2vec", show_default=True)
@click.option("--dim", type=int, default=300, show_default=True)
@click.option("--window", type=int, default=5, show_default=True)
@click.option("--min-count", type=int, default=5, show_default=True)
@click.option("--negatives", type=int, default=5, show_default=True)
@click.option("--epochs", type=int, default=5, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["binary", "text"]), default="binary", show_default=True)
@click.pass_context
def embed_train(ctx, corpus, out, mode, algo, dim, window, min_count, negatives, epochs, fmt):
    """Train an embedding on a tokenized sentence corpus."""
    from voltext.embedding.io import save_embedding
    from voltext.embedding.train import train
    from voltext.embedding.vocab import Algo, Mode, TrainConfig
    from voltext.textprep.corpus import SentenceCorpus

    cfg = TrainConfig(
        mode=Mode(mode), algo=Algo(algo), dim=dim, window=window,
        min_count=min_count, negatives=negatives, epochs=epochs,
        seed=ctx.obj["seed"] if ctx.obj["seed"] is not None else 1,
    )
    emb = train(SentenceCorpus.load(corpus), cfg)
    save_embedding(emb, out, format=fmt)
    click.echo(f"{len(emb.vocab)} tokens x {emb.dim} dims -> {out}")


@embed.command("neighbors")
@click.argument("embedding", type=click.Path(exists=True, dir_okay=False))
@click.argument("token")
@click.option("-n", "top_n", type=int, default=10, show_default=True)
def embed_neighbors(embedding, token, top_n):
    """Nearest neighbors of a token by cosine similarity."""
    from voltext.embedding.evaluate import most_similar
    from voltext.embedding.io import load_embedding

    for tok, sim in most_similar(token, load_embedding(embedding), top_n=top_n):
        click.echo(f"{tok}\t{sim:.4f}")


@embed.command("analogy")
@click.argument("embedding", type=click.Path(exists=True, dir_okay=False))
@click.argument("benchmark", type=click.Path(exists=True, dir_okay=False))
def embed_analogy(embedding, benchmark):
    """Score an embedding on a sectioned analogy benchmark file."""
    from voltext.embedding.evaluate import evaluate_analogy_suite
    from voltext.embedding.io import load_embedding

    report = evaluate_analogy_suite(benchmark, load_embedding(embedding))
    for section, acc in report.section_accuracy.items():
        shown = "skipped (all OOV)" if acc is None else f"{100 * acc:.1f}%"
        click.echo(f"{section}\t{shown}")
    overall = report.overall_accuracy
    click.echo(f"overall\t{'n/a' if overall is None else f'{100 * overall:.1f}%'}")


@cli.command()
@click.argument("prices", type=click.Path(exists=True, dir_okay=False))
@click.argument("out", type=click.Path(dir_okay=False, writable=True))
def rv(prices, out):
    """Realized measures (RV, BPV, jump, RV±, RQ) from a timestamp,price CSV."""
    import pandas as pd

    from voltext.volatility.measures import daily_record, days_from_prices, save_records

    frame = pd.read_csv(prices, parse_dates=["timestamp"])
    records = [daily_record(d) for d in days_from_prices(frame)]
    save_records(records, out)
    click.echo(f"{len(records)} trading days -> {out}")


@cli.command()
@click.argument("rv_csv", type=click.Path(exists=True, dir_okay=False))
@click.argument("news", type=click.Path(exists=True, dir_okay=False))
@click.argument("embedding", type=click.Path(exists=True, dir_okay=False))
@click.argument("out", type=click.Path(dir_okay=False, writable=True))
@click.option("--ticker", required=True)
@click.option("--train-len", type=int, default=2046, show_default=True)
@click.option("--oos-len", type=int, default=300, show_default=True)
@click.option("--filters", type=int, default=3, show_default=True)
@click.option("--epochs", type=int, default=20, show_default=True)
@click.option("--checkpoint", type=click.Path(dir_okay=False), default=None,
              help="Save the final trained model here.")
@click.pass_context
def nlpml(ctx, rv_csv, news, embedding, out, ticker, train_len, oos_len, filters, epochs, checkpoint):
    """Rolling news-CNN volatility forecasts for one ticker."""
    from voltext.embedding.io import load_embedding
    from voltext.nlpml.input import build_day_input
    from voltext.nlpml.model import CnnConfig
    from voltext.nlpml.training import train_model, train_rolling
    from voltext.textprep.corpus import aggregate_daily_headlines, read_news
    from voltext.volatility.har import RollingProtocol
    from voltext.volatility.measures import load_records

    emb = load_embedding(embedding)
    records = load_records(rv_csv)
    items = read_news(news)
    cfg = CnnConfig(
        filters=filters, epochs=epochs,
        seed=ctx.obj["seed"] if ctx.obj["seed"] is not None else 1,
    )
    inputs = [
        build_day_input(
            aggregate_daily_headlines(items, f"about:{ticker.lower()}", r.date), emb
        )
        for r in records
    ]
    rv_series = np.array([r.rv for r in records])
    series = train_rolling(
        inputs, rv_series, cfg, RollingProtocol(train_len=train_len, oos_len=oos_len),
        dates=[r.date for r in records], ticker=ticker,
    )
    series.save(out)
    click.echo(f"{len(series.dates)} forecasts -> {out}")
    if checkpoint:
        from voltext.nlpml.checkpoint import save_checkpoint

        n = rv_series.size
        target_idx = np.arange(n - train_len - 1, n - 1)
        params = train_model(
            [inputs[t - 1] for t in target_idx], rv_series[target_idx], cfg, emb.dim
        )
        save_checkpoint(params, cfg, checkpoint)
        click.echo(f"model checkpoint -> {checkpoint}")


@cli.command("eval")
@click.argument("candidate", type=click.Path(exists=True, dir_okay=False))
@click.argument("benchmarks", type=click.Path(exists=True, dir_okay=False), nargs=-1, required=True)
@click.option("--loss", type=click.Choice(["mse", "qlike", "mda"]), default="mse", show_default=True)
@click.option("--panel", type=click.Choice(["all", "normal", "jump"]), default="all", show_default=True)
@click.option("--n-boot", type=int, default=999, show_default=True)
@click.option("--avg-block", type=float, default=5.0, show_default=True)
@click.pass_context
def eval_cmd(ctx, candidate, benchmarks, loss, panel, n_boot, avg_block):
    """Loss comparison and reality check of a candidate vs benchmark series."""
    from voltext.evaluation.bootstrap import reality_check
    from voltext.evaluation.days import classify_days
    from voltext.evaluation.losses import LOSS_FUNCTIONS
    from voltext.series import ForecastSeries

    cand = ForecastSeries.load(candidate)
    bench = [ForecastSeries.load(b) for b in benchmarks]
    idx = None
    if panel != "all":
        split = classify_days(cand.actual)
        idx = split.normal_idx if panel == "normal" else split.jump_idx
    fn = LOSS_FUNCTIONS[loss]
    sub = cand if idx is None else cand.subset(idx)
    click.echo(f"{loss}({cand.model_id}) = {fn(sub):.6g}")
    for b in bench:
        bsub = b if idx is None else b.subset(idx)
        click.echo(f"{loss}({b.model_id}) = {fn(bsub):.6g}  delta = {fn(sub) - fn(bsub):+.6g}")
    if loss != "mda":
        res = reality_check(
            cand, bench, loss=loss, n_boot=n_boot, avg_block=avg_block,
            day_subset=idx, seed=ctx.obj["seed"] if ctx.obj["seed"] is not None else 0,
        )
        click.echo(f"reality check: statistic = {res.statistic:.6g}, p = {res.p_value:.4f}")


@cli.command()
@click.argument("checkpoint", type=click.Path(exists=True, dir_okay=False))
@click.argument("embedding", type=click.Path(exists=True, dir_okay=False))
@click.argument("news", type=click.Path(exists=True, dir_okay=False))
@click.argument("out", type=click.Path(dir_okay=False, writable=True))
@click.option("--ticker", required=True)
@click.option("--date", "day", required=True, help="Trading day (YYYY-MM-DD).")
@click.option("--method", type=click.Choice(["ig", "shapley"]), default="ig", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "html"]), default="csv", show_default=True)
@click.pass_context
def explain(ctx, checkpoint, embedding, news, out, ticker, day, method, fmt):
    """Attribute one day's forecast to its input tokens."""
    from datetime import date as date_type

    from voltext.embedding.io import load_embedding
    from voltext.explain.attribution import (
        SHAPLEY_EXACT_CAP,
        integrated_gradients,
        shapley_exact,
        shapley_sampled,
    )
    from voltext.explain.report import token_report
    from voltext.nlpml.checkpoint import load_checkpoint
    from voltext.nlpml.input import build_day_input
    from voltext.textprep.corpus import aggregate_daily_headlines, read_news

    params, cfg = load_checkpoint(checkpoint)
    emb = load_embedding(embedding)
    tokens = aggregate_daily_headlines(
        read_news(news), f"about:{ticker.lower()}", date_type.fromisoformat(day)
    )
    sm = build_day_input(tokens, emb, max_len=cfg.max_len)
    if method == "ig":
        attribs = integrated_gradients(params, cfg, sm)
    elif sm.n_real <= SHAPLEY_EXACT_CAP:
        attribs = shapley_exact(params, cfg, sm)
    else:
        seed = ctx.obj["seed"] if ctx.obj["seed"] is not None else 0
        attribs = shapley_sampled(params, cfg, sm, rng=np.random.default_rng(seed))
    token_report(attribs, sm.tokens, out, format=fmt)
    click.echo(f"{sm.n_real} tokens, attribution total {attribs.total:+.6g} -> {out}")


@cli.command()
@click.argument("out_dir", type=click.Path(file_okay=False))
@click.option("--n-days", type=int, default=500, show_default=True)
@click.option("--jump-intensity", type=float, default=0.05, show_default=True)
@click.option("--jump-size", type=float, default=6.0, show_default=True)
@click.option("--p-signal", type=float, default=0.9, show_default=True)
@click.option("--ticker", default="SYN", show_default=True)
@click.pass_context
def synth(ctx, out_dir, n_days, jump_intensity, jump_size, p_signal, ticker):
    """Generate a synthetic news + prices + labels dataset."""
    from voltext.synth import SynthSpec, generate_synthetic, generator_self_test
    from voltext.textprep.corpus import write_news
    from voltext.volatility.measures import save_records

    spec = SynthSpec(
        n_days=n_days, jump_intensity=jump_intensity, jump_size=jump_size,
        p_signal=p_signal, ticker=ticker,
        seed=ctx.obj["seed"] if ctx.obj["seed"] is not None else 0,
    )
    data = generate_synthetic(spec)
    if jump_intensity > 0 and not generator_self_test(data):
        raise click.ClickException(
            "generator self-test failed: jump-day RV does not dominate normal days"
        )
    out = Path(out_dir)
    (out / "prices").mkdir(parents=True, exist_ok=True)
    write_news(data.news, out / "news.jsonl")
    data.prices.to_csv(out / "prices" / f"{ticker}.csv", index=False)
    data.labels_frame().to_csv(out / "labels.csv", index=False)
    save_records(data.records, out / f"rv_{ticker}.csv")
    click.echo(
        f"{n_days} days, {len(data.news)} headlines, "
        f"{int(data.jump_labels.sum())} jump days -> {out}"
    )


@cli.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@click.option("--resume", "resume_dir", type=click.Path(file_okay=False), default=None,
              help="Re-use a previous run directory, skipping unchanged stages.")
@click.pass_context
def run(ctx, config, resume_dir):
    """Run the full pipeline from a JSON config file."""
    cfg = PipelineConfig.load(config)
    if ctx.obj["seed"] is not None:
        cfg.seed = ctx.obj["seed"]
    run_dir = run_pipeline(cfg, resume_dir=resume_dir, jobs=ctx.obj["jobs"], log=click.echo)
    click.echo(f"run directory: {run_dir}")


@cli.command()
@click.argument("run_dir", type=click.Path(exists=True, file_okay=False))
def report(run_dir):
    """Regenerate summary tables for an existing run directory."""
    summary = emit_report(run_dir)
    click.echo(summary.read_text(encoding="utf-8"))


def main() -> int:
    """Entry point with the 0 / 1 (user error) / 2 (internal error) contract."""
    try:
        cli.main(standalone_mode=False)
        return 0
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except VoltextError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except Exception:
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
