"""End-to-end run orchestration: config, staged execution with content-hash
skipping, a hash manifest, and summary report emission."""

from __future__ import annotations

import hashlib
import json
import shutil
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path

import numpy as np

import voltext
from voltext.errors import ConfigError, TooShortSeries
from voltext.series import ForecastSeries
from voltext.embedding.train import TrainedEmbedding, train
from voltext.embedding.io import load_embedding, save_binary
from voltext.embedding.vocab import Algo, Mode, TrainConfig
from voltext.evaluation.bootstrap import reality_check
from voltext.evaluation.days import classify_days
from voltext.evaluation.losses import LOSS_FUNCTIONS
from voltext.nlpml.input import build_day_input
from voltext.nlpml.model import AdamHyper, CnnConfig
from voltext.nlpml.training import train_rolling
from voltext.textprep.corpus import aggregate_daily_headlines, build_corpus, read_news
from voltext.textprep.phrases import detect_bigrams
from voltext.textprep.rules import default_rules, load_rules
from voltext.volatility.har import HARFamily, HARSpec, RollingProtocol, rolling_forecast
from voltext.volatility.measures import daily_record, days_from_prices, load_records, save_records

LOSS_NAMES = ("mse", "qlike", "mda")
PANELS = ("all", "normal", "jump")


@dataclass
class PipelineConfig:
    """Everything one run needs: input paths, tickers, protocol, and models."""

    corpus_path: str
    prices_dir: str
    out_dir: str
    tickers: list[str]
    rules_path: str | None = None
    embedding_path: str | None = None  # pre-trained; skips embedding training
    train_len: int = 2046
    oos_len: int = 300
    har_families: list[str] = field(default_factory=lambda: [f.value for f in HARFamily])
    benchmark_family: str = "har"
    embed: TrainConfig = field(default_factory=TrainConfig)
    cnn: CnnConfig = field(default_factory=CnnConfig)
    bigram_passes: int = 0
    include_body: bool = True
    n_boot: int = 999
    avg_block: float = 5.0
    seed: int = 0

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        if not self.tickers:
            raise ConfigError("tickers: must be a non-empty list")
        if not Path(self.corpus_path).is_file():
            raise ConfigError(f"corpus_path: no such file: {self.corpus_path}")
        if not Path(self.prices_dir).is_dir():
            raise ConfigError(f"prices_dir: no such directory: {self.prices_dir}")
        for t in self.tickers:
            p = Path(self.prices_dir) / f"{t}.csv"
            if not p.is_file():
                raise ConfigError(f"prices_dir: missing price file for ticker {t!r}: {p}")
        if self.rules_path is not None and not Path(self.rules_path).is_file():
            raise ConfigError(f"rules_path: no such file: {self.rules_path}")
        if self.embedding_path is not None and not Path(self.embedding_path).is_file():
            raise ConfigError(f"embedding_path: no such file: {self.embedding_path}")
        for fam in self.har_families:
            try:
                HARFamily(fam)
            except ValueError:
                raise ConfigError(f"har_families: unknown family {fam!r}") from None
        if self.benchmark_family not in self.har_families:
            raise ConfigError(
                f"benchmark_family: {self.benchmark_family!r} not in har_families"
            )
        if self.train_len < 1 or self.oos_len < 1:
            raise ConfigError("train_len and oos_len must be positive")

    # -- (de)serialization --------------------------------------------------

    def to_dict(self) -> dict:
        d = asdict(self)
        d["embed"]["mode"] = self.embed.mode.value
        d["embed"]["algo"] = self.embed.algo.value
        d["cnn"]["filter_widths"] = list(self.cnn.filter_widths)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        d = dict(d)
        try:
            embed = dict(d.pop("embed", {}))
            if "mode" in embed:
                embed["mode"] = Mode(embed["mode"])
            if "algo" in embed:
                embed["algo"] = Algo(embed["algo"])
            cnn = dict(d.pop("cnn", {}))
            if "filter_widths" in cnn:
                cnn["filter_widths"] = tuple(cnn["filter_widths"])
            if "adam" in cnn:
                cnn["adam"] = AdamHyper(**cnn["adam"])
            return cls(**d, embed=TrainConfig(**embed), cnn=CnnConfig(**cnn))
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(f"bad pipeline config: {exc}") from None

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        try:
            return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None


# -- manifest and stage skipping -------------------------------------------


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class Manifest:
    """Per-run record of stage inputs/outputs (content hashes) and seeds."""

    def __init__(self, path: Path):
        self.path = path
        if path.is_file():
            self.data = json.loads(path.read_text(encoding="utf-8"))
        else:
            self.data = {"version": voltext.__version__, "stages": {}}

    def save(self) -> None:
        self.path.write_text(json.dumps(self.data, indent=2) + "\n", encoding="utf-8")

    def stage_fresh(self, name: str, in_hashes: dict, cfg_hash: str, outputs: list[Path]) -> bool:
        rec = self.data["stages"].get(name)
        if rec is None or rec["inputs"] != in_hashes or rec["config"] != cfg_hash:
            return False
        for out in outputs:
            if not out.is_file() or rec["outputs"].get(out.name) != _sha256(out):
                return False
        return True

    def record(self, name: str, in_hashes: dict, cfg_hash: str, outputs: list[Path], seed: int) -> None:
        self.data["stages"][name] = {
            "inputs": in_hashes,
            "config": cfg_hash,
            "outputs": {out.name: _sha256(out) for out in outputs},
            "seed": seed,
        }
        self.save()


def _run_stage(
    manifest: Manifest,
    name: str,
    inputs: list[Path],
    cfg_repr: object,
    outputs: list[Path],
    seed: int,
    fn,
    log,
) -> bool:
    """Run one stage unless its inputs, config, and outputs are all unchanged.

    Returns True when the stage actually executed.
    """
    in_hashes = {str(p): _sha256(p) for p in sorted(inputs)}
    cfg_hash = hashlib.sha256(
        json.dumps(cfg_repr, sort_keys=True, default=str).encode()
    ).hexdigest()
    if manifest.stage_fresh(name, in_hashes, cfg_hash, outputs):
        log(f"[skip] {name}")
        return False
    log(f"[run ] {name}")
    for out in outputs:
        out.parent.mkdir(parents=True, exist_ok=True)
    fn()
    manifest.record(name, in_hashes, cfg_hash, outputs, seed)
    return True


# -- the pipeline ----------------------------------------------------------


def run_pipeline(
    config: PipelineConfig,
    resume_dir: str | Path | None = None,
    jobs: int = 1,
    log=print,
) -> Path:
    """Execute clean → embed → rv → forecasts → report, returning the run dir.

    Each invocation gets a fresh timestamped directory unless ``resume_dir``
    points at a previous run, in which case stages whose inputs and outputs
    are unchanged (by content hash) are skipped and only stale stages rerun.
    """
    config.validate()
    if resume_dir is not None:
        run_dir = Path(resume_dir)
        if not run_dir.is_dir():
            raise ConfigError(f"resume directory does not exist: {run_dir}")
    else:
        stamp = datetime.now().strftime("%Y%m%d-%H%M%S-%f")
        run_dir = Path(config.out_dir) / f"run-{stamp}-s{config.seed}"
        run_dir.mkdir(parents=True)
    manifest = Manifest(run_dir / "manifest.json")
    config.save(run_dir / "config.json")

    rules_file = Path(config.rules_path) if config.rules_path else None
    rules = load_rules(rules_file) if rules_file else default_rules()
    stage_inputs = [Path(config.corpus_path)] + ([rules_file] if rules_file else [])

    # 1. clean: news corpus -> sentence corpus for embedding training.
    corpus_txt = run_dir / "corpus.txt"

    def do_clean():
        items = read_news(config.corpus_path)
        corpus = build_corpus(items, rules, include_body=config.include_body)
        for _ in range(config.bigram_passes):
            corpus = detect_bigrams(corpus, passes=1)
        corpus.save(corpus_txt)

    _run_stage(
        manifest, "clean", stage_inputs,
        {"bigram_passes": config.bigram_passes, "include_body": config.include_body},
        [corpus_txt], config.seed, do_clean, log,
    )

    # 2. embed: train (or import) the word embedding.
    emb_bin = run_dir / "embedding.bin"
    if config.embedding_path:
        _run_stage(
            manifest, "embed", [Path(config.embedding_path)], {"imported": True},
            [emb_bin], config.seed,
            lambda: shutil.copyfile(config.embedding_path, emb_bin), log,
        )
    else:

        def do_embed():
            from voltext.textprep.corpus import SentenceCorpus

            corpus = SentenceCorpus.load(corpus_txt)
            emb = train(corpus, config.embed)
            save_binary(emb, emb_bin)

        _run_stage(
            manifest, "embed", [corpus_txt], asdict(config.embed),
            [emb_bin], config.embed.seed, do_embed, log,
        )

    # 3-5. per-ticker branches: realized measures, HAR forecasts, CNN forecasts.
    protocol = RollingProtocol(train_len=config.train_len, oos_len=config.oos_len)
    fc_dir = run_dir / "forecasts"
    embedding_cache: list[TrainedEmbedding | None] = [None]

    def get_embedding() -> TrainedEmbedding:
        if embedding_cache[0] is None:
            embedding_cache[0] = load_embedding(emb_bin)
        return embedding_cache[0]

    def ticker_branch(ticker: str) -> None:
        price_file = Path(config.prices_dir) / f"{ticker}.csv"
        rv_csv = run_dir / f"rv_{ticker}.csv"

        def do_rv():
            import pandas as pd

            prices = pd.read_csv(price_file, parse_dates=["timestamp"])
            days = days_from_prices(prices)
            save_records([daily_record(d) for d in days], rv_csv)

        _run_stage(manifest, f"rv:{ticker}", [price_file], {}, [rv_csv], config.seed, do_rv, log)
        records = load_records(rv_csv)
        for fam in config.har_families:
            out = fc_dir / f"{fam}_{ticker}.csv"
            spec = HARSpec(family=HARFamily(fam))

            def do_har(spec=spec, out=out):
                rolling_forecast(records, spec, protocol, ticker=ticker).save(out)

            _run_stage(
                manifest, f"har:{fam}:{ticker}", [rv_csv],
                {"family": fam, "protocol": asdict(protocol)},
                [out], config.seed, do_har, log,
            )
        nlp_out = fc_dir / f"nlpml_{ticker}.csv"

        def do_nlpml():
            emb = get_embedding()
            items = read_news(config.corpus_path)
            inputs = [
                build_day_input(
                    aggregate_daily_headlines(items, f"about:{ticker.lower()}", r.date, rules=rules),
                    emb,
                    max_len=config.cnn.max_len,
                )
                for r in records
            ]
            rv = np.array([r.rv for r in records])
            train_rolling(
                inputs, rv, config.cnn, protocol,
                dates=[r.date for r in records], ticker=ticker,
            ).save(nlp_out)

        _run_stage(
            manifest, f"nlpml:{ticker}", [rv_csv, emb_bin, Path(config.corpus_path)],
            {"cnn": config.to_dict()["cnn"], "protocol": asdict(protocol)},
            [nlp_out], config.cnn.seed, do_nlpml, log,
        )

    if jobs > 1 and len(config.tickers) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(ticker_branch, config.tickers))
    else:
        for t in config.tickers:
            ticker_branch(t)

    # 6. report.
    report_dir = run_dir / "report"
    fc_files = sorted(fc_dir.glob("*.csv"))
    report_outputs = [report_dir / "summary.txt"] + [
        report_dir / f"summary_{loss}.csv" for loss in LOSS_NAMES
    ]
    _run_stage(
        manifest, "report", fc_files,
        {"benchmark": config.benchmark_family, "n_boot": config.n_boot,
         "avg_block": config.avg_block},
        report_outputs, config.seed,
        lambda: emit_report(run_dir, config), log,
    )
    return run_dir


# -- reporting -------------------------------------------------------------


def _panel_indices(series: ForecastSeries) -> dict[str, np.ndarray]:
    split = classify_days(series.actual)
    return {
        "all": np.arange(series.actual.size),
        "normal": split.normal_idx,
        "jump": split.jump_idx,
    }


def _safe_loss(loss: str, series: ForecastSeries) -> float:
    try:
        return LOSS_FUNCTIONS[loss](series)
    except TooShortSeries:
        return float("nan")


def emit_report(run_dir: str | Path, config: PipelineConfig | None = None) -> Path:
    """Summaries over every forecast file in the run directory.

    For each loss (MSE / QLIKE / MDA) and each day panel (all / normal /
    jump): per-ticker model losses, the average and median loss difference
    against the benchmark model, and reality-check p-values of each model
    against the full benchmark set — plus the percentage of tickers
    significant at 5% and 10%.  Per-series CSVs backing line charts are
    written alongside.
    """
    run_dir = Path(run_dir)
    if config is None:
        config = PipelineConfig.load(run_dir / "config.json")
    report_dir = run_dir / "report"
    report_dir.mkdir(exist_ok=True)

    series: dict[str, dict[str, ForecastSeries]] = {}  # model -> ticker -> series
    for path in sorted((run_dir / "forecasts").glob("*.csv")):
        s = ForecastSeries.load(path)
        series.setdefault(s.model_id, {})[s.ticker] = s
    if not series:
        raise ConfigError(f"no forecast files under {run_dir / 'forecasts'}")
    benchmark = config.benchmark_family
    models = sorted(series)
    tickers = sorted({t for per in series.values() for t in per})

    lines = [f"run: {run_dir.name}", ""]
    for loss in LOSS_NAMES:
        rows = []
        for model in models:
            for ticker, s in sorted(series[model].items()):
                panels = _panel_indices(s)
                bench = series.get(benchmark, {}).get(ticker)
                others = [
                    series[m][ticker]
                    for m in models
                    if m != model and ticker in series[m]
                ]
                for panel, idx in panels.items():
                    if idx.size == 0:
                        rows.append((model, ticker, panel,
                                     float("nan"), float("nan"), float("nan")))
                        continue
                    sub = s.subset(idx)
                    value = _safe_loss(loss, sub)
                    delta = float("nan")
                    if bench is not None and model != benchmark:
                        delta = value - _safe_loss(loss, bench.subset(idx))
                    p = float("nan")
                    if others and loss != "mda" and idx.size > 1:
                        p = reality_check(
                            s, others, loss=loss, n_boot=config.n_boot,
                            avg_block=config.avg_block,
                            day_subset=None if panel == "all" else idx,
                            seed=config.seed,
                        ).p_value
                    rows.append((model, ticker, panel, value, delta, p))
        frame_path = report_dir / f"summary_{loss}.csv"
        with open(frame_path, "w", encoding="utf-8") as fh:
            fh.write("model,ticker,panel,loss,delta_vs_benchmark,rc_p\n")
            for r in rows:
                fh.write(",".join(str(x) for x in r) + "\n")

        lines.append(f"== {loss.upper()} (benchmark: {benchmark}) ==")
        for panel in PANELS:
            lines.append(f"  panel: {panel}")
            for model in models:
                deltas = [r[4] for r in rows if r[0] == model and r[2] == panel]
                ps = [r[5] for r in rows if r[0] == model and r[2] == panel]
                deltas = [d for d in deltas if np.isfinite(d)]
                finite_p = [p for p in ps if np.isfinite(p)]
                avg = np.mean(deltas) if deltas else float("nan")
                med = np.median(deltas) if deltas else float("nan")
                pct5 = 100.0 * np.mean([p < 0.05 for p in finite_p]) if finite_p else float("nan")
                pct10 = 100.0 * np.mean([p < 0.10 for p in finite_p]) if finite_p else float("nan")
                lines.append(
                    f"    {model:<8s} Avg {avg:>12.6g}  Med {med:>12.6g}"
                    f"  RC<5% {pct5:>5.1f}%  RC<10% {pct10:>5.1f}%"
                )
        lines.append("")

    for model in models:
        for ticker, s in sorted(series[model].items()):
            s.to_frame().to_csv(report_dir / f"series_{model}_{ticker}.csv", index=False)

    lines.append(f"tickers: {', '.join(tickers)}")
    summary = report_dir / "summary.txt"
    summary.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return summary
