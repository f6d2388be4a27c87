"""Token-level attribution reports (CSV and colored HTML) and token tracking."""

from __future__ import annotations

import csv
import html
from datetime import date
from pathlib import Path

from voltext.errors import IoError
from voltext.explain.attribution import AttributionVector, QuadratureSpec, integrated_gradients
from voltext.nlpml.input import SentenceMatrix
from voltext.nlpml.model import CnnConfig, NlpModelParams

_HTML_TEMPLATE = """<!DOCTYPE html>
<html><head><meta charset="utf-8"><title>Token attributions</title>
<style>body{{font-family:sans-serif;max-width:60em;margin:2em auto;line-height:2}}
span.tok{{padding:2px 4px;border-radius:3px;margin:1px}}</style></head>
<body><h3>Token attributions ({method})</h3><p>{spans}</p>
<p><small>Red raises the forecast, blue lowers it; opacity scales with
|attribution| / max|attribution|.</small></p></body></html>
"""


def token_report(
    attribs: AttributionVector,
    tokens: list[str],
    out_path: str | Path,
    format: str = "csv",
) -> Path:
    """Write per-token attributions as CSV rows or a colored HTML page.

    HTML renders positive attributions red and negative blue, with opacity
    proportional to the attribution magnitude relative to the maximum.
    """
    out_path = Path(out_path)
    values = attribs.values[: len(tokens)]
    try:
        if format == "csv":
            with open(out_path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(["token", "slot", "attribution"])
                for slot, (tok, val) in enumerate(zip(tokens, values)):
                    writer.writerow([tok, slot, repr(float(val))])
        elif format == "html":
            max_abs = float(max(abs(values.max(initial=0.0)), abs(values.min(initial=0.0))))
            spans = []
            for tok, val in zip(tokens, values):
                if max_abs == 0.0 or val == 0.0:
                    spans.append(f'<span class="tok">{html.escape(tok)}</span>')
                    continue
                color = "255,0,0" if val > 0 else "0,0,255"
                opacity = abs(float(val)) / max_abs
                spans.append(
                    f'<span class="tok" style="background-color:rgba({color},{opacity:.3f})">'
                    f"{html.escape(tok)}</span>"
                )
            out_path.write_text(
                _HTML_TEMPLATE.format(method=attribs.method.value, spans=" ".join(spans)),
                encoding="utf-8",
            )
        else:
            raise ValueError(f"unknown report format {format!r}")
    except OSError as exc:
        raise IoError(str(exc)) from None
    return out_path


def track_token(
    model_series: list[tuple[date, NlpModelParams, SentenceMatrix]],
    token: str,
    cfg: CnnConfig,
    quad: QuadratureSpec = QuadratureSpec(),
) -> list[tuple[date, int, float]]:
    """Attribution of one token across out-of-sample days.

    For each day whose input contains the token, returns (day, slot,
    attribution) under the model in force that day; multiple occurrences in
    one day are reported separately.  Merged bigrams are matched as single
    tokens.
    """
    out = []
    for day, params, sm in model_series:
        if token not in sm.tokens:
            continue
        attribs = integrated_gradients(params, cfg, sm, quad)
        for slot, tok in enumerate(sm.tokens):
            if tok == token:
                out.append((day, slot, float(attribs.values[slot])))
    return out


def increase_decrease_counts(tracked: list[tuple[date, int, float]]) -> dict[str, int]:
    """Counts of occurrences raising, lowering, or not moving the forecast."""
    return {
        "increase": sum(1 for _, _, v in tracked if v > 0),
        "decrease": sum(1 for _, _, v in tracked if v < 0),
        "zero": sum(1 for _, _, v in tracked if v == 0),
    }
