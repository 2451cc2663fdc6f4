"""Plain-text model files and CSV result tables.

Model file layout::

    format_version=1
    n=50
    p=150
    gamma=0.1
    lambda=0.01
    learning_rate=0.1
    iterations=500
    seed=7
    PATTERNS
    1 -1 1 ...          (P rows of N signs)
    ALPHA
    0.123... -3.2...    (P rows of N reals, 17 significant digits)

Reals are written with 17 significant digits, so a save/load round trip is
bit-exact.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .experiments import RUN_NOTES
from .kernel import KernelParams, PatternSet
from .stability import MarginReport
from .training import DualWeights, TrainConfig

FORMAT_VERSION = 1
HEADER_KEYS = ("format_version", "n", "p", "gamma", "lambda", "learning_rate", "iterations", "seed")

CSV_COLUMNS = {
    "dynamics": ("scheme", "epoch", "overlap_mean", "overlap_std", "energy_mean"),
    "capacity": ("n", "load", "scheme", "accuracy_mean", "accuracy_std"),
    "efficiency": ("noise_fraction", "mean_events", "std_events", "mean_initial_hamming", "success_rate"),
}


class ModelFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ModelVersionError(ModelFormatError):
    pass


class ModelDimensionError(ModelFormatError):
    pass


@dataclass(frozen=True)
class ModelFile:
    weights: DualWeights
    seed: int | None = None


def fmt(x) -> str:
    """Lossless text form of a number: integers as-is, floats with 17 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def save_model(w: DualWeights, path, seed: int | None = None) -> None:
    header = {
        "format_version": FORMAT_VERSION,
        "n": w.n,
        "p": w.p,
        "gamma": fmt(w.params.gamma),
        "lambda": fmt(w.config.weight_decay),
        "learning_rate": fmt(w.config.learning_rate),
        "iterations": w.config.iterations,
        "seed": "none" if seed is None else int(seed),
    }
    lines = [f"{k}={v}" for k, v in header.items()]
    lines.append("PATTERNS")
    lines.extend(" ".join(str(int(v)) for v in row) for row in w.patterns.patterns)
    lines.append("ALPHA")
    lines.extend(" ".join(fmt(v) for v in row) for row in w.alpha)
    Path(path).write_text("\n".join(lines) + "\n")


def load_model(path) -> ModelFile:
    lines = Path(path).read_text().splitlines()
    header: dict[str, str] = {}
    pos = 0
    while pos < len(lines) and lines[pos].strip() != "PATTERNS":
        raw = lines[pos].strip()
        pos += 1
        if not raw:
            continue
        key, sep, value = raw.partition("=")
        if not sep:
            raise ModelFormatError(f"expected key=value, got {raw!r}", pos)
        header[key.strip()] = value.strip()
    if pos == len(lines):
        raise ModelFormatError("missing PATTERNS block")
    missing = [k for k in HEADER_KEYS if k not in header]
    if missing:
        raise ModelFormatError(f"header lacks {', '.join(missing)}")

    version = _parse(int, header["format_version"], "format_version", None)
    if version != FORMAT_VERSION:
        raise ModelVersionError(f"unsupported format_version {version} (expected {FORMAT_VERSION})")
    n = _parse(int, header["n"], "n", None)
    p = _parse(int, header["p"], "p", None)
    seed = None if header["seed"] == "none" else _parse(int, header["seed"], "seed", None)

    pos += 1
    patterns, pos = _read_block(lines, pos, p, n, int, "ALPHA")
    if pos >= len(lines) or lines[pos].strip() != "ALPHA":
        raise ModelFormatError("missing ALPHA block", pos + 1)
    alpha, pos = _read_block(lines, pos + 1, p, n, float, None)
    if any(line.strip() for line in lines[pos:]):
        raise ModelDimensionError(f"more than p={p} alpha rows", pos + 1)

    try:
        ps = PatternSet(np.array(patterns))
    except ValueError as exc:
        raise ModelFormatError(f"invalid pattern block: {exc}") from exc
    cfg = TrainConfig(
        learning_rate=_parse(float, header["learning_rate"], "learning_rate", None),
        weight_decay=_parse(float, header["lambda"], "lambda", None),
        iterations=_parse(int, header["iterations"], "iterations", None),
    )
    params = KernelParams(_parse(float, header["gamma"], "gamma", None))
    return ModelFile(DualWeights(np.array(alpha), ps, params, cfg), seed)


def _parse(kind, text: str, what: str, line: int | None):
    try:
        return kind(text)
    except ValueError:
        raise ModelFormatError(f"malformed {what}: {text!r}", line) from None


def _read_block(lines, pos, rows, cols, kind, stop):
    out = []
    while len(out) < rows:
        if pos >= len(lines) or lines[pos].strip() == stop:
            raise ModelDimensionError(f"expected {rows} rows, found {len(out)}", pos + 1)
        fields = lines[pos].split()
        if len(fields) != cols:
            raise ModelDimensionError(f"expected {cols} columns, found {len(fields)}", pos + 1)
        out.append([_parse(kind, f, "number", pos + 1) for f in fields])
        pos += 1
    return out, pos


def metadata_lines(config: dict, kind: str) -> list[str]:
    meta = {"experiment": kind, "version": __version__, **config, "notes": RUN_NOTES}
    return [f"# {k}={json.dumps(v, sort_keys=True, default=str)}" for k, v in meta.items()]


def experiment_rows(results, kind: str):
    if kind == "dynamics":
        aggs = results.values() if isinstance(results, dict) else results
        for agg in aggs:
            for epoch, (m, s, e) in enumerate(zip(agg.overlap_mean, agg.overlap_std, agg.energy_mean)):
                yield (agg.scheme.value, epoch, m, s, e)
    elif kind == "capacity":
        for agg in results:
            yield (agg.n, agg.load, agg.scheme.value, agg.accuracy, agg.accuracy_std)
    elif kind == "efficiency":
        for agg in sorted(results, key=lambda a: a.noise_fraction):
            yield (agg.noise_fraction, agg.mean_events, agg.std_events, agg.mean_initial_hamming, agg.accuracy)
    else:
        raise ValueError(f"unknown experiment kind {kind!r}")


def emit_csv(results, kind: str, path, config: dict | None = None) -> None:
    """Write one experiment's aggregated results, preceded by ``#`` metadata lines."""
    if not results:
        raise ValueError("no results to write")
    rows = list(experiment_rows(results, kind))
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            for line in metadata_lines(config or {}, kind):
                fh.write(line + "\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS[kind])
            writer.writerows([fmt(v) if not isinstance(v, str) else v for v in row] for row in rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def read_csv(path) -> tuple[list[str], list[dict[str, str]]]:
    """Read an emitted CSV back as (metadata lines, rows)."""
    text = Path(path).read_text().splitlines()
    meta = [line for line in text if line.startswith("#")]
    body = [line for line in text if not line.startswith("#")]
    return meta, list(csv.DictReader(body))


def write_margin_report(report: MarginReport, path, context: dict | None = None) -> None:
    """Margin report as CSV (per neuron) or JSON (summary + per neuron), chosen by suffix."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        doc = {**(context or {}), "summary": report.summary(), "neurons": list(report.rows())}
        path.write_text(json.dumps(doc, indent=2) + "\n")
        return
    with path.open("w", newline="") as fh:
        for k, v in {**(context or {}), **report.summary()}.items():
            fh.write(f"# {k}={json.dumps(v)}\n")
        rows = list(report.rows())
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: fmt(v) if isinstance(v, float) else v for k, v in row.items()})


PLOTSCRIPTS = {
    "dynamics": """set datafile separator ','
set key autotitle columnhead
set xlabel 'epoch'
set ylabel 'overlap'
set yrange [*:1.05]
plot '{csv}' using 2:(strcol(1) eq 'sync' ? $3 : 1/0) with lines title 'sync', \\
     '{csv}' using 2:(strcol(1) eq 'async' ? $3 : 1/0) with lines dashtype 2 title 'async'
""",
    "capacity": """set datafile separator ','
set key autotitle columnhead
set xlabel 'P/N'
set ylabel 'recall accuracy'
plot '{csv}' using 2:(strcol(3) eq 'sync' ? $4 : 1/0) with linespoints title 'sync', \\
     '{csv}' using 2:(strcol(3) eq 'async' ? $4 : 1/0) with linespoints dashtype 2 title 'async'
""",
    "efficiency": """set datafile separator ','
set key autotitle columnhead
set xlabel 'noise fraction'
set ylabel 'bit flips'
set y2label 'success rate'
set y2tics
plot '{csv}' using 1:2 with linespoints title 'events', \\
     '{csv}' using 1:4 with lines dashtype 2 title 'initial errors', \\
     '{csv}' using 1:5 axes x1y2 with points pt 5 title 'success rate'
""",
}


def emit_plotscript(kind: str, csv_path, script_path) -> None:
    script = PLOTSCRIPTS[kind].replace("{csv}", Path(csv_path).name)
    Path(script_path).write_text(script)
