"""CSV tables and SVG figures from run logs, eval outputs and experiment summaries."""

from __future__ import annotations

import csv
from pathlib import Path

from ..advtrain import RunLog
from ..errors import DataError
from ..evalkit import learning_order
from . import svg


def _rows_csv(path: Path, header: list, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _num(v) -> str:
    if v is None:
        return ""
    return repr(float(v))


def find_runs(root: Path) -> list[tuple[str, Path]]:
    """Run directories (those holding a ``log.csv``) under ``root``, in path order."""
    found = sorted(p.parent for p in root.rglob("log.csv"))
    return [(p.relative_to(root).as_posix() or ".", p) for p in found]


def _read_csv(path: Path) -> list[list[str]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"{path}: unreadable ({exc})") from exc


def _accuracy_section(runs, out: Path, written: list[str]) -> dict[str, RunLog]:
    logs = {name: RunLog.read(path) for name, path in runs}
    rows = []
    series = []
    for name, log in logs.items():
        for it, ca, wa, _ in log.evals:
            rows.append([name, it, _num(ca), _num(wa)])
        series.append((f"{name} char", log.eval_iterations, log.char_curve))
        series.append((f"{name} word", log.eval_iterations, [e[2] for e in log.evals]))
    _rows_csv(out / "accuracy_curve.csv", ["run", "iter", "char_acc", "word_acc"], rows)
    (out / "accuracy_curve.svg").write_text(
        svg.line_chart(series, "accuracy vs iteration", "iteration", "accuracy"), encoding="utf-8")
    written += ["accuracy_curve.csv", "accuracy_curve.svg"]
    return logs


def _best_run(logs: dict[str, RunLog]) -> str | None:
    scored = [(log.evals[-1][1], name) for name, log in logs.items() if log.evals]
    if not scored:
        return None
    return max(scored, key=lambda t: t[0])[1]  # ties: first in path order


def _learning_section(logs: dict[str, RunLog], out: Path, written: list[str]) -> None:
    rows = []
    for name, log in logs.items():
        if not log.evals:
            continue
        rec = learning_order(log.eval_iterations, log.char_curves())
        for ch in log.symbols:
            rows.append([name, ch, "" if rec.crossing[ch] is None else rec.crossing[ch], rec.rank.get(ch, "")])
    _rows_csv(out / "learning_order.csv", ["run", "char", "crossing", "rank"], rows)
    written.append("learning_order.csv")
    best = _best_run(logs)
    if best is None:
        return
    log = logs[best]
    rec = learning_order(log.eval_iterations, log.char_curves())
    order = rec.learned + [c for c in log.symbols if c not in rec.rank]
    (out / "learning_order.svg").write_text(
        svg.bar_chart(order, [rec.crossing[c] for c in order], f"learning order ({best})",
                      "character (learned first on the left)", "iteration reaching 50%"), encoding="utf-8")
    curves = log.char_curves()
    series = [(c, log.eval_iterations, curves[c]) for c in order[:10]]
    (out / "char_curves.svg").write_text(
        svg.line_chart(series, f"per-character accuracy ({best}, first ten learned)", "iteration", "accuracy"),
        encoding="utf-8")
    written += ["learning_order.svg", "char_curves.svg"]


def _confusion_section(root: Path, out: Path, written: list[str]) -> None:
    for i, path in enumerate(sorted(p for p in root.rglob("confusion.csv") if out not in p.parents)):
        rows = _read_csv(path)
        if len(rows) < 2:
            raise DataError(f"{path}: empty confusion table")
        labels = rows[0][1:]
        try:
            matrix = [[int(v) for v in r[1:]] for r in rows[1:]]
        except ValueError as exc:
            raise DataError(f"{path}: corrupt confusion table") from exc
        if len(matrix) != len(labels) or any(len(r) != len(labels) for r in matrix):
            raise DataError(f"{path}: confusion table is not square")
        stem = "confusion" if i == 0 else f"confusion_{i}"
        _rows_csv(out / f"{stem}.csv", rows[0], rows[1:])
        title = f"confusion ({path.parent.relative_to(root).as_posix() or '.'})"
        (out / f"{stem}.svg").write_text(svg.heatmap(matrix, [r[0] for r in rows[1:]], labels, title),
                                         encoding="utf-8")
        written += [f"{stem}.csv", f"{stem}.svg"]


def _lengthgen_section(root: Path, out: Path, written: list[str]) -> None:
    path = root / "length_generalisation.csv"
    if not path.exists():
        return
    rows = _read_csv(path)
    try:
        data = [(int(r[0]), float(r[1]), float(r[2])) for r in rows[1:]]
    except (ValueError, IndexError) as exc:
        raise DataError(f"{path}: corrupt table") from exc
    data.sort()
    _rows_csv(out / "length_generalisation.csv", ["length", "char_acc", "word_acc"],
              [[n, _num(c), _num(w)] for n, c, w in data])
    lengths = [d[0] for d in data]
    series = [("char", lengths, [d[1] for d in data]), ("word", lengths, [d[2] for d in data])]
    (out / "length_generalisation.svg").write_text(
        svg.line_chart(series, "accuracy vs string length", "length", "accuracy", xticks=lengths), encoding="utf-8")
    written += ["length_generalisation.csv", "length_generalisation.svg"]


def build_report(root, out=None) -> list[str]:
    """Write every table and figure the inputs support; returns the file names written."""
    root = Path(root)
    if not root.is_dir():
        raise DataError(f"{root}: not a directory")
    out = Path(out) if out is not None else root / "report"
    out.mkdir(parents=True, exist_ok=True)
    written: list[str] = []
    runs = [(n, p) for n, p in find_runs(root) if out not in p.parents and p != out]
    if runs:
        logs = _accuracy_section(runs, out, written)
        _learning_section(logs, out, written)
    _confusion_section(root, out, written)
    _lengthgen_section(root, out, written)
    if not written:
        raise DataError(f"{root}: no run logs, confusion tables or length tables found")
    return written
