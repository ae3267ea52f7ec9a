"""Reading news-propagation datasets and generating synthetic ones.

On-disk layout (canonical)::

    <dir>/labels.txt          one ``<label>:<news_id>`` per line
    <dir>/news/<news_id>.txt  one user id per line, in retweet order

The raw Twitter15/16 release (``label.txt`` + ``tree/<id>.txt`` holding
``[uid, tweet, t]->[uid, tweet, t]`` trace lines) is read through the
``tree_trace`` adapter.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

LABEL_SIGNS = {"true": 1, "non-rumor": 1, "false": -1}
SKIPPED_LABELS = {"unverified"}
FORMATS = ("canonical", "tree_trace")

LABEL_FILES = ("labels.txt", "label.txt")
NEWS_DIRS = ("news", "tree")


class ParseError(ValueError):
    """A dataset file does not follow the expected grammar."""


class DatasetError(RuntimeError):
    """A dataset directory cannot be turned into a usable Dataset."""


@dataclass(frozen=True)
class NewsRecord:
    news_id: str
    label: int
    spreaders: tuple[str, ...]
    parent_of: dict[str, str] | None = None

    def __post_init__(self):
        if self.label not in (-1, 1):
            raise ValueError(f"label must be -1 or +1, got {self.label!r}")
        if not self.spreaders:
            raise ValueError(f"news {self.news_id} has no spreaders")
        if self.parent_of is not None:
            known = set(self.spreaders)
            for child, parent in self.parent_of.items():
                if child not in known or parent not in known:
                    raise ValueError(
                        f"news {self.news_id}: parent link {parent}->{child} "
                        "refers to a user outside the spreader list"
                    )


@dataclass
class Dataset:
    records: list[NewsRecord]
    name: str = "dataset"
    warnings: list[str] = field(default_factory=list, compare=False)

    def __post_init__(self):
        seen = set()
        for rec in self.records:
            if rec.news_id in seen:
                raise ValueError(f"duplicate news id {rec.news_id}")
            seen.add(rec.news_id)

    def __len__(self):
        return len(self.records)

    def summary(self) -> dict:
        users = set()
        for rec in self.records:
            users.update(rec.spreaders)
        n_fake = sum(1 for r in self.records if r.label < 0)
        return {
            "name": self.name,
            "n_news": len(self.records),
            "n_users": len(users),
            "n_fake": n_fake,
            "n_real": len(self.records) - n_fake,
        }


@dataclass(frozen=True)
class LabelEntries:
    entries: list[tuple[str, int]]
    skipped: int = 0
    non_rumor: int = 0


@dataclass(frozen=True)
class SynthParams:
    n_users: int = 2000
    n_news: int = 400
    spreaders_per_news: tuple[int, int] = (5, 30)
    homophily: float = 0.9
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.spreaders_per_news
        if self.n_users < 1 or self.n_news < 1 or lo < 1 or hi < lo:
            raise ValueError(f"invalid synthetic counts: {self}")
        if not 0.0 <= self.homophily <= 1.0:
            raise ValueError(f"homophily must lie in [0, 1], got {self.homophily}")


def parse_label_file(text: str) -> LabelEntries:
    """Parse ``label:news_id`` lines.

    ``true`` and ``non-rumor`` map to +1, ``false`` to -1; ``unverified``
    lines are counted in ``skipped`` and dropped.
    """
    entries = []
    seen = set()
    skipped = non_rumor = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        label, sep, news_id = line.partition(":")
        label = label.strip().lower()
        news_id = news_id.strip()
        if not sep or not news_id or (label not in LABEL_SIGNS and label not in SKIPPED_LABELS):
            raise ParseError(f"line {lineno}: expected '<label>:<news_id>', got {raw!r}")
        if news_id in seen:
            raise ParseError(f"line {lineno}: duplicate news id {news_id}")
        seen.add(news_id)
        if label in SKIPPED_LABELS:
            skipped += 1
            continue
        if label == "non-rumor":
            non_rumor += 1
        entries.append((news_id, LABEL_SIGNS[label]))
    return LabelEntries(entries, skipped, non_rumor)


_NODE = r"\[\s*'([^']*)'\s*,\s*'[^']*'\s*,\s*'[^']*'\s*\]"
_TRACE_LINE = re.compile(rf"^{_NODE}\s*->\s*{_NODE}$")
_BARE_LINE = re.compile(r"^([^\s\[\]>-][^\s>]*)\s*->\s*([^\s\[\]>-][^\s>]*)$")


def _parse_trace_line(line: str) -> tuple[str, str]:
    m = _TRACE_LINE.match(line) or _BARE_LINE.match(line)
    if m is None:
        raise ParseError(line)
    return m.group(1).strip(), m.group(2).strip()


def parse_news_file(news_id: str, text: str, label: int, format: str = "canonical") -> NewsRecord:
    """Build a NewsRecord from one news file.

    Repeated users collapse onto their first occurrence. For ``tree_trace``
    the first recorded parent of each user wins and ``ROOT`` is dropped.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown news format {format!r}")
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError(f"news {news_id}: empty file")

    order: dict[str, None] = {}
    if format == "canonical":
        for user in lines:
            order.setdefault(user, None)
        return NewsRecord(news_id, label, tuple(order))

    parent_of: dict[str, str] = {}
    bad = []
    for lineno, line in enumerate(lines, start=1):
        try:
            parent, child = _parse_trace_line(line)
        except ParseError:
            bad.append(f"{lineno}: {line}")
            continue
        if parent != "ROOT":
            order.setdefault(parent, None)
        order.setdefault(child, None)
        if parent not in ("ROOT", child) and child not in parent_of:
            parent_of[child] = parent
    if bad:
        raise ParseError(f"news {news_id}: unparseable trace lines -> " + "; ".join(bad[:5]))
    if not order:
        raise ParseError(f"news {news_id}: trace names no users")
    return NewsRecord(news_id, label, tuple(order), parent_of)


def _find(root: Path, names, kind) -> Path | None:
    for name in names:
        p = root / name
        if (p.is_dir() if kind == "dir" else p.is_file()):
            return p
    return None


def load_dataset(path, format: str = "canonical", name: str | None = None) -> Dataset:
    root = Path(path)
    label_path = _find(root, LABEL_FILES, "file")
    if label_path is None:
        raise DatasetError(f"no label file ({' or '.join(LABEL_FILES)}) in {root}")
    labels = parse_label_file(label_path.read_text(encoding="utf-8"))
    if labels.skipped or labels.non_rumor:
        logger.info("%s: %d unverified skipped, %d non-rumor mapped to +1",
                    root, labels.skipped, labels.non_rumor)
    news_dir = _find(root, NEWS_DIRS, "dir")
    if news_dir is None:
        raise DatasetError(f"no news directory ({' or '.join(NEWS_DIRS)}) in {root}")

    records, warnings = [], []
    for news_id, sign in labels.entries:
        f = news_dir / f"{news_id}.txt"
        if not f.is_file():
            msg = f"news {news_id} is labelled but has no file; skipped"
            logger.warning(msg)
            warnings.append(msg)
            continue
        records.append(parse_news_file(news_id, f.read_text(encoding="utf-8"), sign, format))
    if not records:
        raise DatasetError(f"{root}: no labelled news could be joined to a news file")
    return Dataset(records, name or root.name, warnings)


def write_dataset(ds: Dataset, path) -> Path:
    """Write ``ds`` in the canonical layout (parent links are not kept)."""
    root = Path(path)
    news_dir = root / "news"
    news_dir.mkdir(parents=True, exist_ok=True)
    label_lines = []
    for rec in ds.records:
        label_lines.append(f"{'true' if rec.label > 0 else 'false'}:{rec.news_id}\n")
        with open(news_dir / f"{rec.news_id}.txt", "w", encoding="utf-8", newline="\n") as fh:
            fh.write("".join(f"{u}\n" for u in rec.spreaders))
    with open(root / "labels.txt", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("".join(label_lines))
    return root


def generate_synthetic(params: SynthParams) -> Dataset:
    """Sample a dataset whose users lean towards one news sign.

    Every user draws a latent propensity ``p ~ U(0, 1)``; the side of 0.5 it
    falls on is the user's preferred sign. A user's weight for joining a
    news item of sign ``s`` is ``homophily * [s is preferred] +
    (1 - homophily) / 2``, so ``homophily=1`` gives single-signed users and
    ``homophily=0`` makes sign and spreaders independent.
    """
    rng = np.random.default_rng(params.seed)
    n, h = params.n_users, params.homophily
    width = len(str(max(n, params.n_news) - 1))
    users = [f"u{i:0{width}d}" for i in range(n)]

    latent = rng.random(n)
    prefers_real = latent >= 0.5
    w_real = np.where(prefers_real, h, 0.0) + (1.0 - h) / 2.0
    w_fake = np.where(prefers_real, 0.0, h) + (1.0 - h) / 2.0

    lo, hi = params.spreaders_per_news
    records = []
    for k in range(params.n_news):
        sign = 1 if rng.random() < 0.5 else -1
        weights = w_real if sign > 0 else w_fake
        eligible = int(np.count_nonzero(weights))
        size = min(int(rng.integers(lo, hi + 1)), eligible)
        picked = rng.choice(n, size=size, replace=False, p=weights / weights.sum())
        records.append(NewsRecord(f"n{k:0{width}d}", sign, tuple(users[i] for i in picked)))
    return Dataset(records, f"synthetic-h{h:g}-s{params.seed}")
