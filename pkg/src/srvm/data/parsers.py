"""LIBSVM and delimited-text readers."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyDatasetError, ParseError
from .dataset import Dataset

DEFAULT_MISSING = ("?", "")


def parse_libsvm(text: str, n_features: int | None = None, provenance: str = "libsvm") -> Dataset:
    """Read LIBSVM sparse text (``label idx:val ...``, 1-based ascending)."""
    labels = []
    rows = []
    max_index = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            labels.append(float(tokens[0]))
        except ValueError:
            raise ParseError(f"non-numeric label {tokens[0]!r}", lineno) from None
        entries = {}
        last = 0
        for tok in tokens[1:]:
            idx_s, sep, val_s = tok.partition(":")
            if not sep:
                raise ParseError(f"expected index:value, got {tok!r}", lineno)
            try:
                idx = int(idx_s)
                val = float(val_s)
            except ValueError:
                raise ParseError(f"non-numeric token {tok!r}", lineno) from None
            if idx < 1:
                raise ParseError(f"feature index {idx} < 1", lineno)
            if idx <= last:
                raise ParseError(f"feature index {idx} does not increase", lineno)
            last = idx
            entries[idx] = val
        max_index = max(max_index, last)
        rows.append(entries)
    d = n_features if n_features is not None else max_index
    if max_index > d:
        raise ParseError(f"feature index {max_index} exceeds declared dimension {d}")
    X = np.zeros((len(rows), d))
    for i, entries in enumerate(rows):
        for idx, val in entries.items():
            X[i, idx - 1] = val
    return Dataset(X, np.array(labels), provenance=provenance)


@dataclass
class RawTable:
    """Delimited rows kept as strings so missing markers survive."""

    features: list[list[str]]
    labels: list[str]
    header: list[str] | None = None
    missing_markers: tuple[str, ...] = DEFAULT_MISSING
    provenance: str = ""
    notes: list[str] = field(default_factory=list)

    def missing_cells(self):
        """(row, feature column) positions holding a missing marker."""
        marks = set(self.missing_markers)
        out = []
        for i, (row, lab) in enumerate(zip(self.features, self.labels)):
            out += [(i, j) for j, cell in enumerate(row) if cell in marks]
            if lab in marks:
                out.append((i, len(row)))
        return out


def _is_number(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def parse_csv(
    text: str,
    label_column: int = -1,
    missing_markers=DEFAULT_MISSING,
    delimiter: str | None = ",",
    drop_columns=(),
    provenance: str = "csv",
) -> RawTable:
    """Split delimited text into string cells.

    ``delimiter=None`` splits on runs of whitespace. A first row with any
    non-numeric, non-missing feature cell is taken as a header.
    """
    if delimiter is None:
        rows = [line.split() for line in text.splitlines()]
    else:
        rows = list(csv.reader(io.StringIO(text), delimiter=delimiter))
    numbered = [(i + 1, [c.strip() for c in r]) for i, r in enumerate(rows) if any(c.strip() for c in r)]
    if not numbered:
        return RawTable([], [], provenance=provenance, missing_markers=tuple(missing_markers))
    width = len(numbered[0][1])
    for lineno, r in numbered:
        if len(r) != width:
            raise ParseError(f"expected {width} fields, found {len(r)}", lineno)
    lab = label_column % width
    drop = {c % width for c in drop_columns} | {lab}
    keep = [j for j in range(width) if j not in drop]

    header = None
    notes = []
    first = numbered[0][1]
    marks = set(missing_markers)
    if any(not _is_number(first[j]) and first[j] not in marks for j in keep):
        header = first
        numbered = numbered[1:]
        notes.append("header row skipped")
    feats = [[r[j] for j in keep] for _, r in numbered]
    labels = [r[lab] for _, r in numbered]
    if header is not None:
        header = [header[j] for j in keep]
    prov = provenance + ("; header row skipped" if header is not None else "")
    return RawTable(feats, labels, header, tuple(missing_markers), prov, notes)


def drop_missing(raw: RawTable) -> Dataset:
    """Discard rows containing a missing marker and convert the rest to floats.

    Non-numeric labels become class indices in sorted name order.
    """
    bad_rows = {i for i, _ in raw.missing_cells()}
    keep = [i for i in range(len(raw.features)) if i not in bad_rows]
    if not keep:
        raise EmptyDatasetError(f"all {len(raw.features)} rows contain missing values")
    try:
        X = np.array([[float(c) for c in raw.features[i]] for i in keep], dtype=float)
    except ValueError as exc:
        raise ParseError(f"non-numeric feature value: {exc}") from None
    labels = [raw.labels[i] for i in keep]
    class_names = None
    if all(_is_number(s) for s in labels):
        y = np.array([float(s) for s in labels])
    else:
        class_names = sorted(set(labels))
        index = {name: k for k, name in enumerate(class_names)}
        y = np.array([float(index[s]) for s in labels])
    return Dataset(
        X,
        y,
        feature_names=raw.header,
        provenance=raw.provenance,
        class_names=class_names,
        removed_rows=len(bad_rows),
    )
