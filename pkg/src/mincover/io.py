"""File formats: CSV and raw binary datasets, cover-solution files, run reports.

CSV is the primary dataset format (header ``label,f0,f1,...``, one integer
label plus decimal features per row, repr-formatted for exact 64-bit
round-trips). The binary format is little-endian: 4 magic bytes ``MCSD``,
u32 count, u32 dim, count u32 labels, then count*dim f64 features row-major.
Cover solutions and run reports are JSON with sorted keys so identical runs
produce identical bytes.
"""

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .covering import CoverSolution
from .dataset import LabeledDataset, NormSpec
from .errors import DataError, DatasetParseError

MAGIC = b"MCSD"


def dataset_to_csv(ds: LabeledDataset) -> str:
    header = "label," + ",".join(f"f{i}" for i in range(ds.dim))
    lines = [header]
    for label, row in zip(ds.labels, ds.points):
        lines.append(str(int(label)) + "," + ",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def save_dataset_csv(ds: LabeledDataset, path):
    Path(path).write_text(dataset_to_csv(ds))


def load_dataset_csv(path) -> LabeledDataset:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise DatasetParseError(path, 1, "empty file")
    header = lines[0].split(",")
    if header[0] != "label" or len(header) < 2:
        raise DatasetParseError(path, 1, "header must be 'label,f0,f1,...'")
    width = len(header)
    labels, rows = [], []
    for no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != width:
            raise DatasetParseError(path, no, f"expected {width} columns, got {len(parts)}")
        try:
            labels.append(int(parts[0]))
        except ValueError:
            raise DatasetParseError(path, no, f"label {parts[0]!r} is not an integer") from None
        try:
            rows.append([float(v) for v in parts[1:]])
        except ValueError:
            raise DatasetParseError(path, no, "feature is not a decimal number") from None
    if not rows:
        raise DatasetParseError(path, 2, "no data rows")
    try:
        return LabeledDataset(np.array(rows), np.array(labels))
    except DataError as exc:
        raise DatasetParseError(path, 2, str(exc)) from None


def save_dataset_bin(ds: LabeledDataset, path):
    n, dim = len(ds), ds.dim
    blob = bytearray(MAGIC)
    blob += struct.pack("<II", n, dim)
    blob += ds.labels.astype("<u4").tobytes()
    blob += ds.points.astype("<f8").tobytes()  # row-major
    Path(path).write_bytes(bytes(blob))


def load_dataset_bin(path) -> LabeledDataset:
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise DatasetParseError(path, 1, "bad magic bytes; not a mincover binary dataset")
    n, dim = struct.unpack_from("<II", raw, 4)
    offset = 12
    need = offset + 4 * n + 8 * n * dim
    if len(raw) != need:
        raise DatasetParseError(path, 1, f"file holds {len(raw)} bytes, expected {need}")
    labels = np.frombuffer(raw, dtype="<u4", count=n, offset=offset).astype(np.int64)
    points = np.frombuffer(raw, dtype="<f8", count=n * dim, offset=offset + 4 * n)
    return LabeledDataset(points.reshape(n, dim).copy(), labels)


def save_dataset(ds: LabeledDataset, path):
    if str(path).endswith(".bin"):
        save_dataset_bin(ds, path)
    else:
        save_dataset_csv(ds, path)


def load_dataset(path) -> LabeledDataset:
    if str(path).endswith(".bin"):
        return load_dataset_bin(path)
    return load_dataset_csv(path)


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode()


def cover_to_dict(sol: CoverSolution, norm: NormSpec) -> dict:
    doc = {
        "format": "mincover-cover-v1",
        "norm": norm.name,
        "eta": sol.eta,
        "solver": sol.solver,
        "selected": list(sol.selected),
        "weights": list(sol.weights) if sol.weights is not None else None,
    }
    if sol.per_class is not None:
        doc["per_class"] = {
            str(c): {"selected": list(sub.selected), "weights": sub.weights}
            for c, sub in sol.per_class.items()
        }
    return doc


def save_cover(sol: CoverSolution, norm: NormSpec, path):
    Path(path).write_bytes(_json_bytes(cover_to_dict(sol, norm)))


def load_cover(path):
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != "mincover-cover-v1":
        raise DataError(f"{path}: not a mincover cover file")
    per_class = None
    if "per_class" in doc:
        per_class = {
            int(c): CoverSolution(
                selected=sub["selected"], eta=doc["eta"], weights=sub.get("weights"),
                solver=doc["solver"],
            )
            for c, sub in doc["per_class"].items()
        }
    sol = CoverSolution(
        selected=doc["selected"], eta=float(doc["eta"]), weights=doc["weights"],
        solver=doc["solver"], per_class=per_class,
    )
    return sol, NormSpec.from_name(doc["norm"])


@dataclass
class RunReport:
    """Everything needed to reproduce a command: resolved config, seeds,
    version, plus its results payload and (non-reproducible) timings."""

    command: str
    config: dict
    payload: dict
    version: str
    seeds: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "payload": self.payload,
            "version": self.version,
            "seeds": self.seeds,
            "timings": self.timings,
        }

    def payload_bytes(self) -> bytes:
        """Canonical payload serialization; equal bytes mean equal results."""
        return _json_bytes(self.payload)

    def save(self, path):
        Path(path).write_bytes(_json_bytes(self.to_dict()))


def load_report(path) -> RunReport:
    doc = json.loads(Path(path).read_text())
    return RunReport(
        command=doc["command"], config=doc["config"], payload=doc["payload"],
        version=doc["version"], seeds=doc.get("seeds", {}), timings=doc.get("timings", {}),
    )
