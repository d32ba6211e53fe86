"""End-to-end dataset generation, train/test splitting, and persistence.

Datasets persist as a CSV body (header x1,x2,x3,label) plus a JSON metadata
sidecar named <stem>.meta.json; floats are printed at shortest round-trip
precision so a save/load cycle is lossless.
"""

from __future__ import annotations

import json
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .dense import DENSE_CAP_DEFAULT, Target, target_dense
from .errors import DataFormatError, GenerationError, IntegrityError, ResourceLimitError
from .hamiltonians import Family, ball_radius, sample_inputs
from .mpo import TruncationPolicy, target_mpo

ENGINES = ("dense", "mpo")


@dataclass
class Dataset:
    """Sampled coupling vectors with their target values and provenance."""

    inputs: np.ndarray  # (M, 3)
    labels: np.ndarray  # (M,)
    meta: dict

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=float).reshape(-1, 3)
        self.labels = np.asarray(self.labels, dtype=float).reshape(-1)
        if len(self.inputs) != len(self.labels):
            raise ValueError("inputs and labels must have equal length")

    def __len__(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie strictly between 0 and 1")


def _label_one(args) -> float:
    family, target, n, x, engine, chi, dt, dense_cap, time_split = args
    if engine == "dense":
        return target_dense(target, family, x, n, cap=dense_cap)
    policy = TruncationPolicy(chi_max=chi)
    value, _ = target_mpo(
        target, family, x, n, policy, dt=dt, time_split=time_split
    )
    return value


def _label_one_safe(args):
    try:
        return _label_one(args), None
    except Exception as exc:  # noqa: BLE001 - recorded and re-raised by caller
        return np.nan, exc


def generate(
    family: Family,
    target: Target,
    n: int,
    count: int,
    engine: str = "dense",
    seed: int = 0,
    chi: int | None = None,
    dt: float = 0.05,
    dense_cap: int = DENSE_CAP_DEFAULT,
    workers: int = 1,
    time_split: bool = True,
) -> Dataset:
    """Sample `count` inputs and label each with the chosen engine.

    The result is a pure function of the arguments: inputs come from
    per-sample seeded substreams and labels from deterministic simulations,
    so the same call reproduces the same dataset bit for bit.  Per-sample
    failures are collected and re-raised at the end with their indices.
    """
    family = Family(family)
    target = Target(target)
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}")
    if engine == "dense" and n > dense_cap:
        raise ResourceLimitError(
            f"dense engine capped at {dense_cap} sites; use engine='mpo' for n={n}"
        )
    if engine == "mpo" and chi is None:
        raise ValueError("the mpo engine requires a bond dimension chi")

    inputs = sample_inputs(family, n, count, seed)
    jobs = [
        (family, target, n, x, engine, chi, dt, dense_cap, time_split)
        for x in inputs
    ]
    labels = np.empty(count, dtype=float)
    failures = []
    if workers > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_label_one_safe, jobs))
    else:
        outcomes = map(_label_one_safe, jobs)
    for i, (value, error) in enumerate(outcomes):
        labels[i] = value
        if error is not None:
            failures.append((i, error))
    if failures:
        raise GenerationError(failures)

    meta = {
        "family": family.value,
        "n": n,
        "target": target.value,
        "engine": engine,
        "chi": chi,
        "dt": dt,
        "seed": seed,
        "radius": ball_radius(family, n),
        "generator_version": __version__,
    }
    return Dataset(inputs=inputs, labels=labels, meta=meta)


def split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Seeded shuffle, then round(train_fraction * M) rows train, rest test."""
    m = len(ds)
    if m < 2:
        raise ValueError("need at least 2 rows to split")
    n_train = int(round(spec.train_fraction * m))
    if n_train == 0 or n_train == m:
        raise ValueError(
            f"split of {m} rows at fraction {spec.train_fraction} leaves an "
            "empty side"
        )
    order = np.random.default_rng(spec.seed).permutation(m)
    tr, te = order[:n_train], order[n_train:]

    def part(idx, role):
        meta = dict(ds.meta)
        meta["split"] = {
            "role": role,
            "seed": spec.seed,
            "train_fraction": spec.train_fraction,
            "source_rows": m,
        }
        return Dataset(inputs=ds.inputs[idx], labels=ds.labels[idx], meta=meta)

    return part(tr, "train"), part(te, "test")


def _sidecar_path(path: Path) -> Path:
    return path.with_suffix(".meta.json")


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_dataset(ds: Dataset, path) -> None:
    path = Path(path)
    lines = ["x1,x2,x3,label"]
    for row, label in zip(ds.inputs, ds.labels):
        cells = [float(row[0]), float(row[1]), float(row[2]), float(label)]
        lines.append(",".join(repr(cell) for cell in cells))
    _atomic_write(path, "\n".join(lines) + "\n")
    meta = {"rows": len(ds), **ds.meta}
    _atomic_write(_sidecar_path(path), json.dumps(meta, indent=2, sort_keys=True) + "\n")


def load_dataset(path) -> Dataset:
    path = Path(path)
    sidecar = _sidecar_path(path)
    if not sidecar.exists():
        raise IntegrityError(f"metadata sidecar {sidecar} is missing")
    meta = json.loads(sidecar.read_text(encoding="utf-8"))

    inputs, labels = [], []
    with path.open(encoding="utf-8") as handle:
        header = handle.readline().rstrip("\n")
        if header != "x1,x2,x3,label":
            raise DataFormatError(f"{path}: line 1: expected header x1,x2,x3,label")
        for lineno, line in enumerate(handle, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            cells = line.split(",")
            if len(cells) != 4:
                raise DataFormatError(
                    f"{path}: line {lineno}: expected 4 fields, got {len(cells)}"
                )
            try:
                values = [float(cell) for cell in cells]
            except ValueError as exc:
                raise DataFormatError(f"{path}: line {lineno}: {exc}") from exc
            inputs.append(values[:3])
            labels.append(values[3])

    expected = meta.pop("rows", None)
    if expected is not None and expected != len(labels):
        raise IntegrityError(
            f"{path}: body has {len(labels)} rows but metadata says {expected}"
        )
    inputs_arr = np.asarray(inputs, dtype=float).reshape(-1, 3)
    return Dataset(inputs=inputs_arr, labels=np.asarray(labels), meta=meta)
