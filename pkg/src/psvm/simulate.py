"""Seeded simulation models and the vowel-data loader.

All generators draw from ``numpy.random.Generator(PCG64)``.  A campaign seed
and a replication index map to an independent substream through
``SeedSequence(seed, spawn_key=(rep,))``, so replication ``r`` is the same
whatever order or process it runs in.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import Dataset
from .exceptions import BadSpec, FileFormat, UnknownLabel

__all__ = ["ModelSpec", "Truth", "generate", "rng_for", "RNG_NAME", "regression_mean", "load_vowel_csv", "VOWEL_WORDS"]

RNG_NAME = "numpy.PCG64/SeedSequence"
MODELS = ("I", "II", "III", "IV", "V", "VARIANCE")
_MIN_P = {"I": 2, "II": 2, "III": 2, "IV": 1, "V": 1, "VARIANCE": 3}


@dataclass(frozen=True)
class ModelSpec:
    id: str
    p: int
    n: int
    sigma: float = 0.2
    var0: float = 1.0
    var1: float = 10.0

    def __post_init__(self):
        mid = str(self.id).upper()
        if mid not in MODELS:
            raise BadSpec(f"unknown model {self.id!r}; choose from {MODELS}")
        object.__setattr__(self, "id", mid)
        if self.p < _MIN_P[mid]:
            raise BadSpec(f"model {mid} needs p >= {_MIN_P[mid]}")
        if self.n < 2:
            raise BadSpec("n must be at least 2")
        if mid == "VARIANCE" and self.n % 2:
            raise BadSpec("the variance model needs an even n")
        if self.sigma < 0:
            raise BadSpec("sigma must be nonnegative")


@dataclass(frozen=True)
class Truth:
    """What a replication should recover.

    ``basis`` spans the central subspace; ``nonlinear`` holds the true
    nonlinear sufficient predictor at the sample points (models II, III).
    """

    basis: np.ndarray
    d: int
    nonlinear: np.ndarray | None = None


def rng_for(seed: int, rep: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(rep,))))


def _rlogr(r2: np.ndarray) -> np.ndarray:
    # r log r with r = sqrt(r2); limit 0 at the origin
    out = np.zeros_like(r2)
    pos = r2 > 0
    r = np.sqrt(r2[pos])
    out[pos] = r * np.log(r)
    return out


def regression_mean(model: str, x: np.ndarray) -> np.ndarray:
    """Noiseless response for models I to V."""
    x = np.atleast_2d(x)
    x1 = x[:, 0]
    model = model.upper()
    if model == "I":
        return x1 / (0.5 + (x[:, 1] + 1) ** 2)
    if model == "II":
        return x1 * (x1 + x[:, 1] + 1)
    if model == "III":
        return _rlogr(x1**2 + x[:, 1] ** 2)
    if model == "IV":
        return x1 / (0.5 + (x1 + 1) ** 2)
    if model == "V":
        return x1 * (2 * x1 + 1)
    raise BadSpec(f"model {model!r} has no regression mean")


def _axes(p: int, k: int) -> np.ndarray:
    return np.eye(p)[:, :k]


def generate(spec: ModelSpec, seed: int | np.random.Generator, rep: int = 0) -> tuple[Dataset, Truth]:
    """Draw one sample from ``spec``; pure in ``(spec, seed, rep)``."""
    rng = seed if isinstance(seed, np.random.Generator) else rng_for(seed, rep)
    n, p = spec.n, spec.p
    if spec.id == "VARIANCE":
        y = np.repeat([0.0, 1.0], n // 2)
        rng.shuffle(y)
        x = rng.standard_normal((n, p))
        scale = np.where(y > 0, np.sqrt(spec.var1), np.sqrt(spec.var0))
        x[:, :2] *= scale[:, None]
        return Dataset(x, y, categorical=True), Truth(_axes(p, 2), 2)
    x = rng.standard_normal((n, p))
    eps = rng.standard_normal(n)
    y = regression_mean(spec.id, x) + spec.sigma * eps
    if spec.id in ("IV", "V"):
        truth = Truth(_axes(p, 1), 1)
    elif spec.id == "III":
        truth = Truth(_axes(p, 2), 2, nonlinear=np.sqrt(x[:, 0] ** 2 + x[:, 1] ** 2))
    elif spec.id == "II":
        truth = Truth(_axes(p, 2), 2, nonlinear=regression_mean("II", x))
    else:
        truth = Truth(_axes(p, 2), 2)
    return Dataset(x, y), truth


# UCI vowel layout: Train-or-Test, Speaker-Number, Sex, Feature-0..Feature-9, Class
VOWEL_WORDS = {
    "heed": 0, "hid": 1, "head": 2, "had": 3, "hard": 4, "hud": 5,
    "hod": 6, "hoard": 7, "hood": 8, "who'd": 9, "heard": 10,
}
_N_FEATURES = 10


def _class_code(label) -> int:
    if isinstance(label, (int, np.integer)):
        return int(label)
    s = str(label).strip()
    if s.lstrip("-").isdigit():
        return int(s)
    if s.lower() in VOWEL_WORDS:
        return VOWEL_WORDS[s.lower()]
    raise UnknownLabel(f"unknown vowel label {label!r}")


def load_vowel_csv(
    path: str | Path,
    subset=("heed", "head", "hud"),
    split_column: str | int = 0,
) -> tuple[Dataset, Dataset]:
    """Load the UCI vowel table and split it into training and test samples.

    Expected columns: train/test flag (0 = train, 1 = test), speaker, sex,
    ten numeric features, class code 0..10.  A header row is optional.
    ``subset`` names the vowels (words such as ``"heed"`` or class codes)
    to keep; ``y`` is the class code, flagged categorical.
    """
    codes = [_class_code(v) for v in subset]
    if not codes:
        raise UnknownLabel("empty vowel subset")
    for c in codes:
        if not 0 <= c <= 10:
            raise UnknownLabel(f"class code {c} outside 0..10")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise FileFormat("empty vowel file")
    header = None
    try:
        float(rows[0][0])
    except ValueError:
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
    if isinstance(split_column, str):
        if header is None or split_column not in header:
            raise FileFormat(f"split column {split_column!r} not found")
        split_idx = header.index(split_column)
    else:
        split_idx = int(split_column)
    width = 3 + _N_FEATURES + 1
    train_x, train_y, test_x, test_y = [], [], [], []
    for k, row in enumerate(rows):
        if len(row) != width:
            raise FileFormat(f"row {k} has {len(row)} columns, expected {width}")
        try:
            vals = [float(c) for c in row]
        except ValueError as exc:
            raise FileFormat(f"row {k}: {exc}") from None
        cls = int(vals[-1])
        if cls not in codes:
            continue
        feats = vals[3 : 3 + _N_FEATURES]
        if vals[split_idx] == 0:
            train_x.append(feats)
            train_y.append(cls)
        elif vals[split_idx] == 1:
            test_x.append(feats)
            test_y.append(cls)
        else:
            raise FileFormat(f"row {k}: split flag must be 0 or 1")
    if not train_x or not test_x:
        raise UnknownLabel("subset selects no rows in the training or the test part")
    return (
        Dataset(np.array(train_x), np.array(train_y), categorical=True),
        Dataset(np.array(test_x), np.array(test_y), categorical=True),
    )
