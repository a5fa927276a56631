"""Bounded, versioned store of trained models with validation metrics.

The catalog keeps only recently trained models: inserts must advance the
version counter and the oldest entry is evicted once capacity is reached.
Retrieval by accuracy is an argmin over the stored validation error
(lower error = higher accuracy), ties broken by the newest version.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyCatalogError, ParseError, ValidationError, VersionError
from .models.persist import load_extras, load_model, save_model

DEFAULT_CAPACITY = 30
METRICS = ("ar", "am")
POLARITY_NONE = "none"
INDEX_NAME = "index.txt"


@dataclass(frozen=True)
class CatalogEntry:
    """One versioned model plus the attributes selection strategies read."""

    model: object
    trained_through: int
    validation_ar: float
    validation_am: float
    version: int
    trend_polarity: str = POLARITY_NONE

    def __post_init__(self):
        if self.trend_polarity not in ("positive", "negative", POLARITY_NONE):
            raise ValidationError(f"bad trend polarity {self.trend_polarity!r}")

    def metric(self, name: str) -> float:
        if name not in METRICS:
            raise ValidationError(f"metric must be one of {METRICS}, got {name!r}")
        return self.validation_ar if name == "ar" else self.validation_am


@dataclass
class ModelCatalog:
    capacity: int = DEFAULT_CAPACITY
    entries: list = field(default_factory=list)

    def __post_init__(self):
        if self.capacity < 1:
            raise ValidationError("capacity must be >= 1")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def next_version(self) -> int:
        return self.entries[-1].version + 1 if self.entries else 1

    def put(self, entry: CatalogEntry) -> None:
        """Append an entry; evicts the oldest version beyond capacity."""
        if self.entries and entry.version <= self.entries[-1].version:
            raise VersionError(
                f"version {entry.version} does not exceed {self.entries[-1].version}")
        self.entries.append(entry)
        while len(self.entries) > self.capacity:
            self.entries.pop(0)

    def newest(self) -> CatalogEntry:
        if not self.entries:
            raise EmptyCatalogError("catalog is empty")
        return self.entries[-1]

    def best(self, metric: str = "ar") -> CatalogEntry:
        """Entry with the lowest validation error; ties go to the newest."""
        if not self.entries:
            raise EmptyCatalogError("catalog is empty")
        return min(self.entries, key=lambda e: (e.metric(metric), -e.version))

    def versions(self) -> list:
        return [e.version for e in self.entries]


def catalog_put(catalog: ModelCatalog, entry: CatalogEntry) -> ModelCatalog:
    catalog.put(entry)
    return catalog


def catalog_best(catalog: ModelCatalog, metric: str = "ar") -> CatalogEntry:
    return catalog.best(metric)


def save_catalog(catalog: ModelCatalog, directory) -> None:
    """Persist as one subdirectory per entry plus a version index file."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lines = [str(catalog.capacity)]
    for entry in catalog.entries:
        name = f"entry_{entry.version:06d}"
        save_model(entry.model, directory / name, extras={
            "version": entry.version,
            "entry_trained_through": entry.trained_through,
            "validation_ar": float(entry.validation_ar).hex(),
            "validation_am": float(entry.validation_am).hex(),
            "trend_polarity": entry.trend_polarity,
        })
        lines.append(name)
    (directory / INDEX_NAME).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_catalog(directory) -> ModelCatalog:
    directory = Path(directory)
    lines = (directory / INDEX_NAME).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ParseError("catalog index is empty")
    catalog = ModelCatalog(capacity=int(lines[0]))
    for name in lines[1:]:
        if not name.strip():
            continue
        extras = load_extras(directory / name)
        catalog.put(CatalogEntry(
            model=load_model(directory / name),
            trained_through=int(extras["entry_trained_through"]),
            validation_ar=float.fromhex(extras["validation_ar"]),
            validation_am=float.fromhex(extras["validation_am"]),
            version=int(extras["version"]),
            trend_polarity=extras["trend_polarity"]))
    return catalog
