import numpy as np
import pytest

from cropcast.catalog import (CatalogEntry, ModelCatalog, catalog_best,
                              catalog_put, load_catalog, save_catalog)
from cropcast.errors import EmptyCatalogError, ValidationError, VersionError
from cropcast.features import SupervisedSet
from cropcast.models import TrainConfig, mlp_train


def entry(version, ar=100.0, am=10.0, trained_through=0, model=None):
    return CatalogEntry(model=model, trained_through=trained_through,
                        validation_ar=ar, validation_am=am, version=version)


class TestCatalogPut:
    def test_first_insert(self):
        cat = ModelCatalog()
        catalog_put(cat, entry(1))
        assert len(cat) == 1

    def test_eviction_beyond_capacity(self):
        cat = ModelCatalog(capacity=30)
        for version in range(1, 32):
            cat.put(entry(version))
        assert len(cat) == 30
        assert cat.versions() == list(range(2, 32))
        assert 1 not in cat.versions()

    def test_duplicate_version_rejected(self):
        cat = ModelCatalog()
        cat.put(entry(3))
        with pytest.raises(VersionError):
            cat.put(entry(3))

    def test_non_monotone_version_rejected(self):
        cat = ModelCatalog()
        cat.put(entry(5))
        with pytest.raises(VersionError):
            cat.put(entry(4))

    def test_versions_strictly_increase(self):
        cat = ModelCatalog(capacity=5)
        for version in (1, 2, 7, 9):
            cat.put(entry(version))
        assert cat.versions() == sorted(cat.versions())


class TestCatalogBest:
    def test_argmin_validation_error(self):
        cat = ModelCatalog()
        cat.put(entry(1, ar=300.0))
        cat.put(entry(2, ar=250.0))
        assert catalog_best(cat, "ar").version == 2

    def test_tie_goes_to_newest(self):
        cat = ModelCatalog()
        cat.put(entry(1, ar=250.0))
        cat.put(entry(2, ar=250.0))
        assert cat.best("ar").version == 2

    def test_singleton(self):
        cat = ModelCatalog()
        cat.put(entry(4, ar=42.0))
        assert cat.best().version == 4

    def test_empty_catalog_rejected(self):
        with pytest.raises(EmptyCatalogError):
            ModelCatalog().best()
        with pytest.raises(EmptyCatalogError):
            ModelCatalog().newest()

    def test_am_metric(self):
        cat = ModelCatalog()
        cat.put(entry(1, ar=100.0, am=5.0))
        cat.put(entry(2, ar=50.0, am=9.0))
        assert cat.best("am").version == 1
        assert cat.best("ar").version == 2

    def test_unknown_metric_rejected(self):
        cat = ModelCatalog()
        cat.put(entry(1))
        with pytest.raises(ValidationError):
            cat.best("rmse")


class TestCatalogPersistence:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(3)
        data = SupervisedSet(inputs=rng.normal(size=(12, 6)),
                             targets=rng.normal(size=(12, 4)),
                             issue_indices=np.arange(12), k=3, day_width=2,
                             target_mean=10.0, target_scale=2.0)
        cat = ModelCatalog(capacity=5)
        for version in (1, 2, 3):
            model = mlp_train(data, TrainConfig(max_iter=5), seed=version,
                              trained_through=90 + version)
            cat.put(CatalogEntry(model=model, trained_through=90 + version,
                                 validation_ar=100.0 + version,
                                 validation_am=10.0 + version, version=version,
                                 trend_polarity="positive"))
        save_catalog(cat, tmp_path / "cat")
        back = load_catalog(tmp_path / "cat")
        assert back.capacity == 5
        assert back.versions() == [1, 2, 3]
        for orig, copy in zip(cat.entries, back.entries):
            assert copy.validation_ar == orig.validation_ar
            assert copy.trend_polarity == orig.trend_polarity
            assert copy.trained_through == orig.trained_through
            assert np.array_equal(copy.model.w1, orig.model.w1)
