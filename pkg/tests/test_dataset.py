import numpy as np
import pytest

from lanekeep.dataset import (
    Dataset,
    PruneConfig,
    Sample,
    histogram,
    load_manifest,
    prune,
    save_manifest,
    split,
)
from lanekeep.errors import DatasetError

from conftest import make_synthetic_dataset


def dataset_from_swas(swas, expeditions):
    samples = tuple(
        Sample(frame_path=f"/nonexistent/{i}.png", swa=float(s), speed=16.0,
               timestamp=i * 0.05, expedition_id=e)
        for i, (s, e) in enumerate(zip(swas, expeditions))
    )
    return Dataset(samples=samples)


class TestHistogram:
    def test_zero_lands_in_center_bin(self):
        counts = histogram([0.0], bins=18000, value_range=9.0)
        assert counts[9000] == 1
        assert counts.sum() == 1

    def test_empty(self):
        assert histogram([], bins=100, value_range=9.0).sum() == 0

    def test_conservation(self, rng):
        values = rng.uniform(-9, 9, 5000)
        assert histogram(values, 18000, 9.0).sum() == 5000

    def test_exact_max_goes_to_last_bin(self):
        counts = histogram([9.0, -9.0], bins=100, value_range=9.0)
        assert counts[-1] == 1 and counts[0] == 1

    def test_out_of_range_rejected(self):
        with pytest.raises(DatasetError):
            histogram([9.01], bins=100, value_range=9.0)


class TestPrune:
    CFG = PruneConfig(bins=100, swa_range=9.0, cap=10, seed=0)

    def test_identity_below_cap(self):
        d = dataset_from_swas(np.linspace(-8, 8, 50), ["a"] * 50)
        out = prune(d, self.CFG)
        assert out.samples == d.samples

    def test_exact_removal_count(self):
        d = dataset_from_swas(np.zeros(12000), ["a"] * 12000)
        out = prune(d, PruneConfig(bins=18000, cap=10000, seed=1))
        assert len(out) == 10000

    def test_largest_expedition_pruned_more(self):
        swas = np.zeros(12000)
        exps = ["A"] * 8000 + ["B"] * 4000
        out = prune(dataset_from_swas(swas, exps), PruneConfig(bins=18000, cap=10000, seed=2))
        a = sum(1 for s in out.samples if s.expedition_id == "A")
        b = sum(1 for s in out.samples if s.expedition_id == "B")
        assert a + b == 10000
        # removal always hits the currently largest expedition: A loses all 2000
        assert a == 6000 and b == 4000

    def test_matches_rule_simulation_oracle(self):
        # Independent simulation of "remove one random sample from the largest
        # expedition in the bin" checking only per-expedition counts.
        rng = np.random.default_rng(7)
        swas = np.concatenate([np.zeros(900), np.full(300, 5.0)])
        exps = (["A"] * 500 + ["B"] * 300 + ["C"] * 100) + (["A"] * 100 + ["B"] * 200)
        cap = 250
        out = prune(dataset_from_swas(swas, exps), PruneConfig(bins=10, swa_range=9.0, cap=cap, seed=3))

        def simulate(groups, cap):
            counts = dict(groups)
            total = sum(counts.values())
            for _ in range(total - cap):
                exp = min(counts.items(), key=lambda kv: (-kv[1], kv[0]))[0]
                counts[exp] -= 1
                if not counts[exp]:
                    del counts[exp]
            return counts

        want_bin0 = simulate({"A": 500, "B": 300, "C": 100}, cap)
        want_bin1 = simulate({"A": 100, "B": 200}, cap)
        got0 = {e: sum(1 for s in out.samples if s.expedition_id == e and s.swa == 0.0) for e in "ABC"}
        got1 = {e: sum(1 for s in out.samples if s.expedition_id == e and s.swa == 5.0) for e in "AB"}
        assert got0 == {**{"A": 0, "B": 0, "C": 0}, **want_bin0}
        assert got1 == want_bin1

    def test_deterministic_per_seed(self):
        rng = np.random.default_rng(5)
        swas = rng.normal(0, 0.05, 3000)
        d = dataset_from_swas(swas, [f"e{i % 5}" for i in range(3000)])
        cfg = PruneConfig(bins=100, cap=50, seed=9)
        a = prune(d, cfg)
        b = prune(d, cfg)
        assert a.samples == b.samples
        c = prune(d, PruneConfig(bins=100, cap=50, seed=10))
        assert c.samples != a.samples

    def test_infinite_cap_identity(self):
        d = dataset_from_swas(np.zeros(500), ["a"] * 500)
        out = prune(d, PruneConfig(bins=10, cap=10**9, seed=0))
        assert out.samples == d.samples

    def test_never_increases_bins_and_respects_cap(self, rng):
        swas = np.clip(rng.normal(0, 1.0, 4000), -9, 9)
        d = dataset_from_swas(swas, [f"e{i % 7}" for i in range(4000)])
        cfg = PruneConfig(bins=50, cap=100, seed=4)
        before = histogram([s.swa for s in d.samples], 50, 9.0)
        after = histogram([s.swa for s in prune(d, cfg).samples], 50, 9.0)
        assert np.all(after <= before)
        assert after.max() <= 100


class TestSplit:
    def test_eight_two(self):
        d = dataset_from_swas(np.zeros(100), [f"e{i % 10}" for i in range(100)])
        train, val = split(d, 0.8, seed=0)
        assert len(train.expeditions()) == 8
        assert len(val.expeditions()) == 2

    def test_deterministic(self):
        d = dataset_from_swas(np.zeros(60), [f"e{i % 6}" for i in range(60)])
        a = split(d, 0.5, seed=3)
        b = split(d, 0.5, seed=3)
        assert a[0].samples == b[0].samples

    def test_partition(self):
        d = dataset_from_swas(np.zeros(60), [f"e{i % 6}" for i in range(60)])
        train, val = split(d, 0.5, seed=1)
        train_ids = {id(s) for s in train.samples}
        val_ids = {id(s) for s in val.samples}
        assert not (train_ids & val_ids)
        assert len(train) + len(val) == 60
        assert not (set(train.expeditions()) & set(val.expeditions()))

    def test_too_few_expeditions(self):
        d = dataset_from_swas(np.zeros(10), ["only"] * 10)
        with pytest.raises(DatasetError):
            split(d, 0.5)


class TestManifest:
    def test_round_trip(self, tmp_path):
        d = make_synthetic_dataset(tmp_path, [0.1, -0.5, 2.0], ["a", "a", "b"])
        loaded = load_manifest(tmp_path / "manifest.csv")
        assert len(loaded) == 3
        for orig, got in zip(d.samples, loaded.samples):
            assert got.swa == pytest.approx(orig.swa, rel=1e-12)
            assert got.expedition_id == orig.expedition_id
            assert got.frame_path.is_file()

    def test_missing_frame_rejected(self, tmp_path):
        make_synthetic_dataset(tmp_path, [0.1], ["a"])
        next((tmp_path / "frames").rglob("*.png")).unlink()
        with pytest.raises(DatasetError, match="not found"):
            load_manifest(tmp_path / "manifest.csv")

    def test_bad_header_rejected(self, tmp_path):
        p = tmp_path / "manifest.csv"
        p.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(DatasetError, match="header"):
            load_manifest(p)

    def test_swa_bound_enforced(self):
        with pytest.raises(DatasetError):
            Sample(frame_path="x.png", swa=9.5, speed=1.0, timestamp=0.0, expedition_id="e")
