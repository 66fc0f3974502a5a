import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from attrank.errors import DomainError, InsufficientDataError, ShapeError
from attrank.features import (
    BowHistogram,
    DescriptorSet,
    GrayImage,
    Vocabulary,
    build_vocabulary,
    dense_descriptors,
    quantize,
)


def descriptor_set_from(vectors):
    vectors = np.asarray(vectors, dtype=np.float64)
    n = vectors.shape[0]
    return DescriptorSet(vectors, np.zeros(n), np.zeros(n), np.ones(n))


def unit(vec):
    v = np.zeros(128)
    v[: len(vec)] = vec
    return v / np.linalg.norm(v)


class TestGrayImage:
    def test_rejects_out_of_range(self):
        with pytest.raises(DomainError):
            GrayImage(np.array([[0.0, 1.5]]))

    def test_pgm_round_trip(self, tmp_path):
        px = np.arange(12, dtype=np.uint8).reshape(3, 4) * 20
        raw = b"P5\n# a comment\n4 3\n255\n" + px.tobytes()
        path = tmp_path / "img.pgm"
        path.write_bytes(raw)
        img = GrayImage.from_pgm(path)
        assert img.width == 4 and img.height == 3
        np.testing.assert_allclose(img.pixels, px / 255.0)

    def test_pgm_rejects_16bit(self):
        with pytest.raises(DomainError):
            GrayImage.from_pgm_bytes(b"P5\n2 2\n65535\n" + b"\x00" * 8)

    def test_pgm_rejects_truncated(self):
        with pytest.raises(DomainError):
            GrayImage.from_pgm_bytes(b"P5\n4 4\n255\n\x00\x00")


class TestDenseDescriptors:
    def test_constant_image_all_zero(self):
        img = GrayImage(np.full((40, 40), 0.5))
        dset = dense_descriptors(img, bin_sizes=(4, 6, 8), step=4)
        assert len(dset) > 0
        assert np.all(dset.vectors == 0.0)

    def test_too_small_image_names_scale(self):
        img = GrayImage(np.zeros((20, 20)))
        with pytest.raises(DomainError, match="bin size 8"):
            dense_descriptors(img, bin_sizes=(4, 8), step=4)

    def test_grid_lower_bound_one_descriptor_per_scale(self):
        # Width is 16x the bin size and the step exceeds the patch span,
        # so each scale contributes exactly one grid column.
        b = 4
        img = GrayImage(np.tile(np.linspace(0, 1, 16 * b), (16 * b, 1)))
        dset = dense_descriptors(img, bin_sizes=(b,), step=16 * b)
        assert len(dset) >= 1
        assert np.all(dset.scale == b)

    def test_vertical_edge_mass_in_horizontal_bins(self):
        img_arr = np.zeros((32, 32))
        img_arr[:, 16:] = 1.0
        dset = dense_descriptors(GrayImage(img_arr), bin_sizes=(4,), step=4)
        straddling = [
            vec
            for vec, x in zip(dset.vectors, dset.x)
            if x - 8 <= 16 <= x + 8 and np.linalg.norm(vec) > 0
        ]
        assert straddling
        for vec in straddling:
            by_orientation = vec.reshape(16, 8).sum(axis=0)
            mass_elsewhere = by_orientation[[1, 2, 3, 5, 6, 7]].sum()
            assert mass_elsewhere == pytest.approx(0.0, abs=1e-12)

    def test_descriptors_zero_or_unit_norm(self):
        rng = np.random.default_rng(0)
        img = GrayImage(rng.random((48, 36)))
        dset = dense_descriptors(img)
        norms = np.linalg.norm(dset.vectors, axis=1)
        assert np.all((norms == 0.0) | (np.abs(norms - 1.0) < 1e-9))
        assert np.all(dset.vectors >= 0.0)

    def test_deterministic(self):
        rng = np.random.default_rng(1)
        arr = rng.random((40, 40))
        a = dense_descriptors(GrayImage(arr))
        b = dense_descriptors(GrayImage(arr))
        np.testing.assert_array_equal(a.vectors, b.vectors)


class TestBuildVocabulary:
    def test_k1_center_is_mean_of_nonzero(self):
        vecs = np.stack([unit([1, 2]), unit([2, 1]), np.zeros(128)])
        vocab = build_vocabulary([descriptor_set_from(vecs)], k=1, seed=0)
        np.testing.assert_allclose(vocab.centers[0], vecs[:2].mean(axis=0), atol=1e-12)

    def test_two_separated_clusters(self):
        rng = np.random.default_rng(7)
        a = np.stack([unit([1, 0, rng.uniform(0, 0.05)]) for _ in range(40)])
        b = np.stack([unit([0, 1, rng.uniform(0, 0.05)]) for _ in range(40)])
        vocab = build_vocabulary([descriptor_set_from(np.vstack([a, b]))], k=2, seed=3)
        # Brute-force oracle: the means of the two constructed clusters.
        means = {tuple(np.round(a.mean(axis=0), 6)), tuple(np.round(b.mean(axis=0), 6))}
        got = {tuple(np.round(c, 6)) for c in vocab.centers}
        for center in vocab.centers:
            best = min(
                (np.linalg.norm(center - a.mean(axis=0)), np.linalg.norm(center - b.mean(axis=0)))
            )
            assert best < 1e-6
        assert got == means

    def test_deterministic_under_seed(self):
        rng = np.random.default_rng(11)
        vecs = rng.random((60, 128))
        vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
        v1 = build_vocabulary([descriptor_set_from(vecs)], k=5, seed=9)
        v2 = build_vocabulary([descriptor_set_from(vecs)], k=5, seed=9)
        np.testing.assert_array_equal(v1.centers, v2.centers)

    def test_insufficient_nonzero_descriptors(self):
        vecs = np.stack([unit([1]), np.zeros(128)])
        with pytest.raises(InsufficientDataError):
            build_vocabulary([descriptor_set_from(vecs)], k=3, seed=0)


class TestQuantize:
    def test_single_bin(self):
        vocab = Vocabulary(unit([1]).reshape(1, 128), 0)
        hist = quantize(descriptor_set_from([unit([0, 1])]), vocab)
        np.testing.assert_array_equal(hist.bins, [1.0])
        assert hist.descriptor_count == 1

    def test_empty_set(self):
        vocab = Vocabulary(np.vstack([unit([1]), unit([0, 1])]), 0)
        hist = quantize(DescriptorSet.empty(), vocab)
        assert hist.descriptor_count == 0
        assert np.all(hist.bins == 0.0)

    def test_constructed_assignment(self):
        centers = np.vstack([unit([1]), unit([0, 1]), unit([0, 0, 1])])
        vocab = Vocabulary(centers, 0)
        descs = [unit([10, 1]), unit([10, 0, 1]), unit([8, 1, 1]), unit([0.1, 0.2, 5])]
        dset = descriptor_set_from(descs)
        hist = quantize(dset, vocab)
        # Oracle: exhaustive nearest-neighbor search.
        expected = np.zeros(3)
        for d in descs:
            expected[int(np.argmin([np.linalg.norm(d - c) for c in centers]))] += 1
        np.testing.assert_allclose(hist.bins, expected / expected.sum())
        np.testing.assert_allclose(hist.bins, [0.75, 0.0, 0.25])

    def test_permutation_invariance(self):
        rng = np.random.default_rng(5)
        vecs = rng.random((30, 128))
        vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
        vocab = build_vocabulary([descriptor_set_from(vecs)], k=4, seed=2)
        perm = rng.permutation(30)
        h1 = quantize(descriptor_set_from(vecs), vocab)
        h2 = quantize(descriptor_set_from(vecs[perm]), vocab)
        np.testing.assert_array_equal(h1.bins, h2.bins)

    def test_dimension_mismatch(self):
        vocab = Vocabulary(unit([1]).reshape(1, 128), 0)
        bad = DescriptorSet(np.ones((1, 128)), np.zeros(1), np.zeros(1), np.ones(1))
        object.__setattr__(bad, "vectors", np.ones((1, 64)))
        with pytest.raises(ShapeError):
            quantize(bad, vocab)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=1, max_value=25), st.integers(min_value=0, max_value=10**6))
    def test_l1_normalization_property(self, n_desc, seed):
        rng = np.random.default_rng(seed)
        vecs = rng.random((n_desc, 128))
        vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
        vocab = Vocabulary(rng.random((3, 128)), 0)
        hist = quantize(descriptor_set_from(vecs), vocab)
        assert abs(hist.bins.sum() - 1.0) < 1e-9


class TestBowHistogram:
    def test_rejects_unnormalized(self):
        with pytest.raises(DomainError):
            BowHistogram(np.array([0.5, 0.4]), 3)

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            BowHistogram(np.array([-0.1, 1.1]), 1)

    def test_empty_requires_zero_bins(self):
        with pytest.raises(DomainError):
            BowHistogram(np.array([0.5, 0.5]), 0)

    def test_from_counts(self):
        h = BowHistogram.from_counts([3, 0, 1])
        np.testing.assert_allclose(h.bins, [0.75, 0.0, 0.25])
        assert h.descriptor_count == 4
