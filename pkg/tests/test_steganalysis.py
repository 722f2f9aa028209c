import numpy as np
import pytest
from scipy.stats import chi2

from stegograph.errors import ConfigurationError, ShapeError
from stegograph.lsb import capacity_bits, embed
from stegograph.steganalysis import (
    SUMMARY_FIELDS,
    ChannelHistogram,
    comb_score,
    compare,
    histogram,
)
from stegograph.image import RgbImage

from conftest import random_image


def fill(cover, rng, k=2, ratio=0.92):
    n = int(capacity_bits(cover, k) // 8 * ratio)
    return embed(cover, rng.integers(0, 256, n, dtype=np.uint8).tobytes(), k)


def test_constant_two_by_two_histogram():
    hist = histogram(RgbImage(np.full((2, 2, 3), (10, 20, 30), np.uint8)))
    expected = np.zeros((3, 256), np.int64)
    expected[0, 10] = expected[1, 20] = expected[2, 30] = 4
    assert np.array_equal(hist.bins, expected)
    assert hist["green"][20] == 4
    assert hist.pixel_count == 4


def test_histogram_counting_oracle(rng):
    img = random_image(rng, 13, 17)
    hist = histogram(img)
    for c in range(3):
        counts = [0] * 256
        for v in img.pixels[:, :, c].reshape(-1).tolist():
            counts[v] += 1
        assert hist[c].tolist() == counts
        assert hist[c].sum() == 13 * 17
    assert np.array_equal(hist.combined, hist[0] + hist[1] + hist[2])


def test_constant_image_is_degenerate():
    report = comb_score(histogram(RgbImage(np.full((5, 5, 3), 77, np.uint8))), 2)
    assert report.degenerate
    assert report.verdict == 0.0
    assert report.degrees_of_freedom == 0
    assert report.summary()["degenerate"] is True


@pytest.mark.parametrize("k", [1, 2, 3])
def test_uniform_bytes_stay_under_null_quantile(k):
    rng = np.random.default_rng(7 + k)
    samples = rng.integers(0, 256, (10**6 // 3 + 1, 1, 3), dtype=np.uint8)
    report = comb_score(histogram(RgbImage(samples)), k)
    assert not report.degenerate
    assert report.statistic < chi2.ppf(0.99, report.degrees_of_freedom)
    assert report.verdict < 0.5


def test_statistic_is_channel_permutation_invariant(natural_photos):
    img = natural_photos["coffee"]
    base = comb_score(histogram(img), 2)
    for order in ([2, 0, 1], [1, 2, 0], [0, 2, 1]):
        permuted = comb_score(histogram(RgbImage(img.pixels[:, :, order])), 2)
        assert permuted.statistic == pytest.approx(base.statistic)
        assert permuted.degrees_of_freedom == base.degrees_of_freedom
        assert permuted.verdict == pytest.approx(base.verdict)


def test_stego_comb_exceeds_clean_on_every_fixture(natural_photos, rng):
    for name, photo in natural_photos.items():
        clean = comb_score(histogram(photo), 2)
        stego = comb_score(histogram(fill(photo, rng)), 2)
        assert stego.statistic > clean.statistic, name
        assert stego.verdict > 0.5 > clean.verdict, name


@pytest.mark.parametrize("k", [1, 3])
def test_comb_rises_at_other_depths(natural_photos, rng, k):
    photo = natural_photos["astronaut"]
    clean = comb_score(histogram(photo), k)
    stego = comb_score(histogram(fill(photo, rng, k)), k)
    assert stego.statistic > clean.statistic


def test_equalization_chi2_falls_after_embedding(natural_photos, rng):
    # counts inside each group level out, so this chi-square shrinks
    photo = natural_photos["astronaut"]
    clean = comb_score(histogram(photo), 2)
    stego = comb_score(histogram(fill(photo, rng)), 2)
    assert sum(stego.equalization_chi2) < sum(clean.equalization_chi2)


def test_verdict_is_monotone_in_statistic(natural_photos, rng):
    photo = natural_photos["china"]
    reports = [comb_score(histogram(fill(photo, rng, 2, r)), 2) for r in (0.0, 0.3, 0.6, 0.95)]
    pairs = sorted((r.statistic, r.verdict) for r in reports)
    assert [v for _, v in pairs] == sorted(v for _, v in pairs)
    assert all(0 <= r.verdict <= 1 for r in reports)


def test_summary_field_order(rng):
    report = comb_score(histogram(random_image(rng, 8, 8)), 2)
    summary = report.summary("x.png", 8, 8)
    assert tuple(summary) == SUMMARY_FIELDS
    assert summary["comb_chi2"] == pytest.approx(sum(summary[f"comb_chi2_{c}"] for c in ("red", "green", "blue")), abs=1e-5)


def test_comb_score_rejects_bad_depth(rng):
    with pytest.raises(ConfigurationError):
        comb_score(histogram(random_image(rng, 2, 2)), 0)


def test_compare_identity(rng):
    img = random_image(rng, 9, 9)
    report = compare(img, img)
    assert report.max_delta == (0, 0, 0)
    assert report.mean_abs_delta == (0.0, 0.0, 0.0)
    assert report.max_bin_ratio == 1.0


@pytest.mark.parametrize("k", [1, 2, 3])
def test_compare_full_embed_within_bound(rng, k):
    cover = random_image(rng, 30, 30)
    report = compare(cover, fill(cover, rng, k, 1.0))
    assert report.within_bound(k)
    assert report.overall_max_delta <= 2**k - 1


def test_compare_shape_mismatch(rng):
    with pytest.raises(ShapeError):
        compare(random_image(rng, 3, 4), random_image(rng, 4, 3))


def test_csv_has_header_and_256_rows(rng):
    text = histogram(random_image(rng, 4, 4)).to_csv()
    lines = text.splitlines()
    assert len(lines) == 257
    assert lines[0] == "value,red,green,blue,combined"
    assert sum(int(row.split(",")[4]) for row in lines[1:]) == 48


def test_channel_histogram_equality():
    bins = np.zeros((3, 256), np.int64)
    assert ChannelHistogram(bins) == ChannelHistogram(bins.copy())
