"""Histogram steganalysis for k-bit LSB replacement.

Replacing the low ``k`` bits with payload bits redistributes the counts
inside each aligned group of ``2**k`` intensity values. On a smooth
natural histogram this leaves a staircase: flat inside each group, with
a step at every group boundary. The comb statistic measures that
staircase. It is a chi-square over adjacent-bin differences at group
boundaries, normalised by the same quantity taken inside groups.

For a pair of adjacent bins ``(a, b)`` let ``q = (b - a)**2 / (a + b)``.
Each channel contributes ``sum(q at boundaries) / mean(q inside groups)``,
using only pairs with non-zero mass. Without any phase structure each
term behaves like a chi-square with one degree of freedom per boundary
pair, so the statistic sits near its degrees of freedom. The verdict is
``r**2 / (r**2 + VERDICT_MIDPOINT**2)`` with ``r = statistic / dof``.

The report also carries the plain within-group equalization chi-square
(observed counts against their group mean), which *drops* after
embedding, and the share of gap bins under half their group mean.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .image import RgbImage
from .lsb import DEFAULT_BITS_PER_SLOT, check_bits_per_slot

CHANNEL_NAMES = ("red", "green", "blue")
GAP_THRESHOLD = 0.5
# r = statistic / dof at which the verdict reaches 0.5. Clean photos in the
# test corpus stay below r = 2.5, 90%-filled stegos exceed r = 5.
VERDICT_MIDPOINT = 3.0

SUMMARY_FIELDS = (
    "image",
    "width",
    "height",
    "bits_per_slot",
    "comb_chi2",
    "comb_chi2_red",
    "comb_chi2_green",
    "comb_chi2_blue",
    "degrees_of_freedom",
    "equalization_chi2",
    "gap_fraction_red",
    "gap_fraction_green",
    "gap_fraction_blue",
    "combined_max_bin",
    "verdict",
    "degenerate",
)


@dataclass(frozen=True, eq=False)
class ChannelHistogram:
    """Exact 256-bin counts, one row per channel (R, G, B)."""

    bins: np.ndarray

    @property
    def combined(self) -> np.ndarray:
        return self.bins.sum(axis=0)

    @property
    def pixel_count(self) -> int:
        return int(self.bins[0].sum())

    def __getitem__(self, channel) -> np.ndarray:
        if isinstance(channel, str):
            channel = CHANNEL_NAMES.index(channel)
        return self.bins[channel]

    def __eq__(self, other):
        if not isinstance(other, ChannelHistogram):
            return NotImplemented
        return np.array_equal(self.bins, other.bins)

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["value", *CHANNEL_NAMES, "combined"])
        combined = self.combined
        for value in range(256):
            writer.writerow([value, *(int(self.bins[c, value]) for c in range(3)), int(combined[value])])
        return out.getvalue()


@dataclass(frozen=True)
class CombReport:
    bits_per_slot: int
    comb_chi2: tuple[float, float, float]
    degrees_of_freedom: int
    equalization_chi2: tuple[float, float, float]
    gap_fraction: tuple[float, float, float]
    combined_max_bin: int
    verdict: float
    degenerate: bool

    @property
    def statistic(self) -> float:
        return float(sum(self.comb_chi2))

    def summary(self, image: str = "", width: int = 0, height: int = 0) -> dict:
        values = (
            image,
            width,
            height,
            self.bits_per_slot,
            round(self.statistic, 6),
            *(round(v, 6) for v in self.comb_chi2),
            self.degrees_of_freedom,
            round(float(sum(self.equalization_chi2)), 6),
            *(round(v, 6) for v in self.gap_fraction),
            self.combined_max_bin,
            round(self.verdict, 6),
            self.degenerate,
        )
        return dict(zip(SUMMARY_FIELDS, values))


@dataclass(frozen=True)
class CompareReport:
    max_delta: tuple[int, int, int]
    mean_abs_delta: tuple[float, float, float]
    original_max_bin: int
    stego_max_bin: int

    @property
    def max_bin_ratio(self) -> float:
        if self.original_max_bin == 0:
            return float("inf") if self.stego_max_bin else 1.0
        return self.stego_max_bin / self.original_max_bin

    @property
    def overall_max_delta(self) -> int:
        return max(self.max_delta)

    def within_bound(self, k: int) -> bool:
        return self.overall_max_delta <= (1 << check_bits_per_slot(k)) - 1

    def summary(self) -> dict:
        return {
            "max_delta_red": self.max_delta[0],
            "max_delta_green": self.max_delta[1],
            "max_delta_blue": self.max_delta[2],
            "mean_abs_delta_red": round(self.mean_abs_delta[0], 6),
            "mean_abs_delta_green": round(self.mean_abs_delta[1], 6),
            "mean_abs_delta_blue": round(self.mean_abs_delta[2], 6),
            "original_max_bin": self.original_max_bin,
            "stego_max_bin": self.stego_max_bin,
            "max_bin_ratio": round(self.max_bin_ratio, 6),
        }


def histogram(image: RgbImage) -> ChannelHistogram:
    flat = image.pixels.reshape(-1, 3)
    bins = np.stack([np.bincount(flat[:, c], minlength=256) for c in range(3)]).astype(np.int64)
    return ChannelHistogram(bins)


def _pair_terms(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    diff = np.diff(h)
    mass = h[:-1] + h[1:]
    q = np.zeros_like(diff)
    np.divide(diff * diff, mass, out=q, where=mass > 0)
    return q, mass > 0


def _channel_comb(h: np.ndarray, k: int) -> tuple[float, int]:
    group = 1 << k
    q, massful = _pair_terms(h)
    boundary = (np.arange(255) % group) == group - 1
    b = boundary & massful
    i = ~boundary & massful
    dof = int(b.sum())
    if dof == 0:
        return 0.0, 0
    scale = q[i].mean() if i.any() else 0.0
    total = q[b].sum()
    return float(total / scale if scale > 0 else total), dof


def _channel_equalization(h: np.ndarray, k: int) -> tuple[float, float]:
    groups = h.reshape(-1, 1 << k)
    means = groups.mean(axis=1, keepdims=True)
    live = means[:, 0] > 0
    if not live.any():
        return 0.0, 0.0
    g, m = groups[live], means[live]
    chi2 = float(((g - m) ** 2 / m).sum())
    gaps = float((g < GAP_THRESHOLD * m).mean())
    return chi2, gaps


def comb_score(hist: ChannelHistogram, k: int = DEFAULT_BITS_PER_SLOT) -> CombReport:
    k = check_bits_per_slot(k)
    bins = hist.bins.astype(np.float64)
    comb, dofs, equal, gaps = [], [], [], []
    for c in range(3):
        stat, dof = _channel_comb(bins[c], k)
        chi2, gap = _channel_equalization(bins[c], k)
        comb.append(stat)
        dofs.append(dof)
        equal.append(chi2)
        gaps.append(gap)
    dof = sum(dofs)
    degenerate = dof == 0
    if degenerate:
        verdict = 0.0
    else:
        r = sum(comb) / dof
        verdict = r * r / (r * r + VERDICT_MIDPOINT * VERDICT_MIDPOINT)
    return CombReport(
        bits_per_slot=k,
        comb_chi2=tuple(comb),
        degrees_of_freedom=dof,
        equalization_chi2=tuple(equal),
        gap_fraction=tuple(gaps),
        combined_max_bin=int(hist.combined.max()),
        verdict=float(verdict),
        degenerate=degenerate,
    )


def compare(original: RgbImage, stego: RgbImage) -> CompareReport:
    if original.shape != stego.shape:
        raise ShapeError(
            f"cannot compare a {original.width}x{original.height} image with a {stego.width}x{stego.height} one"
        )
    delta = np.abs(original.pixels.astype(np.int16) - stego.pixels.astype(np.int16)).reshape(-1, 3)
    return CompareReport(
        max_delta=tuple(int(v) for v in delta.max(axis=0)),
        mean_abs_delta=tuple(float(v) for v in delta.mean(axis=0)),
        original_max_bin=int(histogram(original).combined.max()),
        stego_max_bin=int(histogram(stego).combined.max()),
    )
