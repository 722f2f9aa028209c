"""scikit-learn style front-ends.

``MultiImageStego`` is fitted on covers and transforms payloads into
stego images; ``inverse_transform`` recovers the payloads. The
steganalysis side offers a feature transformer and a detector that plug
into ordinary sklearn pipelines.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .chunking import DEFAULT_CHUNK_SIZE
from .lsb import DEFAULT_BITS_PER_SLOT, capacity_bits, check_bits_per_slot
from .pipeline import TransformSpec, decode, encode_with_plan, plan
from .steganalysis import comb_score, histogram
from .validation import check_chunk_size, check_image, check_images


class MultiImageStego(BaseEstimator):
    """Hide a list of payload images across the covers seen in ``fit``.

    Parameters
    ----------
    chunk_size : int, default=512
        Bytes per chunk of flattened payload.
    bits_per_slot : int, default=2
        Low bits replaced in each channel byte (1, 2 or 3).
    xor_key : bytes, str or None, default=None
        Key for the XOR keystream applied to payload bytes. A ``str`` is
        read as hex. ``None`` leaves payload bytes as they are.
    """

    def __init__(self, chunk_size=DEFAULT_CHUNK_SIZE, bits_per_slot=DEFAULT_BITS_PER_SLOT, xor_key=None):
        self.chunk_size = chunk_size
        self.bits_per_slot = bits_per_slot
        self.xor_key = xor_key

    def _transform_spec(self):
        if self.xor_key is None:
            return None
        return TransformSpec.xor(self.xor_key)

    def _validate_params(self):
        check_chunk_size(self.chunk_size)
        check_bits_per_slot(self.bits_per_slot)
        self._transform_spec()

    def fit(self, X, y=None):
        """Record the covers. ``X`` is a sequence of cover images."""
        self._validate_params()
        self.covers_ = check_images(X, "covers")
        self.n_covers_ = len(self.covers_)
        self.capacity_bits_ = np.array([capacity_bits(c, self.bits_per_slot) for c in self.covers_])
        return self

    def plan(self, X):
        """Capacity plan for hiding payloads ``X`` in the fitted covers."""
        check_is_fitted(self, "covers_")
        return plan(self.covers_, check_images(X, "payloads"), self.chunk_size, self.bits_per_slot)

    def transform(self, X):
        """Hide payloads ``X``; returns one stego image per fitted cover."""
        check_is_fitted(self, "covers_")
        stegos, self.plan_ = encode_with_plan(
            X, self.covers_, self.chunk_size, self.bits_per_slot, self._transform_spec()
        )
        return stegos

    def inverse_transform(self, X):
        """Recover payloads from stego images ``X`` in any order."""
        self._validate_params()
        return decode(X, self.bits_per_slot, self._transform_spec())


class HistogramFeatures(TransformerMixin, BaseEstimator):
    """Map images to comb-statistic features, one row per image.

    Columns: per-channel comb chi-square divided by its degrees of
    freedom, per-channel gap fraction, and the combined max-bin share of
    all channel values.
    """

    def __init__(self, bits_per_slot=DEFAULT_BITS_PER_SLOT):
        self.bits_per_slot = bits_per_slot

    def fit(self, X, y=None):
        check_bits_per_slot(self.bits_per_slot)
        self.n_features_out_ = 7
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_out_")
        rows = []
        for img in check_images(X, "images"):
            report = comb_score(histogram(img), self.bits_per_slot)
            per_dof = max(report.degrees_of_freedom, 1) / 3
            rows.append(
                [*(s / per_dof for s in report.comb_chi2), *report.gap_fraction,
                 report.combined_max_bin / img.n_slots]
            )
        return np.asarray(rows, dtype=np.float64)

    def get_feature_names_out(self, input_features=None):
        return np.array(
            ["comb_red", "comb_green", "comb_blue", "gap_red", "gap_green", "gap_blue", "max_bin_share"],
            dtype=object,
        )


class CombDetector(ClassifierMixin, BaseEstimator):
    """Flags images whose comb verdict reaches ``threshold``.

    The verdict uses fixed calibration constants, so ``fit`` only checks
    parameters and records the class labels. Label 1 means stego.
    """

    def __init__(self, bits_per_slot=DEFAULT_BITS_PER_SLOT, threshold=0.5):
        self.bits_per_slot = bits_per_slot
        self.threshold = threshold

    def fit(self, X, y=None):
        check_bits_per_slot(self.bits_per_slot)
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must lie in [0, 1], got {self.threshold}")
        self.classes_ = np.array([0, 1])
        return self

    def decision_function(self, X):
        check_is_fitted(self, "classes_")
        return np.array(
            [comb_score(histogram(check_image(img)), self.bits_per_slot).verdict for img in X]
        )

    def predict_proba(self, X):
        verdict = self.decision_function(X)
        return np.column_stack([1.0 - verdict, verdict])

    def predict(self, X):
        return (self.decision_function(X) >= self.threshold).astype(int)
