"""scikit-learn style wrappers: encoder, channel and list decoder as estimators.

Rows of ``X`` are frames. Typical use::

    enc = SystemEncoder(system)
    chan = BpskAwgnChannel(ebno_db=3.0, rate=system.rate, random_state=0)
    dec = ListDecoder(system, L_min=1, L_max=1024).fit()
    msgs_hat = dec.predict(chan.transform(enc.transform(msgs)))
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_array, check_is_fitted

from .listdec import ListConfig, ListDecoderCore
from .simulation import ChannelParams, transmit
from .system import CodeSystem


def _check_bits(X, width: int, name: str) -> np.ndarray:
    X = check_array(X, dtype=np.uint8, ensure_2d=True)
    if X.shape[1] != width:
        raise ValueError(f"{name} rows must have {width} entries, got {X.shape[1]}")
    if X.max(initial=0) > 1:
        raise ValueError(f"{name} must contain only 0/1")
    return X


class SystemEncoder(TransformerMixin, BaseEstimator):
    """Map message rows to transmitted codeword rows."""

    def __init__(self, system: CodeSystem):
        self.system = system

    def fit(self, X=None, y=None):
        self.n_features_in_ = self.system.msg_len
        return self

    def transform(self, X):
        X = _check_bits(X, self.system.msg_len, "messages")
        return np.array([self.system.encode(row) for row in X], dtype=np.uint8).reshape(-1, self.system.n)


class BpskAwgnChannel(TransformerMixin, BaseEstimator):
    """BPSK over AWGN returning LLRs; ``noiseless`` skips the noise."""

    def __init__(self, ebno_db: float = 3.0, rate: float = 32 / 512, random_state=None, noiseless: bool = False):
        self.ebno_db = ebno_db
        self.rate = rate
        self.random_state = random_state
        self.noiseless = noiseless

    def fit(self, X=None, y=None):
        self.rng_ = check_random_state(self.random_state)
        return self

    def transform(self, X):
        if not hasattr(self, "rng_"):
            self.fit()
        X = check_array(X, dtype=np.uint8)
        ch = ChannelParams(self.ebno_db, self.rate)
        return np.array([transmit(row, ch, self.rng_, self.noiseless) for row in X])


class ListDecoder(BaseEstimator):
    """Adaptive CRC-aided list decoder; ``predict`` returns messages, ``-1`` rows for erasures."""

    def __init__(self, system: CodeSystem, L_min: int = 1, L_max: int = 1024, stop: str | None = None):
        self.system = system
        self.L_min = L_min
        self.L_max = L_max
        self.stop = stop

    def fit(self, X=None, y=None):
        self.config_ = ListConfig(self.L_min, self.L_max)
        self.core_ = ListDecoderCore(self.system, self.stop)
        self.n_features_in_ = self.system.n
        return self

    def decode(self, X):
        """Per-row :class:`~crclist.listdec.Selection` objects."""
        check_is_fitted(self, "core_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.system.n:
            raise ValueError(f"expected {self.system.n} LLRs per row, got {X.shape[1]}")
        return [self.core_.decode(row, self.config_) for row in X]

    def predict(self, X):
        k = self.system.msg_len
        out = np.full((len(X), k), -1, dtype=np.int8)
        for i, sel in enumerate(self.decode(X)):
            if sel.data is not None:
                out[i] = sel.data[:k]
        return out

    def score(self, X, y):
        """Fraction of frames decoded to the right message (1 - TFR)."""
        y = _check_bits(y, self.system.msg_len, "messages")
        return float(np.mean(np.all(self.predict(X) == y, axis=1)))
