"""Power spectra of indicator time series and summaries of their structure."""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import UndefinedMeasureError

NORMALIZATIONS = ("max_one", "unit_sum", "none")
TAPERS = ("rectangular", "hann")


@dataclass
class TimeSeries:
    """Indicator values; ``values[i]`` belongs to pulse ``start_index + i``."""

    values: np.ndarray
    start_index: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < 1:
            raise ValueError("time series must be a non-empty 1-d array")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("time series contains non-finite values")

    def __len__(self):
        return self.values.size

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.start_index, self.start_index + self.values.size)

    def window(self, start: Optional[int] = None, end: Optional[int] = None) -> np.ndarray:
        """Samples for pulses ``start..end`` inclusive (absolute pulse numbers)."""
        lo = self.start_index if start is None else start
        hi = self.start_index + self.values.size - 1 if end is None else end
        if lo < self.start_index or hi > self.start_index + self.values.size - 1:
            raise ValueError(
                f"window [{lo}, {hi}] outside series "
                f"[{self.start_index}, {self.start_index + self.values.size - 1}]"
            )
        if hi - lo + 1 < 2:
            raise ValueError(f"window [{lo}, {hi}] holds fewer than 2 samples")
        return self.values[lo - self.start_index:hi - self.start_index + 1]


@dataclass
class Spectrum:
    """One-sided power over bins ``0..L//2``; bin ``k`` is ``k / L`` cycles per pulse."""

    power: np.ndarray
    bin_width: float
    normalization: str = "max_one"
    remove_mean: bool = True

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(self.power.size) * self.bin_width

    def __len__(self):
        return self.power.size


def power_spectrum(
    series: TimeSeries,
    window_start: Optional[int] = None,
    window_end: Optional[int] = None,
    remove_mean: bool = True,
    normalization: str = "max_one",
    taper: str = "rectangular",
) -> Spectrum:
    """Squared DFT magnitude of a window of ``series``.

    Window bounds are absolute pulse numbers, both inclusive.  Raw power is
    one-sided and scaled so that it sums to the energy of the (mean-removed,
    tapered) window; ``max_one`` and ``unit_sum`` rescale that.  An all-zero
    spectrum is returned unscaled.
    """
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    if taper not in TAPERS:
        raise ValueError(f"taper must be one of {TAPERS}")
    x = series.window(window_start, window_end).astype(float)
    L = x.size
    if remove_mean:
        x = x - x.mean()
    if taper == "hann":
        x = x * np.hanning(L)
    X = np.fft.rfft(x)
    power = np.abs(X) ** 2 / L
    # fold negative frequencies onto the one-sided bins
    if L % 2 == 0:
        power[1:-1] *= 2
    else:
        power[1:] *= 2
    total = power.sum()
    if total > 0:
        if normalization == "max_one":
            power = power / power.max()
        elif normalization == "unit_sum":
            power = power / total
    return Spectrum(power, 1.0 / L, normalization, remove_mean)


def _usable_bins(spec: Spectrum) -> Tuple[np.ndarray, int]:
    if spec.remove_mean:
        return spec.power[1:], 1
    return spec.power, 0


def spectral_concentration(spec: Spectrum, k: int) -> float:
    """Fraction of total power held by the ``k`` strongest bins.

    The DC bin is ignored for mean-removed spectra.
    """
    p, _ = _usable_bins(spec)
    if k < 1 or k > p.size:
        raise ValueError(f"k must lie in [1, {p.size}], got {k}")
    total = p.sum()
    if not total > 0:
        raise UndefinedMeasureError("spectral concentration of an all-zero spectrum")
    top = np.sort(p)[::-1][:k]
    return float(top.sum() / total)


def dominant_peaks(spec: Spectrum, k: int) -> List[Tuple[int, float]]:
    """The ``k`` strongest local maxima as ``(bin, power)``, strongest first.

    A bin is a local maximum when it exceeds its left neighbour and is not
    exceeded by its right one (leftmost bin of a plateau).  Ties in power go
    to the lower bin.  May return fewer than ``k`` entries.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    p = spec.power
    n = p.size
    peaks = []
    lo = 1 if spec.remove_mean else 0
    for i in range(lo, n):
        if p[i] <= 0:
            continue
        left_ok = i == lo or p[i] > p[i - 1]
        right_ok = i == n - 1 or p[i] >= p[i + 1]
        if left_ok and right_ok:
            peaks.append((i, float(p[i])))
    peaks.sort(key=lambda t: (-t[1], t[0]))
    return peaks[:k]
