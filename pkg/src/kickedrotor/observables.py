"""Moments of the angular-momentum distribution, spreading-exponent fits and
the classification of spreading regimes."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import InitialCondition, ValidationError, WaveState, initial_offset_and_amplitudes

__all__ = [
    "TimeSeries",
    "GammaFit",
    "FitModel",
    "Regime",
    "FitError",
    "moments",
    "energy",
    "analytic_moments",
    "fit_gamma",
    "classify",
    "classify_gamma",
    "predicted_gamma",
    "profile_widths",
    "gaussian_gof_pvalue",
]

SERIES_HEADER = "n,n_star,m1,m2,sigma,norm_error"


class FitError(ValidationError):
    """Series unsuitable for a log-log fit."""


def moments(state: WaveState) -> tuple[float, float]:
    """First and second moments ``sum l P_l`` and ``sum l^2 P_l``."""
    p = state.probabilities
    l = state.momenta.astype(float)
    lp = l * p
    return float(np.sum(lp)), float(np.sum(l * lp))


def energy(state: WaveState, epsilon: float) -> float:
    """Mean kinetic energy ``epsilon * M2`` with ``epsilon = hbar^2 / 2I``."""
    if not epsilon > 0:
        raise ValidationError("epsilon must be positive")
    return epsilon * moments(state)[1]


def analytic_moments(initial: InitialCondition, n_star: float) -> tuple[float, float, float]:
    """Closed-form ``(M1, M2, sigma)`` at a primary resonance after accumulated kick ``n_star``.

    Only nearest and next-nearest neighbour correlations of the initial
    amplitudes enter:

        M1 = -n* sum_j Im[a_j a*_{j-1}] + M1(0)
        M2 = n*^2/2 (1 - sum_j Re[a_j a*_{j+2}]) + n* sum_j (2j+1) Im[a_j a*_{j+1}] + M2(0)
    """
    offset, a = initial_offset_and_amplitudes(initial)
    j = np.arange(offset, offset + a.size, dtype=float)
    p = np.abs(a) ** 2
    m1_0 = float(np.sum(j * p))
    m2_0 = float(np.sum(j * j * p))
    # c1[i] = a_{j_i} a*_{j_i + 1},  c2[i] = a_{j_i} a*_{j_i + 2}
    c1 = a[:-1] * np.conj(a[1:])
    c2 = a[:-2] * np.conj(a[2:])
    # sum_j Im[a_j a*_{j-1}] = -sum_j Im[a_j a*_{j+1}]
    s1 = -float(np.sum(c1.imag))
    s2 = float(np.sum(c2.real))
    s3 = float(np.sum((2.0 * j[:-1] + 1.0) * c1.imag))
    m1 = -n_star * s1 + m1_0
    m2 = 0.5 * n_star ** 2 * (1.0 - s2) + n_star * s3 + m2_0
    return m1, m2, math.sqrt(max(0.0, m2 - m1 * m1))


# --------------------------------------------------------------------------
# time series


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Per-step record of ``n, n*, M1, M2, sigma`` and the norm error."""

    n: np.ndarray
    n_star: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    sigma: np.ndarray
    norm_error: np.ndarray

    @classmethod
    def from_rows(cls, rows) -> "TimeSeries":
        arr = np.array(rows, dtype=float).reshape(-1, 6)
        return cls(arr[:, 0].astype(int), *(arr[:, i].copy() for i in range(1, 6)))

    def __len__(self):
        return self.n.size

    def to_csv(self, path: str | Path) -> None:
        lines = [SERIES_HEADER]
        for row in zip(self.n, self.n_star, self.m1, self.m2, self.sigma, self.norm_error):
            lines.append(f"{row[0]}," + ",".join(format(float(v), ".17g") for v in row[1:]))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def from_csv(cls, path: str | Path) -> "TimeSeries":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
        if header != SERIES_HEADER:
            raise ValidationError(f"{path}: expected header {SERIES_HEADER!r}, got {header!r}")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls.from_rows(data)

    @classmethod
    def synthetic(cls, n, sigma) -> "TimeSeries":
        """Series carrying only ``n`` and ``sigma``, for fitting tests and demos."""
        n = np.asarray(n)
        sigma = np.asarray(sigma, dtype=float)
        zeros = np.zeros(n.size)
        return cls(n.astype(int), zeros, zeros, sigma ** 2, sigma, zeros)


# --------------------------------------------------------------------------
# exponent fit and regimes


class FitModel(str, enum.Enum):
    POWER_LAW = "power_law"
    LOGARITHMIC = "logarithmic"


@dataclass(frozen=True)
class GammaFit:
    """Least-squares fit of ``ln sigma`` against ``ln n`` over a trailing window.

    ``rms_residual`` and ``log_rms_residual`` are relative RMS residuals in
    sigma space for the power law and for ``sigma = a ln n + b``.
    """

    gamma: float
    log_amplitude: float
    window: tuple[int, int]
    rms_residual: float
    model: FitModel
    log_slope: float = math.nan
    log_intercept: float = math.nan
    log_rms_residual: float = math.nan


class Regime(str, enum.Enum):
    SUPER_BALLISTIC = "super-ballistic"
    BALLISTIC = "ballistic"
    SUB_BALLISTIC = "sub-ballistic"
    DIFFUSIVE = "diffusive"
    SUB_DIFFUSIVE = "sub-diffusive"
    LOGARITHMIC = "logarithmic"
    LOCALIZED = "localized"


def _moving_average(y: np.ndarray, width: int) -> np.ndarray:
    """Centered moving average; the ends use the available (shorter) window."""
    half = width // 2
    c = np.concatenate([[0.0], np.cumsum(y)])
    idx = np.arange(y.size)
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half + 1, y.size)
    return (c[hi] - c[lo]) / (hi - lo)


def fit_gamma(series: TimeSeries, window_len: int = 100, smooth: int | None = None,
              log_gamma_max: float = 0.15, log_gamma_min: float = 0.05) -> GammaFit:
    """Fit ``sigma ~ n^gamma`` over the last ``window_len`` records with ``n >= 1``.

    A logarithmic law ``sigma = a ln n + b`` is fitted on the same window and
    preferred when its relative residual is smaller and the power-law
    exponent lies in ``[log_gamma_min, log_gamma_max)``.  ``smooth`` applies a
    centered moving average of that width to sigma before fitting.
    """
    if window_len < 2:
        raise FitError("window_len must be at least 2")
    keep = series.n >= 1
    n = series.n[keep].astype(float)
    sigma = series.sigma[keep]
    if smooth and smooth > 1:
        sigma = _moving_average(sigma, int(smooth))
    if n.size < window_len:
        raise FitError(f"series has {n.size} records with n >= 1, window needs {window_len}")
    n = n[-window_len:]
    sigma = sigma[-window_len:]
    if np.any(~(sigma > 0)):
        raise FitError("sigma must be positive throughout the fit window")
    x = np.log(n)
    y = np.log(sigma)
    gamma, log_amp = np.polyfit(x, y, 1)
    power_pred = np.exp(log_amp + gamma * x)
    rms = float(np.sqrt(np.mean(((sigma - power_pred) / sigma) ** 2)))
    a, b = np.polyfit(x, sigma, 1)
    log_rms = float(np.sqrt(np.mean(((sigma - (a * x + b)) / sigma) ** 2)))
    model = FitModel.POWER_LAW
    if log_rms < rms and log_gamma_min <= gamma < log_gamma_max:
        model = FitModel.LOGARITHMIC
    return GammaFit(float(gamma), float(log_amp), (int(n[0]), int(n[-1])), rms, model,
                    float(a), float(b), log_rms)


def classify_gamma(gamma: float, logarithmic: bool = False, tol: float = 0.05) -> Regime:
    """Map an exponent onto the seven spreading regimes; overlaps resolve top-down."""
    if not 0 < tol <= 0.2:
        raise ValidationError(f"tol must lie in (0, 0.2], got {tol}")
    if logarithmic:
        return Regime.LOGARITHMIC
    # compare against the band edges directly so that no gap opens between
    # adjacent bands through rounding of |gamma - c|
    if gamma > 1 + tol:
        return Regime.SUPER_BALLISTIC
    if gamma >= 1 - tol:
        return Regime.BALLISTIC
    if gamma > 0.5 + tol:
        return Regime.SUB_BALLISTIC
    if gamma >= 0.5 - tol:
        return Regime.DIFFUSIVE
    if gamma > tol:
        return Regime.SUB_DIFFUSIVE
    return Regime.LOCALIZED


def classify(fit: GammaFit, tol: float = 0.05) -> Regime:
    return classify_gamma(fit.gamma, fit.model is FitModel.LOGARITHMIC, tol)


def predicted_gamma(alpha: float) -> tuple[float, bool]:
    """Asymptotic primary-resonance exponent for ``kappa(n) = kappa0 n^-alpha``.

    ``sigma`` grows like the accumulated kick, i.e. like ``n^(1 - alpha)``,
    except at ``alpha = 1`` where it grows like ``ln n``.  Returns
    ``(gamma, logarithmic)``.
    """
    if alpha == 1:
        return 0.0, True
    return 1.0 - alpha, False


# --------------------------------------------------------------------------
# profile shape


def profile_widths(state: WaveState, rel_peak: float = 0.05,
                   support_tol: float = 1e-10) -> tuple[float, int]:
    """``(peak_distance, support_width)`` of a momentum profile.

    ``peak_distance`` is the distance between the outermost local maxima
    whose height exceeds ``rel_peak`` times the global maximum (zero for a
    single peak).  ``support_width`` spans the sites with ``P_l > support_tol``.
    """
    p = state.probabilities
    l = state.momenta
    inside = np.nonzero(p > support_tol)[0]
    support = int(l[inside[-1]] - l[inside[0]]) if inside.size else 0
    padded = np.concatenate([[-1.0], p, [-1.0]])
    is_max = (padded[1:-1] >= padded[:-2]) & (padded[1:-1] >= padded[2:])
    peaks = np.nonzero(is_max & (p >= rel_peak * p.max()))[0]
    distance = float(l[peaks[-1]] - l[peaks[0]]) if peaks.size else 0.0
    return distance, support


def gaussian_gof_pvalue(state: WaveState, shots: int = 1000, min_expected: float = 5.0) -> float:
    """Chi-square p-value of the profile against a Gaussian with the same mean and sigma.

    The profile is read as the outcome histogram of ``shots`` momentum
    measurements; adjacent sites are pooled until each bin expects at least
    ``min_expected`` counts under the Gaussian.
    """
    from scipy import stats

    p = state.probabilities / state.norm
    l = state.momenta.astype(float)
    mean = float(np.sum(l * p))
    sd = math.sqrt(max(float(np.sum((l - mean) ** 2 * p)), 1e-300))
    edges = np.concatenate([l - 0.5, [l[-1] + 0.5]])
    cdf = stats.norm.cdf(edges, mean, sd)
    cdf[0], cdf[-1] = 0.0, 1.0
    expected = np.diff(cdf) * shots
    observed = p * shots
    obs_bins, exp_bins = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            obs_bins.append(acc_o)
            exp_bins.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 and exp_bins:
        obs_bins[-1] += acc_o
        exp_bins[-1] += acc_e
    if len(exp_bins) < 4:
        return 1.0
    chi2 = float(np.sum((np.array(obs_bins) - np.array(exp_bins)) ** 2 / np.array(exp_bins)))
    # mean and sigma were estimated from the profile
    dof = len(exp_bins) - 3
    return float(stats.chi2.sf(chi2, dof))
