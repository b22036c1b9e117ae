"""Spectral unfolding, level-spacing statistics and ensemble classification.

The level-spacing distribution of an unfolded spectrum is compared against
the Poissonian density exp(-s) (uncorrelated levels, the integrable
signature) and the Wigner surmises for the Gaussian unitary and orthogonal
ensembles.  The scalar measure is the Kolmogorov-Smirnov distance of the
empirical spacing CDF to the analytic surmise CDFs.
"""

import math

import numpy as np
from numpy.polynomial import Polynomial
from scipy.special import erf

from dataclasses import dataclass, field

from .exceptions import SampleSizeError

ENSEMBLES = ("poisson", "goe", "gue")


def _check_ensemble(ensemble):
    if ensemble not in ENSEMBLES:
        raise ValueError(f"unknown ensemble {ensemble!r}; expected one of {ENSEMBLES}")


def surmise_pdf(ensemble, s):
    """Nearest-neighbor spacing density p(s) of the given ensemble.

    poisson: exp(-s)
    gue:     (32/pi^2) s^2 exp(-4 s^2 / pi)
    goe:     (pi/2) s exp(-pi s^2 / 4)
    """
    _check_ensemble(ensemble)
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("spacings must be nonnegative")
    if ensemble == "poisson":
        out = np.exp(-s)
    elif ensemble == "gue":
        out = (32.0 / math.pi ** 2) * s ** 2 * np.exp(-(4.0 / math.pi) * s ** 2)
    else:
        out = (math.pi / 2.0) * s * np.exp(-(math.pi / 4.0) * s ** 2)
    return out if out.ndim else float(out)


def surmise_cdf(ensemble, s):
    """Cumulative spacing distribution; differentiates back to surmise_pdf."""
    _check_ensemble(ensemble)
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("spacings must be nonnegative")
    if ensemble == "poisson":
        out = 1.0 - np.exp(-s)
    elif ensemble == "gue":
        out = erf(2.0 * s / math.sqrt(math.pi)) - (4.0 * s / math.pi) * np.exp(
            -(4.0 / math.pi) * s ** 2
        )
    else:
        out = 1.0 - np.exp(-(math.pi / 4.0) * s ** 2)
    return out if out.ndim else float(out)


@dataclass
class UnfoldedSpectrum:
    """Levels rescaled to unit mean spacing, with the unfolding metadata."""

    levels: np.ndarray
    method: str
    trimmed: int

    def spacings(self):
        return np.diff(self.levels)


@dataclass
class SpacingSample:
    """Pooled nearest-neighbor spacings with per-sector provenance.

    Sectors are unfolded separately and only their spacings concatenated,
    so pooling never mixes level densities.
    """

    spacings: np.ndarray
    provenance: list = field(default_factory=list)


def pool_samples(samples):
    """Concatenate spacing samples (unfolding already done per sector)."""
    spacings = np.concatenate([np.asarray(s.spacings, dtype=float) for s in samples])
    provenance = [p for s in samples for p in s.provenance]
    return SpacingSample(spacings=spacings, provenance=provenance)


def unfold(spectrum, degree=6, trim_fraction=0.02, use_log=False):
    """Map a spectrum to unit mean level density.

    Fits a polynomial of the given degree to the cumulative counting
    function N(lambda) (or N(log lambda) when use_log, which is safe because
    a smooth monotone transform does not change local level correlations)
    and evaluates the fit at each level.  `trim_fraction` of the levels is
    dropped at each spectral edge, where the fit is least trustworthy.
    """
    values = np.sort(np.asarray(getattr(spectrum, "values", spectrum), dtype=float))
    m = len(values)
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if not 0.0 <= trim_fraction <= 0.1:
        raise ValueError("trim_fraction must lie in [0, 0.1]")
    if m < degree + 10:
        raise SampleSizeError(f"need at least degree + 10 = {degree + 10} levels, got {m}")
    if use_log:
        if np.any(values <= 0):
            raise ValueError("use_log requires strictly positive eigenvalues")
        x = np.log(values)
    else:
        x = values
    staircase = np.arange(m, dtype=float) + 0.5
    fit = Polynomial.fit(x, staircase, deg=degree)
    levels = fit(x)
    t = int(round(trim_fraction * m))
    if t:
        levels = levels[t:m - t]
    method = f"{'log_' if use_log else ''}polynomial({degree})"
    return UnfoldedSpectrum(levels=np.sort(levels), method=method, trimmed=t)


def spacing_sample(unfolded, provenance=None):
    """Spacing sample of a single unfolded spectrum."""
    return SpacingSample(
        spacings=unfolded.spacings(), provenance=list(provenance or [])
    )


def ks_statistic(sample, ensemble):
    """Two-sided Kolmogorov-Smirnov distance of the sample to a surmise CDF."""
    _check_ensemble(ensemble)
    s = np.sort(np.asarray(sample.spacings if hasattr(sample, "spacings") else sample, dtype=float))
    m = len(s)
    if m == 0:
        raise SampleSizeError("cannot compute a KS statistic of an empty sample")
    cdf = surmise_cdf(ensemble, s)
    i = np.arange(1, m + 1, dtype=float)
    return float(max(np.max(i / m - cdf), np.max(cdf - (i - 1) / m)))


def spacing_histogram(sample, bin_width, s_max):
    """Density-normalized histogram of spacings on [0, s_max].

    Integrates to the fraction of the sample below s_max; empty bins are
    reported as zeros.
    """
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    s = np.asarray(sample.spacings if hasattr(sample, "spacings") else sample, dtype=float)
    edges = np.arange(0.0, s_max + 0.5 * bin_width, bin_width)
    counts, edges = np.histogram(s, bins=edges)
    density = counts / (len(s) * bin_width) if len(s) else counts.astype(float)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return list(zip(centers.tolist(), density.tolist()))


def number_variance(unfolded, window_length, window_count=2000, seed=0):
    """Variance of the level count in randomly placed windows of fixed length.

    For uncorrelated (Poisson) levels the result equals the window length;
    random-matrix spectra are rigid and give strongly suppressed values.
    """
    levels = np.asarray(unfolded.levels if hasattr(unfolded, "levels") else unfolded, dtype=float)
    if window_length <= 0:
        raise ValueError("window length must be positive")
    span = levels[-1] - levels[0]
    if window_length > span / 3.0:
        raise ValueError(
            f"window length {window_length} exceeds a third of the unfolded span {span:.1f}"
        )
    rng = np.random.default_rng(seed)
    starts = levels[0] + rng.uniform(0.0, span - window_length, size=window_count)
    counts = np.searchsorted(levels, starts + window_length) - np.searchsorted(levels, starts)
    return float(np.var(counts))


def generate_synthetic(ensemble, dim, count, seed):
    """Seeded synthetic spectra for pipeline self-calibration.

    poisson: sorted i.i.d. uniform levels on [0, dim];
    goe/gue: eigenvalues of Gaussian real-symmetric / complex-Hermitian
    matrices of the given dimension.
    """
    from .eigen import Spectrum

    _check_ensemble(ensemble)
    if dim < 50:
        raise ValueError("dim must be >= 50")
    rng = np.random.default_rng(seed)
    spectra = []
    for idx in range(count):
        if ensemble == "poisson":
            vals = np.sort(rng.uniform(0.0, dim, size=dim))
        elif ensemble == "goe":
            a = rng.standard_normal((dim, dim))
            vals = np.linalg.eigvalsh((a + a.T) / 2.0)
        else:
            a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            vals = np.linalg.eigvalsh((a + a.conj().T) / 2.0)
        spectra.append(Spectrum(values=np.sort(vals), source={"synthetic": ensemble, "index": idx}))
    return spectra


def classify(sample, margin=0.02):
    """Ensemble with the smallest KS distance, or "ambiguous".

    The winner must beat the runner-up by `margin`; spacing samples smaller
    than 100 are rejected as statistically undecidable.
    """
    s = np.asarray(sample.spacings if hasattr(sample, "spacings") else sample, dtype=float)
    if len(s) < 100:
        raise SampleSizeError(f"classification needs >= 100 spacings, got {len(s)}")
    distances = {e: ks_statistic(s, e) for e in ENSEMBLES}
    ranked = sorted(distances, key=distances.get)
    if distances[ranked[1]] - distances[ranked[0]] < margin:
        return "ambiguous"
    return ranked[0]
