"""Independent reference computations used to check the closed-form fitters."""

import numpy as np

from mmwave_pathloss import FitDataset, FrequencyBand, fspl_1m


def bc_objective(data: FitDataset, n_single: float, a_values: np.ndarray) -> np.ndarray:
    """J(A): summed squared error of the BC-CI model, evaluated per candidate A."""
    d = data.distances[None, :]
    n_eff = n_single * (1.0 - a_values[:, None] * np.log2(data.n_r)[None, :])
    model = fspl_1m(data.band) + 10.0 * n_eff * np.log10(d)
    return np.sum((data.path_loss[None, :] - model) ** 2, axis=1)


def grid_search_a(data: FitDataset, n_single: float, step: float = 1e-6,
                  lo: float = -1.0, hi: float = 1.0) -> float:
    """Brute-force minimiser of J(A): coarse scan, then a dense scan at ``step``."""
    coarse = np.arange(lo, hi, 1e-3)
    centre = coarse[np.argmin(bc_objective(data, n_single, coarse))]
    fine = centre + np.arange(-2000, 2001) * step
    return float(fine[np.argmin(bc_objective(data, n_single, fine))])


def random_bc_dataset(rng: np.random.Generator, k: int = 40) -> tuple:
    """Random BC-CI samples with injected residuals; returns (data, n_single)."""
    band = FrequencyBand(float(rng.choice([28.0, 60.0, 73.0])))
    n_single = float(rng.uniform(2.5, 5.0))
    a_true = float(rng.uniform(0.0, 0.15))
    d = 10 ** rng.uniform(0.5, 2.5, k)
    n_r = rng.integers(1, 5, k)
    n_eff = n_single * (1 - a_true * np.log2(n_r))
    pl = fspl_1m(band) + 10 * n_eff * np.log10(d) + rng.normal(0, 6.0, k)
    return FitDataset(band, d, pl, n_r), n_single
