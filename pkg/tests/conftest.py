"""Shared fixtures. BLAS threading is pinned before numpy loads so timing
checks measure single-threaded behavior."""

import os

os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("OMP_NUM_THREADS", "1")
os.environ.setdefault("MKL_NUM_THREADS", "1")

import numpy as np
import pytest

from gbc_chroma.data_model import generate_synthetic


@pytest.fixture(scope="session")
def synth300():
    """The desk-scale reference dataset: 300 samples, 8 attributes."""
    return generate_synthetic(300, 8, seed=7)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240)


def gamut_test_cloud(rng, m=300):
    """Warp-test cloud enforcing the gamut-ordering preconditions.

    Off-center anisotropic Gaussian, rescaled so the 95th-percentile radius
    stays below 0.93 and radially clamped into the unit disc (embedded
    points can never leave it); the interior subset is large, non-collinear,
    and confined to an angular sector, which is the regime the warps are
    designed for.
    """
    ang = rng.uniform(0, 2 * np.pi)
    c = rng.uniform(0.25, 0.35) * np.array([np.cos(ang), np.sin(ang)])
    s1 = rng.uniform(0.24, 0.30)
    s2 = rng.uniform(0.19, s1)
    th = rng.uniform(0, np.pi)
    rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    pts = rng.normal(0, 1, (m, 2)) * (s1, s2) @ rot.T + c
    r = np.linalg.norm(pts, axis=1)
    far = r > 0.98
    pts[far] *= (0.98 / r[far])[:, None]
    r95 = np.quantile(np.linalg.norm(pts, axis=1), 0.95)
    if r95 >= 0.93:
        pts *= 0.93 / r95 * 0.999
    return pts


@pytest.fixture()
def cloud_factory():
    return gamut_test_cloud
