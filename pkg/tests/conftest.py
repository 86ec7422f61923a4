import numpy as np
import pytest

from ifda import IntervalFrame, ScatterSet


def random_labelled_frame(rng, n=None, p=None, g=None):
    """Random frame with class-shifted centres/ranges and >= 1 member per class."""
    n = n if n is not None else int(rng.integers(6, 51))
    p = p if p is not None else int(rng.integers(1, 7))
    g = g if g is not None else int(rng.integers(2, 5))
    n = max(n, g)
    labels = np.concatenate([np.arange(g), rng.integers(0, g, size=n - g)])
    rng.shuffle(labels)
    class_centre = rng.normal(scale=3.0, size=(g, p))
    class_range = np.abs(rng.normal(loc=3.0, scale=1.0, size=(g, p)))
    centres = class_centre[labels] + rng.normal(size=(n, p))
    ranges = np.abs(class_range[labels] + rng.normal(scale=0.5, size=(n, p)))
    return IntervalFrame(centres, ranges, labels)


def random_psd(rng, p, scale=1.0):
    a = rng.normal(size=(p, p))
    m = a @ a.T + 0.1 * np.eye(p)
    return scale * (m + m.T) / 2.0


def random_scatter_set(rng, p, n=40, g=2):
    sizes = np.full(g, n // g)
    sizes[0] += n - sizes.sum()
    return ScatterSet(
        random_psd(rng, p),
        random_psd(rng, p),
        random_psd(rng, p),
        random_psd(rng, p),
        n,
        sizes,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
