import numpy as np
import pytest

from ergoseries.torusfn import TorusFunction


def random_trig_poly(rng, max_degree=200, n_terms=12, real=True, grid_size=None):
    """Random real trigonometric polynomial with bounded degree."""
    freqs = rng.choice(np.arange(1, max_degree + 1), size=n_terms, replace=False)
    coeffs = {}
    for k in freqs:
        amp = complex(rng.normal(), rng.normal()) / np.sqrt(n_terms)
        coeffs[int(k)] = amp
        if real:
            coeffs[-int(k)] = np.conj(amp)
    kwargs = {} if grid_size is None else {"grid_size": grid_size}
    return TorusFunction(coeffs, **kwargs)


@pytest.fixture(scope="session")
def poly_battery():
    """Deterministic battery of random polynomials shared across invariants."""
    rng = np.random.default_rng(20240811)
    return [random_trig_poly(rng, max_degree=200, n_terms=10, grid_size=4096) for _ in range(25)]
