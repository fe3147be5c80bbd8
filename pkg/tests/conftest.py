import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def write_csv(tmp_path):
    """Write a one-column sample CSV and return its path."""
    def _write(values, name="sample.csv", header=None):
        path = tmp_path / name
        lines = ([header] if header else []) + [repr(float(v)) for v in values]
        path.write_text("\n".join(lines) + "\n")
        return path
    return _write
