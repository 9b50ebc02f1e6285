import numpy as np
import pytest

from cvrepeater import FockKet


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_ket(rng, cutoff, modes=1, support=None, scale=1.0):
    """Random sub-normalized ket; ``support`` limits photons per mode."""
    shape = (cutoff + 1,) * modes
    amps = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    if support is not None:
        mask = np.ones(shape, dtype=bool)
        for axis in range(modes):
            idx = [slice(None)] * modes
            idx[axis] = slice(support + 1, None)
            mask[tuple(idx)] = False
        amps = amps * mask
    amps = amps / np.linalg.norm(amps) * scale
    return FockKet(amps)


def phase_aligned_distance(a, b):
    """max |a - e^{i phi} b| with phi chosen to best align b with a."""
    a, b = np.ravel(a), np.ravel(b)
    ov = np.vdot(b, a)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.abs(a - phase * b).max())


def pytest_terminal_summary(terminalreporter):
    try:
        from tests.test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number])
    missing = sorted(set(range(1, 9)) - set(RESULTS))
    if missing:
        terminalreporter.write_line(f"not run: criteria {missing}")
