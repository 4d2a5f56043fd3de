import numpy as np
import pytest

from mpps import RgbImage, SecretKey

# Worked-example key: K_m = (0.10 + m/100, 3.90 + m/100), t = 500.
WORKED_PAIRS = [(0.11, 3.91), (0.12, 3.92), (0.13, 3.93), (0.14, 3.94), (0.15, 3.95), (0.16, 3.96)]

# Ciphertexts of the worked example at 2x2, stacked r, g, b.
WORKED_CIPHERS = {
    0: [198, 60, 216, 204, 107, 69, 102, 24, 49, 72, 224, 205],
    255: [51, 158, 39, 228, 148, 69, 153, 24, 110, 234, 181, 229],
    85: [108, 60, 114, 204, 59, 20, 51, 12, 49, 72, 224, 205],
    170: [153, 158, 141, 228, 145, 20, 153, 12, 110, 234, 181, 229],
}
WORKED_RAMP_CIPHER = [202, 48, 210, 196, 99, 72, 106, 17, 60, 76, 231, 205]
WORKED_S3 = [0, 0, 1, 1, 1, 1, 1, 0, 1, 1, 0, 1, 0, 1, 1, 0]


@pytest.fixture(scope="session")
def worked_key():
    return SecretKey.from_pairs(WORKED_PAIRS, transient=500)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def flat_image(values, h=2, w=2):
    return RgbImage.from_flat(np.asarray(values, dtype=np.uint8), h, w)


# ---------------------------------------------------------------- acceptance report

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
