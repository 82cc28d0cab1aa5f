import itertools
import math
import time

import numpy as np
import pytest

from byzdetect.core import AttackConfig, NetworkConfig, Priors, SensorModel

STRONG_SENSOR = SensorModel(pd=0.8, pf=0.1)
BASE_PRIORS = Priors(0.4, 0.6)
WEAK_SENSOR = SensorModel(pd=0.6, pf=0.4)


def network(n, pd, pf, p0, alpha=0.0, p10=0.0, p01=0.0):
    return NetworkConfig(n, SensorModel(pd, pf), Priors.from_p0(p0), AttackConfig(alpha, p10, p01))


def random_config(rng, n_max=20, alpha_max=1.0, n_min=1):
    n = int(rng.integers(n_min, n_max + 1))
    pf, pd = sorted(rng.uniform(0.0, 1.0, 2))
    while pd - pf < 1e-3:
        pf, pd = sorted(rng.uniform(0.0, 1.0, 2))
    return network(n, pd, pf, rng.uniform(0.02, 0.98),
                   rng.uniform(0.0, alpha_max), rng.uniform(), rng.uniform())


def enumerate_tails(n, pi10, pi11, decides_h1):
    """(qf, qd) by summing over all 2**n report vectors."""
    qf = qd = 0.0
    for bits in itertools.product((0, 1), repeat=n):
        ones = sum(bits)
        if decides_h1(ones):
            qf += pi10 ** ones * (1 - pi10) ** (n - ones)
            qd += pi11 ** ones * (1 - pi11) ** (n - ones)
    return qf, qd


def central_difference(f, x, h=1e-5):
    return (f(x + h) - f(x - h)) / (2 * h)


def first_difference_signs(values, tol=1e-15):
    d = np.diff(np.asarray(values, dtype=float))
    s = np.sign(np.where(np.abs(d) <= tol, 0.0, d))
    return s[s != 0]


def is_valley(values):
    """At most one sign change of the first difference, and only from - to +."""
    s = first_difference_signs(values)
    changes = int(np.sum(s[1:] != s[:-1]))
    return changes == 0 or (changes == 1 and s[0] < 0)


@pytest.fixture
def rng():
    return np.random.default_rng(20141015)


_ACCEPTANCE = []


class _Criterion:
    def __init__(self, label, limit):
        self.label = label
        self.limit = limit
        self.detail = ""

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        passed = exc_type is None and elapsed < self.limit
        note = self.detail or (str(exc).splitlines()[0] if exc else "")
        _ACCEPTANCE.append((self.label, passed, elapsed, self.limit, note))
        if exc_type is None:
            assert elapsed < self.limit, f"{self.label} took {elapsed:.1f}s (limit {self.limit}s)"
        return False


@pytest.fixture
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, elapsed, limit, note in _ACCEPTANCE:
        status = "PASS" if passed else "FAIL"
        line = f"{status}  {label}  ({elapsed:.2f}s / {limit}s)"
        terminalreporter.write_line(f"{line}  {note}" if note else line)
