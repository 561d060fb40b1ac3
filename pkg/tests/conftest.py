import os
import random

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=300, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES: list[str] = []


def _validate_lu_kernel(queries: int = 300) -> str | None:
    """Cross-check the zone LU test against the region oracle before anything relies on it."""
    from helpers import lu_bad_region, random_lu, random_zone
    from tadiag.simulation import zone_sim_lu

    rng = random.Random(99)
    for _ in range(queries):
        n = rng.randint(1, 4)
        z, z2 = random_zone(rng, n), random_zone(rng, n)
        lo, hi = random_lu(rng, n)
        if zone_sim_lu(z, z2, lo, hi) != (lu_bad_region(z, z2, lo, hi) is None):
            return f"LU kernel disagrees with the region oracle on {z} vs {z2}, L={lo}, U={hi}"
    return None


def pytest_sessionstart(session):
    problem = _validate_lu_kernel()
    if problem:
        pytest.exit(problem, returncode=3)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
