"""Shared fixtures: domains are expensive to build, so the ones several
modules need are constructed once per session."""

import pytest
from hypothesis import HealthCheck, settings

from starproj.construction import build_domain
from starproj.families import szego_cosine, szego_expsine, szego_trig3, uniform_measure
from starproj.harness import TestFunction

# library class, not a test case; keep pytest from trying to collect it
TestFunction.__test__ = False

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def uniform_nu():
    return uniform_measure()


@pytest.fixture(scope="session")
def disk_domain(uniform_nu):
    return build_domain(uniform_nu)


@pytest.fixture(scope="session")
def cosine_nu():
    return szego_cosine()


@pytest.fixture(scope="session")
def cosine_domain(cosine_nu):
    return build_domain(cosine_nu)


@pytest.fixture(scope="session")
def szego_roundtrip_cases(cosine_nu, cosine_domain):
    """measure -> (nu, domain) for the three canonical circle densities."""
    cases = {"cosine": (cosine_nu, cosine_domain)}
    for name, ctor in (("expsine", szego_expsine), ("trig3", szego_trig3)):
        nu = ctor()
        cases[name] = (nu, build_domain(nu))
    return cases
