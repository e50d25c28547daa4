"""Shared pytest fixtures for cavityq tests."""

import logging
from collections.abc import Iterator

import pytest

from cavityq.models import IntegrationConfig, SystemParams
from cavityq.oracles.fock import OracleSystem, TwoModeDensityMatrix, fock_steady_state


@pytest.fixture
def reference_params() -> SystemParams:
    """Subthreshold working point kappa=1, gamma=0.3, epsilon=0.1."""
    return SystemParams(kappa=1.0, gamma=0.3, epsilon=0.1)


@pytest.fixture
def threshold_params() -> SystemParams:
    """Exactly at threshold, kappa = 2*gamma = 0.8."""
    return SystemParams(kappa=0.8, gamma=0.4, epsilon=0.1)


@pytest.fixture
def vacuum_params() -> SystemParams:
    """No pump and no drive."""
    return SystemParams(kappa=1.0, gamma=0.0, epsilon=0.0)


@pytest.fixture(scope="session")
def subharmonic_rho() -> TwoModeDensityMatrix:
    """Fock steady state of the parametric pair at kappa=1, gamma=0.3 with N=15."""
    return fock_steady_state(
        SystemParams(kappa=1.0, gamma=0.3),
        OracleSystem.SUBHARMONIC,
        IntegrationConfig(truncation=15),
    )


@pytest.fixture(scope="session")
def coherent_rho() -> TwoModeDensityMatrix:
    """Fock steady state of the driven cavity at kappa=1, epsilon=0.1 with N=8."""
    return fock_steady_state(
        SystemParams(kappa=1.0, epsilon=0.1),
        OracleSystem.COHERENT,
        IntegrationConfig(truncation=8),
    )


@pytest.fixture(autouse=True)
def reset_logging() -> Iterator[None]:
    """Drop handlers installed by configure_logging so streams do not leak between tests."""
    yield
    logging.getLogger().handlers.clear()
