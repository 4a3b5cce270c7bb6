import pytest
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker
from sqlalchemy.pool import StaticPool

from src.services.catalog_service import CatalogService
from src.services.params_service import build, config_with, paper_config


@pytest.fixture
def config():
    """Built-in preset at 10 uW pump"""
    return paper_config()


@pytest.fixture
def paper_point(config):
    return build(config)


@pytest.fixture
def heavy_config(config):
    """
    A decoupled lossy resonator with a very heavy mirror: the optomechanical
    terms are negligible and the bare-cavity closed forms hold.
    """
    cfg = config_with(config, m_eff=1e3, J_coupling=0.0, kappa=-config.system.gamma)
    return cfg.model_copy(update={"P_L": 1e-9})


@pytest.fixture
def catalog():
    engine = create_engine(
        "sqlite://",
        connect_args={"check_same_thread": False},
        poolclass=StaticPool,
    )
    session_factory = sessionmaker(autocommit=False, autoflush=False, bind=engine)
    return CatalogService(session_factory=session_factory, bind=engine)
