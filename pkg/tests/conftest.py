import pytest
from hypothesis import HealthCheck, settings

from commons_lab.homomorphism import set_cache_enabled

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    # every test gets its own on-disk spectrum cache
    monkeypatch.setenv("COMMONS_LAB_CACHE_DIR", str(tmp_path / "cache"))
    set_cache_enabled(True)
    yield
    set_cache_enabled(True)
