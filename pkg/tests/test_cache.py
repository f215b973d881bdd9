import numpy as np
import pytest
from sqlmodel import select

from solitonlab.core.grid import make_grid
from solitonlab.db.crud import delete_entry, get_entry, list_entries
from solitonlab.db.models import GroundStateEntry
from solitonlab.db.session import get_engine, get_session
from solitonlab.schemas.params import ModelParams
from solitonlab.services.soliton import SolitonParams, make_soliton
from solitonlab.storage import cache as cache_module
from solitonlab.storage.cache import GroundStateCache, cache_key, ground_state_for


@pytest.fixture
def cache(tmp_path):
    engine = get_engine(f"sqlite:///{tmp_path / 'index.db'}")
    return GroundStateCache(tmp_path / "ground", engine=engine)


def test_key_ignores_potential_parameters(grid1d):
    assert cache_key(1.0, grid1d, ModelParams(eps=0.1, v0=2.0)) == cache_key(1.0, grid1d, ModelParams())
    assert cache_key(1.0, grid1d, ModelParams()) != cache_key(1.01, grid1d, ModelParams())
    assert cache_key(1.0, grid1d, ModelParams()) != cache_key(1.0, make_grid(1, 128, 40.0), ModelParams())
    assert cache_key(1.0, grid1d, ModelParams()) != cache_key(1.0, grid1d, ModelParams(theta=0.2))


def test_store_then_load(cache, ground1d):
    entry = cache.store(ground1d)
    assert entry.mu == 1.0
    loaded = cache.load(1.0, ground1d.grid, ground1d.params)
    assert loaded is not None
    assert np.array_equal(loaded.phi, ground1d.phi)
    assert np.array_equal(loaded.dmu_phi, ground1d.dmu_phi)
    assert loaded.mass == pytest.approx(ground1d.mass)


def test_cache_hit_reproduces_a_fresh_solve(cache, ground1d):
    cache.store(ground1d)
    loaded = cache.load(1.0, ground1d.grid, ground1d.params)
    assert np.array_equal(loaded.d2mu_phi, ground1d.d2mu_phi)
    assert np.array_equal(loaded.profile(1.02), ground1d.profile(1.02))
    sigma = SolitonParams(a=[1.5], v=[0.3], gamma=0.2, mu=1.01)
    assert np.array_equal(make_soliton(sigma, loaded), make_soliton(sigma, ground1d))
    assert loaded.radial_defect == ground1d.radial_defect


def test_missing_second_derivative_forces_resolve(cache, ground1d):
    entry = cache.store(ground1d)
    cache.second_derivative_path(entry.key).unlink()
    assert cache.load(1.0, ground1d.grid, ground1d.params) is None


def test_miss_returns_none(cache, ground1d):
    assert cache.load(2.0, ground1d.grid, ground1d.params) is None


def test_tampered_residual_forces_resolve(cache, ground1d):
    entry = cache.store(ground1d)
    with get_session(cache.engine) as session:
        row = get_entry(session, entry.key)
        row.residual = 10 * row.residual + 1e-3
        session.add(row)
        session.commit()
    assert cache.load(1.0, ground1d.grid, ground1d.params) is None


def test_unreadable_file_forces_resolve(cache, ground1d):
    entry = cache.store(ground1d)
    cache.path_for(entry.key).write_bytes(b"junk")
    assert cache.load(1.0, ground1d.grid, ground1d.params) is None


def test_get_or_solve_uses_the_cache(cache, ground1d, monkeypatch):
    cache.store(ground1d)

    def fail(*args, **kwargs):
        raise AssertionError("solver called on a cache hit")

    monkeypatch.setattr(cache_module, "solve_ground_state", fail)
    hit = cache.get_or_solve(1.0, ground1d.grid, ground1d.params)
    assert np.array_equal(hit.phi, ground1d.phi)


def test_get_or_solve_stores_on_miss(cache, ground1d, monkeypatch):
    monkeypatch.setattr(cache_module, "solve_ground_state", lambda *args, **kwargs: ground1d)
    cache.get_or_solve(1.0, ground1d.grid, ground1d.params)
    with get_session(cache.engine) as session:
        assert len(session.exec(select(GroundStateEntry)).all()) == 1


def test_store_replaces_existing_entry(cache, ground1d):
    cache.store(ground1d)
    cache.store(ground1d)
    with get_session(cache.engine) as session:
        entries = list_entries(session)
    assert len(entries) == 1


def test_delete_entry(cache, ground1d):
    entry = cache.store(ground1d)
    with get_session(cache.engine) as session:
        assert delete_entry(session, entry.key)
        assert not delete_entry(session, entry.key)


def test_ground_state_without_cache(ground1d, monkeypatch):
    monkeypatch.setattr(cache_module, "solve_ground_state", lambda *args, **kwargs: ground1d)
    assert ground_state_for(1.0, ground1d.grid, ground1d.params) is ground1d
