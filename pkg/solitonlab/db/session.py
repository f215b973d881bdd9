from contextlib import contextmanager
from functools import lru_cache
from pathlib import Path
from typing import Iterator, Optional

from sqlalchemy.engine import Engine
from sqlmodel import SQLModel, create_engine, Session

from ..core.config import settings


@lru_cache(maxsize=None)
def _engine_for(url: str) -> Engine:
    if url.startswith("sqlite:///") and url != "sqlite:///:memory:":
        Path(url[len("sqlite:///"):]).parent.mkdir(parents=True, exist_ok=True)
    return create_engine(url, echo=False)


def get_engine(url: Optional[str] = None) -> Engine:
    """One engine per database URL; the default URL comes from Settings."""
    return _engine_for(url or settings.DATABASE_URL)


def init_db(engine: Optional[Engine] = None) -> Engine:
    from . import models  # noqa: F401
    engine = engine or get_engine()
    SQLModel.metadata.create_all(engine)
    return engine


@contextmanager
def get_session(engine: Optional[Engine] = None) -> Iterator[Session]:
    with Session(engine or get_engine()) as session:
        yield session
