from typing import List, Optional
from sqlmodel import Session, select

from .models import GroundStateEntry


def get_entry(session: Session, key: str) -> Optional[GroundStateEntry]:
    return session.exec(select(GroundStateEntry).where(GroundStateEntry.key == key)).first()


def create_entry(session: Session, entry: GroundStateEntry) -> GroundStateEntry:
    """Insert, replacing any existing row with the same key."""
    old = get_entry(session, entry.key)
    if old is not None:
        session.delete(old)
        session.flush()
    session.add(entry)
    session.commit()
    session.refresh(entry)
    return entry


def list_entries(session: Session, limit: int = 100) -> List[GroundStateEntry]:
    return list(session.exec(select(GroundStateEntry).order_by(GroundStateEntry.mu).limit(limit)).all())


def delete_entry(session: Session, key: str) -> bool:
    entry = get_entry(session, key)
    if entry is None:
        return False
    session.delete(entry)
    session.commit()
    return True
