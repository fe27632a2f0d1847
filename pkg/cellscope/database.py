"""SQLite database configuration and connection management for the result store."""

from __future__ import annotations

import logging
import os
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any

from sqlalchemy import Engine, MetaData, create_engine, event
from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.orm import DeclarativeBase, Session, sessionmaker

from cellscope.errors import StoreUnwritable

logger = logging.getLogger("cellscope.database")

MEMORY = ":memory:"


class Base(DeclarativeBase):
    """Base class for all SQLAlchemy models."""

    metadata = MetaData(
        naming_convention={
            "ix": "ix_%(column_0_label)s",
            "uq": "uq_%(table_name)s_%(column_0_name)s",
            "ck": "ck_%(table_name)s_%(constraint_name)s",
            "fk": "fk_%(table_name)s_%(column_0_name)s_%(referred_table_name)s",
            "pk": "pk_%(table_name)s",
        }
    )


def _configure_sqlite(dbapi_connection: Any, _record: Any) -> None:
    cursor = dbapi_connection.cursor()
    # readers see committed snapshots while the single writer appends
    cursor.execute("PRAGMA journal_mode=WAL")
    cursor.execute("PRAGMA foreign_keys=ON")
    cursor.close()


class DatabaseManager:
    """Owns the engine and session factory of one store file."""

    def __init__(self, path: str) -> None:
        self.path = path
        self.engine: Engine | None = None
        self.session_factory: sessionmaker[Session] | None = None

    def get_database_url(self) -> str:
        if self.path == MEMORY:
            return "sqlite://"
        return f"sqlite:///{Path(self.path).resolve()}"

    def initialize(self) -> None:
        """Create the engine and any missing tables."""
        if self.path != MEMORY:
            try:
                Path(self.path).resolve().parent.mkdir(parents=True, exist_ok=True)
            except OSError as e:
                raise StoreUnwritable(self.path, str(e)) from e
        try:
            self.engine = create_engine(
                self.get_database_url(),
                echo=os.getenv("CELLSCOPE_SQL_ECHO", "false").lower() == "true",
            )
            event.listen(self.engine, "connect", _configure_sqlite)
            Base.metadata.create_all(self.engine)
        except SQLAlchemyError as e:
            self.engine = None
            raise StoreUnwritable(self.path, str(getattr(e, "orig", None) or e)) from e
        self.session_factory = sessionmaker(bind=self.engine, expire_on_commit=False)
        logger.debug("Opened result store %s", self.path)

    @contextmanager
    def session(self) -> Iterator[Session]:
        """Session committed on success and rolled back on error."""
        if self.session_factory is None:
            raise RuntimeError("Database not initialized")
        with self.session_factory() as session:
            try:
                yield session
                session.commit()
            except Exception:
                session.rollback()
                raise

    def close(self) -> None:
        if self.engine is not None:
            self.engine.dispose()
            logger.debug("Closed result store %s", self.path)

    @property
    def is_available(self) -> bool:
        return self.engine is not None and self.session_factory is not None


__all__ = ["Base", "DatabaseManager"]
