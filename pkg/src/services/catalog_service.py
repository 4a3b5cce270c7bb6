"""Run catalog: manifests recorded through SQLAlchemy"""
import logging
from typing import Callable, List, Optional

from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.orm import Session

from ..database import Base, SessionLocal, engine
from ..dto.run import RunRecordOut
from ..dto.sweep import RunManifest
from ..model.run import RunRecord  # noqa: F401  (registers the table)
from ..repository.run_repository import RunRepository

log = logging.getLogger(__name__)


class CatalogService:
    def __init__(self, session_factory: Callable[[], Session] = SessionLocal, bind=None):
        self.session_factory = session_factory
        self.bind = bind if bind is not None else engine
        self.repo = RunRepository()

    def ensure_schema(self) -> None:
        Base.metadata.create_all(bind=self.bind)

    def record(self, manifest: RunManifest) -> Optional[RunRecordOut]:
        """Store a manifest; catalog failures never fail the run"""
        db = self.session_factory()
        try:
            self.ensure_schema()
            row = self.repo.create(db, manifest)
            log.info("Recorded run %s (%s) in catalog", row.id, manifest.command)
            return RunRecordOut.model_validate(row)
        except SQLAlchemyError as e:
            log.warning("Could not record run in catalog: %s", e)
            db.rollback()
            return None
        finally:
            db.close()

    def recent(self, limit: int = 20, config_hash: Optional[str] = None) -> List[RunRecordOut]:
        db = self.session_factory()
        try:
            self.ensure_schema()
            return [RunRecordOut.model_validate(r) for r in self.repo.recent(db, limit, config_hash)]
        finally:
            db.close()
