from typing import List, Optional
from sqlalchemy.orm import Session
from ..model.run import RunRecord
from ..dto.sweep import RunManifest
from .base import BaseRepository


class RunRepository(BaseRepository[RunRecord, RunManifest]):
    def __init__(self):
        super().__init__(RunRecord)

    def recent(self, db: Session, limit: int = 20, config_hash: Optional[str] = None) -> List[RunRecord]:
        query = db.query(RunRecord)
        if config_hash:
            query = query.filter(RunRecord.config_hash.startswith(config_hash))
        return query.order_by(RunRecord.timestamp.desc()).limit(limit).all()

    def get_by_config_hash(self, db: Session, config_hash: str) -> List[RunRecord]:
        return self.get_multi_by_field(db, "config_hash", config_hash)
