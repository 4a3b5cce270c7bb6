from sqlalchemy import JSON, Column, String, Uuid
from ..database import Base
import uuid


class RunRecord(Base):
    __tablename__ = "runs"

    id = Column(Uuid(as_uuid=True), primary_key=True, default=uuid.uuid4)
    command = Column(String(64), nullable=False)
    config_hash = Column(String(64), nullable=False, index=True)
    tool_version = Column(String(32), nullable=False)
    timestamp = Column(String(40), nullable=False)  # UTC ISO-8601
    outputs = Column(JSON, nullable=False, default=list)
    summary = Column(JSON, nullable=False, default=dict)
