from typing import Dict, List
from uuid import UUID

from pydantic import BaseModel


class RunRecordOut(BaseModel):
    id: UUID
    command: str
    config_hash: str
    tool_version: str
    timestamp: str
    outputs: List[str]
    summary: Dict[str, object]

    model_config = {"from_attributes": True}
