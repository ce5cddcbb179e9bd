"""JSON verification report."""

from __future__ import annotations

import json
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

Status = Literal["exact-pass", "numeric-pass", "fail", "finding"]


class CheckRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: str
    paper_ref: str = Field(description="equation tag of the identity, \"invented\" for plumbing checks")
    anchor: str = Field(description="the formula as printed")
    status: Status
    tolerance: Optional[float] = None
    witness: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.status == "fail"


class Report(BaseModel):
    model_config = ConfigDict(extra="forbid")

    suite: str
    q: float
    seed: int
    window: int
    checks: list[CheckRecord] = Field(default_factory=list)

    @field_validator("checks")
    @classmethod
    def sort_checks(cls, value):
        ids = [check.id for check in value]
        if len(set(ids)) != len(ids):
            raise ValueError("check ids must be unique")
        return sorted(value, key=lambda check: check.id)

    @property
    def failed(self) -> bool:
        return any(check.failed for check in self.checks)

    def counts(self) -> dict:
        out = {}
        for check in self.checks:
            out[check.status] = out.get(check.status, 0) + 1
        return out

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json", exclude_none=True), indent=2, sort_keys=False) + "\n"
