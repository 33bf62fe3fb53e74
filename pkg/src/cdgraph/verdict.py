"""The structured result of one executable check."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

HOLDS = "holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"
NOT_APPLICABLE = "not-applicable"


@dataclass
class Verdict:
    check_id: str
    group: str
    prime: int | list[int] | None
    hypothesis: str = HOLDS
    conclusion: str = NOT_APPLICABLE
    witnesses: dict = field(default_factory=dict)
    elapsed_ms: float = 0.0

    def __post_init__(self):
        if self.hypothesis == FAILS:
            self.conclusion = NOT_APPLICABLE

    @property
    def failed(self) -> bool:
        return self.conclusion == FAILS

    def to_json(self, timing: bool = True) -> dict:
        out = asdict(self)
        if not timing:
            out.pop("elapsed_ms")
        return out

    def dumps(self, timing: bool = True) -> str:
        return json.dumps(self.to_json(timing), sort_keys=True)
