"""QuadTorsion Facts Ledger
Provenance-tagged statements (ranks, torsion groups, witnesses, background theorems)
imported from the literature and consumed, never computed, by the classifier
"""

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from loguru import logger
from pydantic import BaseModel, ValidationError, field_validator

from src.core.errors import LedgerError

ALL_CURVES = "*"
RATIONAL_FIELD = 1


class FactKind(str, Enum):
    RANK_ZERO = "RANK_ZERO"
    RANK_POSITIVE = "RANK_POSITIVE"
    TORSION_GROUP = "TORSION_GROUP"
    APPEARS_WITNESS = "APPEARS_WITNESS"
    APPEARS_COUNT = "APPEARS_COUNT"
    TORSION_CUSPIDAL = "TORSION_CUSPIDAL"
    EXCLUDED = "EXCLUDED"
    BACKGROUND = "BACKGROUND"
    NOTE = "NOTE"


# fact_lookup without a kind prefers rank statements
_LOOKUP_PRIORITY = [FactKind.RANK_POSITIVE, FactKind.RANK_ZERO]


def normalize_curve_id(curve: str) -> str:
    """'X1_2_10', 'x1(2,10)' -> 'X1(2,10)'; '*' is kept"""
    if curve.strip() == ALL_CURVES:
        return ALL_CURVES
    cleaned = curve.strip().upper().replace(" ", "")
    match = re.fullmatch(r"X1[_(]?(\d+)(?:[_,](\d+))?\)?", cleaned)
    if not match:
        raise LedgerError(f"unrecognised curve id {curve!r}")
    m, n = match.group(1), match.group(2)
    return f"X1({m})" if n is None else f"X1({m},{n})"


class FactRecord(BaseModel):
    """Schema of one ledger line"""

    id: str
    curve: str
    d: Optional[int] = None
    kind: FactKind
    value: Optional[Union[int, List[int]]] = None
    except_d: List[int] = []
    topic: Optional[str] = None
    citation: str
    source: str = ""
    note: Optional[str] = None

    @field_validator("citation")
    @classmethod
    def citation_not_empty(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("citation must not be empty")
        return v

    @field_validator("curve")
    @classmethod
    def curve_known(cls, v: str) -> str:
        return normalize_curve_id(v)


@dataclass(frozen=True)
class FactEntry:
    """A ledger statement about a curve over Q(sqrt(d)); d None means every field, d = 1 means Q"""

    id: str
    curve: str
    d: Optional[int]
    kind: FactKind
    citation: str
    value: Any = None
    except_d: tuple = ()
    topic: Optional[str] = None
    source: str = ""
    note: Optional[str] = None

    @classmethod
    def from_record(cls, record: FactRecord) -> "FactEntry":
        value = tuple(record.value) if isinstance(record.value, list) else record.value
        return cls(record.id, record.curve, record.d, record.kind, record.citation, value,
                   tuple(record.except_d), record.topic, record.source, record.note)

    def applies_to(self, curve: str, d: Optional[int]) -> bool:
        if self.curve not in (curve, ALL_CURVES):
            return False
        if self.d is None:
            return d not in self.except_d
        return self.d == d

    def label(self) -> str:
        if self.kind == FactKind.RANK_POSITIVE and self.value is not None:
            return f"RANK_POSITIVE({self.value})"
        if self.kind == FactKind.TORSION_GROUP:
            m, n = self.value
            return f"TORSION_GROUP(Z/{n})" if m == 1 else f"TORSION_GROUP(Z/{m} x Z/{n})"
        if self.kind == FactKind.APPEARS_COUNT:
            return f"APPEARS_COUNT({self.value})"
        return self.kind.value

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "id": self.id,
            "curve": self.curve,
            "d": self.d,
            "kind": self.kind.value,
            "label": self.label(),
            "citation": self.citation,
            "source": self.source,
        }
        if self.value is not None:
            data["value"] = list(self.value) if isinstance(self.value, tuple) else self.value
        if self.note:
            data["note"] = self.note
        return data


@dataclass
class FactLedger:
    """Immutable collection of FactEntry loaded from a JSON-lines file"""

    entries: List[FactEntry] = field(default_factory=list)
    path: Optional[Path] = None

    @classmethod
    def load(cls, path: Union[str, Path]) -> "FactLedger":
        path = Path(path)
        if not path.exists():
            raise LedgerError(f"facts ledger not found at {path}")

        entries = []
        with open(path, "r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                try:
                    record = FactRecord.model_validate(json.loads(line))
                except (json.JSONDecodeError, ValidationError, LedgerError) as e:
                    logger.warning(f"Skipping malformed ledger line {path}:{lineno}: {e}")
                    continue
                entries.append(FactEntry.from_record(record))

        ids = [e.id for e in entries]
        duplicates = {i for i in ids if ids.count(i) > 1}
        if duplicates:
            raise LedgerError(f"duplicate ledger ids: {sorted(duplicates)}")

        logger.info(f"Loaded {len(entries)} ledger facts from {path}")
        return cls(entries, path)

    def lookup(self, curve: str, d: Optional[int], kind: Optional[FactKind] = None) -> List[FactEntry]:
        """Facts about curve over Q(sqrt(d)); field-specific entries come before general ones"""
        curve = normalize_curve_id(curve)
        matches = [e for e in self.entries
                   if e.applies_to(curve, d) and (kind is None or e.kind == kind)]
        return sorted(matches, key=lambda e: e.d is None)

    def first(self, curve: str, d: Optional[int], kind: FactKind) -> Optional[FactEntry]:
        matches = self.lookup(curve, d, kind)
        return matches[0] if matches else None

    def background(self, topic: str, curve: str = ALL_CURVES,
                   d: Optional[int] = None) -> Optional[FactEntry]:
        for entry in self.lookup(curve, d, FactKind.BACKGROUND):
            if entry.topic == topic:
                return entry
        return None

    def by_id(self, fact_id: str) -> FactEntry:
        for entry in self.entries:
            if entry.id == fact_id:
                return entry
        raise LedgerError(f"no ledger fact with id {fact_id!r}")

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


_ledger_cache: Dict[Path, FactLedger] = {}


def get_ledger(path: Optional[Union[str, Path]] = None) -> FactLedger:
    """Ledger at path (default: the configured one), loaded once per path"""
    if path is None:
        from src.core.config import get_settings
        path = get_settings().ledger_file
    path = Path(path).resolve()
    if path not in _ledger_cache:
        _ledger_cache[path] = FactLedger.load(path)
    return _ledger_cache[path]


def fact_lookup(curve: str, d: Optional[int], kind: Optional[FactKind] = None,
                ledger: Optional[FactLedger] = None) -> Optional[FactEntry]:
    """The ledger entry for (curve, d), rank statements first, or None"""
    ledger = ledger or get_ledger()
    matches = ledger.lookup(curve, d, kind)
    if not matches:
        return None
    if kind is None:
        for preferred in _LOOKUP_PRIORITY:
            for entry in matches:
                if entry.kind == preferred:
                    return entry
    return matches[0]
