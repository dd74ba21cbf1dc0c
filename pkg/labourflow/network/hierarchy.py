"""Occupation classification hierarchy."""

from typing import Dict, Iterable, List, Optional, Tuple

from ..errors import InputError


class OccupationHierarchy:
    """Prefix-consistent occupation code tree (1-digit groups down to 4-digit codes)."""

    def __init__(self):
        self._parent: Dict[str, Optional[str]] = {}
        self.labels: Dict[str, str] = {}

    @classmethod
    def from_rows(cls, rows: Iterable[Tuple[str, str, str]]) -> 'OccupationHierarchy':
        """Build from ``(code, parent_code, label)`` rows; row numbers start at 1 after the header."""
        hierarchy = cls()
        for row_number, row in enumerate(rows, start=1):
            if len(row) != 3:
                raise InputError(f"Hierarchy row {row_number}: expected 3 fields, got {len(row)}")
            code, parent, label = (str(value).strip() for value in row)
            if not code or not code.isalnum():
                raise InputError(f"Hierarchy row {row_number}: invalid code {code!r}")
            if parent and not (code.startswith(parent) and len(parent) < len(code)):
                raise InputError(
                    f"Hierarchy row {row_number}: parent {parent!r} is not a prefix of {code!r}"
                )
            if not parent and len(code) != 1:
                parent = code[:-1]
            hierarchy._parent[code] = parent or None
            hierarchy.labels[code] = label
        hierarchy._derive_ancestors()
        return hierarchy

    @classmethod
    def from_codes(cls, codes: Iterable[str]) -> 'OccupationHierarchy':
        """Hierarchy implied by code prefixes alone."""
        return cls.from_rows((code, code[:-1], "") for code in codes)

    def _derive_ancestors(self):
        for code in list(self._parent):
            parent = self._parent[code]
            while parent is not None and parent not in self._parent:
                self._parent[parent] = parent[:-1] or None
                self.labels.setdefault(parent, "")
                parent = self._parent[parent]

    def __contains__(self, code: str) -> bool:
        return code in self._parent

    def __len__(self) -> int:
        return len(self._parent)

    @property
    def codes(self) -> List[str]:
        return sorted(self._parent)

    def parent(self, code: str) -> Optional[str]:
        return self._parent[code]

    @staticmethod
    def depth(code: str) -> int:
        return len(code)

    def ancestors(self, code: str) -> List[str]:
        chain = []
        parent = self._parent.get(code)
        while parent is not None:
            chain.append(parent)
            parent = self._parent.get(parent)
        return chain

    def leaves(self) -> List[str]:
        parents = {parent for parent in self._parent.values() if parent is not None}
        return sorted(code for code in self._parent if code not in parents)

    def label(self, code: str) -> str:
        return self.labels.get(code, "")
