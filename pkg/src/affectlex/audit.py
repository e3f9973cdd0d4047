"""Accounting of which documents the fitting code reads during cross-validation.

Fitting code calls `record_reads` with the ids of the rows it consumed. The
call is a no-op unless an `auditing` block is active in the current thread.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Iterator, Sequence
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field as dataclass_field
from enum import StrEnum
from threading import Lock

FoldKey = tuple[str, int, int]


class Phase(StrEnum):
    VOCABULARY = "vocabulary"
    SCALING = "scaling"
    TRAINING = "training"


@dataclass
class LeakAudit:
    """Counts which documents each fitting phase reads, per fold."""

    reads: dict[tuple[str, int, int, Phase], Counter[str]] = dataclass_field(
        default_factory=dict
    )
    held_out: dict[FoldKey, frozenset[str]] = dataclass_field(default_factory=dict)
    _lock: Lock = dataclass_field(default_factory=Lock, repr=False)

    def record_test(self, trait: str, seed: int, fold: int, ids: Sequence[str]) -> None:
        with self._lock:
            self.held_out[(trait, seed, fold)] = frozenset(ids)

    def record(
        self, trait: str, seed: int, fold: int, phase: Phase, ids: Iterable[str]
    ) -> None:
        with self._lock:
            self.reads.setdefault((trait, seed, fold, phase), Counter()).update(ids)

    def test_reads(self) -> dict[tuple[str, int, int, Phase], int]:
        """Number of held-out documents read by each fitting phase."""
        result = {}
        for (trait, seed, fold, phase), counter in self.reads.items():
            held_out = self.held_out.get((trait, seed, fold), frozenset())
            result[(trait, seed, fold, phase)] = sum(
                n for doc_id, n in counter.items() if doc_id in held_out
            )
        return result

    @property
    def clean(self) -> bool:
        return not any(self.test_reads().values())


_active: ContextVar[tuple[LeakAudit, FoldKey] | None] = ContextVar(
    "affectlex_audit", default=None
)


@contextmanager
def auditing(audit: LeakAudit | None, key: FoldKey) -> Iterator[None]:
    """Route `record_reads` calls in this thread to `audit` under `key`."""
    if audit is None:
        yield
        return
    token = _active.set((audit, key))
    try:
        yield
    finally:
        _active.reset(token)


def record_reads(phase: Phase, ids: Iterable[str]) -> None:
    active = _active.get()
    if active is not None:
        audit, key = active
        audit.record(*key, phase, ids)
