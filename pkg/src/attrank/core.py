"""Canonical data model: display types, items, sessions and datasets.

Datasets are treated as immutable after construction; all analytics and
re-ranking operations only read them, so concurrent readers are safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

if TYPE_CHECKING:
    from .features import BowHistogram


class DisplayType(IntEnum):
    """The three clothing display types, ordered for deterministic tie-breaking.

    Person < Mannequin < Flat; the integer value doubles as the canonical
    index used by weight vectors and score triples.
    """

    PERSON = 0
    MANNEQUIN = 1
    FLAT = 2

    @property
    def code(self) -> str:
        return {0: "P", 1: "M", 2: "F"}[self.value]

    @classmethod
    def from_code(cls, code: str) -> "DisplayType | None":
        """Parse a one-letter code; ``U`` means unknown and maps to ``None``."""
        table = {"P": cls.PERSON, "M": cls.MANNEQUIN, "F": cls.FLAT, "U": None}
        try:
            return table[code.upper()]
        except KeyError:
            raise ValueError(f"unknown display type code: {code!r}") from None


DISPLAY_TYPES: tuple[DisplayType, DisplayType, DisplayType] = (
    DisplayType.PERSON,
    DisplayType.MANNEQUIN,
    DisplayType.FLAT,
)


class SellerClass(Enum):
    CASUAL = "casual"
    TOP = "top"


@dataclass(frozen=True)
class ItemRecord:
    """One listing.

    ``display_type`` is ``None`` until classification resolves it; operations
    that need a resolved type reject unresolved items.  ``sold`` is an
    item-level flag independent of sessions, since a sale can happen outside
    any observed session.
    """

    item_id: str
    display_type: DisplayType | None = None
    price_cents: int = 0
    seller_class: SellerClass = SellerClass.CASUAL
    watch_count: int = 0
    sold: bool = False
    feature_ref: str | None = None


@dataclass(frozen=True)
class SessionRecord:
    """One search impression: the displayed ranking plus user responses."""

    session_id: str
    displayed: tuple[str, ...]
    clicked: frozenset[str] = frozenset()
    purchased: frozenset[str] = frozenset()

    def __init__(
        self,
        session_id: str,
        displayed: Sequence[str],
        clicked: Iterable[str] = (),
        purchased: Iterable[str] = (),
    ) -> None:
        object.__setattr__(self, "session_id", session_id)
        object.__setattr__(self, "displayed", tuple(displayed))
        object.__setattr__(self, "clicked", frozenset(clicked))
        object.__setattr__(self, "purchased", frozenset(purchased))

    def __len__(self) -> int:
        return len(self.displayed)


@dataclass(frozen=True)
class Dataset:
    """Items, sessions and per-item features, keyed consistently.

    Construction does not validate cross references; run :func:`validate`
    to obtain a report of every violated invariant.
    """

    items: Mapping[str, ItemRecord] = field(default_factory=dict)
    sessions: tuple[SessionRecord, ...] = ()
    features: Mapping[str, "BowHistogram"] = field(default_factory=dict)

    def __init__(
        self,
        items: Mapping[str, ItemRecord] | Iterable[ItemRecord] = (),
        sessions: Iterable[SessionRecord] = (),
        features: Mapping[str, "BowHistogram"] | None = None,
    ) -> None:
        if not isinstance(items, Mapping):
            items = {it.item_id: it for it in items}
        object.__setattr__(self, "items", dict(items))
        object.__setattr__(self, "sessions", tuple(sessions))
        object.__setattr__(self, "features", dict(features or {}))


@dataclass(frozen=True)
class Violation:
    """A single broken invariant, naming the offending item or session."""

    code: str
    subject: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def is_valid(self) -> bool:
        return not self.violations

    def __iter__(self):
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)


def validate(dataset: Dataset) -> ValidationReport:
    """Check every structural invariant of ``dataset``.

    Violations are returned as data, never raised; the dataset is not
    modified, so repeated calls return identical reports.
    """
    out: list[Violation] = []

    for key, item in dataset.items.items():
        if not item.item_id:
            out.append(Violation("empty-item-id", key, "item has an empty id"))
        elif key != item.item_id:
            out.append(
                Violation("key-mismatch", key, f"keyed as {key!r} but item_id is {item.item_id!r}")
            )
        if item.price_cents < 0:
            out.append(
                Violation("negative-price", item.item_id, f"price_cents is {item.price_cents}")
            )
        if item.watch_count < 0:
            out.append(
                Violation("negative-watch", item.item_id, f"watch_count is {item.watch_count}")
            )
        if item.feature_ref is not None and item.feature_ref not in dataset.features:
            out.append(
                Violation(
                    "dangling-feature-ref",
                    item.item_id,
                    f"feature_ref {item.feature_ref!r} does not resolve",
                )
            )

    seen_sessions: set[str] = set()
    for sess in dataset.sessions:
        sid = sess.session_id
        if not sid:
            out.append(Violation("empty-session-id", sid, "session has an empty id"))
        if sid in seen_sessions:
            out.append(Violation("duplicate-session-id", sid, "session id appears twice"))
        seen_sessions.add(sid)
        if len(sess.displayed) < 1:
            out.append(Violation("empty-session", sid, "session displays no items"))
        if len(set(sess.displayed)) != len(sess.displayed):
            out.append(Violation("duplicate-display", sid, "an item is displayed twice"))
        for item_id in sess.displayed:
            if item_id not in dataset.items:
                out.append(
                    Violation(
                        "unknown-item", sid, f"displayed item {item_id!r} is not in the dataset"
                    )
                )
        for item_id in sess.clicked - set(sess.displayed):
            out.append(
                Violation("click-not-displayed", sid, f"clicked item {item_id!r} was not displayed")
            )
        for item_id in sess.purchased - sess.clicked:
            out.append(
                Violation(
                    "purchase-not-clicked", sid, f"purchased item {item_id!r} was not clicked"
                )
            )

    return ValidationReport(tuple(out))
