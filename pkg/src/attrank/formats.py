"""Line-oriented file formats and the dataset bundle.

All writers are canonical: rows sorted by id, JSON keys sorted, floats via
``repr``, LF line endings.  Re-exporting an ingested bundle reproduces the
original bytes, which is what the pipeline's determinism contract rests on.

Schemas
-------
items.csv        item_id,display_type,price_cents,seller_class,watch_count,sold
                 display_type in {P,M,F,U}; seller_class in {casual,top}; sold in {0,1}
sessions.jsonl   {"session_id": ..., "displayed": [...], "clicked": [...], "purchased": [...]}
features.jsonl   {"item_id": ..., "bins": [...], "descriptor_count": n}
                 (descriptor_count optional on read: inferred 1 when bins are nonzero)
observations.jsonl  {"gamma": [...], "eta": [...]}
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .choicemodel import Observation, UrnConfig, WeightVector
from .core import Dataset, DisplayType, ItemRecord, SellerClass, SessionRecord
from .errors import DomainError
from .features import BowHistogram

ITEM_COLUMNS = ("item_id", "display_type", "price_cents", "seller_class", "watch_count", "sold")


class FormatError(DomainError):
    """Malformed input file; carries file, line and field context."""

    def __init__(self, path: str | Path, line: int, field: str, message: str) -> None:
        self.path = str(path)
        self.line = line
        self.field = field
        super().__init__(f"{path}:{line}: field {field!r}: {message}")


def _json_line(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def read_items_csv(path: str | Path) -> dict[str, ItemRecord]:
    items: dict[str, ItemRecord] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is not None and tuple(reader.fieldnames) != ITEM_COLUMNS:
            raise FormatError(path, 1, "header", f"expected columns {','.join(ITEM_COLUMNS)}")
        for lineno, row in enumerate(reader, start=2):
            def parse(field: str, conv, check=None):
                raw = row.get(field)
                if raw is None or raw == "":
                    raise FormatError(path, lineno, field, "missing value")
                try:
                    val = conv(raw)
                except (ValueError, KeyError) as exc:
                    raise FormatError(path, lineno, field, str(exc)) from None
                if check is not None and not check(val):
                    raise FormatError(path, lineno, field, f"invalid value {raw!r}")
                return val

            item_id = parse("item_id", str, lambda s: bool(s))
            if item_id in items:
                raise FormatError(path, lineno, "item_id", f"duplicate id {item_id!r}")
            items[item_id] = ItemRecord(
                item_id=item_id,
                display_type=parse("display_type", DisplayType.from_code),
                price_cents=parse("price_cents", int, lambda v: v >= 0),
                seller_class=parse("seller_class", lambda s: SellerClass(s.lower())),
                watch_count=parse("watch_count", int, lambda v: v >= 0),
                sold=bool(parse("sold", int, lambda v: v in (0, 1))),
            )
    return items


def write_items_csv(path: str | Path, items: dict[str, ItemRecord]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ITEM_COLUMNS)
    for item_id in sorted(items):
        it = items[item_id]
        writer.writerow(
            [
                it.item_id,
                it.display_type.code if it.display_type is not None else "U",
                it.price_cents,
                it.seller_class.value,
                it.watch_count,
                int(it.sold),
            ]
        )
    Path(path).write_text(buf.getvalue())


def read_sessions_jsonl(path: str | Path) -> list[SessionRecord]:
    sessions = []
    seen: set[str] = set()
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(path, lineno, "-", f"invalid JSON: {exc}") from None
            for field in ("session_id", "displayed"):
                if field not in rec:
                    raise FormatError(path, lineno, field, "missing")
            sid = str(rec["session_id"])
            if sid in seen:
                raise FormatError(path, lineno, "session_id", f"duplicate id {sid!r}")
            seen.add(sid)
            sessions.append(
                SessionRecord(
                    sid,
                    [str(x) for x in rec["displayed"]],
                    [str(x) for x in rec.get("clicked", [])],
                    [str(x) for x in rec.get("purchased", [])],
                )
            )
    return sessions


def write_sessions_jsonl(path: str | Path, sessions: Sequence[SessionRecord]) -> None:
    with open(path, "w") as fh:
        for sess in sorted(sessions, key=lambda s: s.session_id):
            fh.write(
                _json_line(
                    {
                        "session_id": sess.session_id,
                        "displayed": list(sess.displayed),
                        "clicked": sorted(sess.clicked),
                        "purchased": sorted(sess.purchased),
                    }
                )
            )


def read_features_jsonl(path: str | Path) -> dict[str, BowHistogram]:
    feats: dict[str, BowHistogram] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(path, lineno, "-", f"invalid JSON: {exc}") from None
            for field in ("item_id", "bins"):
                if field not in rec:
                    raise FormatError(path, lineno, field, "missing")
            item_id = str(rec["item_id"])
            if item_id in feats:
                raise FormatError(path, lineno, "item_id", f"duplicate id {item_id!r}")
            bins = np.asarray(rec["bins"], dtype=np.float64)
            count = rec.get("descriptor_count")
            if count is None:
                count = 1 if bins.sum() > 0 else 0
            try:
                feats[item_id] = BowHistogram(bins, int(count))
            except DomainError as exc:
                raise FormatError(path, lineno, "bins", str(exc)) from None
    return feats


def write_features_jsonl(path: str | Path, features: dict[str, BowHistogram]) -> None:
    with open(path, "w") as fh:
        for item_id in sorted(features):
            h = features[item_id]
            fh.write(
                _json_line(
                    {
                        "item_id": item_id,
                        "bins": [float(b) for b in h.bins],
                        "descriptor_count": h.descriptor_count,
                    }
                )
            )


def read_observations_jsonl(path: str | Path) -> list[Observation]:
    obs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(path, lineno, "-", f"invalid JSON: {exc}") from None
            for field in ("gamma", "eta"):
                if field not in rec:
                    raise FormatError(path, lineno, field, "missing")
            try:
                obs.append(Observation(UrnConfig(rec["gamma"], sum(rec["eta"])), rec["eta"]))
            except DomainError as exc:
                raise FormatError(path, lineno, "eta", str(exc)) from None
    return obs


def write_observations_jsonl(path: str | Path, observations: Iterable[Observation]) -> None:
    with open(path, "w") as fh:
        for ob in observations:
            fh.write(_json_line({"gamma": list(ob.config.gamma), "eta": list(ob.eta)}))


def write_weights_json(path: str | Path, omega: WeightVector, method: str) -> None:
    payload = {
        "format": "attrank-weights",
        "version": 1,
        "method": method,
        "omega": {t.name.lower(): float(omega.for_type(t)) for t in DisplayType},
    }
    write_json(path, payload)


def read_weights_json(path: str | Path) -> WeightVector:
    payload = json.loads(Path(path).read_text())
    if payload.get("format") != "attrank-weights":
        raise DomainError(f"{path}: not a weights document")
    om = payload["omega"]
    return WeightVector([om["person"], om["mannequin"], om["flat"]])


def write_json(path: str | Path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


BUNDLE_ITEMS = "items.csv"
BUNDLE_SESSIONS = "sessions.jsonl"
BUNDLE_FEATURES = "features.jsonl"
BUNDLE_META = "bundle.json"


def save_bundle(directory: str | Path, dataset: Dataset) -> None:
    """Persist a dataset as a versioned directory bundle."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    write_items_csv(d / BUNDLE_ITEMS, dict(dataset.items))
    write_sessions_jsonl(d / BUNDLE_SESSIONS, dataset.sessions)
    if dataset.features:
        write_features_jsonl(d / BUNDLE_FEATURES, dict(dataset.features))
    write_json(
        d / BUNDLE_META,
        {
            "format": "attrank-bundle",
            "version": 1,
            "items": len(dataset.items),
            "sessions": len(dataset.sessions),
            "features": len(dataset.features),
        },
    )


def load_bundle(directory: str | Path) -> Dataset:
    d = Path(directory)
    meta = json.loads((d / BUNDLE_META).read_text())
    if meta.get("format") != "attrank-bundle":
        raise DomainError(f"{directory}: not a dataset bundle")
    items = read_items_csv(d / BUNDLE_ITEMS)
    sessions = read_sessions_jsonl(d / BUNDLE_SESSIONS)
    features = (
        read_features_jsonl(d / BUNDLE_FEATURES) if (d / BUNDLE_FEATURES).exists() else {}
    )
    return Dataset(items, sessions, features)
