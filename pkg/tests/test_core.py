import numpy as np

from attrank.core import (
    Dataset,
    DisplayType,
    ItemRecord,
    SellerClass,
    SessionRecord,
    validate,
)
from attrank.features import BowHistogram


def make_item(item_id, **kw):
    kw.setdefault("display_type", DisplayType.PERSON)
    return ItemRecord(item_id, **kw)


class TestValidate:
    def test_empty_dataset_is_valid(self):
        report = validate(Dataset())
        assert report.is_valid
        assert len(report) == 0

    def test_session_referencing_missing_item(self):
        ds = Dataset(
            items=[make_item("a1")],
            sessions=[SessionRecord("s1", ["a1", "x9"])],
        )
        report = validate(ds)
        assert not report.is_valid
        assert len(report) == 1
        assert "x9" in report.violations[0].message
        assert report.violations[0].code == "unknown-item"

    def test_clicked_item_not_displayed(self):
        ds = Dataset(
            items=[make_item("a1"), make_item("a2")],
            sessions=[SessionRecord("s1", ["a1"], clicked=["a2"])],
        )
        report = validate(ds)
        codes = [v.code for v in report]
        assert codes == ["click-not-displayed"]

    def test_purchase_must_be_clicked(self):
        ds = Dataset(
            items=[make_item("a1")],
            sessions=[SessionRecord("s1", ["a1"], clicked=[], purchased=["a1"])],
        )
        assert [v.code for v in validate(ds)] == ["purchase-not-clicked"]

    def test_negative_price_and_watch(self):
        ds = Dataset(items=[make_item("a1", price_cents=-5, watch_count=-1)])
        codes = sorted(v.code for v in validate(ds))
        assert codes == ["negative-price", "negative-watch"]

    def test_duplicate_display_and_empty_session(self):
        ds = Dataset(
            items=[make_item("a1")],
            sessions=[SessionRecord("s1", ["a1", "a1"]), SessionRecord("s2", [])],
        )
        codes = {v.code for v in validate(ds)}
        assert "duplicate-display" in codes
        assert "empty-session" in codes

    def test_dangling_feature_ref(self):
        ds = Dataset(items=[make_item("a1", feature_ref="a1")])
        assert [v.code for v in validate(ds)] == ["dangling-feature-ref"]
        ok = Dataset(
            items=[make_item("a1", feature_ref="a1")],
            features={"a1": BowHistogram(np.array([1.0]), 1)},
        )
        assert validate(ok).is_valid

    def test_idempotent_and_pure(self):
        ds = Dataset(
            items=[make_item("a1", price_cents=-1)],
            sessions=[SessionRecord("s1", ["a1", "zz"])],
        )
        first = validate(ds)
        second = validate(ds)
        assert first == second
        assert ds.items["a1"].price_cents == -1  # unchanged

    def test_item_may_appear_in_many_sessions(self):
        ds = Dataset(
            items=[make_item("a1")],
            sessions=[SessionRecord("s1", ["a1"]), SessionRecord("s2", ["a1"])],
        )
        assert validate(ds).is_valid


class TestTypes:
    def test_display_type_ordering(self):
        assert DisplayType.PERSON < DisplayType.MANNEQUIN < DisplayType.FLAT
        assert [t.value for t in DisplayType] == [0, 1, 2]

    def test_display_type_codes(self):
        assert DisplayType.from_code("P") is DisplayType.PERSON
        assert DisplayType.from_code("m") is DisplayType.MANNEQUIN
        assert DisplayType.from_code("U") is None

    def test_session_normalizes_collections(self):
        s = SessionRecord("s", ["a", "b"], clicked=["b"], purchased=[])
        assert s.displayed == ("a", "b")
        assert s.clicked == frozenset({"b"})
        assert len(s) == 2

    def test_seller_class_values(self):
        assert SellerClass("casual") is SellerClass.CASUAL
        assert SellerClass("top") is SellerClass.TOP
