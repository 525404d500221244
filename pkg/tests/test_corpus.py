from datetime import datetime, timezone

import pytest
from hypothesis import given, strategies as st

from anxmap.classifier import ClassLabel
from anxmap.corpus import (
    BadCoordinates,
    BadTimestamp,
    MalformedLine,
    Record,
    format_ts,
    parse_record,
    parse_ts,
    serialize_record,
)
from anxmap.tokenizer import Token


GOOD = '{"id":"t1","text":"불안 하","tokens":[["불안","NNG"],["하","VV"]],"label":1,"lat":37.5,"lon":127.0,"ts":"2017-04-03T12:00:00Z"}'


class TestParseRecord:
    def test_good_line(self):
        rec = parse_record(GOOD)
        assert rec.id == "t1"
        assert rec.tokens == (Token("불안", "NNG"), Token("하", "VV"))
        assert rec.label is ClassLabel.ANXIETY
        assert rec.ts == datetime(2017, 4, 3, 12, tzinfo=timezone.utc)

    def test_null_label(self):
        rec = parse_record(GOOD.replace('"label":1', '"label":null'))
        assert rec.label is None

    def test_label_zero(self):
        assert parse_record(GOOD.replace('"label":1', '"label":0')).label is ClassLabel.NON_ANXIETY

    @pytest.mark.parametrize(
        "mutation,error",
        [
            (lambda s: "not json", MalformedLine),
            (lambda s: '["array"]', MalformedLine),
            (lambda s: s.replace('"id":"t1",', ""), MalformedLine),
            (lambda s: s.replace('"id":"t1"', '"id":""'), MalformedLine),
            (lambda s: s.replace('"label":1', '"label":2'), MalformedLine),
            (lambda s: s.replace('"label":1', '"label":true'), MalformedLine),
            (lambda s: s.replace('[["불안","NNG"]', '[["불안"]'), MalformedLine),
            (lambda s: s.replace('["하","VV"]', '["하","vv"]'), MalformedLine),
            (lambda s: s.replace('"lat":37.5', '"lat":"north"'), MalformedLine),
            (lambda s: s.replace('"lat":37.5', '"lat":95.0'), BadCoordinates),
            (lambda s: s.replace('"lon":127.0', '"lon":-200.0'), BadCoordinates),
            (lambda s: s.replace("2017-04-03T12:00:00Z", "soon"), BadTimestamp),
            (lambda s: s.replace("2017-04-03T12:00:00Z", "2017-04-03T12:00:00+09:00"), BadTimestamp),
            (lambda s: s.replace("2017-04-03T12:00:00Z", "2017-04-03T12:00:00.5Z"), BadTimestamp),
        ],
    )
    def test_bad_lines(self, mutation, error):
        with pytest.raises(error):
            parse_record(mutation(GOOD))

    def test_utc_offset_form_accepted(self):
        rec = parse_record(GOOD.replace("2017-04-03T12:00:00Z", "2017-04-03T12:00:00+00:00"))
        assert format_ts(rec.ts) == "2017-04-03T12:00:00Z"


class TestTimestamps:
    def test_roundtrip(self):
        assert format_ts(parse_ts("2017-04-03T12:00:00Z")) == "2017-04-03T12:00:00Z"

    def test_rejects_naive(self):
        with pytest.raises(BadTimestamp):
            parse_ts("2017-04-03T12:00:00")


_surface = st.text(
    alphabet=st.characters(blacklist_categories=("Zs", "Zl", "Zp", "Cc", "Cs")),
    min_size=1,
    max_size=6,
).filter(lambda s: not any(ch.isspace() for ch in s))
_record = st.builds(
    Record,
    id=st.text(st.characters(min_codepoint=33, max_codepoint=126), min_size=1, max_size=12),
    text=st.text(max_size=30),
    tokens=st.lists(
        st.builds(Token, _surface, st.sampled_from(["NNG", "VV", "JKS"])), max_size=6
    ).map(tuple),
    label=st.sampled_from([None, ClassLabel.NON_ANXIETY, ClassLabel.ANXIETY]),
    lat=st.floats(min_value=-90.0, max_value=90.0, allow_nan=False),
    lon=st.floats(min_value=-180.0, max_value=180.0, allow_nan=False),
    ts=st.integers(min_value=0, max_value=2**31 - 1).map(
        lambda s: datetime.fromtimestamp(s, tz=timezone.utc)
    ),
)


class TestRoundTrip:
    @given(_record)
    def test_serialize_parse_identity(self, rec):
        """parse(serialize(r)) == r, slashes and unicode included."""
        assert parse_record(serialize_record(rec)) == rec

    @given(_record)
    def test_canonical_form_stable(self, rec):
        line = serialize_record(rec)
        assert serialize_record(parse_record(line)) == line
