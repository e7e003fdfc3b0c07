import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from geopack.models import HexConfig, hex_lattice_sites
from geopack.registry import (
    Registry,
    RegistryEntry,
    RegistryError,
    builtin_registry,
    compare,
    make_key,
)
from geopack.validator import Verdict, validate_hexagons

# (key, best, previous) exactly as printed in the published tables
PUBLISHED = [
    (("minmax", None, 16, 2), "12.88924", "12.88927"),
    (("minmax", None, 21, 2), "17.77499", "17.776"),
    (("minmax", None, 22, 2), "19.05398", "19.055"),
    (("minmax", None, 29, 2), "25.92460", "25.929"),
    (("minmax", None, 14, 3), "4.16578", "4.16585"),
    (("circles", "square", 32, None), "2.93957", "2.93794"),
    (("circles", "rectangle", 26, None), "2.63930", "2.638"),
    (("circles", "rectangle", 27, None), "2.69015", "2.687"),
    (("hexagons", None, 11, None), "3.92485", "3.93010"),
    (("hexagons", None, 12, None), "3.94165", "3.94192"),
    (("hexagons", None, 14, None), "4.26900", "4.27240"),
    (("hexagons", None, 15, None), "4.44769", "4.45406"),
    (("hexagons", None, 16, None), "4.52788", "4.53633"),
]


def _verdict(value: str, sense: str, feasible: bool = True) -> Verdict:
    return Verdict(feasible, 0.0, float(value), value if feasible else None, sense)


@pytest.mark.parametrize("key,best,prev", PUBLISHED)
def test_builtin_rows(key, best, prev):
    e = builtin_registry()[key]
    assert (e.best_value, e.previous_best) == (best, prev)
    assert e.source.startswith("table")


def test_builtin_has_only_published_rows():
    reg = builtin_registry()
    assert len(reg) == len(PUBLISHED)
    assert make_key("hexagons", 13) not in reg


def test_keys_canonical():
    assert make_key("minmax", 16) == ("minmax", None, 16, 2)
    assert make_key("circles", 26, d=5, variant="rectangle") == ("circles", "rectangle", 26, None)
    assert make_key("hexagons", 11, d=2, variant="square") == ("hexagons", None, 11, None)
    with pytest.raises(RegistryError):
        make_key("triangles", 3)


def test_round_trip_bytes():
    text = builtin_registry().dumps()
    assert Registry.loads(text).dumps() == text
    assert isinstance(json.loads(text), list)


def test_file_round_trip(tmp_path):
    path = tmp_path / "reg.json"
    builtin_registry().dump(path)
    first = path.read_bytes()
    Registry.load(path).dump(path)
    assert path.read_bytes() == first


@given(st.lists(st.tuples(st.integers(1, 60), st.integers(1000, 999999), st.integers(0, 5000)),
                unique_by=lambda t: t[0], max_size=8))
def test_round_trip_property(rows):
    reg = Registry(RegistryEntry("hexagons", None, n, None, f"{b / 1e5:.5f}",
                                 f"{(b + extra) / 1e5:.5f}", "test", "min")
                   for n, b, extra in rows)
    text = reg.dumps()
    assert Registry.loads(text).dumps() == text


def test_entry_invariants():
    with pytest.raises(RegistryError):  # best worse than previous under min
        RegistryEntry("hexagons", None, 3, None, "2.1", "2.0", "x", "min")
    with pytest.raises(RegistryError):
        RegistryEntry("circles", "square", 3, None, "0.1", "0.2", "x", "max")
    with pytest.raises(RegistryError):
        RegistryEntry("circles", "square", 3, None, "abc", "0.2", "x", "max")
    with pytest.raises(RegistryError):
        RegistryEntry("circles", None, 3, None, "0.3", "0.2", "x", "max")
    with pytest.raises(RegistryError):
        RegistryEntry("hexagons", None, 3, None, 2.0, "2.0", "x", "min")


def test_duplicate_keys_rejected():
    e = RegistryEntry("hexagons", None, 3, None, "2.0", "2.0", "x", "min")
    with pytest.raises(RegistryError):
        Registry([e, e])


def test_malformed_file():
    with pytest.raises(RegistryError):
        Registry.loads("{}")
    with pytest.raises(RegistryError):
        Registry.loads('[{"family": "hexagons"}]')
    with pytest.raises(RegistryError):
        Registry.loads("not json")


def test_compare_new_row():
    centers = hex_lattice_sites(13, math.sqrt(3))
    v = validate_hexagons(HexConfig(4.0, centers, [0.0] * 13))
    row = compare(v, make_key("hexagons", 13))
    assert row.status == "new"
    assert math.isnan(row.relative_gap)
    assert row.best_value is None


def test_compare_matched():
    row = compare(_verdict("12.88924", "min"), make_key("minmax", 16, 2))
    assert row.status == "matched"
    assert row.relative_gap == 0.0


def test_compare_improved_max():
    row = compare(_verdict("2.95000", "max"), make_key("circles", 32, variant="square"))
    assert row.status == "improved"
    assert row.relative_gap > 0  # larger than best: positive gap, better for max


def test_compare_worse_min():
    row = compare(_verdict("3.95000", "min"), make_key("hexagons", 11))
    assert row.status == "worse"
    assert row.relative_gap == pytest.approx((3.95 - 3.92485) / 3.92485)


def test_compare_improved_min_and_worse_max():
    assert compare(_verdict("3.90000", "min"), make_key("hexagons", 11)).status == "improved"
    assert compare(_verdict("2.60000", "max"),
                   make_key("circles", 26, variant="rectangle")).status == "worse"


def test_compare_rejects_infeasible():
    with pytest.raises(RegistryError):
        compare(_verdict("3.0", "min", feasible=False), make_key("hexagons", 11))


def test_compare_sense_mismatch():
    with pytest.raises(RegistryError):
        compare(_verdict("3.90000", "max"), make_key("hexagons", 11))
