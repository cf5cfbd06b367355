import json

import pytest

from destab import modlib, steenrod
from destab.amodule import is_unstable, validate
from destab.errors import ParseError, UnknownName, ValidationError


@pytest.mark.parametrize("name", modlib.FIXTURES)
def test_fixtures_validate(name):
    validate(modlib.builtin(name))


@pytest.mark.parametrize("name", modlib.FIXTURES)
def test_fixture_files_match_code(name):
    m = modlib.load(modlib.fixture_path(name))
    assert m == modlib.builtin(name)
    assert m.name == modlib.builtin(name).name


def test_rp_formula():
    m = modlib.rp(4)
    # a_k Sq^i = binom(k - i, i) a_{k-i}
    assert m.act(1, 1, 2) == 1
    assert m.act(1, 1, 3) == 0
    assert m.act(1, 2, 3) == 0
    assert m.act(1, 1, 4) == 1
    assert m.act(1, 2, 4) == 1
    assert is_unstable(m)


def test_rp4_ext():
    m = modlib.rp4_ext()
    assert [m.labels(d) for d in range(1, 6)] == [["a1"], ["a2", "b1"], ["a3", "b2"], ["a4", "b3"], ["b4"]]
    assert is_unstable(m)


def test_dual_steenrod_dims():
    m = modlib.dual_steenrod(16)
    assert [m.dim(n) for n in range(17)] == steenrod.poincare_series(16)
    assert m.labels(3) == ["Sq3*", "Sq2Sq1*"]


def test_dual_hz_dims():
    # A/A Sq^1 has basis the admissible words not ending in 1
    m = modlib.dual_hz(16)
    expect = [sum(1 for w in steenrod.admissible_basis(n) if w[-1:] != (1,)) for n in range(17)]
    assert [m.dim(n) for n in range(17)] == expect


def test_dual_hz2r():
    a = modlib.dual_hz(12)
    m = modlib.dual_hz2r(12)
    for n in range(13):
        assert m.dim(n) == a.dim(n) + a.dim(n - 1)
    validate(m)


def test_dualize_annihilates_ideal():
    m = modlib.dualize([(1,)], 8)
    full = modlib.dual_steenrod(8)
    # the sub is closed and has the right size
    assert m.total_dim() < full.total_dim()
    validate(m)


def test_builtin_names():
    assert modlib.builtin("builtin:sphere:3") == modlib.sphere(3)
    s = modlib.builtin("cp2-desusp@2")
    assert s.degrees() == [3, 5]
    assert modlib.builtin("dual-hz", max_degree=6) == modlib.dual_hz(6)
    for bad in ["nope", "rp:x", "rp:0", "dual-hz", "dual-steenrod:99", "sphere:1@q"]:
        with pytest.raises(UnknownName):
            modlib.builtin(bad)


def test_roundtrip(tmp_path):
    for name in modlib.FIXTURES:
        m = modlib.builtin(name)
        p = tmp_path / "m.json"
        modlib.save(m, p)
        assert modlib.load(p) == m


def _write(tmp_path, data):
    p = tmp_path / "m.json"
    p.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return p


@pytest.mark.parametrize(
    "data",
    [
        "{not json",
        [],
        {"name": "m", "generators": [], "extra": 1},
        {"generators": []},
        {"name": "m", "generators": [{"id": "x"}]},
        {"name": "m", "generators": [{"id": "x", "deg": 1}, {"id": "x", "deg": 2}]},
        {"name": "m", "generators": [{"id": "x", "deg": 1}], "actions": [{"sq": 1, "on": "x", "value": ["y"]}]},
        {"name": "m", "generators": [{"id": "x", "deg": 1}], "actions": [{"sq": 0, "on": "x", "value": []}]},
        {"name": "m", "max_degree": "3", "generators": []},
    ],
)
def test_parse_errors(tmp_path, data):
    with pytest.raises(ParseError):
        modlib.load(_write(tmp_path, data))


def test_invalid_module_file(tmp_path):
    data = {
        "name": "bad",
        "generators": [{"id": "x", "deg": 2}, {"id": "y", "deg": 1}, {"id": "z", "deg": 0}],
        "actions": [{"sq": 1, "on": "x", "value": ["y"]}, {"sq": 1, "on": "y", "value": ["z"]}],
    }
    with pytest.raises(ValidationError):
        modlib.load(_write(tmp_path, data))
    # loading without the check still parses
    assert modlib.load(_write(tmp_path, data), check=False).total_dim() == 3


def test_degree_mismatch_is_validation_error(tmp_path):
    data = {"name": "m", "generators": [{"id": "x", "deg": 3}, {"id": "y", "deg": 1}],
            "actions": [{"sq": 1, "on": "x", "value": ["y"]}]}
    with pytest.raises(ValidationError):
        modlib.load(_write(tmp_path, data))


def test_resolve():
    assert modlib.resolve("builtin:rp:3") == modlib.rp(3)
    assert modlib.resolve(str(modlib.fixture_path("rp:3"))) == modlib.rp(3)
