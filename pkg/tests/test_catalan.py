import json
from math import comb

import pytest

from bicat.catalan import (
    IDENTITIES,
    bicat_integer,
    bicat_q,
    bicat_q_states,
    binar_coefficients,
    cat_gf_dp_check,
    cat_plus_q,
    cat_plusplus_q,
    cat_q,
    decompose_parabolic,
    diagram,
    doubled_q,
    f_polynomial,
    no_simple_antichain_q,
    table_record,
    tables_json,
    tables_markdown,
    verify_identity,
)
from bicat.errors import ConsistencyError, MissingTable, UnknownIdentity
from bicat.poset import ONE, Q, QPoly
from bicat.roots import CartanSpec, build_root_system, parse_spec, type_spec

A = lambda n: CartanSpec("A", n)  # noqa: E731


def test_decompose_examples():
    e8 = diagram("E8")
    assert decompose_parabolic(e8, set(range(8)) - {7}) == (CartanSpec("E", 7),)
    assert decompose_parabolic(e8, set(range(8)) - {3}) == (A(1), A(2), A(4))
    assert decompose_parabolic(e8, set(range(8)) - {0}) == (CartanSpec("D", 7),)
    assert decompose_parabolic(diagram("B4"), {0, 1, 3}) == (A(1), A(2))
    assert decompose_parabolic(diagram("F4"), {1, 2}) == (CartanSpec("B", 2),)
    assert decompose_parabolic(diagram("H4"), {0, 1, 2}) == (CartanSpec("H", 3),)
    assert decompose_parabolic(diagram("D5"), set()) == ()


def _root_count(s):
    return s.m if s.family == "I" else len(build_root_system(s).positive_roots)


@pytest.mark.parametrize("name", ["A5", "B5", "D6", "E6", "E7", "E8", "F4", "G2", "H3", "H4", "I2(7)"])
def test_decompose_matches_root_counts(name):
    """Roots supported inside J are exactly the roots of the parabolic factors."""
    fs = parse_spec(name)
    d = diagram(fs)
    sup = None if fs[0].family == "I" else [build_root_system(fs).support(v) for v in build_root_system(fs).positive_roots]
    for J in range(1 << d.n):
        factors = decompose_parabolic(d, J)
        assert sum(f.rank for f in factors) == bin(J).count("1")
        if sup is not None:
            assert sum(_root_count(f) for f in factors) == sum(s & ~J == 0 for s in sup)


def test_cat_values():
    assert cat_q("A2") == QPoly((1, 3, 1))
    assert cat_q(()) == ONE
    assert cat_q("A1xA1") == (ONE + Q) ** 2
    assert [cat_q(f"A{n}").at_one() for n in range(1, 7)] == [comb(2 * n + 2, n + 1) // (n + 2) for n in range(1, 7)]
    assert [cat_q(f"B{n}").at_one() for n in range(2, 7)] == [comb(2 * n, n) for n in range(2, 7)]
    assert cat_q("E8").at_one() == 25080 and cat_q("H3").at_one() == 32
    for name in ("A5", "B4", "D6", "E6", "F4", "G2", "H3", "I2(9)"):
        c = cat_q(name)
        assert c.is_symmetric() and all(x > 0 for x in c.coeffs)


def test_cat_plusplus_table():
    assert [cat_plusplus_q(type_spec("A", n)).at_one() for n in range(7)] == [1, 0, 1, 2, 6, 18, 57]
    assert [cat_plusplus_q(f"B{n}").at_one() for n in range(2, 7)] == [2, 6, 22, 80, 296]
    assert [cat_plusplus_q(f"D{n}").at_one() for n in range(4, 8)] == [10, 42, 168, 660]
    assert cat_plusplus_q(()) == ONE
    assert cat_plusplus_q("A3") == QPoly((0, 1, 1))
    for m in range(3, 10):
        assert cat_plusplus_q(f"I2({m})").at_one() == m - 2


def test_cat_plus_and_reversal():
    assert cat_plus_q("A2") == QPoly((0, 1, 1))
    for name in ("A4", "B3", "D5", "E6", "F4", "H3", "I2(7)"):
        n = sum(s.rank for s in parse_spec(name))
        assert no_simple_antichain_q(name) == cat_plus_q(name).reversed(n)


def test_bicat_small():
    assert bicat_q("A1") == ONE + Q
    assert bicat_q(()) == ONE
    assert bicat_q("A1xA1") == (ONE + Q) ** 2
    assert bicat_q("E6") == QPoly((1, 66, 415, 736, 415, 66, 1))
    for n in range(2, 9):
        assert bicat_q(f"D{n}" if n >= 4 else type_spec("D", n)).at_one() == 6 * 4 ** (n - 2) - 2 * comb(2 * n - 4, n - 2)


@pytest.mark.parametrize("name", ["A3", "B3", "D4", "D5", "F4", "G2", "H3", "I2(7)", "A2xB2"])
def test_bicat_routes_agree(name):
    b = bicat_q(name)
    assert b == bicat_q_states(name) == doubled_q(name)
    assert bicat_integer(name) == b.at_one()
    assert list(b.coeffs) == binar_coefficients(name)


def test_h4_has_no_formula_route():
    with pytest.raises(MissingTable):
        bicat_q("H4")
    with pytest.raises(MissingTable):
        cat_q("H4")


def test_cat_gf_dp():
    for name in ("A3", "F4", "E8", "D6", "H3"):
        assert cat_gf_dp_check(name)


def test_f_polynomial():
    assert f_polynomial("A2") == QPoly((1, 5, 5))
    assert f_polynomial(()) == ONE
    assert f_polynomial("A2xB2") == f_polynomial("A2") * f_polynomial("B2")
    # f counts faces of the associahedron: A3 has 14 vertices, 21 edges, 9 facets
    assert f_polynomial("A3") == QPoly((1, 9, 21, 14))


@pytest.mark.parametrize("name", sorted(IDENTITIES))
def test_identity_registry(name):
    kind = IDENTITIES[name][0]
    rep = verify_identity(name, max_rank=10 if kind == "n" else 8)
    assert rep.checked > 0
    assert rep.ok, str(rep)


def test_identity_with_explicit_types():
    rep = verify_identity("qbiCat", types=["A3", "D5", "B2xA2", "H3"])
    assert rep.ok and rep.checked == 3 + 5 + 4 + 3


def test_unknown_identity():
    with pytest.raises(UnknownIdentity):
        verify_identity("no-such-identity")


def test_table_records():
    rec = table_record(CartanSpec("E", 6))
    assert rec.bicat == 1700 and rec.sources == ["doubled", "formula"]
    data = json.loads(tables_json([rec]))
    assert data[0]["binar_coeffs"] == [1, 66, 415, 736, 415, 66, 1]
    assert "| E6 | 1700 |" in tables_markdown([rec])
    with pytest.raises(ConsistencyError):
        table_record(CartanSpec("A", 2), lambda s: QPoly((1, 1)))
    with pytest.raises(MissingTable):
        table_record(CartanSpec("H", 4))
    rec = table_record(CartanSpec("H", 4), lambda s: QPoly((1, 116, 316, 116, 1)))
    assert rec.bicat == 550 and rec.sources == ["bisortable"]
