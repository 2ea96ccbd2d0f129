import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import charfn_of_chain, ideal_counts, ideals_by_size
from quotfix.charfn import (
    CharFn,
    PaddedCharFn,
    charfn_from_json,
    charfn_to_json,
    enumerate_charfns,
    from_nested,
    level_components,
    to_nested,
    validate,
    weight,
)
from quotfix.errors import ResourceLimitError, ValidationError

STAIR = {(0, 0): 3, (1, 0): 2, (2, 0): 2, (0, 1): 2, (1, 1): 1, (0, 2): 1}


# ---------------------------------------------------------------------------
# Construction and validation


def test_charfn_rejects_malformed():
    with pytest.raises(ValidationError):
        CharFn(0, {})
    with pytest.raises(ValidationError):
        CharFn(2, {(0,): 1})
    with pytest.raises(ValidationError):
        CharFn(2, {(0, 0): 0})
    with pytest.raises(ValidationError):
        CharFn(2, {(-1, 0): 1})


def test_charfn_immutable():
    chi = CharFn(2, STAIR)
    with pytest.raises(AttributeError):
        chi.dim = 3


def test_validate_known_member():
    chi = CharFn(2, STAIR)
    assert validate(chi, 3)
    assert not validate(chi, 2)  # max value exceeds the bound
    assert weight(chi) == 11


def test_validate_rejects_non_monotone():
    assert not validate(CharFn(2, {(0, 0): 1, (1, 0): 2}), 3)
    assert not validate(CharFn(1, {(1,): 1}), 3)  # hole below


def test_validate_empty_function():
    assert validate(CharFn(1, {}), 0)
    assert validate(CharFn(3, {}), 5)


# ---------------------------------------------------------------------------
# Enumeration, pinned against an independent enumerator


@pytest.mark.parametrize(
    "d,expected",
    [
        (1, [1, 1, 1, 1, 1]),
        (2, [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]),
        (3, [1, 1, 3, 6, 13, 24]),
    ],
)
def test_single_level_counts(d, expected):
    got = [len(enumerate_charfns(1, d, n)) for n in range(len(expected))]
    assert got == expected
    assert got == ideal_counts(d, len(expected) - 1)


def test_enumeration_matches_chain_oracle():
    # every chain of nested ideals with total weight n appears exactly once
    for r, d, n in [(2, 2, 4), (3, 2, 3), (2, 3, 3)]:
        sizes = ideals_by_size(d, n)
        pool = [ideal for k in range(n + 1) for ideal in sizes[k]]
        expected = {
            CharFn(d, charfn_of_chain(chain)) if any(chain) else CharFn(d, {})
            for chain in _chains(pool, r)
            if sum(len(i) for i in chain) == n
        }
        got = set(enumerate_charfns(r, d, n))
        assert got == expected


def _chains(pool, r):
    """All r-tuples from the pool increasing under inclusion left to right."""
    if r == 0:
        yield ()
        return
    for rest in _chains(pool, r - 1):
        for ideal in pool:
            if not rest or ideal <= rest[0]:
                yield (ideal,) + rest


def test_enumeration_sorted_and_valid():
    fns = enumerate_charfns(2, 2, 5)
    keys = [chi.sort_key() for chi in fns]
    assert keys == sorted(keys)
    assert all(validate(chi, 2) for chi in fns)
    assert all(weight(chi) == 5 for chi in fns)


def test_enumeration_cap():
    with pytest.raises(ResourceLimitError):
        enumerate_charfns(2, 2, 8, cap=3)


# ---------------------------------------------------------------------------
# Nested-chain encoding is a bijection


def test_nested_round_trip():
    chi = CharFn(2, STAIR)
    ni = to_nested(chi, 3)
    assert len(ni.ideals) == 3
    assert from_nested(ni) == chi


def test_nested_round_trip_everywhere():
    for chi in enumerate_charfns(3, 2, 4):
        assert from_nested(to_nested(chi, 3)) == chi


def test_nested_rejects_invalid():
    with pytest.raises(ValidationError):
        to_nested(CharFn(2, {(1, 1): 1}), 2)


# ---------------------------------------------------------------------------
# Padded representation agrees with the explicit one


def test_padded_value_and_weight():
    pf = PaddedCharFn.from_overrides(2, 3, 4, {(2, 1): 1, (1, 2): 2})
    assert pf.value((0, 0)) == 3
    assert pf.value((2, 1)) == 1
    assert pf.value((3, 1)) == 0  # outside the simplex
    assert pf.weight() == 3 * pf.simplex_size() - 2 - 1
    assert weight(pf) == pf.weight()
    assert pf.to_charfn().weight() == pf.weight()


def test_padded_validate_matches_explicit():
    good = PaddedCharFn.from_overrides(2, 3, 3, {(1, 1): 1, (0, 2): 2})
    assert validate(good, 3) == validate(good.to_charfn(), 3) is True
    # raising a value above an override breaks monotonicity
    bad = PaddedCharFn.from_overrides(2, 3, 4, {(1, 1): 1})
    assert validate(bad, 3) == validate(bad.to_charfn(), 3) is False


def test_padded_constructor_guards():
    with pytest.raises(ValidationError):
        PaddedCharFn.from_overrides(2, 3, 2, {(1, 1): 1})  # outside simplex
    with pytest.raises(ValidationError):
        PaddedCharFn.from_overrides(2, 3, 4, {(0, 0): 3})  # value not < rank


def test_level_components_padded_vs_explicit():
    pf = PaddedCharFn.from_overrides(2, 3, 4, {(2, 1): 1, (1, 2): 1, (0, 3): 2})
    a = level_components(pf, 3)
    b = level_components(pf.to_charfn(), 3)
    assert {v: sorted(map(sorted, comps)) for v, comps in a.items()} == {
        v: sorted(map(sorted, comps)) for v, comps in b.items()
    }


# ---------------------------------------------------------------------------
# Serialization


def test_json_round_trip_explicit():
    chi = CharFn(2, STAIR)
    assert charfn_from_json(charfn_to_json(chi)) == chi


def test_json_round_trip_padded():
    pf = PaddedCharFn.from_overrides(3, 4, 5, {(1, 1, 1): 2, (0, 0, 4): 1})
    back = charfn_from_json(charfn_to_json(pf))
    assert isinstance(back, PaddedCharFn)
    assert back == pf


def test_json_rejects_garbage():
    assert charfn_from_json({"d": 2}) == CharFn(2, {})  # entries may be absent
    with pytest.raises(ValidationError):
        charfn_from_json({"entries": []})  # the dimension may not
    with pytest.raises(ValidationError):
        charfn_from_json({"d": 2, "entries": [{"point": [0, 0]}]})


# ---------------------------------------------------------------------------
# Property: monotone stacks validate, small perturbations fail


@st.composite
def monotone_fn(draw):
    d = draw(st.integers(1, 3))
    r = draw(st.integers(1, 4))
    n = draw(st.integers(0, 6))
    fns = enumerate_charfns(r, d, n)
    return r, draw(st.sampled_from(fns)) if fns else (r, CharFn(d, {}))


@settings(max_examples=60, deadline=None)
@given(monotone_fn())
def test_enumerated_functions_validate(rv):
    r, chi = rv
    assert validate(chi, r)
    assert validate(chi, r + 1)  # relaxing the bound keeps membership


@settings(max_examples=60, deadline=None)
@given(monotone_fn(), st.randoms(use_true_random=False))
def test_bumping_a_value_breaks_membership(rv, rng):
    r, chi = rv
    if not chi.entries:
        return
    point = rng.choice(sorted(chi.entries))
    bumped = dict(chi.entries)
    bumped[point] = r + 1
    assert not validate(CharFn(chi.dim, bumped), r)
