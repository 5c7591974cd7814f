"""Permutation-group core.

Expected values were computed by the independent calculators in
tests/oracles.py (run it as a script to regenerate) and frozen here.
"""

import json
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from llab.permgroup import (
    FiniteGroup, Subgroup,
    group_from_generators, all_subgroups, subgroups_below, normal_subgroups,
    sylow_p, p_core, p_prime_core, is_characteristic_p, core_commutator_slice,
    regular_group,
    identity_perm, pmul, pinv, pconj, perm_order, perm_from_cycles, cycles_str,
    mask_of, mask_members,
)
from llab.errors import InputError, CapExceeded

DATA = Path(__file__).resolve().parent.parent / "src" / "llab" / "data"


def load(name):
    spec = json.loads((DATA / f"{name}.json").read_text())
    return group_from_generators(spec["degree"], spec["generators"])


@pytest.fixture(scope="module")
def s4():
    return load("s4")


@pytest.fixture(scope="module")
def s5():
    return load("s5")


# --- permutation arithmetic -------------------------------------------------

perms5 = st.permutations(range(5)).map(tuple)


@given(perms5, perms5)
def test_product_applies_left_factor_first(a, b):
    assert all(pmul(a, b)[i] == b[a[i]] for i in range(5))


@given(perms5)
def test_inverse(a):
    assert pmul(a, pinv(a)) == identity_perm(5)
    assert pmul(pinv(a), a) == identity_perm(5)


@given(perms5, perms5, perms5)
def test_conjugation_is_a_right_action(x, g, h):
    assert pconj(pconj(x, g), h) == pconj(x, pmul(g, h))


def test_cycle_round_trip():
    p = perm_from_cycles(5, [[1, 3], [2, 4]])
    assert p == (2, 3, 0, 1, 4)
    assert cycles_str(p) == "(1 3)(2 4)"
    assert cycles_str(identity_perm(4)) == "()"
    assert perm_order(p) == 2
    assert perm_order((1, 2, 3, 4, 0)) == 5


# --- group construction -----------------------------------------------------

def test_identity_is_ordinal_zero(s4):
    assert s4.elements[0] == identity_perm(4)
    assert s4.order == 24


def test_orders_of_builtins():
    for name, order in [("s3", 6), ("s4", 24), ("s5", 120), ("a4", 12),
                        ("a5", 60), ("c6", 6), ("d8", 8)]:
        assert load(name).order == order


def test_group_arithmetic_matches_tuples(s4):
    for i in range(0, 24, 5):
        for j in range(0, 24, 7):
            k = s4.mult(i, j)
            assert s4.elements[k] == pmul(s4.elements[i], s4.elements[j])
        assert pmul(s4.elements[i], s4.elements[s4.inv(i)]) == identity_perm(4)


def test_group_order_cap(monkeypatch):
    from llab import caps
    caps.override(caps.Caps(group_order=10))
    try:
        with pytest.raises(CapExceeded):
            load("s4")
    finally:
        caps.override(None)


def test_rejects_non_permutation():
    with pytest.raises(InputError):
        group_from_generators(3, [[0, 0, 1]])


# --- subgroup lattice -------------------------------------------------------

# counts frozen from the oracle (which asserts the textbook values)
SUBGROUP_COUNTS = {"s3": 6, "d8": 10, "s4": 30, "a4": 10, "c6": 4,
                   "a5": 59, "s5": 156}


@pytest.mark.parametrize("name,count", sorted(SUBGROUP_COUNTS.items()))
def test_subgroup_counts(name, count):
    assert len(all_subgroups(load(name))) == count


def test_lattice_is_canonically_sorted(s4):
    subs = all_subgroups(s4)
    keys = [H.key() for H in subs]
    assert keys == sorted(keys)
    assert subs[0].order == 24
    assert subs[-1].order == 1


def test_subgroups_below_filters(s4):
    S = sylow_p(s4, 2)
    below = subgroups_below(S)
    assert len(below) == 10
    assert all(H.le(S) for H in below)


def test_every_enumerated_mask_is_closed(s4):
    for H in all_subgroups(s4):
        assert s4.is_closed_mask(H.mask)
        assert s4.order % H.order == 0


def test_generators_regenerate(s4):
    for H in all_subgroups(s4):
        assert s4.close_mask(mask_of(H.generators())) == H.mask


# --- normalizer / centralizer ----------------------------------------------

def v4_of(s4):
    return s4.subgroup_of([s4.index_of((1, 0, 3, 2)), s4.index_of((2, 3, 0, 1))])


def test_normalizer_centralizer_of_v4(s4):
    V4 = v4_of(s4)
    assert V4.order == 4
    assert V4.normalizer().order == 24      # oracle: N_S4(V4) = S4
    assert V4.centralizer().order == 4      # oracle: C_S4(V4) = V4
    assert V4.centralizer().mask == V4.mask


def test_normalizer_within(s4):
    V4 = v4_of(s4)
    S = sylow_p(s4, 2)
    assert V4.normalizer(within=S).mask == S.mask
    E = s4.subgroup_of([s4.index_of((1, 0, 2, 3))])
    assert E.centralizer(within=S).order == 4


def test_center():
    d8 = load("d8")
    Z = d8.top.center()
    assert Z.order == 2
    s3 = load("s3")
    assert s3.top.center().order == 1


# --- sylow and cores --------------------------------------------------------

def test_sylow_orders(s4, s5):
    assert sylow_p(s4, 2).order == 8
    assert sylow_p(s4, 3).order == 3
    assert sylow_p(s5, 2).order == 8
    assert sylow_p(s5, 5).order == 5
    assert sylow_p(load("c6"), 2).order == 2


def test_sylow_is_deterministic_and_canonical(s4, s5):
    # frozen from the oracle's replay of the growth rule
    S = sylow_p(s4, 2)
    assert sorted(s4.elements[i] for i in S.members()) == [
        (0, 1, 2, 3), (0, 1, 3, 2), (1, 0, 2, 3), (1, 0, 3, 2),
        (2, 3, 0, 1), (2, 3, 1, 0), (3, 2, 0, 1), (3, 2, 1, 0)]
    S5 = sylow_p(s5, 2)
    assert sorted(s5.elements[i] for i in S5.members()) == [
        (0, 1, 2, 3, 4), (0, 1, 2, 4, 3), (0, 2, 1, 3, 4), (0, 2, 1, 4, 3),
        (0, 3, 4, 1, 2), (0, 3, 4, 2, 1), (0, 4, 3, 1, 2), (0, 4, 3, 2, 1)]


def test_p_core(s4, s5):
    assert p_core(s4, 2).mask == v4_of(s4).mask   # O_2(S4) = V4
    assert p_core(s4, 3).order == 1
    assert p_core(s5, 2).order == 1               # O_2(S5) = 1
    assert p_core(load("a4"), 2).order == 4
    assert p_core(load("d8"), 2).order == 8


def test_p_prime_core():
    c6 = load("c6")
    C3 = p_prime_core(c6, 2)
    assert C3.order == 3                          # O_2'(C6) = C3
    assert p_prime_core(c6, 3).order == 2
    assert p_prime_core(load("s4"), 2).order == 1
    assert p_prime_core(load("s3"), 3).order == 1


def test_is_characteristic_p(s4):
    assert is_characteristic_p(s4, 2)             # C_S4(V4) = V4
    assert is_characteristic_p(load("a4"), 2)
    assert is_characteristic_p(load("d8"), 2)
    assert not is_characteristic_p(load("c6"), 2)
    assert not is_characteristic_p(load("s5"), 2)


def test_core_commutator_slice(s4):
    # the slice hypothesis wants a characteristic-p group and V normal in G
    for V in (s4.trivial, v4_of(s4)):
        X = core_commutator_slice(s4, 2, V)
        assert X.is_p_group(2)
        assert X.is_normal_in(s4.top)
        assert X.mask == v4_of(s4).mask   # both slices come out as V4
    d8 = load("d8")
    X = core_commutator_slice(d8, 2, d8.top.center())
    assert X.order == 8                   # [D8,x] <= Z for every x
    assert X.is_p_group(2) and X.is_normal_in(d8.top)


def test_normal_subgroups(s4):
    masks = {H.order for H in normal_subgroups(s4)}
    assert masks == {1, 4, 12, 24}
    assert {H.order for H in normal_subgroups(load("a5"))} == {1, 60}


# --- regular representation -------------------------------------------------

def test_regular_group_rebuilds_d8():
    d8 = load("d8")
    items = list(range(d8.order))
    grp, to_ord, from_ord = regular_group(items, d8.mult, d8.inv, 0)
    assert grp.order == 8
    assert to_ord[0] == 0
    for a in items:
        for b in items:
            assert grp.mult(to_ord[a], to_ord[b]) == to_ord[d8.mult(a, b)]


def test_mask_helpers():
    assert mask_members(0b10110) == [1, 2, 4]
    assert mask_of([1, 2, 4]) == 0b10110
