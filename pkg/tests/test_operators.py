from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fccstab.charges import syndrome_of
from fccstab.code import stabilizer_space
from fccstab.errors import ConfigError, ParityError, PreconditionError
from fccstab.gf2 import RowSpace
from fccstab.lattice import BODY_DIAGONALS, FACE_DIAGONALS, LatticeSpec, Window, add
from fccstab.operators import (
    DISLOCATION_SITES,
    PARITY_LABELS,
    FlexibleStringSpec,
    RigidStringSpec,
    TetrahedronSpec,
    closed_rigid_length,
    dislocation_pair,
    flexible_endpoint_sites,
    flexible_string,
    flexible_syndrome_sites,
    gauge_groups,
    hexagon_links,
    hexagon_loop,
    lemma_endpoint_sites,
    link_operator,
    logical_set,
    membrane,
    membrane_monopoles,
    membrane_sites,
    plaquette,
    random_closed_loop,
    region_boundary_loop,
    rigid_endpoint_sites,
    rigid_string,
    sigma_bar,
    star,
    star_links,
    string_net,
    tetrahedron,
    tetrahedron_interior_product,
    winding_numbers,
)
from fccstab.pauli import PauliWord, generator, generator_product

W = Window.cube(10)

evens = st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)).filter(lambda u: sum(u) % 2 == 0)


def xor(sites):
    out = set()
    for u in sites:
        out ^= {tuple(u)}
    return frozenset(out)


# rigid strings


def test_rigid_example():
    w = rigid_string(W, RigidStringSpec((0, 0, 0), (1, 1, 0), 3))
    assert w.weight == 4
    assert syndrome_of(w).support == {(-1, 0, 0), (0, -1, 0), (4, 3, 0), (3, 4, 0)}


@given(evens, st.sampled_from(FACE_DIAGONALS + tuple(tuple(-c for c in h) for h in FACE_DIAGONALS)), st.integers(0, 6))
def test_rigid_syndrome_is_two_dipoles(u0, h, m):
    spec = RigidStringSpec(u0, h, m)
    w = rigid_string(W, spec)
    assert w.weight == m + 1
    assert len({w.letter(u) for u in spec.sites()}) == 1
    assert syndrome_of(w).support == xor(rigid_endpoint_sites(spec))
    if m:
        assert len(syndrome_of(w)) == 4


def test_rigid_single_site():
    w = rigid_string(W, RigidStringSpec((0, 0, 0), (1, 1, 0), 0))
    assert w == PauliWord.single(W, (0, 0, 0), "Z")
    assert syndrome_of(w).support == {(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)}


def test_rigid_rejects_odd_start_and_bad_direction():
    with pytest.raises(ParityError):
        RigidStringSpec((1, 0, 0), (1, 1, 0), 2)
    with pytest.raises(PreconditionError):
        RigidStringSpec((0, 0, 0), (1, 1, 1), 2)


@pytest.mark.parametrize("h", FACE_DIAGONALS)
def test_closed_rigid_string_is_membrane_pair(spec357, h):
    m = closed_rigid_length(spec357, h)
    w = rigid_string(spec357, RigidStringSpec((0, 0, 0), h, m))
    assert syndrome_of(w).support == frozenset()
    normal = "xyz"[[i for i in range(3) if h[i] == 0][0]]
    a = "000"
    b = "".join(str(abs(c) % 2) for c in h)
    expected = sigma_bar(spec357, normal, a) * sigma_bar(spec357, normal, b)
    assert w.equal_up_to_phase(expected)
    assert w.weight == m


def test_closed_110_string_length(spec357):
    assert closed_rigid_length(spec357, (1, 1, 0)) == 2 * 3 * 5


# flexible strings


flex_specs = st.builds(
    FlexibleStringSpec,
    evens,
    st.sampled_from(BODY_DIAGONALS),
    st.sampled_from((1, -1)),
    st.text("xyz", min_size=0, max_size=10),
)


@given(flex_specs)
def test_flexible_syndrome_rule(fs):
    w = flexible_string(W, fs)
    assert syndrome_of(w).support == flexible_syndrome_sites(W, fs)
    assert all(sum(u) % 2 == 0 for u in fs.path())
    assert len({sum(a * b for a, b in zip(fs.t, u)) for u in fs.path()}) <= 2  # one bilayer


@given(flex_specs)
def test_flexible_near_end_matches_endpoint_list(fs):
    assert lemma_endpoint_sites(fs)[:4] == flexible_endpoint_sites(fs)[:4]


def test_flexible_one_step_example():
    fs = FlexibleStringSpec((0, 0, 0), (1, 1, 1), 1, "z")
    s = syndrome_of(flexible_string(W, fs)).support
    near = {(-1, 0, 0), (0, -1, 0), (0, 0, -1), (1, 1, 1)}
    assert set(flexible_endpoint_sites(fs)[:4]) == near
    assert s == {(-1, 0, 0), (0, -1, 0), (2, 1, 0), (1, 2, 0)}


def test_repeated_step_cancels():
    fs = FlexibleStringSpec((0, 0, 0), (1, 1, 1), 1, "xx")
    assert flexible_string(W, fs).is_trivial()


@pytest.mark.parametrize("t", BODY_DIAGONALS)
@pytest.mark.parametrize("c", [(1, 0, 0), (0, 0, 1), (1, 2, 0), (-1, 2, 2)])
def test_plaquette_is_generator(t, c):
    assert plaquette(W, t, c) == generator(W, c).scaled(2)  # B_p = -S_c exactly
    loop = hexagon_loop(t, c)
    assert loop.m == 6 and loop.end == loop.start
    assert flexible_string(W, loop).equal_up_to_phase(generator(W, c))


@pytest.mark.parametrize("t", BODY_DIAGONALS)
def test_links_commute_with_plaquettes(t):
    c = (1, 0, 0)
    tc = sum(a * b for a, b in zip(t, c))
    near = [add(c, (i, j, k)) for i in range(-3, 4) for j in range(-3, 4) for k in range(-3, 4)]
    plaqs = [plaquette(W, t, d) for d in near if sum(d) % 2 and sum(a * b for a, b in zip(t, d)) == tc]
    assert len(plaqs) > 7
    for u, v in hexagon_links(t, c):
        k = link_operator(W, t, u, v)
        assert k.weight == 2
        for p in plaqs:
            assert k.commutes(p)


@pytest.mark.parametrize("t", BODY_DIAGONALS)
@pytest.mark.parametrize("side", [1, -1])
def test_star_operator(t, side):
    w = (0, 0, 0)
    a = star(W, t, w, side)
    assert a.weight == 3 and a.is_hermitian()
    assert a.letter(w) == "I"
    assert set(a.sites()) == {v for _, v in star_links(t, w, side)}


@pytest.mark.parametrize("t", BODY_DIAGONALS)
def test_closed_loop_is_product_of_plaquettes(t):
    # a row of three hexagons and a triangle-ish blob in the same plane
    c0 = (1, 0, 0)
    step1 = tuple(t[i] * (1 if i == 0 else -1 if i == 1 else 0) for i in range(3))
    step2 = tuple(t[i] * (1 if i == 0 else 0 if i == 1 else -1) for i in range(3))
    for centres in ([c0], [c0, add(c0, step1)], [c0, add(c0, step1), add(c0, step2)]):
        loop = region_boundary_loop(t, centres)
        assert loop.end == loop.start
        w = flexible_string(W, loop)
        assert w.equal_up_to_phase(generator_product(W, centres))


# tetrahedra


@pytest.mark.parametrize("r", [1, 2, 3])
@pytest.mark.parametrize("mirrored", [False, True])
def test_tetrahedron_identity(r, mirrored):
    spec = TetrahedronSpec((0, 0, 0), r, mirrored)
    w = tetrahedron(W, spec)
    inner = tetrahedron_interior_product(W, spec)
    assert w.symplectic == inner.symplectic
    assert len({e.h for e in spec.edges()}) == 6
    for v in spec.vertices():
        assert w.letter(v) == "I"
    assert syndrome_of(w).support == frozenset()
    assert len(spec.interior_odd_sites()) == {1: 1, 2: 10, 3: 35}[r]


@pytest.mark.parametrize("mirrored", [False, True])
def test_smallest_tetrahedron_is_one_generator(mirrored):
    spec = TetrahedronSpec((0, 0, 0), 1, mirrored)
    assert spec.interior_odd_sites() == [(1, 1, 1)]
    assert tetrahedron(W, spec).equal_up_to_phase(generator(W, (1, 1, 1)))


# membranes


@pytest.mark.parametrize("R", [0, 2, 4, 6])
@pytest.mark.parametrize("normal", ["x", "y", "z"])
def test_membrane_monopoles(R, normal):
    m = membrane(W, R, normal=normal)
    assert m.weight == len(membrane_sites(R, normal=normal)) == (R + 1) ** 2
    assert syndrome_of(m).support == frozenset(membrane_monopoles(R, normal=normal))


def test_membrane_r2_corners():
    assert set(membrane_monopoles(2)) == {(3, 0, 0), (-3, 0, 0), (0, 3, 0), (0, -3, 0)}


def test_membrane_odd_radius():
    with pytest.raises(PreconditionError):
        membrane(W, 3)


# half membranes and logicals


def test_half_membranes_commute_with_generators(spec357, words357):
    for axis in "xyz":
        for abc in PARITY_LABELS:
            s = sigma_bar(spec357, axis, abc)
            assert all(s.commutes(g) for g in words357)
            assert s.weight == {"x": 35, "y": 21, "z": 15}[axis]


def test_half_membrane_overlaps(spec357):
    for abc in PARITY_LABELS:
        a, b = sigma_bar(spec357, "x", abc), sigma_bar(spec357, "y", abc)
        assert (a.support & b.support).bit_count() == 7
        assert not a.commutes(b)
        for other in PARITY_LABELS:
            if other != abc:
                assert a.commutes(sigma_bar(spec357, "y", other))
                assert a.support & sigma_bar(spec357, "z", other).support == 0


def test_half_membrane_translation(spec357):
    sites = [(1, j, k) for j in range(0, 10, 2) for k in range(0, 14, 2)]
    moved = sigma_bar(spec357, "x", "000") * generator_product(spec357, sites)
    assert moved.equal_up_to_phase(sigma_bar(spec357, "x", "000", offset=1))


def test_half_membrane_label_validation():
    with pytest.raises(PreconditionError):
        sigma_bar(LatticeSpec(3, 5, 7), "x", "100")


def test_logical_table(spec357, stab357):
    lg = logical_set(spec357)
    for i in range(1, 5):
        for j in range(1, 5):
            for a in "XZ":
                for b in "XZ":
                    anti = i == j and a != b
                    assert lg[f"{a}{i}"].commutes(lg[f"{b}{j}"]) != anti
    for w in lg.values():
        assert syndrome_of(w).support == frozenset()
        assert not stab357.contains(w.symplectic)


@pytest.mark.parametrize("p", [(2, 2, 2), (3, 3, 5), (3, 5, 9)])
def test_logical_preconditions(p):
    with pytest.raises(ConfigError):
        logical_set(LatticeSpec(*p))


def test_gauge_groups_commute(spec357):
    gg = gauge_groups(spec357)
    for a in gg.flexible:
        for b in gg.rigid:
            assert a.commutes(b)


# dislocations and string-nets


def test_dislocation_syndrome():
    w = dislocation_pair(W, 4, 4)
    s = syndrome_of(w).support
    assert len(s) == 8
    assert set(DISLOCATION_SITES) <= s


def test_string_net(spec357, stab357):
    net = string_net(spec357)
    assert syndrome_of(net.word).support == frozenset()
    assert not stab357.contains(net.word.symplectic)
    gg = gauge_groups(spec357)
    g = stab357.extended([w.symplectic for w in gg.subsystem])
    assert not g.contains(net.word.symplectic)
    assert not net.word.commutes(logical_set(spec357)["X3"])


def test_string_net_needs_offset_dims():
    with pytest.raises(ConfigError):
        string_net(LatticeSpec(3, 7, 5))


# closed loops


@pytest.mark.parametrize("t", BODY_DIAGONALS)
def test_random_closed_loops(spec357, stab357, t):
    lg = logical_set(spec357)
    flex = stab357.extended([lg["Z1"].symplectic, lg["Z2"].symplectic])
    rng = random.Random(7)
    for _ in range(25):
        fs = random_closed_loop(spec357, t, rng)
        w = flexible_string(spec357, fs)
        wind = winding_numbers(spec357, fs)
        assert sum(wind) % 2 == 0
        assert syndrome_of(w).support == frozenset()
        for a, axis in enumerate("xyz"):
            for abc in PARITY_LABELS:
                assert w.commutes(sigma_bar(spec357, axis, abc)) == (wind[a] % 2 == 0)
        assert flex.contains(w.symplectic)
