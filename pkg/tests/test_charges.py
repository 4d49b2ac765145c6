from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fccstab.charges import (
    Dipole,
    Quadrupole,
    Syndrome,
    WindowSyndromeMap,
    charge_table,
    decompose,
    dipole_charges,
    membrane_weight,
    monopole_weight_scan,
    random_zero_charge_syndrome,
    sectors_equal,
    solve_syndrome,
    syndrome_of,
    theta,
    zero_charge_basis,
)
from fccstab.errors import MonopoleSectorError, ParityError, PreconditionError
from fccstab.lattice import BODY_DIAGONALS, FACE_DIAGONALS, LatticeSpec, Window, dot
from fccstab.operators import DISLOCATION_SITES, FlexibleStringSpec, flexible_string, membrane
from fccstab.pauli import PauliWord, generator

W = Window.cube(8)
T111, T1MM, TM1M, TMM1 = BODY_DIAGONALS


def random_pauli(ctx, sites, rng):
    items = [(u, rng.choice("IXYZ")) for u in sites]
    return PauliWord.from_letters(ctx, [(u, l) for u, l in items if l != "I"])


BALL = [(i, j, k) for i in range(-1, 2) for j in range(-1, 2) for k in range(-1, 2) if (i + j + k) % 2 == 0]


def test_single_z_syndrome():
    s = syndrome_of(PauliWord.single(W, (0, 0, 0), "Z"))
    assert s.support == {(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)}
    assert s.bulk_valid


def test_generator_has_no_syndrome():
    assert len(syndrome_of(generator(W, (1, 2, 0)))) == 0


def test_membrane_syndrome():
    assert syndrome_of(membrane(W, 2)).support == {(3, 0, 0), (-3, 0, 0), (0, 3, 0), (0, -3, 0)}


def test_syndrome_rejects_even_sites():
    with pytest.raises(PreconditionError):
        Syndrome.of(W, [(0, 0, 0)])


def test_syndrome_json_round_trip():
    s = Syndrome.of(W, [(1, 0, 0), (0, -1, 0)])
    assert Syndrome.from_json(s.to_json()) == s


def test_bulk_flag():
    assert not Syndrome.of(W, [(7, 0, 0)]).bulk_valid


def test_monopole_charges():
    s = Syndrome.of(W, [(0, -2, 1)])
    table = charge_table(s)
    assert theta(s, T111, -1) == 1
    for t in BODY_DIAGONALS:
        assert table.row(t) == [dot(t, (0, -2, 1))]
    assert table.parity_identities()["row_parity"]


@pytest.mark.parametrize("t", BODY_DIAGONALS)
@pytest.mark.parametrize("alpha", [-3, -1, 1, 3, 5])
def test_quadrupole_charges(t, alpha):
    q = Quadrupole(t, alpha)
    table = charge_table(Syndrome.of(W, q.sites()))
    assert table.entries == {(t, alpha - 2), (t, alpha + 2)} == q.charges()


@pytest.mark.parametrize("h", FACE_DIAGONALS)
def test_dipole_charges(h):
    table = charge_table(Syndrome.of(W, Dipole(h, (0, 0, 0)).sites()))
    assert table.entries == dipole_charges(h)
    ts = {t for t, _ in table.entries}
    assert len(ts) == 2 and all(sum(a * b for a, b in zip(t, h)) == 0 for t in ts)
    if h == (1, 1, 0):
        assert ts == {T1MM, TM1M}
        assert table.entries == {(T1MM, 1), (T1MM, -1), (TM1M, 1), (TM1M, -1)}


@given(st.integers(0, 2**32))
def test_parity_identities_for_random_paulis(seed):
    rng = random.Random(seed)
    P = random_pauli(W, [(i, j, k) for i in range(-2, 3) for j in range(-2, 3) for k in range(-2, 3) if (i + j + k) % 2 == 0], rng)
    ids = charge_table(syndrome_of(P)).parity_identities()
    assert all(ids.values())
    assert charge_table(syndrome_of(P)).is_zero()


def test_periodic_table_identities(spec357):
    rng = random.Random(3)
    for _ in range(20):
        P = random_pauli(spec357, [spec357.qubit_site(q) for q in rng.sample(range(spec357.n), 6)], rng)
        table = charge_table(syndrome_of(P))
        assert all(table.parity_identities().values())


def test_one_qubit_changes_monopole_count_by_two():
    # count mod 4 is not conserved: a single Z next to a monopole turns 1 excitation into 3
    mono = syndrome_of(membrane(W, 2))
    corner = Syndrome.of(W, [(3, 0, 0)])
    z = syndrome_of(PauliWord.single(W, (2, 0, 0), "Z"))
    assert len(corner ^ z) == 3
    assert sectors_equal(corner, corner ^ z)
    assert len(mono) == 4


def test_sectors_equal():
    rng = random.Random(11)
    s = Syndrome.of(W, [(1, 0, 0), (3, 2, 0)])
    P = random_pauli(W, BALL, rng)
    assert sectors_equal(s, s ^ syndrome_of(P))
    assert not sectors_equal(Syndrome.of(W, [(1, 0, 0)]), Syndrome.of(W, []))
    q1 = Quadrupole(T111, 1).sites()
    shifted = [(u[0] + 1, u[1] - 1, u[2]) for u in q1]
    assert sectors_equal(Syndrome.of(W, q1), Syndrome.of(W, shifted))


def test_solve_two_quadrupoles():
    q1 = Quadrupole(T111, 1).sites()
    q2 = [(u[0] + 2, u[1] - 2, u[2]) for u in Quadrupole(T111, 1).sites()]
    s = Syndrome.of(W, q1 + q2)
    res = solve_syndrome(W, s)
    assert res.status == "solved"
    assert syndrome_of(res.operator).support == s.support


def test_solve_flexible_string_syndrome():
    fs = FlexibleStringSpec((0, 0, 0), TMM1, -1, "xyzzyx")
    s = syndrome_of(flexible_string(W, fs))
    res = solve_syndrome(W, s)
    assert res.status == "solved" and syndrome_of(res.operator).support == s.support


def test_solve_monopole_gives_certificate():
    res = solve_syndrome(W, Syndrome.of(W, [(1, 0, 0)]))
    assert res.status == "charged"
    assert sorted(t for t, _ in res.certificate) == sorted(BODY_DIAGONALS)


def test_solve_empty_and_context():
    assert solve_syndrome(W, Syndrome.of(W, [])).operator.is_identity()
    with pytest.raises(PreconditionError):
        solve_syndrome(Window.cube(6), Syndrome.of(W, [(1, 0, 0)]))


def test_solve_outside_halo():
    res = solve_syndrome(W, Syndrome.of(W, [(11, 0, 0), (-11, 0, 0)]))
    assert res.status == "inconclusive"


def test_zero_charge_basis_is_solvable():
    w = Window.cube(5)
    region = [(i, j, k) for i in range(-1, 2) for j in range(-1, 2) for k in range(-1, 2)]
    basis = zero_charge_basis(w, region)
    smap = WindowSyndromeMap(w)
    rng = random.Random(2)
    for _ in range(10):
        s = random_zero_charge_syndrome(w, basis, rng)
        assert charge_table(s).is_zero()
        res = solve_syndrome(w, s, smap)
        assert res.status == "solved" and syndrome_of(res.operator).support == s.support


# decomposition


def test_decompose_dislocation():
    dec = decompose(Syndrome.of(W, DISLOCATION_SITES))
    assert not dec.dipoles
    types = sorted(q.t for q in dec.quadrupoles)
    assert types == sorted([T1MM, T1MM, TM1M, TM1M])
    table = charge_table(Syndrome.of(W, DISLOCATION_SITES))
    assert {t for t, _ in table.entries} == {T1MM, TM1M}
    assert {a for _, a in table.entries} == {-3, -1, 1, 3}
    assert dec.charges() == table.entries


@pytest.mark.parametrize("h", FACE_DIAGONALS)
def test_decompose_dipole_fixed_point(h):
    d = Dipole(h, (0, 0, 0))
    dec = decompose(Syndrome.of(W, d.sites()))
    assert not dec.quadrupoles
    assert len(dec.dipoles) == 1
    assert dipole_charges(dec.dipoles[0].h) == dipole_charges(h)


def test_decompose_all_four_charged():
    sites = Dipole((1, 1, 0), (0, 0, 0)).sites() + Dipole((1, -1, 0), (4, 0, 2)).sites()
    s = Syndrome.of(W, sites)
    # a [1-10] dipole at a shifted anchor may carry extra quadrupoles; the core is the pair
    dec = decompose(s)
    assert sorted(d.h for d in dec.dipoles) == [(1, -1, 0), (1, 1, 0)]
    assert dec.charges() == charge_table(s).entries


def test_decompose_errors(spec357):
    with pytest.raises(MonopoleSectorError):
        decompose(Syndrome.of(W, [(1, 0, 0)]))
    with pytest.raises(PreconditionError):
        decompose(Syndrome.of(spec357, [(1, 0, 0), (0, 1, 0)]))


@given(st.integers(0, 2**32))
def test_decompose_recombines(seed):
    rng = random.Random(seed)
    sites = set()
    size = 2 * rng.randint(1, 4)
    while len(sites) < size:
        u = tuple(rng.randint(-3, 3) for _ in range(3))
        if sum(u) % 2:
            sites.add(u)
    s = Syndrome.of(W, sites)
    assert decompose(s).charges() == charge_table(s).entries


# monopole weight scan


def test_monopole_scan(tmp_path):
    entries = monopole_weight_scan((0, 1, 2), cap=5)
    assert entries[0].exact and entries[0].lower == 1
    lows = [e.lower for e in entries]
    assert lows == sorted(lows)
    for e in entries:
        assert e.lower <= e.upper
        assert e.membrane_weight == membrane_weight(e.R + e.R % 2)
        if e.witness is not None:
            s = syndrome_of(e.witness)
            near = {u for u in s.support if max(abs(a - b) for a, b in zip(u, (1, 0, 0))) <= e.R}
            assert near == {(1, 0, 0)}


def test_monopole_scan_rejects_even_centre():
    with pytest.raises(PreconditionError):
        monopole_weight_scan((0,), center=(0, 0, 0))
