"""Lattice geometry: stabilizer layout, commutation, logical operators."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nmwpm.lattice import (ROTATED, TORIC, build_rotated, build_toric,
                           commutes)


@pytest.mark.parametrize("L", [2, 3, 4, 5, 6, 8])
def test_toric_counts(L):
    lat = build_toric(L)
    assert lat.n_qubits == 2 * L * L
    assert lat.n_stabs == 2 * L * L
    assert lat.n_x_stabs == L * L
    assert all(len(s.support) == 4 for s in lat.stabilizers)


@pytest.mark.parametrize("L", [3, 5, 7, 9])
def test_rotated_counts(L):
    lat = build_rotated(L)
    assert lat.n_qubits == L * L
    assert lat.n_stabs == L * L - 1
    assert lat.n_x_stabs == (L * L - 1) // 2
    weights = sorted(set(len(s.support) for s in lat.stabilizers))
    assert weights == [2, 4]
    n_boundary = sum(1 for s in lat.stabilizers if len(s.support) == 2)
    assert n_boundary == 2 * (L - 1)


def test_bad_sizes_rejected():
    with pytest.raises(ValueError):
        build_toric(1)
    with pytest.raises(ValueError):
        build_rotated(4)
    with pytest.raises(ValueError):
        build_rotated(1)


@pytest.mark.parametrize("build,L", [(build_toric, 4), (build_toric, 5),
                                     (build_rotated, 3), (build_rotated, 5)])
def test_all_stabilizers_commute(build, L):
    lat = build(L)
    for a in lat.stabilizers:
        for b in lat.stabilizers:
            assert commutes(a, b)


@pytest.mark.parametrize("build,L", [(build_toric, 4), (build_rotated, 5)])
def test_logicals_commute_with_stabilizers(build, L):
    lat = build(L)
    for op in lat.logical_ops:
        for s in lat.stabilizers:
            assert commutes(op, s)


def test_toric_logical_anticommutation_pairing():
    # Each X logical anticommutes with exactly one Z logical and vice versa.
    lat = build_toric(5)
    xs = [op for op in lat.logical_ops if op.pauli_type == "X"]
    zs = [op for op in lat.logical_ops if op.pauli_type == "Z"]
    anti = [[int(not commutes(x, z)) for z in zs] for x in xs]
    assert sorted(map(sum, anti)) == [1, 1]
    assert sorted(map(sum, zip(*anti))) == [1, 1]


def test_rotated_logical_anticommutation():
    lat = build_rotated(5)
    x1, z1 = lat.logical_ops
    assert x1.pauli_type == "X" and z1.pauli_type == "Z"
    assert not commutes(x1, z1)
    assert len(x1.support) == 5 and len(z1.support) == 5


def test_toric_stabilizer_group_products():
    # The product of all X (or all Z) stabilizers is the identity: every
    # qubit appears an even number of times.
    lat = build_toric(4)
    for block in (lat.check_x, lat.check_z):
        assert not (block.sum(axis=0) % 2).any()


def test_kind_tags():
    assert build_toric(3).kind == TORIC
    assert build_rotated(3).kind == ROTATED


@given(st.integers(2, 9), st.data())
@settings(max_examples=60, deadline=None)
def test_signed_delta_wraps_into_half_open_band(L, data):
    lat = build_toric(L)
    a = data.draw(st.integers(0, lat.n_stabs - 1))
    b = data.draw(st.integers(0, lat.n_stabs - 1))
    dx, dy = lat.signed_delta(a, b)
    assert -L / 2 < dx <= L / 2
    assert -L / 2 < dy <= L / 2
    ax, ay = lat.stab_coords[a]
    bx, by = lat.stab_coords[b]
    assert (ax + dx) % L == bx % L
    assert (ay + dy) % L == by % L


def test_stabilizer_at_roundtrip():
    lat = build_rotated(5)
    for s in lat.stabilizers:
        assert lat.stabilizer_at(s.pauli_type, *s.coord) == s.index
