import itertools

import numpy as np
import pytest

from onebitprec import (basis_symbol, g_inv, g_map, nearest_symbol, phi_expand,
                        qam_spec, region_decomposition_check, symbol_from_index)
from onebitprec.constellation import BASIS_SYMBOLS, base_region_membership


def test_g_map_examples():
    assert np.array_equal(g_map([1 + 2j]), [1.0, 2.0])
    assert np.array_equal(g_map([1 + 2j, 3 - 1j]), [1.0, 2.0, 3.0, -1.0])
    assert np.array_equal(g_map([0j]), [0.0, 0.0])


def test_g_inv_examples():
    assert np.array_equal(g_inv([1.0, 2.0]), [1 + 2j])
    assert np.array_equal(g_inv([0.0, 0.0, -1.0, 1.0]), [0j, -1 + 1j])


def test_g_inv_rejects_odd_length():
    with pytest.raises(ValueError):
        g_inv([1.0, 2.0, 3.0])


def test_g_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(50):
        x = rng.standard_normal(7) + 1j * rng.standard_normal(7)
        assert np.array_equal(g_inv(g_map(x)), x)


def test_phi_expand_scalars():
    assert np.array_equal(phi_expand(1 + 2j), [[1.0, -2.0], [2.0, 1.0]])
    assert np.array_equal(phi_expand(1j), [[0.0, -1.0], [1.0, 0.0]])


def test_phi_expand_vector_stacks_blocks():
    out = phi_expand(np.array([1 + 2j, 3 - 1j]))
    assert out.shape == (4, 2)
    assert np.array_equal(out, [[1, -2], [2, 1], [3, 1], [-1, 3]])


def test_phi_linearity():
    rng = np.random.default_rng(1)
    for _ in range(30):
        H = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
        x = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        lhs = g_map(H @ x)
        rhs = phi_expand(H) @ g_map(x)
        assert np.max(np.abs(lhs - rhs)) < 1e-12


@pytest.mark.parametrize("i,expect", [(0, 1 + 1j), (1, -1 + 1j), (2, -1 - 1j), (3, 1 - 1j)])
def test_basis_symbols(i, expect):
    assert basis_symbol(i) == expect


def test_basis_symbols_match_trig_formula():
    for i in range(4):
        angle = np.pi / 4 * (1 + 2 * i)
        formula = np.sqrt(2) * (np.cos(angle) + 1j * np.sin(angle))
        assert abs(basis_symbol(i) - formula) < 1e-15


def test_basis_symbol_range():
    with pytest.raises(ValueError):
        basis_symbol(4)
    with pytest.raises(ValueError):
        basis_symbol(-1)


@pytest.mark.parametrize("n", [2, 3])
def test_qam_spec_cardinality_and_reconstruction(n):
    spec = qam_spec(n)
    assert spec.size == 4**n
    assert len(set(spec.points.tolist())) == 4**n
    weights = 2.0 ** np.arange(n - 1, -1, -1)
    for digits, point in zip(spec.indices, spec.points):
        rebuilt = sum(w * BASIS_SYMBOLS[d] for w, d in zip(weights, digits))
        assert rebuilt == point


@pytest.mark.parametrize("n", [2, 3])
def test_qam_min_distance_brute_force(n):
    # the normalized constellation has unit-tau minimum distance exactly 2,
    # consistent with tau being half the scaled minimum distance
    pts = qam_spec(n).points
    diffs = np.abs(pts[:, None] - pts[None, :])
    np.fill_diagonal(diffs, np.inf)
    assert diffs.min() == 2.0


def test_qam_spec_rejects_small_n():
    with pytest.raises(ValueError):
        qam_spec(1)


def test_symbol_from_index_examples():
    assert symbol_from_index((0, 0), 1.0) == 3 + 3j
    assert symbol_from_index((0, 1), 1.0) == 1 + 3j
    assert symbol_from_index((0, 0), 0.5) == 1.5 + 1.5j


def test_symbol_from_index_validation():
    with pytest.raises(ValueError):
        symbol_from_index((0, 4), 1.0)
    with pytest.raises(ValueError):
        symbol_from_index((0, 0), 0.0)


def test_base_region_membership_examples():
    assert base_region_membership([1.0, 1.0], 0, [0.0, 0.0])
    assert not base_region_membership([-1.0, 1.0], 0, [0.0, 0.0])
    assert base_region_membership([-1.0, 1.0], 1, [0.0, 0.0])


def test_nearest_symbol_exact_points():
    spec = qam_spec(2)
    assert np.array_equal(nearest_symbol(3 + 3j, 1.0, spec), [0, 0])
    assert np.array_equal(nearest_symbol(1.5 + 1.5j, 0.5, spec), [0, 0])


def test_nearest_symbol_tie_breaks_lexicographically():
    # 2+3j is equidistant from 3+3j = (0,0) and 1+3j = (0,1); both distances
    # are exactly 1, so the lexicographically smaller index must win
    spec = qam_spec(2)
    d = np.abs(spec.points - (2 + 3j))
    tied = spec.indices[np.flatnonzero(d == d.min())]
    assert [list(t) for t in tied] == [[0, 0], [0, 1]]
    assert np.array_equal(nearest_symbol(2 + 3j, 1.0, spec), [0, 0])


def test_nearest_symbol_rejects_bad_tau():
    with pytest.raises(ValueError):
        nearest_symbol(1 + 1j, 0.0, qam_spec(2))


def test_region_check_examples():
    assert region_decomposition_check(3 + 3j, (0, 0), 1.0)
    assert not region_decomposition_check(0j, (0, 0), 1.0)


def test_region_check_matches_min_distance_detection():
    # nested-cone membership must agree with brute-force nearest-point
    # detection away from decision boundaries
    spec = qam_spec(2)
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(1000):
        y = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
        d2 = np.abs(spec.points - y) ** 2
        order = np.argsort(d2, kind="stable")
        best = order[0]
        # skip points within 1e-9 of any bisector plane through the winner
        margins = (d2 - d2[best]) / (2.0 * np.abs(spec.points - spec.points[best]) + 1e-300)
        margins[best] = np.inf
        if margins.min() < 1e-9:
            continue
        checked += 1
        for r in range(spec.size):
            inside = region_decomposition_check(y, spec.indices[r], 1.0)
            assert inside == (r == best), (y, spec.indices[r])
    assert checked > 900
