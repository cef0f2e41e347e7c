import numpy as np
import pytest
from hypothesis import given, strategies as st

from obfb.laurent import (LaurentMatrix, LaurentPoly, _cofactor_det, _leibniz_det, determinant,
                          mul, normalize, relative_residual, roots, same_root)

seeds = st.integers(0, 2**32 - 1)


def rand_poly(rng, width, lo_range=3):
    lo = int(rng.integers(-lo_range, lo_range + 1))
    c = rng.standard_normal(width) + 1j * rng.standard_normal(width)
    return LaurentPoly(lo, c)


def rand_matrix(rng, n, m=None, width=3):
    m = n if m is None else m
    return LaurentMatrix(tuple(tuple(rand_poly(rng, int(rng.integers(1, width + 1)), 2)
                                     for _ in range(m)) for _ in range(n)))


def close(a, b, rel=1e-10):
    d = a - b
    ref = max(a.max_abs(), b.max_abs(), 1.0)
    return d.is_zero() or d.max_abs() <= rel * ref


# --- normalize ---------------------------------------------------------------

def test_normalize_strips_exact_zeros():
    p = normalize(LaurentPoly(-1, [0, 1, 0]))
    assert p.lo == 0 and np.array_equal(p.coeffs, [1])


def test_normalize_empty_is_zero():
    assert normalize(LaurentPoly(4, [])).is_zero()
    assert normalize(LaurentPoly(4, [0, 0])).is_zero()


def test_normalize_tolerance_shifts_lo():
    p = normalize(LaurentPoly(0, [1e-18, 1]), tol=1e-12)
    assert p.lo == 1 and np.array_equal(p.coeffs, [1])


@given(seeds, st.integers(1, 8))
def test_normalize_support_is_tight(seed, width):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(width + 4)
    c[:2] = 0
    c[-2:] = 0
    p = normalize(LaurentPoly(int(rng.integers(-5, 5)), c))
    if not p.is_zero():
        assert p.coeffs[0] != 0 and p.coeffs[-1] != 0


# --- arithmetic ----------------------------------------------------------------

def test_difference_of_squares():
    p = mul(LaurentPoly(0, [1, -1]), LaurentPoly(0, [1, 1]))
    assert p.allclose(LaurentPoly(0, [1, 0, -1]))


def test_mul_by_zero():
    assert mul(LaurentPoly(2, [1, 2, 3]), LaurentPoly.zero()).is_zero()


def test_units_cancel():
    z = LaurentPoly.monomial(-1)
    zinv = LaurentPoly.monomial(1)
    p = z * zinv
    assert p.lo == 0 and np.allclose(p.coeffs, [1])


def test_evaluation_matches_definition():
    p = LaurentPoly(-2, [1, 2, 3, 4])
    z = np.array([0.7 + 0.2j, -1.3, 2j])
    direct = sum(c * z ** -(-2 + t) for t, c in enumerate(p.coeffs))
    assert np.allclose(p(z), direct)


@given(seeds, st.integers(1, 8), st.integers(1, 8), st.integers(1, 8))
def test_mul_commutative_associative(seed, wa, wb, wc):
    rng = np.random.default_rng(seed)
    a, b, c = rand_poly(rng, wa), rand_poly(rng, wb), rand_poly(rng, wc)
    assert (a * b).allclose(b * a, atol=1e-12)
    assert ((a * b) * c).allclose(a * (b * c), atol=1e-12 * max(1, (a * b * c).max_abs()))


@given(seeds, st.integers(1, 6), st.integers(1, 6))
def test_add_sub_inverse(seed, wa, wb):
    rng = np.random.default_rng(seed)
    a, b = rand_poly(rng, wa), rand_poly(rng, wb)
    assert ((a + b) - b).allclose(a, atol=1e-12)


# --- roots -----------------------------------------------------------------------

def test_roots_linear():
    r = roots(LaurentPoly(0, [1, -1]))
    assert len(r) == 1 and np.isclose(r[0], 1)


def test_roots_monomial_is_unit():
    assert roots(LaurentPoly.monomial(3)).size == 0


def test_roots_of_one_minus_z2():
    r = np.sort_complex(roots(LaurentPoly(0, [1, 0, -1])))
    assert np.allclose(r, [-1, 1])


def test_roots_of_zero_raise():
    with pytest.raises(ValueError):
        roots(LaurentPoly.zero())


@given(seeds, st.integers(2, 31))
def test_roots_evaluate_back_to_zero(seed, width):
    rng = np.random.default_rng(seed)
    p = LaurentPoly(0, rng.standard_normal(width) + 1j * rng.standard_normal(width))
    r = roots(p)
    assert len(r) == width - 1
    # evaluate in whichever of z, 1/z has modulus <= 1 so the monomials stay O(1)
    deg = width - 1
    val = np.abs(p(r)) * np.where(np.abs(r) > 1, 1.0, np.abs(r) ** deg)
    assert np.all(val <= 1e-8 * p.max_abs())
    assert np.all(relative_residual(p, r) <= 1e-10)


@given(seeds, st.integers(2, 20))
def test_roots_laurent_shift_invariant(seed, width):
    rng = np.random.default_rng(seed)
    p = rand_poly(rng, width)
    shifted = LaurentPoly(p.lo + 5, p.coeffs)
    assert np.allclose(np.sort_complex(roots(p)), np.sort_complex(roots(shifted)))


def test_same_root_relative_rule():
    assert same_root(1000.0, 1000.0 + 5e-5)
    assert not same_root(1.0, 1.0 + 1e-6)


# --- determinants ---------------------------------------------------------------

def test_det_diagonal():
    m = LaurentMatrix(((LaurentPoly.constant(1), LaurentPoly.zero()),
                       (LaurentPoly.zero(), LaurentPoly.monomial(1))))
    d = determinant(m)
    assert d.lo == 1 and np.allclose(d.coeffs, [1])


def test_det_rank_deficient():
    one = LaurentPoly.constant(1)
    m = LaurentMatrix(((one, one), (one, one)))
    assert determinant(m).is_zero()
    assert determinant(m, method="interp").is_zero()


def test_det_zero_row_interp():
    m = LaurentMatrix(((LaurentPoly.zero(), LaurentPoly.zero()),
                       (LaurentPoly.constant(1), LaurentPoly.monomial(2))))
    assert determinant(m, method="interp").is_zero()


def test_det_requires_square():
    with pytest.raises(ValueError):
        determinant(rand_matrix(np.random.default_rng(0), 2, 3))


def test_random_4x4_interp_matches_cofactor():
    rng = np.random.default_rng(3)
    for _ in range(10):
        m = rand_matrix(rng, 4)
        assert close(determinant(m, method="interp"), _cofactor_det(m), 1e-10)


@given(seeds, st.integers(1, 4))
def test_interp_equals_cofactor_all_sizes(seed, n):
    m = rand_matrix(np.random.default_rng(seed), n)
    assert close(determinant(m, method="interp"), determinant(m, method="cofactor"), 1e-10)


@given(seeds, st.integers(1, 4))
def test_cofactor_equals_leibniz(seed, n):
    m = rand_matrix(np.random.default_rng(seed), n)
    assert close(_cofactor_det(m), _leibniz_det(m), 1e-10)


@given(seeds)
def test_det_multiplicative_3x3(seed):
    rng = np.random.default_rng(seed)
    a, b = rand_matrix(rng, 3), rand_matrix(rng, 3)
    assert close(determinant(a @ b), determinant(a) * determinant(b), 1e-9)


def test_det_interp_handles_negative_powers():
    # entries with z (positive powers) as well as z^-1
    z = LaurentPoly.monomial(-1)
    m = LaurentMatrix(((z, LaurentPoly.constant(2), LaurentPoly.zero(), LaurentPoly.zero()),
                       (LaurentPoly.zero(), z, LaurentPoly.zero(), LaurentPoly.zero()),
                       (LaurentPoly.zero(), LaurentPoly.zero(), LaurentPoly(1, [1, 1]), LaurentPoly.zero()),
                       (LaurentPoly.zero(), LaurentPoly.zero(), LaurentPoly.zero(), LaurentPoly.constant(3))))
    d = determinant(m, method="interp")
    assert close(d, 3 * z * z * LaurentPoly(1, [1, 1]))


# --- matrices ----------------------------------------------------------------------

def test_blocks_roundtrip():
    rng = np.random.default_rng(1)
    blocks = rng.standard_normal((3, 2, 4)) + 1j * rng.standard_normal((3, 2, 4))
    lo, back = LaurentMatrix.from_blocks(blocks, lo=-1).to_blocks()
    assert lo == -1 and np.allclose(back, blocks)


def test_evaluate_matches_block_sum():
    rng = np.random.default_rng(2)
    blocks = rng.standard_normal((3, 2, 2))
    m = LaurentMatrix.from_blocks(blocks, lo=-1)
    z = np.array([0.5, 1j, -2.0])
    ref = sum(blocks[l][None] * z[:, None, None] ** -(l - 1) for l in range(3))
    assert np.allclose(m.evaluate(z), ref)


def test_matmul_matches_pointwise_product():
    rng = np.random.default_rng(4)
    a, b = rand_matrix(rng, 2, 3), rand_matrix(rng, 3, 2)
    z = np.exp(2j * np.pi * rng.uniform(size=5)) * 1.1
    assert np.allclose((a @ b).evaluate(z), a.evaluate(z) @ b.evaluate(z))
