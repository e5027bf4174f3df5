import numpy as np
import pytest

from weilinterp import oscillator as osc
from weilinterp.interpolation import (
    DesignMatrix, IllConditionedError, PoissonFunctional, build_design, build_radial_design,
    left_kernel, mv_dimension_report, numerical_kernel, odd_relation_vector, reconstruct,
)


@pytest.fixture(scope="module")
def design():
    return build_design(40, 24)


def random_combination(rng, k_max, n_terms=8, parity="even"):
    c = np.zeros(k_max, dtype=complex)
    idx = rng.choice(k_max, n_terms, replace=False)
    c[idx] = rng.normal(size=n_terms) + 1j * rng.normal(size=n_terms)
    return c


def test_design_examples(design):
    n = np.arange(41)
    psi0 = 2 ** 0.25 * np.exp(-np.pi * n)
    assert np.allclose(design.A[:, 0], psi0, atol=1e-12)
    assert np.allclose(design.B[:, 0], psi0, atol=1e-10)
    assert design.shape == (82, 24)
    assert design.eigen_consistency() < 1e-9
    one = build_design(10, 1)
    assert np.linalg.matrix_rank(one.matrix) == 1
    odd = build_design(10, 6, parity="odd")
    assert np.all(np.abs(odd.A[0]) < 1e-14)


def test_design_columns_match_closed_form(design):
    # oracle: Hermite functions evaluated directly by recurrence at sqrt(n)
    direct = osc.hermite_functions(np.sqrt(np.arange(41)), 24, "even").T
    assert np.allclose(design.A, direct, atol=1e-11)


def test_design_rejects_unresolved_basis():
    with pytest.raises(osc.GridResolutionError):
        build_design(10, 60, L=4.0, N=256)
    with pytest.raises(ValueError):
        build_design(10, 4, parity="even", derivative_rows=True)


def test_numerical_kernel_examples(design):
    dim, s = numerical_kernel(design)
    assert dim == 0 and s[0] / s[-1] > 1e-3
    assert numerical_kernel(build_design(10, 1))[0] == 0
    M = design
    dup = DesignMatrix(np.hstack([M.A, M.A[:, :1]]), np.hstack([M.B, M.B[:, :1]]), "even", 40)
    assert numerical_kernel(dup)[0] >= 1


def test_poisson_orthogonal_to_every_column(design):
    P = PoissonFunctional(40)
    assert np.abs(P.vector @ design.matrix).max() < 1e-8
    assert P.weights[[0, 1, 2, 4, 36, 40]].tolist() == [1, 2, 0, 2, 2, 0]


def test_left_kernel_recovers_poisson(design):
    lk = left_kernel(design)
    assert lk.dim == 1
    assert lk.alignment(PoissonFunctional(40).vector) > 1 - 1e-4


def test_left_kernel_of_augmented_design(design):
    # append the Poisson functional applied to the columns as an extra row
    extra = (PoissonFunctional(40).vector @ design.matrix)[None, :]
    aug = DesignMatrix(np.vstack([design.A, extra]), design.B, "even", 40)
    lk = left_kernel(aug, rows="all", live_tol=0)
    e_new = np.zeros(aug.matrix.shape[0])
    e_new[41] = 1.0
    assert lk.alignment(e_new) > 1 - 1e-6


def test_odd_relation_in_left_kernel():
    D = build_design(40, 24, parity="odd", derivative_rows=True)
    v = odd_relation_vector(40)
    assert np.abs(v @ D.matrix).max() < 1e-7
    assert left_kernel(D, rows="all").alignment(v) > 1 - 1e-4
    # the even Poisson pattern is not a relation in the odd sector
    plain = build_design(40, 24, parity="odd")
    assert np.abs(PoissonFunctional(40).vector @ plain.matrix).max() > 1e-3


def test_monotone_conditioning():
    k = 12
    prev = 0.0
    for n_max in (11, 15, 20, 30, 40):
        s = numerical_kernel(build_design(n_max, k))[1][0]
        assert s >= prev * (1 - 1e-9)
        prev = s


def test_reconstruct_examples(design):
    g = osc.gaussian()
    r = reconstruct(osc.sample_map(g, 40), 24, design=design)
    assert abs(r.coefficients.coeffs[0] - 2 ** -0.25) < 1e-10
    assert np.abs(osc.hermite_synthesis(r.coefficients).values - g.values).max() < 1e-6
    zero = osc.SampleVector(40, np.zeros(41), np.zeros(41))
    assert not np.any(reconstruct(zero, 24, design=design).coefficients.coeffs)


def test_reconstruct_round_trip(design):
    rng = np.random.default_rng(11)
    for _ in range(10):
        c = random_combination(rng, 24)
        phi = osc.hermite_synthesis(osc.HermiteCoefficients("even", c))
        r = reconstruct(osc.sample_map(phi, 40), 24, design=design)
        assert np.linalg.norm(r.coefficients.coeffs - c) / np.linalg.norm(c) < 1e-5
        assert abs(r.poisson_residual) < 1e-8 * np.linalg.norm(c)


def test_reconstruct_reports_ill_conditioning():
    # many more basis functions than samples: rank deficient
    s = osc.sample_map(osc.gaussian(), 4)
    with pytest.raises(IllConditionedError):
        reconstruct(s, 20)
    # ridge gives the minimum-norm fit: samples are reproduced, coefficients are not unique
    r = reconstruct(s, 20, regularization=1e-8)
    assert r.residual < 1e-6 and r.condition == np.inf


def test_reconstruct_with_ridge_on_noisy_samples(design):
    rng = np.random.default_rng(12)
    c = random_combination(rng, 24)
    phi = osc.hermite_synthesis(osc.HermiteCoefficients("even", c))
    s = osc.sample_map(phi, 40)
    noisy = osc.SampleVector(40, s.a + 1e-6 * rng.normal(size=41), s.b)
    r = reconstruct(noisy, 24, design=design, regularization=1e-3)
    assert np.linalg.norm(r.coefficients.coeffs - c) / np.linalg.norm(c) < 1e-4


def test_mv_report_even_and_odd():
    even = mv_dimension_report()
    assert (even["h0"], even["h1"]) == (1, 0)
    odd = mv_dimension_report(parity="odd", derivative_rows=True)
    assert (odd["h0"], odd["h1"]) == (1, 0)
    # without the derivative functionals the odd sector misses a dimension
    bare = mv_dimension_report(parity="odd")
    assert bare["h1"] == 1


@pytest.mark.parametrize("d", [3, 5])
def test_mv_report_radial(d):
    rep = mv_dimension_report(radial_dim=d)
    assert rep["h1"] == 0


def test_radial_design_fourier_relation():
    D = build_radial_design(3, 20, 10)
    assert D.eigen_consistency() == 0
    odd = build_design(20, 10, parity="odd")
    # f(v) = phi(|v|)/|v| maps odd Hermite functions to radial d = 3 ones (up to scale)
    r = np.sqrt(np.arange(1, 7))
    ratio = odd.A[1:7, :] / r[:, None] / D.A[1:7, :]
    assert np.allclose(ratio / ratio[0], 1, atol=1e-8)
