import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate
from scipy.special import jv

from weilinterp.oscillator import (
    CASIMIR_FORMS, GridFunction, GridResolutionError, HermiteCoefficients, SampleVector,
    TailDecayError, act_lie, act_unipotent, basis_function, casimir_apply, commutator,
    derivative, eval_Q, evaluate, fourier, fourier_at, fourier_eigenvalue, gaussian,
    hermite_analysis, hermite_derivatives_at_zero, hermite_functions, hermite_synthesis,
    kappa_weight, lie_matrix, poisson_residual, q_invariance_report, radial_basis, rel_l2,
    sample_map, theta_coefficients,
)


def mixture(rng, n_terms=4, parity="even"):
    """Random even (or odd) combination of shifted, dilated Gaussians."""
    centers = rng.uniform(-2, 2, n_terms)
    widths = rng.uniform(0.6, 1.6, n_terms)
    amps = rng.normal(size=n_terms) + 1j * rng.normal(size=n_terms)
    s = 1 if parity == "even" else -1

    def f(x):
        out = np.zeros_like(x, dtype=complex)
        for c, w, a in zip(centers, widths, amps):
            out += a * (np.exp(-np.pi * w * (x - c) ** 2) + s * np.exp(-np.pi * w * (x + c) ** 2))
        return out

    return GridFunction.from_callable(f, parity)


def test_gaussian_lie_examples():
    g = gaussian()
    x = g.x
    assert np.allclose(act_lie("kappa", g).values, 0.5 * g.values, atol=1e-10)
    assert act_lie("X", g).values[x == 0][0] == 0
    expected_h = (0.5 - 2 * np.pi * x ** 2) * g.values
    assert np.max(np.abs(act_lie("H", g).values - expected_h)) < 1e-10
    with pytest.raises(ValueError):
        act_lie("Z", g)


def test_lie_output_tail_is_checked():
    # a function that only just decays by x = L - 1 is pushed over by X
    wide = GridFunction.from_callable(lambda x: np.exp(-0.35 * x * x), "even")
    with pytest.raises(TailDecayError):
        act_lie("X", wide)


@pytest.mark.parametrize("parity", ["even", "odd"])
def test_commutators_on_hermite_basis(parity):
    for k in range(21):
        phi = basis_function(k, parity)
        scale = phi.norm()
        pm = commutator("p", "m", phi)
        assert (pm - act_lie("kappa", phi)).norm() / scale < 1e-6
        kp = commutator("kappa", "p", phi)
        assert (kp - 2 * act_lie("p", phi)).norm() / scale < 1e-6
        km = commutator("kappa", "m", phi)
        assert (km + 2 * act_lie("m", phi)).norm() / scale < 1e-6


def test_fourier_intertwines_x_and_y():
    # F(x^2 phi) = -phi^''/(4 pi^2), so F X F^-1 = -Y (the adjoint action of the Weyl element)
    for parity in ("even", "odd"):
        for k in range(21):
            phi = basis_function(k, parity)
            lhs = fourier(act_lie("X", phi))
            rhs = act_lie("Y", fourier(phi))
            assert (lhs + rhs).norm() / phi.norm() < 1e-6
            if k:
                assert (lhs - rhs).norm() / phi.norm() > 1


def test_fourier_examples():
    g = gaussian()
    assert np.max(np.abs(fourier(g).values - g.values)) < 1e-9
    rng = np.random.default_rng(0)
    phi = mixture(rng)
    back = fourier(fourier(phi))
    assert np.max(np.abs(back.values - phi.mirrored())) < 1e-9 * phi.scale()
    assert np.max(np.abs(fourier(fourier(phi), inverse=True).values - phi.values)) < 1e-9 * phi.scale()


def test_fourier_matches_quadrature_oracle():
    rng = np.random.default_rng(1)
    phi = mixture(rng, 3)
    hat = fourier(phi)
    freqs = np.array([0.0, 0.3, 1.1, 2.5])
    direct = fourier_at(phi, freqs)
    assert np.allclose(evaluate(hat, freqs), direct, atol=1e-10)


@pytest.mark.parametrize("parity", ["even", "odd"])
def test_hermite_fourier_eigenvalues_against_quadrature(parity):
    # oracle: adaptive quadrature of the Fourier integral of the closed-form basis
    for k in (0, 1, 4, 9):
        psi = lambda x: hermite_functions(np.array([x]), k + 1, parity)[k, 0]
        xi = 0.37
        re = integrate.quad(lambda x: psi(x) * np.cos(2 * np.pi * x * xi), -9, 9, limit=400)[0]
        im = integrate.quad(lambda x: -psi(x) * np.sin(2 * np.pi * x * xi), -9, 9, limit=400)[0]
        eig = (re + 1j * im) / psi(xi)
        assert abs(eig - fourier_eigenvalue(k, parity)) < 1e-8
        phi = basis_function(k, parity)
        assert rel_l2(fourier(phi), fourier_eigenvalue(k, parity) * phi) < 1e-8


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_fourier_is_unitary(seed):
    phi = mixture(np.random.default_rng(seed))
    assert abs(fourier(phi).norm() - phi.norm()) < 1e-6 * phi.norm()


@pytest.mark.parametrize("parity", ["even", "odd"])
def test_kappa_spectrum(parity):
    K = lie_matrix("kappa", 13, parity)
    eig = np.sort(np.linalg.eigvals(K).real)
    assert np.allclose(eig, kappa_weight(np.arange(13), parity), atol=1e-6)


def test_casimir_examples():
    g = gaussian()
    assert rel_l2(casimir_apply(g), -0.375 * g) < 1e-6
    odd = GridFunction.from_callable(lambda x: x * np.exp(-np.pi * x * x), "odd")
    assert rel_l2(casimir_apply(odd), -0.375 * odd) < 1e-6
    for k in range(11):
        phi = basis_function(k, "even")
        assert rel_l2(casimir_apply(phi), -0.375 * phi) < 1e-6


def test_casimir_forms_agree():
    rng = np.random.default_rng(2)
    for parity in ("even", "odd"):
        phi = mixture(rng, parity=parity)
        ref = casimir_apply(phi, "HXY")
        for form in CASIMIR_FORMS:
            assert rel_l2(casimir_apply(phi, form), ref) < 1e-6


def test_unipotent_examples():
    g = gaussian()
    e = act_unipotent("e_tilde", g)
    n = np.arange(6)
    assert np.allclose(evaluate(e, np.sqrt(n)), evaluate(g, np.sqrt(n)), atol=1e-12)
    assert act_unipotent("e_tilde", g, times=0).values.tolist() == g.values.tolist()
    with pytest.raises(ValueError):
        act_unipotent("h_tilde", g)


def test_f_tilde_gaussian_closed_form():
    # sigma e sigma^-1 on exp(-pi x^2): Gaussian with complex width 1 + 2i
    g = gaussian()
    f = act_unipotent("f_tilde", g)
    z = 1 + 2j
    exact = z ** -0.5 * np.exp(-np.pi * g.x ** 2 / z)
    assert np.max(np.abs(f.values - exact)) < 1e-9

    # independent oracle: quadrature of the Fourier integral of the chirped Gaussian
    def chirped(x):
        return np.exp(-np.pi * x * x * (1 + 2j))

    xi = 0.8
    re = integrate.quad(lambda x: (chirped(x) * np.exp(-2j * np.pi * x * xi)).real, -8, 8, limit=200)[0]
    im = integrate.quad(lambda x: (chirped(x) * np.exp(-2j * np.pi * x * xi)).imag, -8, 8, limit=200)[0]
    assert abs(evaluate(f, [xi])[0] - (re + 1j * im)) < 1e-9


def test_sample_map_examples():
    g = gaussian()
    s = sample_map(g, 3)
    expected = np.exp(-np.pi * np.arange(4))
    assert np.allclose(s.a, expected, atol=1e-12)
    assert np.allclose(s.b, expected, atol=1e-10)
    zero = sample_map(g * 0, 5)
    assert not np.any(zero.stacked())
    rng = np.random.default_rng(3)
    phi = mixture(rng)
    assert abs(sample_map(phi, 4).a[0] - phi.values[phi.N // 2]) < 1e-12
    with pytest.raises(GridResolutionError):
        sample_map(g, 65)
    sample_map(g, 64)


def test_sample_vector_json_round_trip():
    s = sample_map(gaussian(), 6)
    t = SampleVector.from_json(s.to_json())
    assert np.array_equal(s.a, t.a) and np.array_equal(s.b, t.b)
    with pytest.raises(ValueError):
        SampleVector(3, np.zeros(4), np.zeros(3))


def test_grid_function_json_and_validation():
    phi = mixture(np.random.default_rng(4))
    back = GridFunction.from_json(phi.to_json())
    assert np.array_equal(back.values, phi.values) and back.parity == "even"
    with pytest.raises(ValueError):
        GridFunction(8.0, 2048, phi.values, "neither")
    with pytest.raises(GridResolutionError):
        GridFunction(8.0, 2047, np.zeros(2047), "even")


def test_poisson_residual_examples():
    res, trunc = poisson_residual(gaussian())
    assert abs(res) < 1e-9 and trunc < 1e-12
    for c in (0.3, 1.7):
        phi = GridFunction.from_callable(
            lambda x: np.exp(-np.pi * (x - c) ** 2) + np.exp(-np.pi * (x + c) ** 2), "even")
        hat_oracle = 2 * np.exp(-np.pi * phi.x ** 2) * np.cos(2 * np.pi * c * phi.x)
        assert np.max(np.abs(fourier(phi).values - hat_oracle)) < 1e-9
        assert abs(poisson_residual(phi)[0]) < 1e-9


def test_poisson_residual_mixture_suite():
    rng = np.random.default_rng(5)
    for _ in range(50):
        phi = mixture(rng)
        res, trunc = poisson_residual(phi)
        assert abs(res) < 1e-8 * max(phi.scale(), 1) and trunc < 1e-10


def test_q_invariance():
    assert eval_Q(gaussian() * 0) == 0
    res_e, res_f = q_invariance_report(gaussian())
    assert res_e < 1e-12 and res_f < 1e-8
    rng = np.random.default_rng(6)
    for _ in range(10):
        phi = mixture(rng)
        res_e, res_f = q_invariance_report(phi)
        assert res_e < 1e-10 * phi.scale() and res_f < 1e-8 * phi.scale()


def test_hermite_basis_shape_and_orthonormality():
    g = gaussian()
    for parity in ("even", "odd"):
        B = hermite_functions(g.x, 21, parity)
        assert np.allclose(B @ B.T * g.dx, np.eye(21), atol=1e-12)
    psi0 = hermite_functions(g.x, 1, "even")[0]
    assert np.allclose(psi0, 2 ** 0.25 * np.exp(-np.pi * g.x ** 2), atol=1e-14)
    # q(x) exp(-pi x^2) with q a polynomial of degree 2k: the ratio is fit exactly
    x = np.linspace(-1.5, 1.5, 40)
    q = hermite_functions(x, 4, "even")[3] * np.exp(np.pi * x * x)
    coef = np.polynomial.polynomial.polyfit(x, q, 6)
    assert np.allclose(np.polynomial.polynomial.polyval(x, coef), q, atol=1e-8)


def test_hermite_derivative_at_zero():
    d = hermite_derivatives_at_zero(6, "odd")
    for k in range(6):
        phi = basis_function(k, "odd")
        assert abs(derivative(phi, 1)[phi.N // 2] - d[k]) < 1e-8 * max(1, abs(d[k]))
    assert not np.any(hermite_derivatives_at_zero(4, "even"))


def test_synthesis_analysis_round_trip():
    g = gaussian()
    unit = HermiteCoefficients("even", [1.0])
    assert np.allclose(hermite_synthesis(unit).values, g.values * 2 ** 0.25, atol=1e-14)
    c = hermite_analysis(g, 6).coeffs
    assert np.allclose(c, [2 ** -0.25, 0, 0, 0, 0, 0], atol=1e-12)
    rng = np.random.default_rng(7)
    for parity in ("even", "odd"):
        coeffs = rng.normal(size=15) + 1j * rng.normal(size=15)
        phi = hermite_synthesis(HermiteCoefficients(parity, coeffs))
        assert np.allclose(hermite_analysis(phi, 15).coeffs, coeffs, atol=1e-10)
    back = HermiteCoefficients.from_json(HermiteCoefficients("odd", coeffs).to_json())
    assert np.array_equal(back.coeffs, coeffs)


@pytest.mark.parametrize("d", [1, 3, 5])
def test_radial_basis_fourier_eigenvalues(d):
    # oracle: d-dimensional radial Fourier transform as a Hankel integral
    nu = d / 2 - 1
    rho = 0.6
    for k in range(4):
        f = lambda r: radial_basis(np.array([r]), k + 1, d)[k, 0]
        integrand = lambda r: f(r) * jv(nu, 2 * np.pi * rho * r) * r ** (d / 2)
        hat = 2 * np.pi * rho ** (-nu) * integrate.quad(integrand, 0, 8, limit=300)[0]
        assert abs(hat - (-1) ** k * f(rho)) < 1e-9


def test_radial_basis_normalisation():
    from scipy.special import gamma
    for d in (1, 3, 5):
        area = 2 * np.pi ** (d / 2) / gamma(d / 2)
        for k in range(4):
            val = integrate.quad(lambda r: radial_basis(np.array([r]), k + 1, d)[k, 0] ** 2 * r ** (d - 1),
                                 0, 8, limit=200)[0]
            assert abs(area * val - 1) < 1e-9


def test_theta_coefficients():
    assert theta_coefficients(5).tolist() == [1, 2, 0, 0, 2]
    assert theta_coefficients(10)[9] == 2
    assert theta_coefficients(1).tolist() == [1]
    c = theta_coefficients(100)
    squares = {n * n for n in range(10)}
    assert c.tolist() == [1 if k == 0 else (2 if k in squares else 0) for k in range(100)]
    # sums of three squares: r_3(1) = 6, r_3(2) = 12, r_3(3) = 8, r_3(7) = 0
    r3 = theta_coefficients(8, dim=3)
    assert r3[[1, 2, 3, 7]].tolist() == [6, 12, 8, 0]
    with pytest.raises(ValueError):
        theta_coefficients(0)
