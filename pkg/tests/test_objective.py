import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from obfb.diagnostics import freq_dispersion
from obfb.inverse import build_hs_system, build_system
from obfb.objective import (CostConfig, DegenerateChannelError, Kernel, KernelError, Objective,
                            analysis_centers, default_time_center, freq_kernel_profile, kernel_freq,
                            kernel_time, lambda_kernel, make_kernels, seminorm_sq)
from obfb.paramspace import ParamSpace, assemble, build_paramspace

seeds = st.integers(0, 2**32 - 1)


def quad_kappa(d, f, alpha=2.0):
    """Independent quadrature of int_{-1/2}^{1/2} |nu|^alpha exp(-2i pi d (nu + f)) d nu."""
    def re(v):
        return abs(v) ** alpha * np.cos(2 * np.pi * d * (v + f))

    def im(v):
        return -abs(v) ** alpha * np.sin(2 * np.pi * d * (v + f))
    opts = dict(epsabs=1e-13, epsrel=1e-13, limit=400, points=[0.0])
    return integrate.quad(re, -0.5, 0.5, **opts)[0] + 1j * integrate.quad(im, -0.5, 0.5, **opts)[0]


def fd_gradient(obj, C, h=1e-6):
    G = np.zeros(C.shape, dtype=complex if np.iscomplexobj(C) else float)
    for idx in np.ndindex(C.shape):
        E = np.zeros(C.shape, dtype=C.dtype)
        E[idx] = h
        g = (obj.cost(C + E) - obj.cost(C - E)) / (2 * h)
        if np.iscomplexobj(C):
            g = g + 1j * (obj.cost(C + 1j * E) - obj.cost(C - 1j * E)) / (2 * h)
        G[idx] = g
    return G


@pytest.fixture(scope="module")
def spaces(pp_sine):
    return {"general": build_paramspace(build_system(pp_sine, 3, 0)),
            "hs": build_paramspace(build_hs_system(pp_sine, 3, 0))}


# --- kernels ----------------------------------------------------------------------

def test_closed_form_profile_matches_quadrature():
    rng = np.random.default_rng(0)
    prof = freq_kernel_profile(2.0, 40)
    for _ in range(100):
        d = int(rng.integers(-40, 41))
        f = rng.uniform(-0.5, 0.5)
        kappa = prof[abs(d)] * np.exp(-2j * np.pi * d * f)
        assert abs(kappa - quad_kappa(d, f)) < 1e-8


@pytest.mark.parametrize("alpha", [1.0, 1.5, 3.0])
def test_general_alpha_profile(alpha):
    prof = freq_kernel_profile(alpha, 12)
    for d in range(13):
        assert abs(prof[d] - quad_kappa(d, 0.0, alpha).real) < 1e-9


def test_alpha2_limit_of_general_branch():
    # the quadrature branch at alpha close to 2 approaches the closed form
    a = freq_kernel_profile(2.0 + 1e-9, 10)
    b = freq_kernel_profile(2.0, 10)
    assert np.allclose(a, b, atol=1e-8)


@given(seeds, st.integers(1, 5), st.integers(1, 4))
def test_lambda_seminorm_is_frobenius(seed, N, p):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((N, p)) + 1j * rng.standard_normal((N, p))
    assert seminorm_sq(A, lambda_kernel(N, p)) == np.sum(np.abs(A.T.ravel()) ** 2)


def test_kernel_representations_agree():
    rng = np.random.default_rng(1)
    cfg = CostConfig("freq")
    K = kernel_freq(cfg, 0, 4, 1, 1, 6, centers=[0.2] * 6)
    dense = Kernel(4, 3, dense=K.matrix())
    A = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    assert np.isclose(seminorm_sq(A, K), seminorm_sq(A, dense))
    assert K.tensor().shape == (4, 4, 3, 3)
    T = K.tensor()
    # four-index form: K(i, i', s, s') = K'[i + sN, i' + s'N]
    assert T[1, 2, 0, 2] == K.matrix()[1 + 0 * 4, 2 + 2 * 4]


def test_freq_kernel_hermitian_psd():
    K = kernel_freq(CostConfig("freq"), 0, 8, 2, 0, 14, centers=[0.31] * 14).matrix()
    assert np.allclose(K, K.conj().T)
    assert np.linalg.eigvalsh(K).min() > -1e-12


def test_seminorm_rejects_bad_kernels():
    A = np.ones((2, 1))
    with pytest.raises(KernelError):
        seminorm_sq(A, Kernel(2, 1, dense=np.array([[1, 1j], [1j, 1]])))
    with pytest.raises(KernelError):
        seminorm_sq(A, Kernel(2, 1, dense=-np.eye(2)))
    with pytest.raises(ValueError):
        seminorm_sq(np.ones((3, 1)), lambda_kernel(2, 1))


def test_time_kernel_diagonal_values():
    cfg = CostConfig("time")
    K = kernel_time(cfg, 0, 2, 1, 0, 4)
    # tap times m = (s - p1) N - i for s = 0, 1 and i = 0, 1
    m = np.array([-2, -3, 0, -1])
    c = default_time_center(2, 1, 0)
    assert c == -1.5
    assert np.allclose(K.diag, 0.25 * np.abs(m - c) ** 2)


def test_cost_config_validation():
    with pytest.raises(ValueError):
        CostConfig("space")
    with pytest.raises(ValueError):
        CostConfig("time", alpha=0)
    with pytest.raises(ValueError):
        CostConfig("time", weights=[0.5, 0.2])
    assert CostConfig("time", weights=[0.25, 0.75]).weight(1, 2) == 0.75
    assert CostConfig("time").weight(3, 14) == 1 / 14


# --- costs against direct formulas ---------------------------------------------------

@pytest.mark.parametrize("kind", ["general", "hs"])
def test_time_cost_matches_direct_formula(spaces, mclt_sine, kind):
    ps = spaces[kind]
    obj = Objective(ps, make_kernels(ps, CostConfig("time"), mclt_sine))
    rng = np.random.default_rng(2)
    C = rng.standard_normal(ps.c_shape).astype(ps.c_dtype)
    bank = assemble(ps, C)
    center = default_time_center(ps.N, ps.p1, ps.p2)
    costs = obj.channel_costs(C)
    for j in range(ps.M):
        h, m = bank.impulses[j], bank.times
        w = np.abs(h) ** 2
        direct = (1 / ps.M) * np.sum((m - center) ** 2 * w) / np.sum(w)
        assert abs(costs[j] - direct) <= 1e-10 * max(1, direct)


def test_freq_cost_matches_dispersion_quadrature(spaces, mclt_sine):
    ps = spaces["general"]
    centers = analysis_centers(mclt_sine)
    obj = Objective(ps, make_kernels(ps, CostConfig("freq"), mclt_sine))
    rng = np.random.default_rng(3)
    C = rng.standard_normal(ps.c_shape) + 1j * rng.standard_normal(ps.c_shape)
    bank = assemble(ps, C)
    costs = obj.channel_costs(C) * ps.M
    for j in range(ps.M):
        assert abs(freq_dispersion(bank, j, 8192, center=centers[j]).dispersion - costs[j]) < 1e-6


def test_analysis_centers_follow_modulation(mclt_sine):
    c = analysis_centers(mclt_sine)
    # channel i of the MCLT is centred at (i - M/2 + 1/2)/M (up to sign convention)
    expected = (np.arange(14) - 7 + 0.5) / 14
    assert np.allclose(np.sort(np.abs(c)), np.sort(np.abs(expected)), atol=1e-6)


def test_degenerate_channel():
    ps = ParamSpace(2, 1, 0, 0, 1, np.zeros((2, 1), dtype=complex), np.zeros((2, 1)),
                    np.array([[1], [0]], dtype=complex))
    obj = Objective(ps, [lambda_kernel(1, 1)] * 2)
    with pytest.raises(DegenerateChannelError):
        obj.cost(np.ones((1, 1), dtype=complex))


def test_wrong_kernel_count(spaces):
    with pytest.raises(ValueError):
        Objective(spaces["general"], [lambda_kernel(8, 4)])


# --- gradients -----------------------------------------------------------------------

COSTS = [("general", "time"), ("general", "freq"), ("hs", "time"), ("hs", "freq")]


@pytest.mark.parametrize("space,kind", COSTS)
def test_gradient_matches_finite_differences(spaces, mclt_sine, space, kind):
    ps = spaces[space]
    obj = Objective(ps, make_kernels(ps, CostConfig(kind), mclt_sine))
    rng = np.random.default_rng(4)
    for _ in range(2):
        C = rng.standard_normal(ps.c_shape)
        if not ps.hs:
            C = C + 1j * rng.standard_normal(ps.c_shape)
        G = obj.gradient(C)
        Gfd = fd_gradient(obj, C)
        assert np.linalg.norm(G - Gfd) / np.linalg.norm(Gfd) < 1e-5


@settings(max_examples=10)
@given(seeds, st.floats(1.0, 3.0))
def test_gradient_general_alpha(spaces, mclt_sine, seed, alpha):
    ps = spaces["hs"]
    obj = Objective(ps, make_kernels(ps, CostConfig("time", alpha=alpha), mclt_sine))
    C = np.random.default_rng(seed).standard_normal(ps.c_shape)
    G, Gfd = obj.gradient(C), fd_gradient(obj, C)
    assert np.linalg.norm(G - Gfd) <= 1e-5 * np.linalg.norm(Gfd)


def test_value_and_grad_consistent(spaces, mclt_sine):
    ps = spaces["general"]
    obj = Objective(ps, make_kernels(ps, CostConfig("freq"), mclt_sine))
    C = ps.zeros()
    J, _ = obj.value_and_grad(C)
    assert J == obj.cost(C)
