import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import integrate

from efplay import (Dataset, NnObjective, ParticleCloud, ToyLinearObjective, reference_gradient,
                    reference_potential)
from efplay.oracles import sine_zero_predictor_loss, toy_gibbs_moments


def one_point(z, y):
    return Dataset([[z]], [y], [[z]], [y])


def cloud_of(*rows):
    return ParticleCloud(np.array(rows, dtype=float))


# --- network output and loss -------------------------------------------------

@pytest.mark.parametrize("rows, expected", [
    ([(1, 0, 1)], 1.0),
    ([(10, 0, 10)], 25.0),
    ([(1, 0, 1), (-1, 0, 1)], 0.0),
])
def test_network_output_examples(nn, rows, expected):
    for z in (0.0, 0.37, 1.0):
        assert nn.network_output(cloud_of(*rows), [z]) == pytest.approx(expected)


def test_network_output_batch_shape(nn, sine):
    out = nn.network_output(cloud_of((1, 2, 0.5)), sine.features)
    assert out.shape == (sine.K,)


def test_dimension_mismatch(nn):
    with pytest.raises(ValueError):
        nn.network_output(ParticleCloud(np.zeros((3, 2))), [0.5])


def test_zero_network_loss_is_quarter(nn, sine):
    cloud = cloud_of((0, 1, 1), (0, -2, 3))
    expected = sine_zero_predictor_loss(101)
    assert expected == pytest.approx(0.25, abs=1e-15)
    assert nn.value(cloud, sine) == pytest.approx(expected, abs=1e-14)


def test_loss_of_perfect_fit(nn, rng):
    cloud = ParticleCloud(rng.normal(0, 2, (20, 3)))
    z = np.linspace(0, 1, 7)[:, None]
    y = nn.network_output(cloud, z)
    assert nn.value(cloud, Dataset(z, y, z, y)) == pytest.approx(0.0, abs=1e-28)


def test_single_term_loss(nn):
    assert nn.value(cloud_of((1, 0, 1)), one_point(0.3, 3.0)) == pytest.approx(2.0)


# --- linear derivative -------------------------------------------------------

def test_linear_derivative_zero_residual(nn, rng):
    cloud = ParticleCloud(rng.normal(0, 2, (20, 3)))
    z = np.linspace(0, 1, 7)[:, None]
    y = nn.network_output(cloud, z)
    xs = rng.normal(0, 3, (50, 3))
    assert np.allclose(nn.linear_derivative(cloud, Dataset(z, y, z, y), xs), 0.0, atol=1e-13)


def test_linear_derivative_single_term(nn):
    data = one_point(0.5, 3.0)
    cloud = cloud_of((1, 0, 1))  # output 1, residual -2
    x = np.array([2.0, 1.0, 0.5])  # phihat = 2 * 1
    assert nn.linear_derivative(cloud, data, x) == pytest.approx(-2.0 * 2.0)


def _mixed_loss(nn, cloud, data, x, eps):
    # F((1 - eps) m + eps delta_x), evaluated directly on the mixed measure
    out = nn.network_output(cloud, data.features)
    phi_x = np.array([math.copysign(min(abs(x[0]), 5), x[0]) * min(max(x[1] * z + x[2], 0), 5)
                      for z in data.features[:, 0]])
    return 0.5 * np.mean(((1 - eps) * out + eps * phi_x - data.labels) ** 2)


def test_linear_derivative_matches_mixture_difference(nn, sine, rng):
    eps = 1e-6
    for _ in range(20):
        cloud = ParticleCloud(rng.normal(0, 2, (30, 3)))
        x = rng.normal(0, 2, 3)
        fd = (_mixed_loss(nn, cloud, sine, x, eps) - nn.value(cloud, sine)) / eps
        centred = nn.linear_derivative(cloud, sine, x) - np.mean(
            nn.linear_derivative(cloud, sine, np.asarray(cloud)))
        assert fd == pytest.approx(centred, rel=1e-4, abs=1e-9)


def test_quadratic_expansion_is_exact(nn, sine, rng):
    m = ParticleCloud(rng.normal(0, 2, (25, 3)))
    m2 = ParticleCloud(rng.normal(0.5, 1.5, (25, 3)))
    out, out2 = nn.network_output(m, sine.features), nn.network_output(m2, sine.features)
    lin = nn.linear_derivative(m, sine, np.asarray(m2)).mean() - nn.linear_derivative(m, sine, np.asarray(m)).mean()
    Q = 0.5 * np.mean((out2 - out) ** 2)
    for eps in (0.1, 0.37, 0.9):
        mixed = 0.5 * np.mean(((1 - eps) * out + eps * out2 - sine.labels) ** 2)
        assert mixed - nn.value(m, sine) == pytest.approx(eps * lin + eps**2 * Q, abs=1e-13)


@settings(max_examples=60, deadline=None)
@given(cloud=arrays(float, (8, 3), elements=st.floats(-50, 50)),
       x=arrays(float, (3,), elements=st.floats(-1e3, 1e3)),
       y=arrays(float, (5,), elements=st.floats(-10, 10)))
def test_linear_derivative_bounded(cloud, x, y):
    nn = NnObjective(1)
    z = np.linspace(0, 1, 5)[:, None]
    data = Dataset(z, y, z, y)
    bound = 25 * (25 + np.max(np.abs(y)))
    assert abs(nn.linear_derivative(ParticleCloud(cloud), data, x)) <= bound + 1e-9


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_permutation_symmetry(seed):
    rng = np.random.default_rng(seed)
    nn = NnObjective(2)
    z = rng.random((6, 2))
    data = Dataset(z, rng.normal(size=6), z, rng.normal(size=6))
    pos = rng.normal(0, 3, (15, 4))
    perm = rng.permutation(15)
    a, b = ParticleCloud(pos), ParticleCloud(pos[perm])
    x = rng.normal(0, 3, (4, 4))
    assert nn.value(a, data) == pytest.approx(nn.value(b, data), rel=1e-12)
    assert np.allclose(nn.linear_derivative(a, data, x), nn.linear_derivative(b, data, x), rtol=1e-12, atol=1e-14)
    assert np.allclose(nn.intrinsic_derivative(a, data, x), nn.intrinsic_derivative(b, data, x), rtol=1e-12, atol=1e-14)


# --- intrinsic derivative ----------------------------------------------------

def test_intrinsic_derivative_zero_residual(nn, rng):
    cloud = ParticleCloud(rng.normal(0, 2, (20, 3)))
    z = np.linspace(0, 1, 7)[:, None]
    y = nn.network_output(cloud, z)
    grad = nn.intrinsic_derivative(cloud, Dataset(z, y, z, y), rng.normal(0, 2, (10, 3)))
    assert np.allclose(grad, 0.0, atol=1e-12)


def test_beta_gradient_vanishes_when_truncated(nn, sine, rng):
    cloud = ParticleCloud(rng.normal(0, 2, (20, 3)))
    xs = np.array([[7.0, 1.0, 0.5], [-5.5, 2.0, 1.0], [100.0, 0.1, 3.0]])
    assert np.all(nn.intrinsic_derivative(cloud, sine, xs)[:, 0] == 0.0)


def test_kinks_take_zero_derivative(nn):
    from efplay.objective import activation_grad, truncation_grad
    assert activation_grad(np.array([0.0, 5.0, 2.5])).tolist() == [0.0, 0.0, 1.0]
    assert truncation_grad(np.array([-5.0, 5.0, 0.0])).tolist() == [0.0, 0.0, 1.0]


def _interior_point(rng, z):
    while True:
        x = np.array([rng.uniform(-4.5, 4.5), rng.uniform(-2, 2), rng.uniform(0.5, 4.5)])
        pre = x[1:-1] @ z.T + x[-1]
        if np.all((pre > 1e-3) & (pre < 5 - 1e-3)):
            return x


def test_intrinsic_matches_finite_differences_interior(nn, sine, rng):
    h = 1e-6
    for _ in range(50):
        cloud = ParticleCloud(rng.normal(0, 2, (20, 3)))
        x = _interior_point(rng, sine.features)
        fd = [(nn.linear_derivative(cloud, sine, x + h * e) - nn.linear_derivative(cloud, sine, x - h * e)) / (2 * h)
              for e in np.eye(3)]
        assert np.allclose(nn.intrinsic_derivative(cloud, sine, x), fd, atol=1e-5, rtol=0)


def test_intrinsic_derivative_multi_feature(rng):
    nn = NnObjective(3)
    z = rng.random((12, 3))
    data = Dataset(z, np.sin(z.sum(axis=1)), z, np.sin(z.sum(axis=1)))
    cloud = ParticleCloud(rng.normal(0, 1, (30, 5)))
    h = 1e-6
    x = np.array([1.2, 0.3, -0.2, 0.4, 1.5])
    fd = [(nn.linear_derivative(cloud, data, x + h * e) - nn.linear_derivative(cloud, data, x - h * e)) / (2 * h)
          for e in np.eye(5)]
    assert np.allclose(nn.intrinsic_derivative(cloud, data, x), fd, atol=1e-6)


# --- reference measure and toy objective ------------------------------------

def test_reference_potential_at_origin():
    assert reference_potential(np.zeros(1)) == pytest.approx(0.5 * math.log(2 * math.pi))
    assert reference_potential(np.zeros(1)) == pytest.approx(0.9189385332)


def test_reference_gradient_is_identity():
    assert reference_gradient([1.0, 2.0, 3.0]).tolist() == [1.0, 2.0, 3.0]


def test_reference_is_normalised():
    total = integrate.quad(lambda x: math.exp(-reference_potential(np.array([x]))), -10, 10, epsabs=1e-13)[0]
    assert total == pytest.approx(1.0, abs=1e-8)


def test_toy_is_independent_of_measure(toy, rng):
    x = np.array([[0.5], [-2.0]])
    a = toy.linear_derivative(ParticleCloud(rng.normal(size=(5, 1))), None, x)
    b = toy.linear_derivative(ParticleCloud(rng.normal(3, 1, size=(9, 1))), None, x)
    assert np.array_equal(a, b) and np.allclose(a, [0.125, 2.0])
    assert np.allclose(toy.intrinsic_derivative(None, None, x), x)
    assert toy.value(ParticleCloud([[1.0], [3.0]])) == pytest.approx(2.5)


@pytest.mark.parametrize("potential, sigma2", [("quadratic", 2.0), ("quadratic", 0.5), ("zero", 2.0)])
def test_toy_fixed_point_variance_matches_quadrature(potential, sigma2):
    toy = ToyLinearObjective(potential)
    curvature = 1.0 if potential == "quadratic" else 0.0
    var_quad, _ = toy_gibbs_moments(curvature, sigma2)
    assert toy.fixed_point_variance(math.sqrt(sigma2)) == pytest.approx(var_quad, rel=1e-9)


def test_toy_fixed_point_closed_forms():
    assert ToyLinearObjective("quadratic").fixed_point_variance(math.sqrt(2.0)) == pytest.approx(0.5)
    assert ToyLinearObjective("zero").fixed_point_variance(0.3) == pytest.approx(1.0)
    s2 = 0.7
    assert ToyLinearObjective().fixed_point_variance(math.sqrt(s2)) == pytest.approx(s2 / (2 + s2))
