from __future__ import annotations

import numpy as np
import pytest
from scipy.special import softmax

from simplex_infogeo.aggregation import shannon_entropy
from simplex_infogeo.divergence import kl_reverse
from simplex_infogeo.duality import (
    CoordinateSystem,
    DualCoords,
    EtaCoords,
    ExponentialFamily,
    FisherMatrix,
    eta_from_theta,
    eta_of,
    expfam_eval,
    expfam_fisher,
    expfam_psi,
    fenchel_gap,
    fisher_eta,
    fisher_eta_of,
    fisher_theta,
    indicator_family,
    phi,
    psi,
    theta_from_eta,
    theta_of,
)
from simplex_infogeo.errors import DegenerateFamilyWarning, DimensionMismatch, OutOfDomain
from simplex_infogeo.finite_diff import central_gradient, central_hessian
from simplex_infogeo.simplex import Composition, close


def test_psi_at_origin_is_log_three() -> None:
    assert psi([0.0, 0.0]) == pytest.approx(np.log(3.0), abs=1e-15)


def test_phi_worked_example() -> None:
    assert phi([0.2, 0.3]) == pytest.approx(-1.029653, abs=1e-6)


def test_psi_large_theta_does_not_overflow() -> None:
    assert psi([800.0, 0.0]) == pytest.approx(800.0)


def test_eta_rejects_boundary_points() -> None:
    with pytest.raises(OutOfDomain):
        EtaCoords([0.5, 0.5])
    with pytest.raises(OutOfDomain):
        EtaCoords([0.0, 0.3])


def test_legendre_round_trips(random_comp) -> None:
    for D in range(2, 9):
        x = random_comp(D)
        theta, eta = theta_of(x), eta_of(x)

        assert np.allclose(theta_from_eta(eta_from_theta(theta)).theta, theta.theta, atol=1e-10)
        assert np.allclose(eta_from_theta(theta_from_eta(eta)).eta, eta.eta, atol=1e-14)
        assert abs(DualCoords.from_composition(x).legendre_gap) < 1e-12


def test_legendre_round_trip_over_wide_theta_range(rng) -> None:
    for _ in range(200):
        theta = rng.uniform(-10.0, 10.0, size=int(rng.integers(1, 8)))

        assert np.allclose(theta_from_eta(eta_from_theta(theta)).theta, theta, rtol=0.0, atol=1e-9)


def test_potential_gradients_are_the_dual_coordinates() -> None:
    theta = theta_of([0.1, 0.2, 0.3, 0.4]).theta
    eta = np.array([0.15, 0.25, 0.35])

    assert np.allclose(central_gradient(psi, theta), eta_from_theta(theta).eta, atol=1e-6)
    assert np.allclose(central_gradient(phi, eta), theta_from_eta(eta).theta, atol=1e-6)


def test_dual_coords_dimension_check() -> None:
    with pytest.raises(DimensionMismatch):
        DualCoords(theta_of([0.2, 0.3, 0.5]), eta_of([0.5, 0.5]))


def test_fisher_theta_matches_hessian_of_psi() -> None:
    theta = theta_of([0.2, 0.3, 0.1, 0.4]).theta

    assert np.allclose(central_hessian(psi, theta), fisher_theta(theta).g, atol=1e-5)


def test_fisher_eta_matches_hessian_of_phi() -> None:
    eta = np.array([0.2, 0.3, 0.1])

    assert np.allclose(central_hessian(phi, eta), fisher_eta(eta).g, atol=1e-5)


def test_fisher_matrices_are_mutual_inverses(random_comp) -> None:
    for D in range(3, 9):
        x = random_comp(D)
        g_theta = fisher_theta(theta_of(x))
        g_eta = fisher_eta(eta_of(x))

        assert np.allclose(g_theta.g @ g_eta.g, np.eye(D - 1), atol=1e-8)
        assert g_theta.is_positive_definite()
        assert g_eta.inverse().coordinate_system is CoordinateSystem.THETA
        assert np.allclose(g_eta.inverse().g, g_theta.g, atol=1e-10)


def test_fisher_matrix_symmetry_enforced() -> None:
    with pytest.raises(ValueError):
        FisherMatrix(np.array([[1.0, 0.5], [0.0, 1.0]]), "theta")


def test_fisher_matrix_reports_indefinite() -> None:
    g = FisherMatrix(np.array([[1.0, 0.0], [0.0, -1.0]]), "eta")

    assert not g.is_positive_definite()


def test_fenchel_gap_is_reverse_kl(random_comp) -> None:
    for D in range(2, 8):
        x, y = random_comp(D), random_comp(D)
        assert fenchel_gap(x, y) == pytest.approx(kl_reverse(x, y).value, abs=1e-12)


def test_indicator_family_recovers_alr_inverse() -> None:
    F = indicator_family([np.log(0.4), np.log(0.6)])

    assert np.allclose(expfam_eval(F).parts, [0.2, 0.3, 0.5])
    assert expfam_psi(F) == pytest.approx(psi(F.theta) - np.log(3.0))


def test_single_feature_family_worked_example() -> None:
    F = ExponentialFamily(Composition([1 / 3, 1 / 3, 1 / 3]), np.array([1.0, 2.0, 3.0]), [0.5])

    p = expfam_eval(F).parts
    expected = softmax([0.5, 1.0, 1.5])
    assert np.allclose(p, expected)
    assert expfam_psi(F) == pytest.approx(np.log(np.mean(np.exp([0.5, 1.0, 1.5]))))
    mean = expected @ [1.0, 2.0, 3.0]
    variance = expected @ (np.array([1.0, 2.0, 3.0]) - mean) ** 2
    assert expfam_fisher(F).g[0, 0] == pytest.approx(variance)


def test_expfam_fisher_matches_hessian_of_psi() -> None:
    features = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [-1.0, 2.0]])
    F = ExponentialFamily(Composition([0.1, 0.2, 0.3, 0.4]), features, [0.3, -0.2])

    hessian = central_hessian(lambda t: expfam_psi(F, t), F.theta)
    assert np.allclose(hessian, expfam_fisher(F).g, atol=1e-5)


def test_expfam_at_zero_theta_is_base() -> None:
    base = Composition([0.1, 0.2, 0.7])
    F = ExponentialFamily(base, [[1.0], [0.0], [2.0]], [0.0])

    assert np.allclose(expfam_eval(F).parts, base.parts)
    assert np.allclose(expfam_eval(F.with_theta([1.0])).parts, softmax(np.log(base.parts) + [1.0, 0.0, 2.0]))


def test_identical_feature_rows_warn() -> None:
    F = ExponentialFamily(Composition([0.2, 0.3, 0.5]), [[1.0], [1.0], [1.0]], [2.0])

    with pytest.warns(DegenerateFamilyWarning):
        p = expfam_eval(F)
    assert np.allclose(p.parts, [0.2, 0.3, 0.5])


@pytest.mark.parametrize(
    "features, theta",
    [
        (np.ones((2, 1)), [0.0]),
        (np.eye(3), [0.0, 0.0, 0.0]),
        (np.ones((3, 1)), [0.0, 1.0]),
    ],
)
def test_expfam_shape_errors(features, theta) -> None:
    with pytest.raises(DimensionMismatch):
        ExponentialFamily(Composition([0.2, 0.3, 0.5]), features, theta)


def test_very_negative_theta_maps_without_error() -> None:
    theta = [-40.0, 0.0]
    eta = eta_from_theta(theta).eta
    g = fisher_theta(theta)

    assert psi(theta) == pytest.approx(np.log(2.0))
    assert eta[0] == pytest.approx(np.exp(-40.0) / 2.0, rel=1e-12)
    assert eta[1] == pytest.approx(0.5)
    assert np.allclose(g.g, [[eta[0], -0.5 * eta[0]], [-0.5 * eta[0], 0.25]], rtol=1e-12, atol=0.0)
    assert np.allclose(theta_from_eta(eta_from_theta(theta)).theta, theta, atol=1e-9)


def test_fisher_theta_at_extreme_theta() -> None:
    g = fisher_theta([700.0, -700.0]).g

    assert np.all(np.isfinite(g))
    assert np.allclose(g, 0.0, atol=1e-12)


def test_eta_inputs_keep_the_boundary_check() -> None:
    for call in (phi, theta_from_eta, fisher_eta):
        with pytest.raises(OutOfDomain):
            call([1e-16, 0.5])


def test_fisher_eta_of_composition_matches_fisher_eta() -> None:
    assert np.allclose(fisher_eta_of([0.2, 0.3, 0.5]).g, fisher_eta([0.2, 0.3]).g)
    assert np.all(np.isfinite(fisher_eta_of(close([1e-15, 0.5, 0.5])).g))


def test_fisher_eta_at_one_half_is_four() -> None:
    assert np.array_equal(fisher_eta([0.5]).g, [[4.0]])


def test_phi_is_negative_entropy(random_comp) -> None:
    for D in range(2, 13):
        x = random_comp(D)

        assert phi(eta_of(x)) == pytest.approx(-shannon_entropy(x), abs=1e-12)


def test_indicator_family_fisher_is_fisher_theta(rng) -> None:
    for d in range(1, 8):
        theta = rng.normal(0.0, 2.0, size=d)

        assert np.allclose(expfam_fisher(indicator_family(theta)).g, fisher_theta(theta).g, rtol=0.0, atol=1e-12)


def test_constant_feature_has_zero_fisher_information() -> None:
    F = ExponentialFamily(Composition([0.2, 0.3, 0.5]), [[1.0], [1.0], [1.0]], [0.7])

    assert np.allclose(expfam_fisher(F).g, [[0.0]], atol=1e-15)
