from __future__ import annotations

import numpy as np
import pytest

from simplex_infogeo.aggregation import PartSubset, amalgamate
from simplex_infogeo.divergence import (
    AITCHISON_POTENTIAL,
    LOG_PARTITION,
    NEGATIVE_ENTROPY,
    ConvexPotential,
    DivergenceKind,
    DivergenceResult,
    aitchison_divergence,
    alpha_divergence,
    alpha_generator,
    bhattacharyya,
    bhattacharyya_distance,
    boxcox_distance,
    bregman,
    check_midpoint_convexity,
    f_divergence,
    fisher_distance,
    hellinger,
    hellinger_squared,
    kl,
    kl_reverse,
    resolve_generator,
)
from simplex_infogeo.duality import phi
from simplex_infogeo.errors import (
    CoordinateDomainError,
    DimensionMismatch,
    NegativeWeight,
    NonConvexPotential,
    ParameterOutOfRange,
)
from simplex_infogeo.simplex import aitchison_distance_squared

HALF = [0.5, 0.5]
QUARTER = [0.25, 0.75]


def test_kl_worked_example() -> None:
    assert kl(HALF, QUARTER).value == pytest.approx(0.143841, abs=1e-6)
    assert kl_reverse(QUARTER, HALF).value == pytest.approx(0.143841, abs=1e-6)
    assert kl(HALF, QUARTER).value != pytest.approx(kl(QUARTER, HALF).value)


def test_kl_of_identical_points_is_zero() -> None:
    assert kl([0.2, 0.3, 0.5], [2.0, 3.0, 5.0]).value == pytest.approx(0.0, abs=1e-15)


def test_bhattacharyya_hellinger_fisher_worked_example() -> None:
    assert bhattacharyya(HALF, QUARTER) == pytest.approx(0.965926, abs=1e-6)
    assert hellinger_squared(HALF, QUARTER) == pytest.approx(0.068148, abs=1e-6)
    assert hellinger(HALF, QUARTER) ** 2 == pytest.approx(0.068148, abs=1e-6)
    assert fisher_distance(HALF, QUARTER) == pytest.approx(0.523599, abs=1e-6)
    assert bhattacharyya_distance(HALF, QUARTER) == pytest.approx(-np.log(0.965926), abs=1e-6)


def test_fisher_distance_of_identical_points_is_zero() -> None:
    assert fisher_distance([0.2, 0.8], [0.2, 0.8]) == pytest.approx(0.0, abs=1e-7)


def test_hellinger_fisher_relation(random_comp) -> None:
    for D in range(2, 13):
        for _ in range(20):
            x, y = random_comp(D), random_comp(D)
            expected = 2.0 * (1.0 - np.cos(fisher_distance(x, y) / 2.0))

            assert abs(hellinger_squared(x, y) - expected) <= 1e-12


def test_alpha_zero_is_four_times_hellinger_deficit() -> None:
    assert alpha_divergence(0.0, HALF, QUARTER).value == pytest.approx(0.136297, abs=1e-6)


def test_alpha_zero_is_twice_squared_hellinger(random_comp) -> None:
    for D in (2, 5, 9):
        x, y = random_comp(D), random_comp(D)

        assert alpha_divergence(0.0, x, y).value == pytest.approx(2.0 * hellinger_squared(x, y), rel=1e-10)


def test_alpha_approaches_kl_as_the_pole_is_neared(random_comp) -> None:
    x, y = random_comp(4), random_comp(4)
    target = kl(x, y).value
    errors = [abs(alpha_divergence(-1.0 + offset, x, y).value - target) for offset in (1e-2, 1e-3, 1e-4)]

    assert errors[0] > errors[1] > errors[2]


def test_alpha_limits(random_comp) -> None:
    for D in range(2, 9):
        x, y = random_comp(D), random_comp(D)
        near_plus = alpha_divergence(1.0 - 1e-5, x, y).value
        near_minus = alpha_divergence(-1.0 + 1e-5, x, y).value

        assert near_plus == pytest.approx(kl_reverse(x, y).value, rel=1e-4)
        assert near_minus == pytest.approx(kl(x, y).value, rel=1e-4)
        assert alpha_divergence(1.0, x, y).value == kl_reverse(x, y).value
        assert alpha_divergence(-1.0, x, y).value == kl(x, y).value


def test_alpha_duality() -> None:
    x, y = [0.1, 0.3, 0.6], [0.4, 0.4, 0.2]

    assert alpha_divergence(0.4, x, y).value == pytest.approx(alpha_divergence(-0.4, y, x).value)


def test_alpha_rejects_non_finite() -> None:
    with pytest.raises(ParameterOutOfRange):
        alpha_divergence(np.nan, HALF, QUARTER)


def test_divergence_result_floor() -> None:
    with pytest.raises(NonConvexPotential):
        DivergenceResult(-1e-6, DivergenceKind.KL)
    assert float(DivergenceResult(-1e-13, DivergenceKind.KL)) == -1e-13
    assert DivergenceResult(0.5, DivergenceKind.F).to_payload() == {
        "kind": "f",
        "direction": "x‖y",
        "value": 0.5,
    }


def test_dimension_mismatch() -> None:
    with pytest.raises(DimensionMismatch):
        kl([0.5, 0.5], [0.2, 0.3, 0.5])


def test_boxcox_beta_one() -> None:
    assert boxcox_distance(1.0, None, HALF, QUARTER) == pytest.approx(0.125)


def test_boxcox_limit_band_uses_clr() -> None:
    expected = aitchison_distance_squared(HALF, QUARTER) / 4.0

    assert aitchison_distance_squared(HALF, QUARTER) == pytest.approx(0.603474, abs=1e-6)
    assert boxcox_distance(0.0, None, HALF, QUARTER) == pytest.approx(expected, rel=1e-12)
    assert boxcox_distance(1e-4, None, HALF, QUARTER) == pytest.approx(expected, rel=1e-3)


def test_boxcox_converges_to_aitchison(random_comp) -> None:
    for D in (3, 5, 8):
        x, y = random_comp(D), random_comp(D)
        weights = np.full(D, float(D**2))
        target = aitchison_distance_squared(x, y)
        errors = [abs(boxcox_distance(beta, weights, x, y) - target) for beta in (1e-1, 1e-2, 1e-3)]

        assert errors[0] > errors[1] > errors[2]


def test_boxcox_weight_validation() -> None:
    with pytest.raises(NegativeWeight):
        boxcox_distance(0.5, [1.0, -1.0], HALF, QUARTER)
    with pytest.raises(DimensionMismatch):
        boxcox_distance(0.5, [1.0, 1.0, 1.0], HALF, QUARTER)
    with pytest.raises(ParameterOutOfRange):
        boxcox_distance(np.inf, None, HALF, QUARTER)


def test_bregman_of_negative_entropy_is_kl(random_comp) -> None:
    for D in range(2, 8):
        x, y = random_comp(D), random_comp(D)
        assert bregman(NEGATIVE_ENTROPY, x, y).value == pytest.approx(kl(x, y).value, abs=1e-12)


def test_bregman_of_log_partition_is_reverse_kl(random_comp) -> None:
    for D in range(2, 8):
        x, y = random_comp(D), random_comp(D)
        assert bregman(LOG_PARTITION, x, y).value == pytest.approx(kl_reverse(x, y).value, abs=1e-12)


def test_bregman_of_squared_norm_is_aitchison(random_comp) -> None:
    x, y = random_comp(6), random_comp(6)

    assert bregman(AITCHISON_POTENTIAL, x, y).value == pytest.approx(
        aitchison_divergence(x, y).value, rel=1e-10
    )


def test_bregman_without_gradient_uses_finite_differences() -> None:
    U = ConvexPotential(phi, "eta", name="phi_numeric")
    x, y = [0.2, 0.3, 0.5], [0.4, 0.4, 0.2]

    assert bregman(U, x, y).value == pytest.approx(kl(x, y).value, abs=1e-6)


def test_concave_potential_is_rejected() -> None:
    U = ConvexPotential(lambda z: -float(z @ z), "ilr", name="concave")
    pairs = [([0.2, 0.3, 0.5], [0.4, 0.4, 0.2])]

    with pytest.raises(NonConvexPotential):
        bregman(U, *pairs[0])
    with pytest.raises(NonConvexPotential):
        check_midpoint_convexity(U, pairs)


def test_builtin_potentials_pass_midpoint_convexity(random_comp) -> None:
    pairs = [(random_comp(4), random_comp(4)) for _ in range(50)]

    for U in (NEGATIVE_ENTROPY, LOG_PARTITION, AITCHISON_POTENTIAL):
        assert check_midpoint_convexity(U, pairs) >= -1e-9


def test_potential_non_finite_value() -> None:
    U = ConvexPotential(lambda z: float("inf"), "theta", name="broken")

    with pytest.raises(CoordinateDomainError):
        bregman(U, HALF, QUARTER)


@pytest.mark.parametrize(
    "name, expected",
    [
        ("kl", lambda x, y: kl(x, y).value),
        ("reverse_kl", lambda x, y: kl(y, x).value),
        ("hellinger", hellinger_squared),
        ("chi_square", lambda x, y: float(np.sum((np.asarray(y) - x) ** 2 / np.asarray(x)))),
        ("total_variation", lambda x, y: 0.5 * float(np.sum(np.abs(np.asarray(y) - x)))),
    ],
)
def test_named_generators(name, expected) -> None:
    x, y = np.array([0.1, 0.3, 0.6]), np.array([0.4, 0.4, 0.2])

    assert f_divergence(name, x, y).value == pytest.approx(expected(x, y), rel=1e-10)


def test_alpha_generator_matches_alpha_divergence(random_comp) -> None:
    x, y = random_comp(5), random_comp(5)

    for alpha in (-0.5, 0.0, 0.3, 3.0):
        assert f_divergence(alpha_generator(alpha), x, y).value == pytest.approx(
            alpha_divergence(alpha, x, y).value, rel=1e-9
        )


def test_generator_errors() -> None:
    with pytest.raises(ParameterOutOfRange):
        resolve_generator("nope")
    with pytest.raises(ParameterOutOfRange):
        alpha_generator(1.0)


def test_f_divergences_are_monotone_under_amalgamation(rng, random_comp) -> None:
    for _ in range(200):
        D = int(rng.integers(3, 13))
        a = int(rng.integers(1, D))
        A = PartSubset(tuple(rng.choice(D, size=a, replace=False).tolist()), D)
        x, y = random_comp(D), random_comp(D)
        ax, ay = amalgamate(x, A), amalgamate(y, A)

        for name in ("kl", "hellinger"):
            assert f_divergence(name, ax, ay).value <= f_divergence(name, x, y).value + 1e-12
