from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simplex_infogeo.contrast import build_contrast
from simplex_infogeo.errors import (
    DimensionMismatch,
    DimensionTooSmall,
    EmptySelection,
    NonPositivePart,
    NotInTangentSpace,
)
from simplex_infogeo.simplex import (
    Composition,
    Tangent,
    aitchison_distance,
    aitchison_inner,
    aitchison_norm,
    alr,
    alr_inv,
    close,
    clr,
    clr_inv,
    geometric_mean,
    ilr,
    ilr_inv,
    neutral,
    perturb,
    perturb_difference,
    perturb_inverse,
    power,
)

positive_parts = st.lists(
    st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False),
    min_size=2,
    max_size=12,
)


def test_composition_records_closure() -> None:
    assert Composition([0.2, 0.3, 0.5]).closed
    raw = Composition([2.0, 3.0, 5.0])
    assert not raw.closed
    assert np.allclose(raw.closure().parts, [0.2, 0.3, 0.5])


@pytest.mark.parametrize(
    "parts, error",
    [
        ([0.5, 0.0, 0.5], NonPositivePart),
        ([0.5, -0.1, 0.6], NonPositivePart),
        ([0.5, np.nan, 0.5], NonPositivePart),
        ([1.0], DimensionTooSmall),
        ([[0.5, 0.5]], DimensionMismatch),
    ],
)
def test_invalid_compositions_rejected(parts, error) -> None:
    with pytest.raises(error):
        Composition(parts)


def test_nonpositive_part_names_index() -> None:
    with pytest.raises(NonPositivePart, match="part 1"):
        close([0.5, 0.0, 0.5])


def test_clr_worked_example() -> None:
    v = clr([0.2, 0.3, 0.5]).coords

    assert np.allclose(v, [-0.440585, -0.035120, 0.475706], atol=1e-6)
    assert abs(v.sum()) < 1e-15


def test_clr_is_scale_invariant() -> None:
    assert np.allclose(clr([2.0, 3.0, 5.0]).coords, clr([0.2, 0.3, 0.5]).coords)


def test_perturb_worked_example() -> None:
    out = perturb([0.2, 0.3, 0.5], [0.5, 0.3, 0.2]).parts

    assert np.allclose(out, np.array([0.1, 0.09, 0.1]) / 0.29)


def test_perturb_inverse_returns_neutral() -> None:
    x = Composition([0.1, 0.6, 0.3])

    assert np.allclose(perturb(x, perturb_inverse(x)).parts, neutral(3).parts)
    assert np.allclose(perturb_difference(x, x).parts, 1 / 3)


def test_power_examples() -> None:
    x = [0.2, 0.3, 0.5]

    assert np.allclose(power(0.0, x).parts, 1 / 3)
    assert np.allclose(power(1.0, x).parts, x)
    assert np.allclose(power(2.0, x).parts, np.array([0.04, 0.09, 0.25]) / 0.38)


def test_power_rejects_non_finite() -> None:
    with pytest.raises(ValueError):
        power(np.inf, [0.5, 0.5])


def test_extreme_log_ratios_stay_positive() -> None:
    out = power(200.0, [0.1, 0.9])

    assert out.closed
    assert np.all(out.parts > 0)


def test_perturb_dimension_mismatch() -> None:
    with pytest.raises(DimensionMismatch):
        perturb([0.5, 0.5], [0.2, 0.3, 0.5])


def test_geometric_mean_and_errors() -> None:
    assert geometric_mean([1.0, 4.0]) == pytest.approx(2.0)
    with pytest.raises(EmptySelection):
        geometric_mean([])
    with pytest.raises(NonPositivePart):
        geometric_mean([1.0, 0.0])


def test_tangent_must_sum_to_zero() -> None:
    with pytest.raises(NotInTangentSpace):
        Tangent([1.0, 1.0])
    t = Tangent([1.0, -1.0 + 1e-12])
    assert abs(t.coords.sum()) < 1e-15


def test_alr_round_trip() -> None:
    x = [0.2, 0.3, 0.5]

    assert np.allclose(alr(x), [np.log(0.4), np.log(0.6)])
    assert np.allclose(alr_inv(alr(x)).parts, x)


def test_ilr_with_explicit_contrast_round_trip() -> None:
    V = build_contrast(4, "pivot")
    x = close([1.0, 2.0, 3.0, 4.0])

    assert np.allclose(ilr_inv(ilr(x, V)).parts, x.parts, atol=1e-14)
    assert np.allclose(ilr_inv(ilr(x, V).z, V).parts, x.parts, atol=1e-14)


def test_ilr_contrast_dimension_mismatch() -> None:
    with pytest.raises(DimensionMismatch):
        ilr([0.2, 0.3, 0.5], build_contrast(4))


def test_neutral_has_zero_norm() -> None:
    assert aitchison_norm(neutral(7)) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DimensionTooSmall):
        neutral(1)


def _sequential_sbp(D: int) -> list[list[int]]:
    return [[0] * j + [1] + [-1] * (D - j - 1) for j in range(D - 1)]


def _contrast(D: int, kind: str):
    if kind == "user-sbp":
        return build_contrast(D, kind, sbp=_sequential_sbp(D))
    return build_contrast(D, kind)


@pytest.mark.parametrize("kind", ["helmert", "pivot", "user-sbp"])
def test_isometry_suite(rng, random_comp, kind: str) -> None:
    for D in range(2, 21):
        V = _contrast(D, kind)
        for _ in range(60):
            x, y = random_comp(D), random_comp(D)
            d = aitchison_distance(x, y)
            zx, zy = ilr(x, V).z, ilr(y, V).z

            assert abs(d - np.linalg.norm(zx - zy)) <= 1e-10 * max(1.0, d)
            assert abs(d - np.linalg.norm(clr(x).coords - clr(y).coords)) <= 1e-10 * max(1.0, d)
            assert abs(aitchison_inner(x, y) - zx @ zy) <= 1e-10 * max(
                1.0, aitchison_norm(x) * aitchison_norm(y)
            )


def test_vector_space_laws(rng, random_comp) -> None:
    for D in (2, 3, 7, 15):
        x, y = random_comp(D), random_comp(D)
        a, b = rng.normal(0.0, 2.0, size=2)

        assert np.allclose(power(a + b, x).parts, perturb(power(a, x), power(b, x)).parts, rtol=1e-10, atol=1e-15)
        assert np.allclose(
            power(a, perturb(x, y)).parts, perturb(power(a, x), power(a, y)).parts, rtol=1e-10, atol=1e-15
        )


def test_distance_is_perturbation_invariant(random_comp) -> None:
    x, y, p = random_comp(5), random_comp(5), random_comp(5)

    assert aitchison_distance(perturb(x, p), perturb(y, p)) == pytest.approx(
        aitchison_distance(x, y), rel=1e-10
    )


def test_powering_scales_norm(random_comp) -> None:
    x = random_comp(6)

    assert aitchison_norm(power(-2.5, x)) == pytest.approx(2.5 * aitchison_norm(x), rel=1e-10)


@settings(max_examples=200, deadline=None)
@given(positive_parts)
def test_clr_round_trip(parts: list[float]) -> None:
    x = close(parts)

    assert np.allclose(clr_inv(clr(x)).parts, x.parts, rtol=1e-9, atol=1e-15)


@settings(max_examples=200, deadline=None)
@given(positive_parts)
def test_ilr_round_trip(parts: list[float]) -> None:
    x = close(parts)

    assert np.allclose(ilr_inv(ilr(x)).parts, x.parts, rtol=1e-9, atol=1e-15)
