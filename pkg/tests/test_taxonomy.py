from itertools import permutations

import numpy as np
import pytest
from scipy.special import comb

from src.camera import IntrinsicsSpec
from src.errors import Infeasible, InvalidInputError, TooLarge
from src.polysys import minimal_classes, unknown_count
from src.taxonomy import (
    SHIPPED,
    Color,
    Coloring,
    Status,
    brute_force_isomorphic,
    canonical_form,
    classify,
    coloring_to_mask,
    coloring_to_selection,
    enumerate_catalog,
    feasibility,
    feasibility_table,
    isomorphic,
    line_graph,
    mask_to_coloring,
    shipped,
)
from src.taxonomy.enumeration import all_masks, bit_count


def _all_colorings(n_points: int, num_views: int, n_drop: int) -> list[Coloring]:
    masks = all_masks(bit_count(n_points, num_views), n_drop)
    return [mask_to_coloring(int(m), n_points, num_views) for m in masks]


@pytest.mark.parametrize(
    "code, N, n, drop, status",
    [
        ("11000", 4, 11, 1, Status.RELAXABLE),
        ("fguv0", 5, 18, 2, Status.MINIMAL),
        ("ffuv0", 5, 17, 3, Status.RELAXABLE),
        ("fguvs", 6, 22, 8, Status.RELAXABLE),
    ],
)
def test_three_view_feasibility(code, N, n, drop, status):
    row = feasibility(IntrinsicsSpec.parse(code), 3)
    assert (row.N_min, row.n, row.n_drop, row.status) == (N, n, drop, status)
    assert row.raw_colorings == comb(row.n_avail, drop, exact=True)


def test_fguvs_raw_count():
    assert feasibility(IntrinsicsSpec.parse("fguvs"), 3).raw_colorings == 5_852_925


@pytest.mark.parametrize("code", ["fguvs", "fguv0", "ffuv0"])
def test_two_views_need_three_constraints(code):
    row = feasibility(IntrinsicsSpec.parse(code), 2)
    assert row.status is Status.INFEASIBLE
    assert row.N_min is None


def test_two_view_calibrated():
    row = feasibility(IntrinsicsSpec.parse("11000"), 2)
    assert row.status is not Status.INFEASIBLE
    assert row.N_min >= 4


def test_feasibility_rejects_view_count():
    with pytest.raises(InvalidInputError):
        feasibility(IntrinsicsSpec.parse("fguvs"), 4)


def test_table_has_both_view_counts():
    rows = feasibility_table()
    assert {row.M for row in rows} == {2, 3}
    csv_rows = {(r["spec"], r["M"]): r for r in (row.csv_row() for row in rows)}
    assert csv_rows[("fguvs", 2)]["status"] == "infeasible"
    assert csv_rows[("fguvs", 3)]["drop"] == 8


def test_calibrated_single_drop_is_one_class():
    catalog = enumerate_catalog(4, 3, 1)
    assert len(catalog) == 1
    assert catalog.sizes == (12,)


def test_class_sizes_cover_all_colorings():
    catalog = enumerate_catalog(5, 3, 2)
    assert sum(catalog.sizes) == comb(20, 2, exact=True) == 190


def test_catalog_matches_brute_force_partition():
    colorings = _all_colorings(5, 3, 2)
    classes = classify(colorings)
    catalog = enumerate_catalog(5, 3, 2)
    assert len(classes) == len(catalog)
    assert sorted(len(members) for members in classes) == sorted(catalog.sizes)


def test_two_view_catalog():
    colorings = _all_colorings(5, 2, 3)
    assert len(classify(colorings)) == len(enumerate_catalog(5, 2, 3))


@pytest.mark.parametrize("n_points", [4, 5])
def test_oracles_agree_on_random_pairs(rng, n_points):
    colorings = _all_colorings(n_points, 3, 3)
    matches = 0
    for trial in range(200):
        a, b = rng.choice(len(colorings), size=2, replace=False)
        c1, c2 = colorings[a], colorings[b]
        if trial % 2:
            c2 = c1.relabel(rng.permutation(n_points))
            if rng.random() < 0.5:
                c2 = c2.swap_views()
        expected = brute_force_isomorphic(c1, c2)
        assert isomorphic(c1, c2) == expected
        matches += expected
    assert matches >= 100


def test_relabelled_copies_are_isomorphic(rng):
    colorings = _all_colorings(5, 3, 3)
    for k in rng.choice(len(colorings), size=20, replace=False):
        c = colorings[k]
        sigma = rng.permutation(5)
        copy = c.relabel(sigma)
        assert isomorphic(c, copy)
        assert isomorphic(c, copy.swap_views())
        assert canonical_form(copy, 3) == canonical_form(c, 3)


def test_triangle_and_star_are_distinct():
    triangle = Coloring.from_dropped(4, [((0, 1), (0, 3)), ((0, 1), (1, 3)), ((0, 1), (2, 3))], 2)
    star = Coloring.from_dropped(4, [((0, 1), (1, 2)), ((0, 1), (1, 3)), ((0, 1), (2, 3))], 2)
    assert line_graph(triangle).number_of_nodes() == line_graph(star).number_of_nodes() == 3
    assert not isomorphic(triangle, star)
    assert not brute_force_isomorphic(triangle, star)


def test_brute_force_limit():
    c = Coloring.full(8)
    with pytest.raises(TooLarge):
        brute_force_isomorphic(c, c)


def test_class_of_finds_relabelled_member():
    catalog = enumerate_catalog(5, 3, 2)
    for class_id, c in enumerate(catalog.colorings()):
        for sigma in list(permutations(range(5)))[::17]:
            assert catalog.class_of(c.relabel(sigma)) == class_id


def test_mask_encoding():
    c = Coloring.from_dropped(4, [((0, 1), (0, 1)), ((0, 2), (0, 1)), ((0, 2), (2, 3))])
    assert c.color(0, 1) is Color.W
    assert c.color(2, 3) is Color.R
    assert mask_to_coloring(coloring_to_mask(c, 3), 4, 3) == c
    assert Coloring.from_json(c.to_json()) == c
    assert c.equation_count() == 12 - 3


def test_coloring_needs_every_pair():
    with pytest.raises(InvalidInputError):
        Coloring(4, (Color.B,) * 5)


def test_negative_drop():
    with pytest.raises(Infeasible):
        enumerate_catalog(4, 3, -1)


@pytest.mark.parametrize("name", sorted(SHIPPED))
def test_shipped_selections_are_square(name):
    rel = shipped(name)
    selection = rel.selection()
    assert len(selection) == unknown_count(rel.spec, rel.n_points, rel.num_views)
    assert selection == coloring_to_selection(rel.coloring(), rel.num_views)


def test_unknown_relaxation():
    with pytest.raises(InvalidInputError):
        shipped("kruppa")


def test_certified_classes_for_one_unknown_focal_pair():
    catalog = enumerate_catalog(5, 3, 2)
    kept = minimal_classes(IntrinsicsSpec.parse("fguv0"), 3, catalog.colorings(), seed=0)
    assert 0 < len(kept) <= len(catalog)
    assert catalog.class_of(shipped("fguv0").coloring()) in kept


@pytest.mark.slow
def test_fguvs_certified_classes():
    catalog = enumerate_catalog(6, 3, 8)
    assert sum(catalog.sizes) == 5_852_925
    kept = minimal_classes(IntrinsicsSpec.parse("fguvs"), 3, catalog.colorings(), seed=0)
    assert len(kept) == 3313
    assert np.all(np.diff(kept) > 0)
