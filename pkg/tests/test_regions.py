"""Connected-component labeling against a flood-fill oracle."""

import numpy as np
import pytest

from strayeval import BinaryMask, Connectivity, LabelMap, label_components, region_properties

from oracles import flood_fill_label


def _mask(rows):
    return BinaryMask(np.array(rows, dtype=bool))


def test_all_false_has_no_regions():
    lm = label_components(_mask(np.zeros((3, 3))), Connectivity.EIGHT)
    assert lm.region_count == 0
    assert not lm.labels.any()
    assert region_properties(lm) == []


def test_diagonal_pixels_one_region_under_eight():
    m = _mask([[1, 0, 0], [0, 1, 0], [0, 0, 0]])
    lm = label_components(m, Connectivity.EIGHT)
    assert lm.region_count == 1
    regions = region_properties(lm)
    assert len(regions) == 1 and regions[0].area == 2


def test_diagonal_pixels_two_regions_under_four():
    m = _mask([[1, 0, 0], [0, 1, 0], [0, 0, 0]])
    lm = label_components(m, Connectivity.FOUR)
    assert lm.region_count == 2
    assert [r.area for r in region_properties(lm)] == [1, 1]


def test_full_2x2_region_properties():
    lm = label_components(_mask(np.ones((2, 2))), Connectivity.EIGHT)
    (region,) = region_properties(lm)
    assert region.label == 1
    assert region.area == 4
    assert region.bbox == (0, 0, 1, 1)
    assert region.centroid == (0.5, 0.5)


def test_two_isolated_pixels():
    m = _mask([[1, 0, 0], [0, 0, 0], [0, 0, 1]])
    lm = label_components(m, Connectivity.EIGHT)
    regions = region_properties(lm)
    assert [r.centroid for r in regions] == [(0.0, 0.0), (2.0, 2.0)]
    assert all(r.area == 1 for r in regions)


def test_labels_numbered_by_scan_order():
    # first pixel in row-major order fixes each region's number
    m = _mask(
        [
            [0, 0, 0, 1, 0],
            [1, 1, 0, 1, 0],
            [0, 0, 0, 0, 0],
            [0, 1, 0, 0, 1],
        ]
    )
    lm = label_components(m, Connectivity.FOUR)
    assert lm.region_count == 4
    firsts = {}
    h, w = lm.shape
    for r in range(h):
        for c in range(w):
            lab = int(lm.labels[r, c])
            if lab and lab not in firsts:
                firsts[lab] = (r, c)
    assert sorted(firsts) == [1, 2, 3, 4]
    order = [firsts[lab] for lab in sorted(firsts)]
    assert order == sorted(order)


def test_renumber_handles_out_of_order_input():
    from strayeval.regions import _renumber_scan_order

    scrambled = np.array([[0, 3, 0], [2, 0, 3], [0, 1, 0]], dtype=np.int32)
    fixed = _renumber_scan_order(scrambled, 3)
    assert fixed.tolist() == [[0, 1, 0], [2, 0, 1], [0, 3, 0]]
    ordered = np.array([[1, 0], [0, 2]], dtype=np.int32)
    assert _renumber_scan_order(ordered, 2) is ordered  # identity short-circuit


def test_label_map_validation():
    with pytest.raises(ValueError):
        LabelMap(np.array([[0, 2]], dtype=np.int32), region_count=2)  # label 1 missing
    with pytest.raises(ValueError):
        LabelMap(np.array([[0, -1]], dtype=np.int32), region_count=1)
    with pytest.raises(ValueError):
        LabelMap(np.array([[0, 1]], dtype=np.int32), region_count=2)


def test_oracle_equivalence_on_random_masks():
    rng = np.random.default_rng(101)
    for trial in range(300):
        h = int(rng.integers(1, 33))
        w = int(rng.integers(1, 33))
        bits = rng.random((h, w)) < rng.uniform(0.05, 0.9)
        for conn in (Connectivity.FOUR, Connectivity.EIGHT):
            lm = label_components(BinaryMask(bits), conn)
            oracle_labels, oracle_count = flood_fill_label(bits, conn is Connectivity.EIGHT)
            assert lm.region_count == oracle_count
            # scan-order numbering makes equality exact, not just up to renaming
            assert np.array_equal(lm.labels, oracle_labels)


def test_partition_property():
    rng = np.random.default_rng(102)
    for _ in range(50):
        bits = rng.random((20, 20)) < 0.4
        lm = label_components(BinaryMask(bits), Connectivity.EIGHT)
        assert np.array_equal(lm.labels > 0, bits)


def test_eight_never_more_regions_than_four():
    rng = np.random.default_rng(103)
    for _ in range(100):
        bits = rng.random((24, 24)) < rng.uniform(0.1, 0.7)
        m = BinaryMask(bits)
        n8 = label_components(m, Connectivity.EIGHT).region_count
        n4 = label_components(m, Connectivity.FOUR).region_count
        assert n8 <= n4


def test_region_areas_sum_to_mask_count():
    rng = np.random.default_rng(104)
    bits = rng.random((30, 30)) < 0.35
    m = BinaryMask(bits)
    lm = label_components(m, Connectivity.EIGHT)
    regions = region_properties(lm)
    assert sum(r.area for r in regions) == m.count()
    for r in regions:
        rmin, cmin, rmax, cmax = r.bbox
        assert rmin <= r.centroid[0] <= rmax
        assert cmin <= r.centroid[1] <= cmax
