import math
from collections import Counter

import pytest

from randdag import counting, oracle
from randdag.counting import (GammaTable, build_doag_table, build_source_table, check_recurrence,
                              doag_count, doag_count_by_vertices, doag_counts_by_edges, gamma,
                              load_table, normalized_constant_sequence, save_table)
from randdag.errors import CacheError, CacheMismatchError, OutOfRangeError, ResourceLimitError
from randdag.policy import DegreePolicy


def test_base_entry(doag8):
    assert doag_count(doag8, 1, 0, 1) == 1


def test_row_four_edges(doag8):
    assert sum(doag_count(doag8, 4, 3, k) for k in range(1, 5)) == 17


def test_no_sources_is_empty(doag8):
    for n in range(1, 9):
        for m in range(29):
            assert doag_count(doag8, n, m, 0) == 0


def test_bounded_set_single_source():
    table = build_doag_table(4, 6, DegreePolicy.explicit([0, 1, 2]))
    assert sum(doag_count(table, 4, m, 1) for m in range(7)) == 23


def test_small_examples(doag8):
    assert doag_count_by_vertices(doag8, 5) == 4858
    assert doag_count(doag8, 2, 1, 1) == 1
    assert doag_count(doag8, 2, 0, 2) == 1
    assert doag_count(doag8, 3, 7, 1) == 0
    assert doag_count_by_vertices(doag8, 6) == 1336729
    assert doag_count_by_vertices(doag8, 1) == 1


def test_positive_single_source_five():
    table = build_doag_table(5, 10, DegreePolicy.positive())
    assert doag_count_by_vertices(table, 5, k=1) == 2103


def test_out_of_table(doag8):
    with pytest.raises(OutOfRangeError):
        doag_count(doag8, 9, 0, 1)
    with pytest.raises(OutOfRangeError):
        doag_count(doag8, 3, 29, 1)


def test_by_vertices_needs_wide_table():
    table = build_doag_table(5, 4)
    with pytest.raises(OutOfRangeError):
        doag_count_by_vertices(table, 5)


def test_support_exactness(doag8):
    for n in range(1, 9):
        for m in range(29):
            for k in range(0, n + 2):
                inside = (n == 1 and m == 0 and k == 1) or (
                    1 <= k <= n and n - k <= m <= math.comb(n, 2) - math.comb(k, 2))
                assert (doag_count(doag8, n, m, k) > 0) == inside, (n, m, k)


@pytest.mark.parametrize("name", ["all", "positive", "max:2"])
def test_oracle_equivalence(name, policies):
    policy = policies[name]
    table = build_doag_table(5, 10, policy)
    for n in range(1, 6):
        seen = Counter()
        for a in oracle.enumerate_doags(n):
            degrees = [sum(1 for x in row if x) for row in a.rows]
            # every vertex but the last one is removed as a source with its full degree
            if all(policy.allows(d) for d in degrees[:-1]):
                seen[oracle.matrix_stats(a.rows)] += 1
        for m in range(11):
            for k in range(1, n + 1):
                assert doag_count(table, n, m, k) == seen[(n, m, k)], (name, n, m, k)


def test_cross_recurrence():
    table = build_doag_table(12, 66)
    src = build_source_table(12)
    for n in range(1, 13):
        for k in range(1, n + 1):
            assert doag_count_by_vertices(table, n, k) == src.count(n, k)


def test_bit_size_bound():
    table = build_doag_table(12, 66)
    for n, m, k, c in table.entries():
        if n >= 2:
            assert math.log2(c) <= 2 * m * math.log2(n) + 1e-9


def test_parallel_build_identical():
    a = build_doag_table(9, 36)
    b = build_doag_table(9, 36, workers=2)
    assert list(a.entries()) == list(b.entries())


def test_recurrence_check_clean_and_tampered(doag8):
    assert check_recurrence(doag8) == []
    table = build_doag_table(5, 10)
    lo, vals = table._layers[4][2]
    vals[0] += 1
    bad = check_recurrence(table)
    # the tampered entry, plus layer-5 entries now inconsistent with it
    assert [b for b in bad if b[0] <= 4] == [(4, lo, 2)]
    assert all(b[0] == 5 for b in bad if b[0] != 4)


def test_entry_budget():
    with pytest.raises(ResourceLimitError):
        build_doag_table(10, 45, max_entries=50)


def test_targeted_table_matches_full(doag8):
    part = build_doag_table(8, 15, target_edges=15)
    assert part.partial
    for k in range(1, 9):
        assert part.count(8, 15, k) == doag8.count(8, 15, k)
    with pytest.raises(OutOfRangeError):
        part.count(8, 14, 1)
    with pytest.raises(OutOfRangeError):
        doag_count_by_vertices(part, 8)


def test_edge_rows(doag8):
    assert doag_counts_by_edges(doag8, 4) == [1, 3, 8, 17, 27, 27, 12]


def test_gamma_values():
    g = GammaTable()
    assert gamma(g, 0, 5) == 1
    assert gamma(g, 1, 0) == 2
    assert gamma(g, -1, 3) == 0
    assert gamma(g, 2, -1) == 0


def test_gamma_matches_direct_sum():
    g = GammaTable()
    for a in range(8):
        for b in range(8):
            direct = sum(math.comb(b + i, b) * math.comb(a, i) * math.factorial(i) for i in range(a + 1))
            assert gamma(g, a, b) == direct


def test_gamma_recurrence():
    g = GammaTable()
    for a in range(1, 10):
        for b in range(10):
            left = gamma(g, a, b - 1) if b else 0
            assert gamma(g, a, b) == left + a * gamma(g, a - 1, b) + (b == 0)


def test_source_table():
    src = build_source_table(6)
    assert src.count(5, 1) == 3399
    assert src.count(1, 1) == 1
    assert src.total(4) == 95
    with pytest.raises(OutOfRangeError):
        src.count(7, 1)


def test_normalized_sequence_small():
    src = build_source_table(4)
    every, single = normalized_constant_sequence(src, 4)
    assert single[0] == 1.0
    assert every[3] == pytest.approx(95 * 2 / (12 * math.e ** 3), rel=1e-9)
    assert every[3] == pytest.approx(0.7882952491578458, rel=1e-9)


def test_normalized_sequence_matches_exact_rational():
    from fractions import Fraction
    src = build_source_table(60)
    every, single = normalized_constant_sequence(src, 60)
    for j in (10, 30, 60):
        ratio = Fraction(src.single_source(j), counting.superfactorial(j - 1))
        value = float(ratio) * math.sqrt(j) / math.exp(j - 1)
        assert single[j - 1] == pytest.approx(value, rel=1e-9)


def test_cache_round_trip(tmp_path, doag8):
    path = tmp_path / "t.txt"
    save_table(doag8, path)
    head = path.read_text().splitlines()[0]
    assert head == "randdag-table v1 kind=doag policy=all maxN=8 maxM=28"
    back = load_table(path, kind="doag", policy=DegreePolicy.all(), max_n=8, max_m=28)
    for n in range(1, 9):
        for m in range(29):
            for k in range(1, n + 1):
                assert back.count(n, m, k) == doag8.count(n, m, k)


def test_cache_policy_round_trip(tmp_path):
    table = build_doag_table(6, 15, DegreePolicy.explicit([0, 2, 3]))
    path = tmp_path / "p.txt"
    save_table(table, path)
    back = load_table(path)
    assert back.policy == table.policy
    assert list(back.entries()) == list(table.entries())


def test_cache_mismatch(tmp_path, doag8):
    path = tmp_path / "t.txt"
    save_table(doag8, path)
    with pytest.raises(CacheMismatchError):
        load_table(path, max_n=7)
    with pytest.raises(CacheMismatchError):
        load_table(path, policy=DegreePolicy.positive())


@pytest.mark.parametrize("mutate", [
    lambda lines: ["garbage header"] + lines[1:],
    lambda lines: lines[:1] + ["1 0 1 x"] + lines[2:],
    lambda lines: lines[:1] + list(reversed(lines[1:])),
    lambda lines: lines[:1] + ["99 0 1 5"] + lines[1:],
])
def test_cache_corruption(tmp_path, mutate):
    table = build_doag_table(4, 6)
    path = tmp_path / "t.txt"
    save_table(table, path)
    path.write_text("\n".join(mutate(path.read_text().splitlines())) + "\n")
    with pytest.raises(CacheError):
        load_table(path)


def test_gamma_and_source_cache(tmp_path):
    g = GammaTable()
    gamma(g, 5, 5)
    save_table(g, tmp_path / "g.txt")
    g2 = load_table(tmp_path / "g.txt", kind="gamma")
    assert list(g2.entries()) == list(g.entries())
    src = build_source_table(9)
    save_table(src, tmp_path / "s.txt")
    s2 = load_table(tmp_path / "s.txt", kind="source")
    assert [s2.total(n) for n in range(1, 10)] == [src.total(n) for n in range(1, 10)]


def test_partial_table_not_cacheable(tmp_path):
    with pytest.raises(CacheError):
        save_table(build_doag_table(5, 6, target_edges=6), tmp_path / "x.txt")
