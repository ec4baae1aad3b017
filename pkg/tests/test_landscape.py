import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nkimit import landscape as nk


def oracle_fitness(tables, bits):
    """Fitness from a bit list, written independently of the package."""
    n = len(bits)
    k = int(np.log2(len(tables[0]))) - 1
    total = 0.0
    for i in range(n):
        window = [bits[(i + b) % n] for b in range(k + 1)]
        index = sum(bit * 2**b for b, bit in enumerate(window))
        total += tables[i][index]
    return total / n


def oracle_maxima(tables, n):
    """Genotypes strictly fitter than every single-flip neighbour."""
    tables = [list(map(float, row)) for row in tables]
    strings = [[(g >> i) & 1 for i in range(n)] for g in range(2**n)]
    values = [oracle_fitness(tables, s) for s in strings]
    found = []
    for g, s in enumerate(strings):
        neighbours = []
        for j in range(n):
            t = list(s)
            t[j] = 1 - t[j]
            neighbours.append(values[sum(b << i for i, b in enumerate(t))])
        if all(values[g] > v for v in neighbours):
            found.append(g)
    return found


# --- generate --------------------------------------------------------------


@pytest.mark.parametrize("n,k,width", [(12, 0, 2), (12, 4, 32), (5, 4, 32), (1, 0, 2)])
def test_table_shape(n, k, width):
    ls = nk.generate(n, k, 3)
    assert ls.tables.shape == (n, width)
    assert np.all((ls.tables >= 0) & (ls.tables < 1))


def test_generate_is_deterministic():
    a, b = nk.generate(12, 2, 99), nk.generate(12, 2, 99)
    assert a.tables.tobytes() == b.tables.tobytes()
    assert a == b
    assert nk.generate(12, 2, 100) != a


@pytest.mark.parametrize("n,k", [(0, 0), (31, 0), (12, 12), (12, -1), (5, 7)])
def test_generate_rejects_bad_parameters(n, k):
    with pytest.raises(ValueError):
        nk.generate(n, k, 0)


def test_generate_rejects_bad_seed():
    with pytest.raises(ValueError):
        nk.generate(4, 1, -1)
    with pytest.raises(ValueError):
        nk.generate(4, 1, 2**64)


def test_tables_are_read_only():
    ls = nk.generate(4, 1, 0)
    with pytest.raises(ValueError):
        ls.tables[0, 0] = 0.5


# --- fitness ---------------------------------------------------------------


def test_fitness_hand_example(tiny):
    assert nk.fitness(tiny, 0b11) == pytest.approx(0.8)
    assert nk.fitness(tiny, [1, 1]) == nk.fitness(tiny, 0b11)
    assert nk.fitness(tiny, 0b00) == pytest.approx(0.2)


def test_wraparound_neighbourhood():
    # n=3, k=1: component 2 reads (x_2, x_0).
    tables = np.zeros((3, 4))
    tables[2] = [0.0, 0.1, 0.2, 0.3]  # index = x_2 + 2*x_0
    ls = nk.NKLandscape(3, 1, tables)
    assert nk.substate_index(0b001, 3, 1, 2) == 2
    assert nk.substate_index(0b100, 3, 1, 2) == 1
    assert nk.fitness(ls, [1, 0, 0]) == pytest.approx(0.2 / 3)
    assert nk.fitness(ls, [0, 0, 1]) == pytest.approx(0.1 / 3)
    assert nk.fitness(ls, [1, 0, 1]) == pytest.approx(0.3 / 3)


def test_fitness_rejects_wrong_length(tiny):
    with pytest.raises(ValueError):
        nk.fitness(tiny, [1, 0, 1])
    with pytest.raises(ValueError):
        nk.fitness(tiny, 4)


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(1, 10),
    data=st.data(),
)
def test_fitness_is_mean_of_table_lookups(n, data):
    k = data.draw(st.integers(0, n - 1))
    seed = data.draw(st.integers(0, 2**64 - 1))
    ls = nk.generate(n, k, seed)
    g = data.draw(st.integers(0, 2**n - 1))
    bits = nk.to_bits(g, n)
    assert nk.from_bits(bits) == g
    expected = oracle_fitness(ls.tables.tolist(), list(bits))
    assert nk.fitness(ls, g) == pytest.approx(expected, rel=1e-14)
    assert 0.0 < nk.fitness(ls, g) < 1.0


def test_vectorized_fitness_is_bit_identical():
    ls = nk.generate(10, 3, 8)
    f = nk.all_fitness(ls)
    for g in random.Random(0).sample(range(2**10), 50):
        assert f[g] == nk.fitness(ls, g)


# --- global maximum -----------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 7, 12, 14])
@pytest.mark.parametrize("seed", range(20))
def test_k0_shortcut_matches_brute_force(n, seed):
    ls = nk.generate(n, 0, seed)
    assert nk.find_global_maximum(ls) == nk.brute_force_maximum(ls)


def test_tiny_global_maximum(tiny):
    g, f = nk.find_global_maximum(tiny)
    assert g == 0b11
    assert f == pytest.approx(0.8)


def test_global_maximum_dominates():
    ls = nk.generate(10, 4, 1)
    g, f = nk.find_global_maximum(ls)
    assert f == nk.fitness(ls, g)
    assert f >= nk.all_fitness(ls).max()
    assert ls.analyzed


# --- maxima ------------------------------------------------------------------


def test_k0_has_single_maximum(smooth12):
    report = nk.enumerate_maxima(smooth12)
    assert (report.count_total, report.count_local) == (1, 0)


@pytest.mark.parametrize("n", [6, 9, 12])
@pytest.mark.parametrize("k", [0, 2, 4])
def test_maxima_match_oracle(n, k):
    ls = nk.generate(n, k, 1000 + n * 10 + k)
    report = nk.enumerate_maxima(ls)
    assert sorted(e.genotype for e in report.entries) == oracle_maxima(ls.tables, n)


def test_maxima_report_contents(rugged12):
    report = nk.enumerate_maxima(rugged12)
    fits = [e.fitness for e in report.entries]
    assert fits == sorted(fits)
    top = report.entries[-1]
    assert (top.relative_fitness, top.distance) == (1.0, 0)
    assert top.genotype == rugged12.global_max
    assert sum(e.distance == 0 for e in report.entries) == 1
    assert all(0 < e.relative_fitness <= 1 for e in report.entries)
    # k=2 at n=12 is mildly rugged: a handful of maxima, not hundreds.
    assert 1 < report.count_total < 30


def test_equal_neighbour_is_not_a_maximum():
    # Flat landscape: every genotype ties with all its neighbours.
    ls = nk.NKLandscape(3, 0, np.full((3, 2), 0.5))
    assert not nk.maxima_mask(ls).any()


# --- trajectory ----------------------------------------------------------


def test_profile_endpoints(rugged12):
    prof = nk.fitness_profile_trajectory(rugged12)
    assert len(prof) == 13
    assert prof[0] == (0, 1.0)
    complement = rugged12.global_max ^ (2**12 - 1)
    assert prof[-1] == (12, nk.fitness(rugged12, complement) / rugged12.global_max_fitness)
    g = rugged12.global_max ^ 0b111
    assert prof[3][1] == nk.fitness(rugged12, g) / rugged12.global_max_fitness


@pytest.mark.parametrize("seed", range(10))
def test_k0_profile_strictly_decreasing(seed):
    ls = nk.generate(12, 0, seed)
    values = [v for _, v in nk.fitness_profile_trajectory(ls)]
    direct = [nk.fitness(ls, ls.global_max ^ ((1 << d) - 1)) / ls.global_max_fitness for d in range(13)]
    assert values == direct
    assert all(a > b for a, b in zip(values, values[1:]))


# --- serialization -------------------------------------------------------


def test_round_trip(tmp_path):
    ls = nk.generate(9, 3, 2**63 + 5)
    nk.find_global_maximum(ls)
    path = tmp_path / "l.json"
    nk.save(ls, path)
    back = nk.load(path)
    assert back == ls
    assert back.tables.tobytes() == ls.tables.tobytes()
    assert back._global_max == ls._global_max
    rnd = random.Random(1)
    for _ in range(100):
        g = rnd.randrange(2**9)
        assert nk.fitness(back, g) == nk.fitness(ls, g)


def test_save_is_byte_stable(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    nk.save(nk.generate(6, 2, 4), a)
    nk.save(nk.generate(6, 2, 4), b)
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["encoding"] == "lsb-first-substate"
    assert "global_max" not in doc


def test_round_trip_hand_built(tmp_path, tiny):
    path = tmp_path / "tiny.json"
    nk.save(tiny, path)
    assert nk.load(path) == tiny


def _doc(ls):
    return json.loads(nk.dumps(ls))


def test_load_rejects_out_of_range_value():
    doc = _doc(nk.generate(4, 1, 0))
    doc["tables"][2][3] = 1.5
    with pytest.raises(nk.LandscapeFormatError, match=r"tables\[2\]\[3\]"):
        nk.loads(json.dumps(doc))


def test_load_rejects_wrong_row_count():
    doc = _doc(nk.generate(4, 1, 0))
    doc["tables"].pop()
    with pytest.raises(nk.LandscapeFormatError, match="expected 4 rows"):
        nk.loads(json.dumps(doc))


def test_load_rejects_wrong_row_width():
    doc = _doc(nk.generate(4, 1, 0))
    doc["tables"][1].append(0.5)
    with pytest.raises(nk.LandscapeFormatError, match=r"tables\[1\]"):
        nk.loads(json.dumps(doc))


def test_load_reports_line_of_syntax_error():
    text = nk.dumps(nk.generate(4, 1, 0)).replace('"k": 1,', '"k": 1,,')
    with pytest.raises(nk.LandscapeFormatError, match="line 4"):
        nk.loads(text)


@pytest.mark.parametrize(
    "field,value",
    [("n", "12"), ("k", 9), ("format_version", 2), ("encoding", "msb"), ("global_max", 99), ("global_max_fitness", 0.5)],
)
def test_load_rejects_bad_fields(field, value):
    ls = nk.generate(4, 1, 0)
    nk.find_global_maximum(ls)
    doc = _doc(ls)
    doc[field] = value
    with pytest.raises(nk.LandscapeFormatError, match=field.split("_fitness")[0]):
        nk.loads(json.dumps(doc))


def test_describe_table(rugged12):
    lines = nk.describe(rugged12)
    report = nk.enumerate_maxima(rugged12)
    assert lines[1] == f"# {report.count_total} maxima, {report.count_local} local"
    assert lines[-1].endswith(",1.0000,0")
