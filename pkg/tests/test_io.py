import numpy as np
import pytest

from dsbgs.io import (
    CapacityError,
    MatrixMarketError,
    parse_header,
    read_history_csv,
    read_matrix_market,
    read_results_csv,
    write_history_csv,
    write_matrix_market,
    write_results_csv,
)
from dsbgs.bench import ExperimentResult
from dsbgs.solver import SolveTrace


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_coordinate_real_general_identity(tmp_path):
    path = write(
        tmp_path,
        "id.mtx",
        "%%MatrixMarket matrix coordinate real general\n"
        "% a comment\n"
        "2 2 2\n"
        "1 1 1.0\n"
        "2 2 1.0\n",
    )
    assert np.array_equal(read_matrix_market(path), np.eye(2))


def test_coordinate_symmetric_expansion(tmp_path):
    path = write(
        tmp_path,
        "sym.mtx",
        "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n2 1 3.0\n",
    )
    a = read_matrix_market(path)
    assert a[0, 1] == 3.0 and a[1, 0] == 3.0
    assert a[0, 0] == 0.0 and a[1, 1] == 0.0


def test_coordinate_pattern_entries_become_one(tmp_path):
    path = write(
        tmp_path,
        "pat.mtx",
        "%%MatrixMarket matrix coordinate pattern general\n2 3 2\n1 3\n2 1\n",
    )
    a = read_matrix_market(path)
    expected = np.zeros((2, 3))
    expected[0, 2] = 1.0
    expected[1, 0] = 1.0
    assert np.array_equal(a, expected)


def test_coordinate_pattern_symmetric(tmp_path):
    path = write(
        tmp_path,
        "patsym.mtx",
        "%%MatrixMarket matrix coordinate pattern symmetric\n3 3 2\n2 1\n3 3\n",
    )
    a = read_matrix_market(path)
    assert a[1, 0] == 1.0 and a[0, 1] == 1.0 and a[2, 2] == 1.0


def test_coordinate_integer_field(tmp_path):
    path = write(
        tmp_path,
        "int.mtx",
        "%%MatrixMarket matrix coordinate integer general\n2 2 1\n1 2 7\n",
    )
    assert read_matrix_market(path)[0, 1] == 7.0


def test_coordinate_duplicates_summed(tmp_path):
    path = write(
        tmp_path,
        "dup.mtx",
        "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1.5\n1 1 2.5\n2 1 1.0\n",
    )
    a = read_matrix_market(path)
    assert a[0, 0] == 4.0 and a[1, 0] == 1.0


def test_array_general_column_major(tmp_path):
    path = write(
        tmp_path,
        "arr.mtx",
        "%%MatrixMarket matrix array real general\n2 3 \n1\n2\n3\n4\n5\n6\n",
    )
    a = read_matrix_market(path)
    assert np.array_equal(a, np.array([[1.0, 3.0, 5.0], [2.0, 4.0, 6.0]]))


def test_array_symmetric_lower_triangle(tmp_path):
    path = write(
        tmp_path,
        "arrsym.mtx",
        "%%MatrixMarket matrix array real symmetric\n2 2\n1\n2\n3\n",
    )
    a = read_matrix_market(path)
    assert np.array_equal(a, np.array([[1.0, 2.0], [2.0, 3.0]]))


@pytest.mark.parametrize(
    "banner",
    [
        "%%MatrixMarket matrix coordinate complex general",
        "%%MatrixMarket matrix coordinate real skew-symmetric",
        "%%MatrixMarket matrix coordinate real hermitian",
        "%%MatrixMarket vector coordinate real general",
        "%%MatrixMarket matrix elemental real general",
        "%%MatrixMarket matrix array pattern general",
        "%%MatrixMarket matrix coordinate real",
        "not a banner at all",
    ],
)
def test_unsupported_headers_rejected_by_name(tmp_path, banner):
    path = write(tmp_path, "bad.mtx", banner + "\n2 2 1\n1 1 1.0\n")
    with pytest.raises(MatrixMarketError, match="line 1"):
        read_matrix_market(path)


def test_header_parse_is_case_insensitive():
    h = parse_header("%%MatrixMarket matrix COORDINATE Real General")
    assert (h.format, h.field, h.symmetry) == ("coordinate", "real", "general")


def test_malformed_entry_reports_line_number(tmp_path):
    path = write(
        tmp_path,
        "bad_entry.mtx",
        "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n1 oops 2.0\n",
    )
    with pytest.raises(MatrixMarketError, match="line 4"):
        read_matrix_market(path)


def test_out_of_range_entry_rejected(tmp_path):
    path = write(
        tmp_path,
        "oob.mtx",
        "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n",
    )
    with pytest.raises(MatrixMarketError, match="line 3"):
        read_matrix_market(path)


def test_entry_count_mismatch_rejected(tmp_path):
    path = write(
        tmp_path,
        "count.mtx",
        "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1.0\n",
    )
    with pytest.raises(MatrixMarketError, match="expected 3 entries"):
        read_matrix_market(path)


def test_densification_cap(tmp_path):
    path = write(
        tmp_path,
        "huge.mtx",
        "%%MatrixMarket matrix coordinate real general\n100000 1000 1\n1 1 1.0\n",
    )
    with pytest.raises(CapacityError):
        read_matrix_market(path)


def test_symmetric_must_be_square(tmp_path):
    path = write(
        tmp_path,
        "nonsquare.mtx",
        "%%MatrixMarket matrix coordinate real symmetric\n2 3 1\n1 1 1.0\n",
    )
    with pytest.raises(MatrixMarketError, match="square"):
        read_matrix_market(path)


def test_coordinate_round_trip_exact(tmp_path):
    rng = np.random.default_rng(0)
    a = rng.standard_normal((7, 5))
    a[rng.random((7, 5)) < 0.4] = 0.0
    path = tmp_path / "rt.mtx"
    write_matrix_market(a, path)
    assert np.array_equal(read_matrix_market(path), a)


def test_array_round_trip_exact(tmp_path):
    rng = np.random.default_rng(1)
    a = rng.standard_normal((4, 6))
    path = tmp_path / "rt_arr.mtx"
    write_matrix_market(a, path, fmt="array")
    assert np.array_equal(read_matrix_market(path), a)


def make_trace(error_history, residual_history):
    return SolveTrace(
        iterations=residual_history[-1][0] if residual_history else 0,
        converged=True,
        error_history=error_history,
        residual_history=residual_history,
        wall_time=0.0,
        final_x=None,
    )


def test_history_csv_header_only_for_empty_trace(tmp_path):
    path = tmp_path / "empty.csv"
    write_history_csv(make_trace([], []), path)
    assert path.read_text().splitlines() == ["k,error_norm,residual_norm"]


def test_history_csv_single_record(tmp_path):
    path = tmp_path / "one.csv"
    write_history_csv(make_trace([(0, 1.0)], [(0, 2.0)]), path)
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    assert lines[1] == "0,1,2"


def test_history_csv_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    ks = [0, 10, 20, 35]
    errs = [(k, float(rng.random())) for k in ks]
    ress = [(k, float(rng.random()) * 1e-7) for k in ks]
    path = tmp_path / "rt.csv"
    write_history_csv(make_trace(errs, ress), path)
    parsed = read_history_csv(path)
    for (k, e, r), (ke, ee), (kr, rr) in zip(parsed, errs, ress):
        assert k == ke == kr
        assert e == ee and r == rr


def test_results_csv_round_trip(tmp_path):
    results = [
        ExperimentResult(
            matrix="type2(9x5)", m=9, n=5, label="RK", alpha=1.0, ell=1, tau=5,
            iter_mean=123.45, cpu_mean=0.0123456789012345678, speedup_vs_baseline=1.0,
        ),
        ExperimentResult(
            matrix="type2(9x5)", m=9, n=5, label="DSBGS(5,5,n)", alpha=5.0, ell=5, tau=5,
            iter_mean=45.6, cpu_mean=0.004, speedup_vs_baseline=3.0864,
        ),
    ]
    path = tmp_path / "results.csv"
    write_results_csv(results, path)
    parsed = read_results_csv(path)
    assert len(parsed) == 2
    for row, res in zip(parsed, results):
        assert row["matrix"] == res.matrix
        assert row["method"] == res.label
        assert row["m"] == res.m and row["n"] == res.n
        assert row["alpha"] == res.alpha
        assert row["iter_mean"] == res.iter_mean
        assert row["cpu_mean"] == res.cpu_mean
        assert row["speedup"] == res.speedup_vs_baseline
