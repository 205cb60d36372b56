import numpy as np
import pytest

from escm.graph import Dag
from escm.io import DataError, load_csv, parse_dag, parse_key_values, read_dag, write_csv, write_dag


def test_load_csv_with_header(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("x,y\n1,2\n3.5,-4\n")
    s = load_csv(p)
    assert (s.n, s.d) == (2, 2)
    assert s.column_names == ("x", "y")
    np.testing.assert_array_equal(s.values, [[1, 2], [3.5, -4]])


def test_load_csv_without_header_generates_names(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("1,2,3\n4,5,6\n")
    assert load_csv(p).column_names == ("col1", "col2", "col3")


def test_trailing_blank_line_ignored(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("a,b\n1,2\n3,4\n\n")
    assert load_csv(p).n == 2


def test_malformed_cell_reports_row_and_column(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("a,b\n1,2\n3,4\n5,abc\n")
    with pytest.raises(DataError, match="row 3, column 2"):
        load_csv(p)


@pytest.mark.parametrize("body", ["a,b\n1,nan\n", "a,b\n1,2,3\n", "a,b\n"])
def test_rejects_bad_tables(tmp_path, body):
    p = tmp_path / "a.csv"
    p.write_text(body)
    with pytest.raises(DataError):
        load_csv(p)


def test_csv_roundtrip(tmp_path):
    x = np.random.default_rng(0).normal(size=(5, 3))
    write_csv(tmp_path / "x.csv", x, ["a", "b", "c"])
    np.testing.assert_array_equal(load_csv(tmp_path / "x.csv").values, x)


def test_dag_text_roundtrip(tmp_path):
    dag = Dag(4, [(1, 2), (3, 4), (1, 4)])
    write_dag(tmp_path / "g.dag", dag)
    assert (tmp_path / "g.dag").read_text().splitlines()[0] == "d=4"
    assert read_dag(tmp_path / "g.dag") == dag


@pytest.mark.parametrize("text", ["1 2\n", "d=3\n1\n", "d=2\n1 2\n2 1\n", "d=x\n"])
def test_parse_dag_errors(text):
    with pytest.raises(DataError):
        parse_dag(text)


def test_key_values_and_directives():
    kv, directives = parse_key_values("a = 1  # note\nedge 1 2 0.5\n\nB-c = x\n")
    assert kv == {"a": "1", "b_c": "x"}
    assert directives == [["edge", "1", "2", "0.5"]]
    with pytest.raises(DataError):
        parse_key_values("a = 1\na = 2\n")
