import csv
import io
import subprocess
import sys

import pytest

from conftest import chain_topology, two_stage_topology
from dea_mpss.cli import ReportTable, render, run
from dea_mpss.data import topology_to_json
from dea_mpss.errors import SolverError, ValidationError

SINGLE_CSV = "dmu,in1_0,mid_0,out1_0,in2_0,out2_0\nonly,1,2,3,4,5\n"
TRIO_CSV = (
    "dmu,in1_0,mid_0,out1_0,in2_0,out2_0\n"
    "a,1,2,3,4,5\nb,2,3,4,5,6\nc,3,5,5,5,9\n"
)
CHAIN_CSV = (
    "dmu,op_in_0,op_mid_0,rd_in_0,rd_mid_0,final_0\n"
    "a,2,3,4,5,6\nb,3,4,5,6,7\n"
)


@pytest.fixture
def two_stage_files(tmp_path):
    data = tmp_path / "d.csv"
    topo = tmp_path / "t.json"
    data.write_text(TRIO_CSV, encoding="utf-8")
    topo.write_text(topology_to_json(two_stage_topology()), encoding="utf-8")
    return str(data), str(topo)


@pytest.fixture
def chain_files(tmp_path):
    data = tmp_path / "d.csv"
    topo = tmp_path / "t.json"
    data.write_text(CHAIN_CSV, encoding="utf-8")
    topo.write_text(topology_to_json(chain_topology()), encoding="utf-8")
    return str(data), str(topo)


# -- render ------------------------------------------------------------------


def test_render_one_by_one_csv():
    table = ReportTable("t", ("v",), ((1.23456,),), (2,))
    assert render(table, "csv") == "v\n1.23\n"


def test_render_empty_rows_header_only():
    table = ReportTable("t", ("a", "b"), (), (None, None))
    assert render(table, "csv") == "a,b\n"


def test_render_markdown_pipe_table():
    table = ReportTable("scores", ("dmu", "score"), (("a", 1.0),), (None, 4))
    text = render(table, "markdown")
    assert "### scores" in text
    assert "| dmu | score |" in text
    assert "| --- | --- |" in text
    assert "| a | 1.0000 |" in text


def test_render_csv_round_trips():
    rows = (("a", 0.1254, 0.2825), ("b", 17.7392, 138.286))
    table = ReportTable("t", ("dmu", "p1", "p2"), rows, (None, 4, 4))
    parsed = list(csv.reader(io.StringIO(render(table, "csv"))))
    assert parsed[0] == ["dmu", "p1", "p2"]
    assert parsed[1] == ["a", "0.1254", "0.2825"]
    assert parsed[2] == ["b", "17.7392", "138.2860"]


def test_render_rejects_unknown_format():
    with pytest.raises(ValidationError):
        render(ReportTable("t", ("a",), (), (None,)), "xml")


def test_report_table_must_be_rectangular():
    with pytest.raises(ValidationError):
        ReportTable("t", ("a", "b"), (("only",),), (None, None))


# -- subcommands ---------------------------------------------------------------


def test_summary_exit_zero(two_stage_files, capsys):
    data, _ = two_stage_files
    assert run(["summary", "--data", data, "--format", "csv"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "measure,mean,sd,min,max"
    assert len(out.splitlines()) == 6


def test_network_mpss_single_dmu_row(tmp_path, capsys):
    data = tmp_path / "d.csv"
    topo = tmp_path / "t.json"
    data.write_text(SINGLE_CSV, encoding="utf-8")
    topo.write_text(topology_to_json(two_stage_topology()), encoding="utf-8")
    code = run(["network-mpss", "--data", str(data), "--topology", str(topo),
                "--intermediates", "variable", "--format", "csv"])
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2
    assert lines[1].startswith("only,0.0000,")


def test_network_mpss_deterministic_output(two_stage_files, capsys):
    data, topo = two_stage_files
    argv = ["network-mpss", "--data", data, "--topology", topo, "--stages"]
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv) == 0
    assert capsys.readouterr().out == first


def test_dmu_filter(two_stage_files, capsys):
    data, topo = two_stage_files
    assert run(["blackbox-mpss", "--data", data, "--topology", topo,
                "--dmu", "b", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2 and lines[1].startswith("b,")


def test_raw_prints_full_precision(two_stage_files, capsys):
    data, _ = two_stage_files
    assert run(["summary", "--data", data, "--format", "csv", "--raw"]) == 0
    out = capsys.readouterr().out
    sd_cell = out.splitlines()[2].split(",")[2]  # sd of the mid_0 column
    assert float(sd_cell) == pytest.approx(1.5275252316519465, abs=1e-15)
    assert len(sd_cell) > 8  # repr precision, not table rounding


def test_decompose_scores_csv(tmp_path, capsys):
    scores = tmp_path / "scores.csv"
    scores.write_text("dmu,process1,process2\nr1,0.1254,0.2825\n", encoding="utf-8")
    assert run(["decompose", "--scores", str(scores), "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    # 0.14125 stores just under the decimal midpoint, so 4-decimal output is 0.1412
    assert lines[1] == "r1,0.1254,0.2825,0.0627,0.1412,0.2039"


def test_decompose_needs_some_input(capsys):
    assert run(["decompose"]) == 1
    assert "error:" in capsys.readouterr().err


def test_decompose_data_pipeline(tmp_path, capsys):
    # identical rows: system and stage scores are all zero
    data = tmp_path / "d.csv"
    topo = tmp_path / "t.json"
    rows = "a,1,2,3,4,5\nb,1,2,3,4,5\n"
    data.write_text("dmu,in1_0,mid_0,out1_0,in2_0,out2_0\n" + rows, encoding="utf-8")
    topo.write_text(topology_to_json(two_stage_topology()), encoding="utf-8")
    assert run(["decompose", "--data", str(data), "--topology", str(topo),
                "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "dmu,process1,process2,stage1,stage2,tandem,system"
    assert lines[1] == "a,0.0000,0.0000,0.0000,0.0000,0.0000,0.0000"


def test_chain_commands(chain_files, capsys):
    data, topo = chain_files
    assert run(["chain-eff", "--data", data, "--topology", topo, "--format", "csv"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "dmu,objective,operation,rd,marketability,efficient"
    assert run(["chain-mpss", "--data", data, "--topology", topo, "--targets",
                "--w1", "1", "--w2", "0.5", "--w3", "0.5", "--format", "csv"]) == 0
    out = capsys.readouterr().out
    assert "op_mid_0_current" in out
    assert "strategy" in out


def test_kruskal_wallis_command(tmp_path, capsys):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    a.write_text("score\n1\n2\n3\n4\n", encoding="utf-8")
    b.write_text("score\n2\n3\n4\n5\n", encoding="utf-8")
    assert run(["kruskal-wallis", "--groups", f"{a},{b}", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "groups,h_statistic,df,p_value,tie_corrected"
    assert lines[1].startswith("2,")


def test_kruskal_wallis_reference_columns(tmp_path, capsys):
    import csv as csv_mod
    from conftest import FIXTURES

    with open(FIXTURES / "rdvc_mpss_reference.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv_mod.DictReader(fh))
    for year in ("2014", "2015"):
        path = tmp_path / f"op_{year}.csv"
        path.write_text("\n".join(r[f"operation_{year}"] for r in rows), encoding="utf-8")
    assert run(["kruskal-wallis", "--format", "csv",
                "--groups", f"{tmp_path / 'op_2014.csv'},{tmp_path / 'op_2015.csv'}"]) == 0
    line = capsys.readouterr().out.splitlines()[1]
    assert line == "2,0.119,1,0.730,yes"


def test_validate_ok_and_missing_file(two_stage_files, tmp_path, capsys):
    data, topo = two_stage_files
    assert run(["validate", "--data", data, "--topology", topo]) == 0
    capsys.readouterr()
    assert run(["validate", "--data", str(tmp_path / "nope.csv"), "--topology", topo]) == 1
    err = capsys.readouterr().err
    assert err.startswith("error:") and err.count("\n") == 1


def test_unknown_command_exit_one(capsys):
    assert run(["frobnicate"]) == 1
    assert "error:" in capsys.readouterr().err


def test_bad_flag_exit_one(two_stage_files, capsys):
    data, topo = two_stage_files
    assert run(["network-mpss", "--data", data, "--topology", topo, "--bogus"]) == 1
    assert "error:" in capsys.readouterr().err


def test_solver_failure_exit_two(monkeypatch, capsys):
    from dea_mpss import cli

    def boom(args):
        raise SolverError("synthetic failure")

    monkeypatch.setitem(cli._COMMANDS, "summary", boom)
    assert run(["summary", "--data", "whatever"]) == 2
    assert "solver failure" in capsys.readouterr().err


def test_epsilon_flag_repairs_zeros(tmp_path, capsys):
    data = tmp_path / "d.csv"
    data.write_text("dmu,a\nu1,0\nu2,2\n", encoding="utf-8")
    with pytest.warns(UserWarning, match="epsilon"):
        assert run(["summary", "--data", str(data), "--min-epsilon", "0.001",
                    "--format", "csv"]) == 0
    out = capsys.readouterr().out
    assert "0.0010" in out  # min column reflects the substitution


def test_console_entry_point(two_stage_files):
    data, topo = two_stage_files
    proc = subprocess.run(
        [sys.executable, "-m", "dea_mpss.cli", "summary", "--data", data],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "measure" in proc.stdout
