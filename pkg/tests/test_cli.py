import numpy as np
import pytest

from parlouvain import build_csr, load_edge_list, modularity
from parlouvain.cli import main, parse_report, read_membership

BARBELL_TSV = "0\t1\n1\t2\n0\t2\n3\t4\n4\t5\n3\t5\n2\t3\n"


@pytest.fixture
def barbell_file(tmp_path):
    p = tmp_path / "barbell.tsv"
    p.write_text(BARBELL_TSV)
    return p


def _report(capsys):
    return parse_report(capsys.readouterr().out)


@pytest.mark.parametrize("engine", ["mc", "compact", "sequential"])
def test_detect(barbell_file, tmp_path, capsys, engine):
    out = tmp_path / "m.tsv"
    rc = main(["detect", "--input", str(barbell_file), "--engine", engine, "--threads", "2",
               "--output", str(out)])
    assert rc == 0
    rep = _report(capsys)
    membership = read_membership(str(out))
    assert membership.tolist() == [0, 0, 0, 1, 1, 1]
    g = build_csr(load_edge_list(str(barbell_file)))
    assert abs(float(rep["modularity"]) - modularity(g, membership)) <= 1e-9
    assert rep["communities"] == "2" and rep["engine"] == engine
    assert rep["vertices"] == "6" and float(rep["edges"]) == 7
    split = sum(float(rep[f"phase_split.{k}"]) for k in ("local_moving", "aggregation", "other"))
    assert split == pytest.approx(1.0, abs=1e-9)
    assert sum(float(x) for x in rep["pass_split"].split(",")) == pytest.approx(1.0)


def test_compact_echoes_pick_less(barbell_file, capsys):
    main(["detect", "--input", str(barbell_file), "--engine", "compact", "--pl-period", "8"])
    assert _report(capsys)["params.pick_less"] == "PL8"


def test_report_file(barbell_file, tmp_path):
    rep = tmp_path / "r.txt"
    assert main(["detect", "--input", str(barbell_file), "--report", str(rep)]) == 0
    assert "modularity" in parse_report(rep.read_text())


def test_threads_from_env(barbell_file, capsys, monkeypatch):
    monkeypatch.setenv("LOUVAIN_THREADS", "3")
    main(["detect", "--input", str(barbell_file)])
    assert _report(capsys)["threads"] == "3"


def test_bench(barbell_file, capsys):
    rc = main(["bench", "--input", str(barbell_file), "--threads", "1,2", "--repetitions", "2"])
    assert rc == 0
    rep = _report(capsys)
    assert float(rep["aggregate.t1.speedup"]) == 1.0
    assert "aggregate.t2.speedup" in rep
    assert {k for k in rep if k.startswith("run.")} >= {"run.t1.r0.wall_time", "run.t2.r1.modularity"}
    assert rep["scaling.columns"] == "threads,wall_time_geomean,modularity_mean,speedup"
    assert rep["scaling.row.1"].startswith("2,")


def test_exit_code_parse_error(tmp_path):
    p = tmp_path / "bad.tsv"
    p.write_text("0\tnope\n")
    assert main(["detect", "--input", str(p)]) == 1
    assert main(["detect", "--input", str(tmp_path / "missing.tsv")]) == 1


def test_exit_code_degenerate(tmp_path):
    p = tmp_path / "zero.tsv"
    p.write_text("0\t1\t0\n")
    assert main(["detect", "--input", str(p)]) == 2


def test_exit_code_internal(barbell_file, monkeypatch):
    import parlouvain.cli as cli
    from parlouvain.louvain_compact import HashtableFailure

    def broken(*args, **kwargs):
        raise HashtableFailure("overflow")

    monkeypatch.setattr(cli, "compact_louvain", broken)
    assert main(["detect", "--input", str(barbell_file), "--engine", "compact"]) == 3


def test_convert_symmetrize(tmp_path):
    src = tmp_path / "d.tsv"
    src.write_text("# vertices 3\n0\t1\n1\t0\n1\t2\n")
    dst = tmp_path / "s.mtx"
    assert main(["convert", "--input", str(src), "--output", str(dst), "--symmetrize"]) == 0
    el = load_edge_list(str(dst))
    # 3 directed arcs, the 0<->1 pair merges: 2 undirected edges -> 4 arcs
    assert len(el) == 4 and el.num_vertices == 3
    assert np.array_equal(build_csr(el, symmetrize=False).edges, build_csr(load_edge_list(str(src))).edges)


def test_convert_round_trip(tmp_path, barbell_file):
    mtx = tmp_path / "b.mtx"
    back = tmp_path / "b.tsv"
    main(["convert", "--input", str(barbell_file), "--output", str(mtx)])
    main(["convert", "--input", str(mtx), "--output", str(back)])
    assert load_edge_list(str(back)).triples() == load_edge_list(str(barbell_file)).triples()
