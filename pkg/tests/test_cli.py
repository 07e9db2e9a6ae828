import json

import pytest

from conftest import cycle, path_graph
from lcskernel import Dataset, Graph, cli, load_gram, save_tudataset
from lcskernel.kernel import read_gram_header


@pytest.fixture
def toy_dir(tmp_path):
    graphs, labels = [], []
    for k in range(8):
        graphs.append(path_graph(3 + k % 4, [1 + (i % 2) for i in range(3 + k % 4)], id=len(graphs)))
        labels.append(0)
        graphs.append(cycle(3 + k % 4, id=len(graphs)).relabel([2] * (3 + k % 4)))
        labels.append(1)
    ds = Dataset(graphs, labels, "TOY")
    save_tudataset(ds, tmp_path / "TOY")
    return tmp_path / "TOY"


def run(*argv):
    return cli.main([str(a) for a in argv])


def test_gram_writes_csv(toy_dir, tmp_path, capsys):
    out = tmp_path / "g.csv"
    assert run("gram", "--dataset", toy_dir, "--variant", "flcs", "--rho", 0.8, "--s", 0.5,
               "--lambda", 1, "--out", out, "--workers", 1) == 0
    g = load_gram(out)
    assert g.values.shape == (16, 16)
    assert read_gram_header(out)["params"]["rho"] == 0.8
    assert "16x16" in capsys.readouterr().out


def test_gram_missing_directory(tmp_path, capsys):
    assert run("gram", "--dataset", tmp_path / "nope") == 2
    assert "nope_A.txt" in capsys.readouterr().err


def test_gram_flcs_flag_with_blcs(toy_dir):
    assert run("gram", "--dataset", toy_dir, "--variant", "blcs", "--s", 0.5) == 3


@pytest.mark.parametrize("flags", [["--lambda", "0"], ["--variant", "flcs", "--rho", "1.5"], ["--workers", "0"]])
def test_gram_bad_config(toy_dir, flags):
    assert run("gram", "--dataset", toy_dir, *flags) == 3


def test_config_file_and_flag_precedence(toy_dir, tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"variant": "flcs", "rho": 0.6, "s": 0.2, "lambda": 0.5}))
    out = tmp_path / "g.csv"
    assert run("gram", "--dataset", toy_dir, "--config", conf, "--s", 0.8, "--out", out, "--workers", 1) == 0
    params = read_gram_header(out)["params"]
    assert (params["variant"], params["rho"], params["s"], params["lambda"]) == ("flcs", 0.6, 0.8, 0.5)
    conf.write_text(json.dumps({"bogus": 1}))
    assert run("gram", "--dataset", toy_dir, "--config", conf) == 3
    conf.write_text("{not json")
    assert run("gram", "--dataset", toy_dir, "--config", conf) == 3


def _classify(toy_dir, out, *extra):
    return run("classify", "--dataset", toy_dir, "--folds", 4, "--repeats", 2, "--inner-folds", 3,
               "--c-grid", "1,100", "--lambda-grid", "0.1,1", "--workers", 1, "--out", out, *extra)


def test_classify_deterministic(toy_dir, tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert _classify(toy_dir, a, "--seed", 7) == 0
    assert _classify(toy_dir, b, "--seed", 7, "--no-cache") == 0
    assert a.read_bytes() == b.read_bytes()
    report = json.loads(a.read_text())
    assert len(report["per_fold"]) == 8
    line = capsys.readouterr().out.strip().splitlines()[-1]
    assert line.startswith("TOY, blcs, ") and "±" in line and "best(C=" in line


def test_classify_reuses_and_invalidates_cache(toy_dir, tmp_path, monkeypatch):
    out = tmp_path / "r.json"
    cache = tmp_path / "cache"
    assert _classify(toy_dir, out, "--cache-dir", cache) == 0
    files = sorted(cache.iterdir())
    assert len(files) == 2

    def boom(*a, **k):
        raise AssertionError("Gram matrix recomputed despite a valid cache")

    monkeypatch.setattr(cli, "distance_matrix", boom)
    assert _classify(toy_dir, out, "--cache-dir", cache) == 0
    # a different OT setting invalidates the cached files
    assert _classify(toy_dir, out, "--cache-dir", cache, "--epsilon", 0.05) == 4
    monkeypatch.undo()
    assert _classify(toy_dir, out, "--cache-dir", cache, "--epsilon", 0.05) == 0
    assert read_gram_header(files[0])["params"]["ot"]["epsilon"] == 0.05


def test_classify_flcs_grid(toy_dir, tmp_path):
    out = tmp_path / "f.json"
    assert _classify(toy_dir, out, "--variant", "flcs", "--rho-grid", "0.6,1", "--s-grid", "0,0.5",
                     "--with-timing") == 0
    report = json.loads(out.read_text())
    rho, s, lam = report["best_params"][1]
    assert rho in (0.6, 1.0) and s in (0.0, 0.5) and lam in (0.1, 1.0)
    assert "gram" in report["timing"]


def test_classify_small_class_warns(tmp_path):
    graphs = [path_graph(3 + k % 3, id=k) for k in range(14)]
    labels = [0] * 10 + [1] * 4
    save_tudataset(Dataset(graphs, labels, "SMALL"), tmp_path / "SMALL")
    with pytest.warns(UserWarning, match="smallest class has 4"):
        code = run("classify", "--dataset", tmp_path / "SMALL", "--folds", 10, "--repeats", 1,
                   "--c-grid", "1", "--lambda", 1, "--workers", 1, "--out", tmp_path / "s.json")
    assert code == 0


def test_classify_requires_class_labels(toy_dir, tmp_path):
    (toy_dir / "TOY_graph_labels.txt").unlink()
    assert _classify(toy_dir, tmp_path / "x.json") == 2
    # Gram matrices only need the graphs
    assert run("gram", "--dataset", toy_dir, "--out", tmp_path / "g.csv", "--workers", 1) == 0


def test_inspect(toy_dir, capsys):
    assert run("inspect", "--dataset", toy_dir, "--graph-id", 1) == 0
    out = capsys.readouterr().out
    # a 3-cycle has 6 ordered reachable pairs
    assert "6 ordered reachable pairs" in out
    assert "total mass 6" in out
    assert "retained centers" in out


def test_inspect_bad_id_and_empty_graph(tmp_path, capsys):
    ds = Dataset([Graph.from_edges(1, [], id=0)], [1], "ONE")
    save_tudataset(ds, tmp_path / "ONE")
    assert run("inspect", "--dataset", tmp_path / "ONE", "--graph-id", 3) == 3
    assert run("inspect", "--dataset", tmp_path / "ONE", "--graph-id", 0) == 0
    assert "EmptyRepresentation" in capsys.readouterr().out


def test_internal_error_exit_code(toy_dir, monkeypatch):
    def fail(cfg):
        raise RuntimeError("unexpected")

    monkeypatch.setitem(cli.COMMANDS, "gram", fail)
    assert run("gram", "--dataset", toy_dir) == 4
