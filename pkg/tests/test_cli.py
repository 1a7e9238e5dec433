import numpy as np
import pytest

from hamspca.bench import REPORT_COLUMNS
from hamspca.cli import main
from hamspca.data import load_csv

SYNTH = ["--seed", "4", "--synth-classes", "4", "--synth-train", "5", "--synth-test", "2",
         "--synth-d", "20", "--synth-support", "4"]


def test_synth_writes_loadable_csv(tmp_path):
    main(["synth", *SYNTH, "--out-dir", str(tmp_path)])
    ds = load_csv(str(tmp_path / "train.csv"), str(tmp_path / "test.csv"))
    assert ds.train.n == 20 and ds.test.n == 8 and ds.train.d == 20


def test_run_and_report(tmp_path, capsys):
    main(["synth", *SYNTH, "--out-dir", str(tmp_path)])
    out = tmp_path / "r.csv"
    md = tmp_path / "r.md"
    main(["run", "--source", "csv", "--train", str(tmp_path / "train.csv"),
          "--test", str(tmp_path / "test.csv"), "--seed", "1", "--dims", "2,3",
          "--max-iter", "200", "--out", str(out), "--markdown", str(md)])
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(REPORT_COLUMNS) and len(lines) == 13
    assert "### Accuracies with the kernel ridge regression method" in md.read_text()
    capsys.readouterr()
    main(["report", str(out)])
    assert "Leapfrog sparse PCA (d=3)" in capsys.readouterr().out


def test_run_config_file_and_override(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("seed = 2\nsynth_d = 16\nsynth_classes = 3\nsynth_train = 4\n"
                   "methods = pca\ndims = 2, 3\nclassifiers = knn\n")
    out = tmp_path / "r.csv"
    main(["run", "--config", str(cfg), "--dims", "4", "--out", str(out)])
    rows = out.read_text().splitlines()[1:]
    assert [r.split(",")[:3] for r in rows] == [["pca", "4", "knn"]]


def test_run_requires_seed(tmp_path):
    with pytest.raises(SystemExit):
        main(["run", "--dims", "2", "--out", str(tmp_path / "r.csv")])


def test_extract_writes_loadings(tmp_path):
    out = tmp_path / "w.csv"
    main(["extract", *SYNTH, "--method", "ista", "--k", "3", "--lam", "0.5", "--out", str(out)])
    W = np.loadtxt(out, delimiter=",")
    assert W.shape == (20, 3)
    assert np.allclose(np.linalg.norm(W, axis=0), 1.0, atol=1e-10)


def test_help_mentions_pgm_convention(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    assert "<label>_<anything>.pgm" in capsys.readouterr().out
