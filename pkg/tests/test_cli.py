import io
import subprocess
import sys

import pytest

from indic2braille import cli
from indic2braille.corpus import generate_corpus, write_gold, write_training
from indic2braille.evaluation import parse_report_tsv
from indic2braille.rules import bundled_table_text
from indic2braille.script import Script


def run(argv, stdin="", monkeypatch=None, capsys=None):
    monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def sh(monkeypatch, capsys):
    return lambda argv, stdin="": run(argv, stdin, monkeypatch, capsys)


@pytest.fixture(scope="module")
def small_model(tmp_path_factory, table):
    tmp = tmp_path_factory.mktemp("model")
    corpus = generate_corpus(table, Script.DEVANAGARI, 120, seed=2, ambiguity_rate=0.15)
    (tmp / "train.tsv").write_text(write_training(corpus.training), encoding="utf-8")
    (tmp / "gold.tsv").write_text(write_gold(corpus.pairs), encoding="utf-8")
    code = cli.main(["train", "--corpus", str(tmp / "train.tsv"), "--model", str(tmp / "m.txt"), "--epochs", "8"])
    assert code == 0
    return tmp


class TestTranslate:
    def test_kamal(self, sh):
        assert sh(["translate", "--table", "devanagari.tsv"], "कमल\n")[:2] == (0, "⠅⠍⠇\n")

    def test_dots(self, sh):
        assert sh(["translate", "--format", "dots"], "क\n")[:2] == (0, "13\n")

    def test_brf(self, sh):
        assert sh(["translate", "--format", "brf"], "क\n")[:2] == (0, "K\n")

    def test_empty_input(self, sh):
        assert sh(["translate"], "")[:2] == (0, "")

    def test_line_breaks_preserved(self, sh):
        code, out, _ = sh(["translate"], "कमल\n\nক\nकमल")
        assert code == 0 and out == "⠅⠍⠇\n\n⠅\n⠅⠍⠇"

    def test_neutral_line_reuses_script(self, sh):
        code, out, _ = sh(["translate", "--format", "dots"], "क\n1\n")
        assert code == 0 and out.splitlines()[1] == "3456-1"

    def test_detection_failure(self, sh):
        code, out, err = sh(["translate"], "123 !?\n")
        assert code == 3 and "no supported script" in err

    def test_script_override(self, sh):
        assert sh(["translate", "--script", "Devanagari", "--format", "dots"], "1\n")[:2] == (0, "3456-1\n")

    def test_missing_model(self, sh):
        code, _, err = sh(["translate"], "संगीत\n")
        assert code == 4 and "--model" in err

    def test_untranslated_warning(self, sh):
        code, out, err = sh(["translate"], "क x\n")
        assert code == 0 and out == "⠅⠀x\n" and "untranslated 'x'" in err

    def test_bad_table(self, sh, tmp_path):
        bad = tmp_path / "bad.tsv"
        bad.write_text("DEVANAGARI\tक\t78\n", encoding="utf-8")
        code, _, err = sh(["translate", "--table", str(bad)], "क\n")
        assert code == 2 and "line 1" in err

    def test_missing_table_file(self, sh, tmp_path):
        assert sh(["translate", "--table", str(tmp_path / "nope.tsv")], "क\n")[0] == 2

    def test_bad_model(self, sh, tmp_path):
        bad = tmp_path / "m.txt"
        bad.write_text("garbage\n", encoding="utf-8")
        assert sh(["translate", "--model", str(bad)], "क\n")[0] == 2

    def test_with_model(self, sh, small_model):
        code, out, _ = sh(["translate", "--model", str(small_model / "m.txt"), "--format", "dots"], "संगीत\n")
        assert code == 0 and out.strip() in ("234-56-1245-35-2345", "234-1345-1245-35-2345")

    def test_files(self, sh, tmp_path):
        (tmp_path / "in.txt").write_text("कमल\n", encoding="utf-8")
        code = sh(["translate", "-i", str(tmp_path / "in.txt"), "-o", str(tmp_path / "out.txt")])[0]
        assert code == 0 and (tmp_path / "out.txt").read_text(encoding="utf-8") == "⠅⠍⠇\n"

    def test_no_partial_output(self, sh, tmp_path):
        (tmp_path / "in.txt").write_text("कमल\nसंगीत\n", encoding="utf-8")
        code = sh(["translate", "-i", str(tmp_path / "in.txt"), "-o", str(tmp_path / "out.txt")])[0]
        assert code == 4
        assert sorted(p.name for p in tmp_path.iterdir()) == ["in.txt"]

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "indic2braille", "translate"], input="कमल\n",
                              capture_output=True, text=True, encoding="utf-8")
        assert proc.returncode == 0 and proc.stdout == "⠅⠍⠇\n"


class TestTrain:
    def test_outputs(self, small_model):
        trace = (small_model / "m.txt.loss.tsv").read_text().splitlines()
        assert trace[0] == "epoch\tloss" and len(trace) == 9
        first, last = float(trace[1].split("\t")[1]), float(trace[-1].split("\t")[1])
        assert last < first

    def test_deterministic(self, sh, small_model, tmp_path):
        args = ["train", "--corpus", str(small_model / "train.tsv"), "--epochs", "8"]
        assert sh(args + ["--model", str(tmp_path / "a.txt")])[0] == 0
        assert (tmp_path / "a.txt").read_bytes() == (small_model / "m.txt").read_bytes()

    def test_unknown_tag(self, sh, tmp_path):
        (tmp_path / "t.tsv").write_text("DEVANAGARI\tक ं\tO ANUSVARA\nDEVANAGARI\tक\tNOPE\n", encoding="utf-8")
        code, _, err = sh(["train", "--corpus", str(tmp_path / "t.tsv"), "--model", str(tmp_path / "m")])
        assert code == 2 and "line 2" in err
        assert not (tmp_path / "m").exists()

    def test_unreadable_corpus(self, sh, tmp_path):
        code = sh(["train", "--corpus", str(tmp_path / "none.tsv"), "--model", str(tmp_path / "m")])[0]
        assert code == 2

    def test_divergence(self, sh, small_model, tmp_path):
        code, _, err = sh(["train", "--corpus", str(small_model / "train.tsv"), "--model", str(tmp_path / "m"),
                           "--lr", "1e300", "--epochs", "2"])
        assert code == 5 and "diverged" in err
        assert list(tmp_path.iterdir()) == []

    def test_model_required(self, sh, small_model):
        assert sh(["train", "--corpus", str(small_model / "train.tsv")])[0] == 2


class TestEvaluate:
    def test_unambiguous_gold(self, sh):
        gold = str(cli.Path(cli.__file__).parent / "data" / "gold" / "tamil.tsv")
        code, out, _ = sh(["evaluate", "--gold", gold])
        assert code == 0
        lines = out.splitlines()
        assert lines[0].split() == ["Script", "Rule", "Based", "LSTM", "Total"]
        assert lines[2].split() == ["Tamil", "1.0000", "1.0000", "1.0000"]

    def test_tsv_round_trip(self, sh, small_model):
        code, out, _ = sh(["evaluate", "--gold", str(small_model / "gold.tsv"),
                           "--model", str(small_model / "m.txt"), "--tsv"])
        assert code == 0
        report = parse_report_tsv(out)
        row = report.rows[Script.DEVANAGARI]
        fields = out.splitlines()[1].split("\t")
        assert [float(x) for x in fields[1:4]] == [round(float(v), 6) for v in row.values]
        assert row.rule.accuracy < 1 and row.hybrid.accuracy >= row.rule.accuracy

    def test_unreadable(self, sh, tmp_path):
        assert sh(["evaluate", "--gold", str(tmp_path / "x.tsv")])[0] == 2


class TestInspect:
    def test_bundled_clean(self, sh, tmp_path):
        path = tmp_path / "devanagari.tsv"
        path.write_text(bundled_table_text(Script.DEVANAGARI), encoding="utf-8")
        code, out, _ = sh(["inspect-table", "--table", str(path)])
        assert code == 0 and "ambiguity class" in out

    def test_bundled_name(self, sh):
        code, out, _ = sh(["inspect-table", "--table", "perso_arabic.tsv"])
        assert code == 0 and "GHUNNA" in out

    def test_duplicates(self, sh, tmp_path):
        path = tmp_path / "t.tsv"
        path.write_text("DEVANAGARI\tक\t13\nDEVANAGARI\tक\t14\n", encoding="utf-8")
        code, out, _ = sh(["inspect-table", "--table", str(path)])
        assert code == 1 and "line 2" in out

    def test_empty(self, sh, tmp_path):
        path = tmp_path / "t.tsv"
        path.write_text("", encoding="utf-8")
        code, out, _ = sh(["inspect-table", "--table", str(path)])
        assert code == 0 and "no rules" in out

    def test_unreadable(self, sh, tmp_path):
        assert sh(["inspect-table", "--table", str(tmp_path / "nope")])[0] == 2


def test_generate(sh, tmp_path):
    code = sh(["generate", "--script", "Odia", "-n", "5", "--gold-out", str(tmp_path / "g.tsv"),
               "--train-out", str(tmp_path / "t.tsv")])[0]
    assert code == 0
    assert len((tmp_path / "g.tsv").read_text(encoding="utf-8").splitlines()) == 5
