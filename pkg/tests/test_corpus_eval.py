from fractions import Fraction
from importlib import resources

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import quiet_corpus
from indic2braille.braille import Cell, parse_dot_notation
from indic2braille.corpus import (GoldPair, NoAmbiguityWarning, format_gold, generate_corpus, oracle_choice,
                                  parse_gold, read_gold, read_training, write_gold, write_training)
from indic2braille.errors import CorpusError, MissingModel
from indic2braille.evaluation import COLUMNS, Counts, accuracy, evaluate, parse_report_tsv
from indic2braille.pipeline import translate_hybrid, translate_rule_only
from indic2braille.rules import Candidate, load_table
from indic2braille.script import Script

d = parse_dot_notation
cells = st.lists(st.builds(Cell, st.integers(0, 63)), max_size=30).map(tuple)


class TestAccuracy:
    def test_identity(self):
        g = d("1-2-3-4-5-6-12-13-14-15")
        assert accuracy(g, g) == Counts(10, 10)
        assert accuracy(g, g).accuracy == 1

    def test_empty(self):
        assert accuracy((), ()) == Counts(0, 0)
        assert Counts(0, 0).accuracy == 1

    def test_one_wrong(self):
        g = d("1-2-3-4-5-6-12-13-14-15")
        p = g[:4] + d("16") + g[5:]
        assert accuracy(p, g).accuracy == Fraction(9, 10)

    def test_word_alignment_contains_damage(self):
        g = d("1-2-0-3-4")
        p = d("1-0-3-4")  # first word lost a cell; second word still aligns
        assert accuracy(p, g) == Counts(4, 5)

    def test_surplus_cells_do_not_count(self):
        assert accuracy(d("1-2-6"), d("1-2")) == Counts(2, 2)

    @given(cells, cells)
    def test_bounds(self, p, g):
        c = accuracy(p, g)
        assert 0 <= c.correct <= c.total == len(g)
        assert accuracy(g, g).correct == len(g)


class TestGenerator:
    def test_deterministic(self, table):
        a = generate_corpus(table, Script.DEVANAGARI, 1, seed=4)
        b = generate_corpus(table, Script.DEVANAGARI, 1, seed=4)
        assert a == b

    def test_seeds_differ(self, table):
        assert generate_corpus(table, Script.TAMIL, 3, seed=1) != generate_corpus(table, Script.TAMIL, 3, seed=2)

    @pytest.mark.parametrize("script", list(Script))
    def test_injection_zero_is_rule_exact(self, table, script):
        corpus = quiet_corpus(table, script, 20, seed=3, ambiguity_rate=0.0)
        report = evaluate(corpus.pairs, table)
        assert report.rows[script].rule.accuracy == 1 == report.rows[script].hybrid.accuracy
        assert corpus.training == []

    def test_injection_creates_sites(self, table):
        corpus = generate_corpus(table, Script.BENGALI, 50, seed=0, ambiguity_rate=0.2)
        rule = evaluate(corpus.pairs, table).rows[Script.BENGALI].rule.accuracy
        assert rule < 1 and corpus.training

    def test_training_tags_align(self, table):
        corpus = generate_corpus(table, Script.PERSO_ARABIC, 30, seed=0, ambiguity_rate=0.3)
        tags = set(table.tags(Script.PERSO_ARABIC)) | {"O"}
        for ex in corpus.training:
            assert len(ex.tokens) == len(ex.tags) and set(ex.tags) <= tags
            assert any(t != "O" for t in ex.tags)

    def test_no_ambiguity_warning(self):
        table = load_table("DEVANAGARI\tक\t13\n")
        with pytest.warns(NoAmbiguityWarning):
            corpus = generate_corpus(table, Script.DEVANAGARI, 2)
        assert len(corpus.pairs) == 2

    def test_rejects_zero(self, table):
        with pytest.raises(ValueError):
            generate_corpus(table, Script.DEVANAGARI, 0)

    def test_oracle_rule(self):
        a, b = Candidate("A", d("1")), Candidate("B", d("2"))
        assert oracle_choice((a, b), word_final=True) is a
        assert oracle_choice((a, b), word_final=False) is b


class TestFormats:
    @given(cells)
    def test_gold_round_trip(self, seq):
        # words are separated by "/", so a leading/trailing blank survives as an empty word
        assert parse_gold(format_gold(seq)) == seq

    def test_gold_file(self):
        pairs = [GoldPair("क ख", d("13-0-46"), Script.DEVANAGARI)]
        text = write_gold(pairs)
        assert text == "DEVANAGARI\tक ख\t13/46\n"
        assert read_gold(text) == pairs

    def test_gold_errors_have_lines(self):
        with pytest.raises(CorpusError) as err:
            read_gold("# c\nDEVANAGARI\tक\t19\n")
        assert err.value.line == 2

    def test_training_round_trip(self, table):
        ex = generate_corpus(table, Script.DEVANAGARI, 10, seed=1, ambiguity_rate=0.3).training
        assert read_training(write_training(ex), table.tags()) == ex

    def test_unknown_tag(self):
        with pytest.raises(CorpusError) as err:
            read_training("DEVANAGARI\tक ं\tO ANUSVARA\nDEVANAGARI\tक\tWHAT\n", ["ANUSVARA"])
        assert err.value.line == 2

    def test_length_mismatch(self):
        with pytest.raises(CorpusError):
            read_training("DEVANAGARI\tक ं\tO\n")


class TestBundledGold:
    def test_files(self, table):
        root = resources.files("indic2braille").joinpath("data/gold")
        for script in Script:
            pairs = read_gold(root.joinpath(f"{script.name.lower()}.tsv").read_text("utf-8"))
            assert len(pairs) >= 25 and {p.script for p in pairs} == {script}
            row = evaluate(pairs, table).rows[script]
            assert row.rule.accuracy == 1 and row.untranslated == 0


class TestPipeline:
    def test_unambiguous_no_model(self, table):
        res = translate_hybrid("कमल", table)
        assert res.render() == "⠅⠍⠇" and set(res.provenance) == {"rule"}

    def test_missing_model(self, table):
        with pytest.raises(MissingModel):
            translate_hybrid("संगीत", table)

    def test_rule_only_takes_first_candidate(self, table):
        assert translate_rule_only("संगीत", table).render("dots") == "234-56-1245-35-2345"

    def test_nfc_normalization(self, table):
        assert translate_hybrid("क़", table).cells == translate_hybrid("क़", table).cells

    def test_render_keeps_foreign_text(self, table):
        res = translate_hybrid("कमल abc", table, script=Script.DEVANAGARI)
        assert res.render() == "⠅⠍⠇⠀abc"
        assert [p.text for p in res.untranslated] == ["a", "b", "c"]

    def test_model_choice_matches_oracle(self, table, deva_corpus, deva_trained):
        model = deva_trained[0]
        hits = total = 0
        for pair in deva_corpus.pairs:
            res = translate_hybrid(pair.source, table, model, pair.script)
            total += len(res.rule_pass.sites)
            hits += len(res.rule_pass.sites) * (res.cells == pair.gold)
        assert total > 100 and hits / total >= 0.99

    def test_per_script_models(self, table, deva_trained):
        model = deva_trained[0]
        assert translate_hybrid("संगीत", table, {Script.DEVANAGARI: model}).render("dots") == \
            translate_hybrid("संगीत", table, model).render("dots")
        with pytest.raises(MissingModel):
            translate_hybrid("সংগীত", table, {Script.DEVANAGARI: model})

    def test_held_out(self, table, deva_trained):
        model = deva_trained[0]
        fresh = generate_corpus(table, Script.DEVANAGARI, 200, seed=99, ambiguity_rate=0.1)
        row = evaluate(fresh.pairs, table, model).rows[Script.DEVANAGARI]
        assert row.hybrid.accuracy >= Fraction(99, 100) and row.hybrid.accuracy >= row.rule.accuracy


class TestReport:
    def test_failures_are_recorded(self, table):
        pairs = [GoldPair("संगीत", d("234-1345-1245-35-2345"), Script.DEVANAGARI),
                 GoldPair("कमल", d("13-134-123"), Script.DEVANAGARI)]
        report = evaluate(pairs, table)
        assert [i for i, _ in report.failures] == [0]
        row = report.rows[Script.DEVANAGARI]
        assert row.errors == 1 and row.hybrid == Counts(3, 8)

    def test_render_and_tsv(self, table):
        pairs = [GoldPair("ক", d("13"), Script.BENGALI), GoldPair("क", d("13"), Script.DEVANAGARI)]
        report = evaluate(pairs, table)
        assert [r.script for r in report.ordered()] == [Script.DEVANAGARI, Script.BENGALI]
        head = report.render().splitlines()[0].split()
        assert head == ["Script", "Rule", "Based", "LSTM", "Total"]
        assert COLUMNS == ("Script", "Rule Based", "LSTM", "Total")
        back = parse_report_tsv(report.to_tsv())
        assert [r.values for r in back.ordered()] == [r.values for r in report.ordered()]

    def test_empty_pairs(self, table):
        with pytest.raises(ValueError):
            evaluate([], table)

    def test_bad_tsv(self):
        with pytest.raises(ValueError):
            parse_report_tsv("nope\n")
