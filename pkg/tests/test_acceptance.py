"""Acceptance criteria. Each test records one PASS/FAIL line, printed in the
terminal summary under "acceptance criteria".

Tolerances are pinned here and must not be loosened.
"""
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import quiet_corpus, record
from indic2braille import cli
from indic2braille.braille import (Cell, brf_table, from_unicode, parse_dot_notation, to_brf,
                                   to_dot_notation, to_unicode)
from indic2braille.corpus import generate_corpus, write_training
from indic2braille.evaluation import evaluate, parse_report_tsv
from indic2braille.pipeline import translate_hybrid
from indic2braille.script import SCRIPT_RANGES, Script, segment
from indic2braille.tagger import Vocab, bilstm_hidden, init_model, loss_and_grads, zero_model

ORACLE_SECONDS = 10.0
HYBRID_SECONDS = 120.0
HYBRID_MIN = Fraction(99, 100)
ECHO_RANGE = (Fraction(92, 100), Fraction(96, 100))
GRAD_SECONDS = 30.0
GRAD_STEP = 1e-5
GRAD_TOL = 1e-4
SYMMETRY_TOL = 1e-12

# North American Braille ASCII, indexed by cell mask (dot i sets bit i-1)
BRAILLE_ASCII = " A1B'K2L@CIF/MSP\"E3H9O6R^DJG>NTQ,*5<-U8V.%[$+X!&;:4\\0Z7(_?W]#Y)="

REPORTS = []  # every EvalReport produced here, checked for exact accuracy at the end


def test_oracle_equivalence(table):
    t0 = time.perf_counter()
    mismatches, n = [], 0
    for script in Script:
        corpus = quiet_corpus(table, script, 100, seed=11, ambiguity_rate=0.0)
        for pair in corpus.pairs:
            n += 1
            got = translate_hybrid(pair.source, table, None, script)
            if to_unicode(got.cells).encode() != to_unicode(pair.gold).encode() or got.untranslated:
                mismatches.append((script.name, pair.source))
        REPORTS.append(evaluate(corpus.pairs, table))
    elapsed = time.perf_counter() - t0
    ok = not mismatches and n == 1000 and elapsed < ORACLE_SECONDS
    record("oracle equivalence", ok, f"{n - len(mismatches)}/{n} pairs byte-identical in {elapsed:.2f}s (< {ORACLE_SECONDS:.0f}s)")
    assert not mismatches, mismatches[:5]
    assert elapsed < ORACLE_SECONDS


def test_hybrid_accuracy(table, deva_corpus, deva_trained):
    t0 = time.perf_counter()
    model, _, trace, train_seconds = deva_trained
    report = evaluate(deva_corpus.pairs, table, model)
    REPORTS.append(report)
    row = report.rows[Script.DEVANAGARI]
    elapsed = train_seconds + time.perf_counter() - t0
    rule, hybrid = row.rule.accuracy, row.hybrid.accuracy
    ok = rule < 1 and hybrid >= HYBRID_MIN and elapsed < HYBRID_SECONDS and not report.failures
    record("hybrid accuracy", ok,
           f"rule-only {float(rule):.4f} < 1, hybrid {float(hybrid):.4f} >= 0.99, {elapsed:.1f}s (< 120s)")
    assert rule < 1
    assert hybrid >= HYBRID_MIN
    assert trace[-1] < trace[0]
    assert elapsed < HYBRID_SECONDS


def test_rule_only_echo(table):
    corpus = generate_corpus(table, Script.DEVANAGARI, 500, seed=0, ambiguity_rate=0.06)
    lo, hi = ECHO_RANGE
    report = evaluate(corpus.pairs, table, model=None)
    REPORTS.append(report)
    rule = report.rows[Script.DEVANAGARI].rule.accuracy
    ok = lo <= rule <= hi
    record("rule-only accuracy echo", ok, f"Devanagari rule-only {float(rule):.4f} in [0.92, 0.96]")
    assert ok


def _tiny_instance(seed):
    rng = np.random.default_rng([seed, 99])
    vocab = Vocab(("<pad>", "<unk>", "a", "b", "c", "d", "e"), ("O", "X", "Y"))
    model = init_model(vocab, d_emb=3, d_hidden=4, layers=1, dropout=0.0, seed=seed, scale=0.5)
    ids = rng.integers(0, 7, size=5)
    tags = rng.integers(0, 3, size=5)
    return model, ids, tags


def numeric_grads(model, ids, tags, step=GRAD_STEP):
    """Central differences of the mean cross-entropy, one coordinate at a time."""
    from indic2braille.tagger import sequence_loss

    out = {}
    for name, arr in model.params.items():
        g = np.zeros_like(arr)
        for idx in np.ndindex(arr.shape):
            vals = []
            for sign in (1, -1):
                p = {k: v.copy() for k, v in model.params.items()}
                p[name][idx] += sign * step
                vals.append(sequence_loss(ids, tags, model.replace_params(p)))
            g[idx] = (vals[0] - vals[1]) / (2 * step)
        out[name] = g
    return out


def rel_error(a, n):
    """Norm-wise relative error of one parameter array."""
    denom = max(np.linalg.norm(a), np.linalg.norm(n))
    return 0.0 if denom == 0 else float(np.linalg.norm(a - n) / denom)


def test_gradient_check():
    t0 = time.perf_counter()
    worst, worst_at = 0.0, None
    for seed in range(20):
        model, ids, tags = _tiny_instance(seed)
        _, analytic = loss_and_grads(ids, tags, model)
        numeric = numeric_grads(model, ids, tags)
        for name in analytic:
            err = rel_error(analytic[name], numeric[name])
            if err > worst:
                worst, worst_at = err, (seed, name)
    elapsed = time.perf_counter() - t0
    ok = worst < GRAD_TOL and elapsed < GRAD_SECONDS
    record("gradient correctness", ok,
           f"20 instances, max relative error {worst:.2e} (< 1e-4) at {worst_at}, {elapsed:.1f}s (< 30s)")
    assert worst < GRAD_TOL
    assert elapsed < GRAD_SECONDS


def _swap_directions(model):
    p = dict(model.params)
    for part in ("W", "U", "b"):
        p[f"l0.fwd.{part}"], p[f"l0.bwd.{part}"] = model.params[f"l0.bwd.{part}"], model.params[f"l0.fwd.{part}"]
    return model.replace_params(p)


def test_lstm_algebraic_properties():
    vocab = Vocab(("<pad>", "<unk>", "a", "b", "c"), ("O", "X"))
    zm = zero_model(vocab, d_emb=3, d_hidden=4)
    zero_ok = bool(np.all(bilstm_hidden([0, 2, 3, 4, 1], zm) == 0.0))
    worst = 0.0
    for seed in range(50):
        rng = np.random.default_rng([seed, 5])
        T = int(rng.integers(1, 12))
        model = init_model(vocab, d_emb=3, d_hidden=4, seed=seed, scale=0.8)
        ids = rng.integers(0, len(vocab), size=T)
        H = bilstm_hidden(ids, model)
        H_rev = bilstm_hidden(ids[::-1], _swap_directions(model))
        d = model.d_hidden
        expected = np.concatenate([H[:, d:], H[:, :d]], axis=1)[::-1]
        worst = max(worst, float(np.max(np.abs(H_rev - expected))))
    ok = zero_ok and worst <= SYMMETRY_TOL
    record("LSTM algebraic properties", ok,
           f"zero model gives zero states: {zero_ok}; reversal symmetry on 50 instances, max deviation {worst:.1e} (<= 1e-12)")
    assert zero_ok
    assert worst <= SYMMETRY_TOL


def test_renderer_bit_exactness():
    brf = brf_table()
    bad = []
    for mask in range(64):
        cell = Cell(mask)
        u = to_unicode([cell])
        if u != chr(0x2800 + mask) or from_unicode(u) != (cell,):
            bad.append(("unicode", mask))
        if to_brf(parse_dot_notation(to_dot_notation([cell]))) != brf[mask] or brf[mask] != BRAILLE_ASCII[mask]:
            bad.append(("brf", mask))
        if parse_dot_notation(to_dot_notation([cell])) != (cell,):
            bad.append(("dots", mask))
    ok = not bad and len(brf) == 64
    record("renderer bit-exactness", ok, f"64 masks, {len(bad)} mismatches across unicode, BRF and dot notation")
    assert not bad


def test_segmentation_round_trip():
    rng = np.random.default_rng(2024)
    pools = [np.arange(lo, hi + 1) for ranges in SCRIPT_RANGES.values() for lo, hi in ranges]
    pools.append(np.arange(0x20, 0x7F))
    scripts = list(Script)
    failures = 0
    for _ in range(10_000):
        n = int(rng.integers(0, 25))
        cps = [int(rng.choice(pools[rng.integers(len(pools))])) for _ in range(n)]
        text = "".join(map(chr, cps))
        tokens = segment(text, scripts[rng.integers(len(scripts))])
        if "".join(t.text for t in tokens) != text:
            failures += 1
    record("segmentation round-trip", failures == 0, f"{10_000 - failures}/10000 fuzz strings reconstructed")
    assert failures == 0


def test_determinism(tmp_path, table, deva_corpus, deva_trained):
    corpus = generate_corpus(table, Script.DEVANAGARI, 40, seed=5)
    (tmp_path / "train.tsv").write_text(write_training(corpus.training), encoding="utf-8")
    files = []
    for run in (1, 2):
        out = tmp_path / f"model{run}.txt"
        code = cli.main(["train", "--table", "devanagari.tsv", "--corpus", str(tmp_path / "train.tsv"),
                         "--model", str(out), "--seed", "7", "--epochs", "5"])
        assert code == 0
        files.append(out.read_bytes())
    models_same = files[0] == files[1]

    model = deva_trained[0]
    sources = [p.source for p in deva_corpus.pairs[:100]]
    first = [translate_hybrid(s, table, model).render("dots") for s in sources]
    second = [translate_hybrid(s, table, model).render("dots") for s in sources]
    translations_same = first == second
    ok = models_same and translations_same
    record("determinism", ok, f"train model files identical: {models_same}; 100 hybrid translations identical: {translations_same}")
    assert ok


def test_accuracy_exactness():
    assert REPORTS, "run with the rest of this module"
    checked, bad = 0, 0
    for report in REPORTS:
        back = parse_report_tsv(report.to_tsv())
        for row in report.ordered():
            for counts in (row.rule, row.hybrid, row.site_words):
                checked += 1
                acc = counts.accuracy
                if counts.total and acc * counts.total != counts.correct:
                    bad += 1
                if not counts.total and acc != 1:
                    bad += 1
            b = back.rows[row.script]
            if (b.rule, b.hybrid, b.site_words) != (row.rule, row.hybrid, row.site_words):
                bad += 1
    record("accuracy exactness", bad == 0, f"{checked} accuracies from {len(REPORTS)} evaluations, {bad} inexact")
    assert bad == 0


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
