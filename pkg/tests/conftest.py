import warnings

import pytest

from indic2braille.corpus import NoAmbiguityWarning, build_vocab, encode_examples, generate_corpus
from indic2braille.rules import bundled_table
from indic2braille.script import Script
from indic2braille.tagger import TrainConfig, train

ACCEPTANCE: list[tuple[str, bool, str]] = []


def record(name: str, passed: bool, detail: str = "") -> bool:
    ACCEPTANCE.append((name, bool(passed), detail))
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE:
        tr.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")


@pytest.fixture(scope="session")
def table():
    return bundled_table()


@pytest.fixture(scope="session")
def deva_table():
    return bundled_table(Script.DEVANAGARI)


@pytest.fixture(scope="session")
def deva_corpus(table):
    """500 Devanagari pairs at 10% injection, the hybrid acceptance corpus."""
    return generate_corpus(table, Script.DEVANAGARI, 500, seed=0, ambiguity_rate=0.1)


@pytest.fixture(scope="session")
def deva_trained(table, deva_corpus):
    """(model, vocab, trace, seconds) trained with default hyperparameters."""
    import time

    t0 = time.perf_counter()
    vocab = build_vocab(deva_corpus.training, table)
    model, trace = train(encode_examples(deva_corpus.training, vocab), vocab, TrainConfig())
    return model, vocab, trace, time.perf_counter() - t0


def quiet_corpus(*args, **kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NoAmbiguityWarning)
        return generate_corpus(*args, **kwargs)
