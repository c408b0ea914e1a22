from pathlib import Path

import pytest

from causalog import load_structure, parse_theory

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

# criterion number -> (title, passed); filled by test_acceptance
ACCEPTANCE = {}


def corpus_path(name):
    return str(CORPUS / name)


def load(theory, structure=None, model=False):
    t = parse_theory((CORPUS / theory).read_text())
    if structure is None:
        return t
    s = load_structure((CORPUS / structure).read_text(), t.vocabulary, t.endogenous, model=model)
    return t, s


@pytest.fixture
def corpus():
    return load


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}")
