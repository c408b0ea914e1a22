from pathlib import Path

from causalog import load_structure, parse_theory

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def load(theory, structure=None):
    t = parse_theory((CORPUS / theory).read_text())
    if structure is None:
        return t
    return t, load_structure((CORPUS / structure).read_text(), t.vocabulary, t.endogenous)
