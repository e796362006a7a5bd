from __future__ import annotations

import pathlib

import pytest

from iasdo import parse_model

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


@pytest.fixture(scope="session")
def corpus_dir() -> pathlib.Path:
    return CORPUS


@pytest.fixture(scope="session")
def corpus_text() -> str:
    return (CORPUS / "library.iasdo").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def corpus_model(corpus_text):
    return parse_model(corpus_text, filename="library.iasdo")


@pytest.fixture(scope="session")
def loan_script_text() -> str:
    return (CORPUS / "loan-cycle.script").read_text(encoding="utf-8")
