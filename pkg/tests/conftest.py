"""Shared fixtures: fixture-project corpora and a small trained bundle."""

from __future__ import annotations

from pathlib import Path

import pytest

from flowrec.corpus import TrainConfig, train_corpus

DATA = Path(__file__).parent / "data"
GOLDEN = DATA / "golden"
PROJECTS = DATA / "projects"


def read_project(name: str) -> list[tuple[str, str]]:
    root = PROJECTS / name
    return [
        (str(p.relative_to(PROJECTS)), p.read_text())
        for p in sorted(root.glob("*.py"))
    ]


def cursor_at_end(src: str) -> tuple[int, int]:
    """(line, col) of the trailing dot in a snippet ending with '.'."""

    lines = src.splitlines()
    line = len(lines)
    col = lines[-1].rindex(".")
    return line, col


@pytest.fixture(scope="session")
def alpha_files() -> list[tuple[str, str]]:
    return read_project("alpha")


@pytest.fixture(scope="session")
def small_bundle(alpha_files):
    """One compact bundle shared by tests that need a trained model."""

    config = TrainConfig(n_trees=20, max_depth=8, seed=7)
    return train_corpus(alpha_files, config)
