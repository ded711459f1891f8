from __future__ import annotations

import pytest

from threadloom.embedding import HashingEmbedder
from threadloom.labeling import KeywordLabelGenerator


@pytest.fixture
def embedder() -> HashingEmbedder:
    return HashingEmbedder()


@pytest.fixture
def generator() -> KeywordLabelGenerator:
    return KeywordLabelGenerator()
