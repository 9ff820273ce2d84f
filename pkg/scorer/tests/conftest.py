import pytest

from scorer_helpers import MODEL_DIR


@pytest.fixture(scope="session")
def tokenizer():
    from transformers import AutoTokenizer

    return AutoTokenizer.from_pretrained(MODEL_DIR)


@pytest.fixture(scope="session")
def scorer():
    from mlm_scorer import MaskedWordScorer

    return MaskedWordScorer(str(MODEL_DIR))
