"""Masked language model scorer for the JSON-lines masking protocol.

Serves probability-of-word-in-context queries: each request names a
paragraph, a character offset, and a target word; the reply is the
model's softmax probability for that word at the masked position. The
process speaks the protocol over stdin/stdout or over a task-file /
result-file pair, so it can sit behind a pipeline on the same machine
or run standalone on separate hardware.
"""

from .scoring import MaskedWordScorer, ModelLoadError

__version__ = "0.1.0"

__all__ = ["MaskedWordScorer", "ModelLoadError", "__version__"]
