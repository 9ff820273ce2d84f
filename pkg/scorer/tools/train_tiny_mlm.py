#!/usr/bin/env python3
"""Build the tiny masked LM bundled as a test fixture.

Trains a 2-layer BERT-style masked LM from scratch on the fixture
corpus, with the recurring capital-of fact sentences oversampled so the
model acquires clear directional fills ("the capital of france is
[MASK]" puts decisive mass on "paris"). The result lands in
fixtures/tiny_mlm as a standard save_pretrained directory, loadable
offline by mlm-scorer, so the test suite never needs network access.

The word-level vocabulary covers the whole fixture corpus plus a few
off-corpus filler words; single letters and ##-continuations are
included as fallback pieces so out-of-vocabulary words tokenize to
multiple pieces (and are refused as targets) instead of collapsing to
[UNK].

Deterministic for a fixed seed. Rerun:

    python3 scorer/tools/train_tiny_mlm.py --out fixtures/tiny_mlm
"""

from __future__ import annotations

import argparse
import random
import re
import string
import time
from pathlib import Path

import torch
from tokenizers import Tokenizer, models, normalizers, pre_tokenizers
from transformers import (
    AutoTokenizer,
    BertConfig,
    BertForMaskedLM,
    PreTrainedTokenizerFast,
)

REPO_ROOT = Path(__file__).resolve().parents[2]

SPECIALS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
PUNCT = [".", ",", "?", "!", "'", "-"]

# Scoreable despite never occurring in the corpus: lets tests compare a
# plausible fill against a wildly implausible one in the same slot.
EXTRA_FILLERS = ["banana"]

FACTS = [
    "the capital of france is paris .",
    "the capital of italy is rome .",
    "the capital of england is london .",
    "the capital of spain is madrid .",
    "the capital of germany is berlin .",
]


def read_paragraphs(corpus_dir: Path) -> list[str]:
    paragraphs = []
    for path in sorted(corpus_dir.glob("*.txt")):
        for block in path.read_text(encoding="utf-8").split("\n\n"):
            block = block.strip()
            if block:
                paragraphs.append(block)
    return paragraphs


def build_tokenizer(paragraphs: list[str]) -> PreTrainedTokenizerFast:
    words = sorted(
        {w for p in paragraphs for w in re.findall(r"[a-z]+", p.lower())}
        | set(EXTRA_FILLERS)
    )
    pieces = list(string.ascii_lowercase) + [
        "##" + c for c in string.ascii_lowercase + string.digits
    ]
    entries = SPECIALS + PUNCT + words + [p for p in pieces if p not in words]
    vocab = {token: i for i, token in enumerate(entries)}
    core = Tokenizer(
        models.WordPiece(vocab, unk_token="[UNK]", max_input_chars_per_word=100)
    )
    core.normalizer = normalizers.BertNormalizer(lowercase=True)
    core.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    return PreTrainedTokenizerFast(
        tokenizer_object=core,
        unk_token="[UNK]",
        pad_token="[PAD]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
    )


def encode(text: str, tokenizer, max_len: int = 96) -> list[int]:
    sentences = re.split(r"(?<=[.?!])\s+", text.strip())
    ids = [tokenizer.cls_token_id]
    for sentence in sentences:
        if not sentence.strip():
            continue
        ids.extend(tokenizer(sentence, add_special_tokens=False)["input_ids"])
        ids.append(tokenizer.sep_token_id)
    return ids[:max_len]


def train(args: argparse.Namespace) -> None:
    t0 = time.time()
    paragraphs = read_paragraphs(args.corpus)
    if not paragraphs:
        raise SystemExit(f"no paragraphs under {args.corpus}")
    tokenizer = build_tokenizer(paragraphs)
    print(f"{len(paragraphs)} paragraphs, vocabulary {tokenizer.vocab_size}")

    torch.manual_seed(args.seed)
    random.seed(args.seed)
    torch.set_num_threads(2)

    config = BertConfig(
        vocab_size=tokenizer.vocab_size,
        hidden_size=64,
        num_hidden_layers=2,
        num_attention_heads=4,
        intermediate_size=128,
        max_position_embeddings=args.positions,
        pad_token_id=tokenizer.pad_token_id,
    )
    model = BertForMaskedLM(config)
    print(f"{sum(p.numel() for p in model.parameters())} parameters")

    texts = paragraphs + FACTS * args.fact_boost
    encoded = [encode(t, tokenizer) for t in texts]
    special_ids = {
        tokenizer.cls_token_id,
        tokenizer.sep_token_id,
        tokenizer.pad_token_id,
    }
    mask_id = tokenizer.mask_token_id
    pad_id = tokenizer.pad_token_id

    optimizer = torch.optim.AdamW(model.parameters(), lr=args.lr)
    model.train()
    for step in range(args.steps):
        batch = random.sample(encoded, min(args.batch, len(encoded)))
        width = max(len(seq) for seq in batch)
        inputs = torch.full((len(batch), width), pad_id, dtype=torch.long)
        labels = torch.full((len(batch), width), -100, dtype=torch.long)
        attention = torch.zeros((len(batch), width), dtype=torch.long)
        for i, seq in enumerate(batch):
            for j, token in enumerate(seq):
                attention[i, j] = 1
                inputs[i, j] = token
                if token not in special_ids and random.random() < 0.2:
                    labels[i, j] = token
                    inputs[i, j] = mask_id
        out = model(input_ids=inputs, attention_mask=attention, labels=labels)
        out.loss.backward()
        optimizer.step()
        optimizer.zero_grad()
        if step % 100 == 0 or step == args.steps - 1:
            print(f"step {step:4d} loss {out.loss.item():.3f} ({time.time() - t0:.0f}s)")

    args.out.mkdir(parents=True, exist_ok=True)
    model.eval()
    model.save_pretrained(args.out)
    tokenizer.save_pretrained(args.out)
    print(f"saved to {args.out}")
    sanity_probe(args.out)


def sanity_probe(model_dir: Path) -> None:
    """Report fill probabilities for the trained fact slots."""
    tokenizer = AutoTokenizer.from_pretrained(model_dir)
    model = BertForMaskedLM.from_pretrained(model_dir).eval()
    checks = [
        ("france", "paris"),
        ("italy", "rome"),
        ("england", "london"),
        ("spain", "madrid"),
        ("germany", "berlin"),
    ]
    for country, city in checks:
        text = f"the capital of {country} is [MASK] ."
        ids = (
            [tokenizer.cls_token_id]
            + tokenizer(text, add_special_tokens=False)["input_ids"]
            + [tokenizer.sep_token_id]
        )
        position = ids.index(tokenizer.mask_token_id)
        with torch.no_grad():
            logits = model(input_ids=torch.tensor([ids])).logits[0, position]
        probs = torch.softmax(logits.double(), dim=-1)
        city_id = tokenizer.convert_tokens_to_ids(city)
        print(f"  P({city} | capital of {country}) = {probs[city_id]:.4f}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--corpus", type=Path, default=REPO_ROOT / "fixtures" / "corpus_small"
    )
    parser.add_argument(
        "--out", type=Path, default=REPO_ROOT / "fixtures" / "tiny_mlm"
    )
    parser.add_argument("--seed", type=int, default=13)
    parser.add_argument("--steps", type=int, default=900)
    parser.add_argument("--batch", type=int, default=48)
    parser.add_argument("--lr", type=float, default=5e-3)
    parser.add_argument("--positions", type=int, default=192)
    parser.add_argument(
        "--fact-boost",
        type=int,
        default=40,
        help="how many times the fact sentences are repeated in the training mix",
    )
    train(parser.parse_args())


if __name__ == "__main__":
    main()
