#!/usr/bin/env python3
"""Build the tiny seeded masked-LM fixture used by the gateway tests.

Creates tests/fixtures/tiny_model/ (config.json, vocab.txt, weights.bin) and
tests/fixtures/tiny_expected.json with reference predictions computed by the
original PyTorch implementation, so the C++ engine can be verified end to end.

Usage: make_fixture_model.py [repo_root]
"""

import json
import math
import sys
from pathlib import Path

import torch
from transformers import BertConfig, BertForMaskedLM

import export_weights

SPECIALS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]

WORDS = [
    "the", "The", "a", "an", "of", "to", "and", "in", "for", "on", "shall",
    "must", "will", "not", "be", "is", "are", "system", "service", "network",
    "security", "stability", "performance", "availability", "reliability",
    "data", "user", "access", "server", "client", "interface", "message",
    "request", "response", "error", "failure", "recovery", "backup", "update",
    "upgrade", "traffic", "protocol", "encryption", "authentication",
    "validation", "monitoring", "logging", "notification", "report", "record",
    "status", "session", "password", "account", "database", "file", "page",
    "screen", "value", "limit", "threshold", "level", "mode", "state", "time",
    "day", "part", "case", "point", "number", "group", "provide", "support",
    "ensure", "require", "allow", "enable", "display", "store", "send",
    "receive", "process", "manage", "create", "remove", "compromise",
    "maintain", "monitor", "verify", "validate", "check", "handle", "operate",
]

PIECES = ["##s", "##ing", "##ed", "##ion", "##er", "##ly", "##ment"]
PUNCT = [".", ",", "!", "?", ":", ";"]
LETTERS = [c for c in "abcdefghijklmnopqrstuvwxyz"]
CONT_LETTERS = ["##" + c for c in "abcdefghijklmnopqrstuvwxyz0123456789"]
DIGITS = list("0123456789")

QUERIES = [
    {"tokens": ["The", "system", "shall", "report", "errors", "."], "mask_index": 3, "k": 15},
    {"tokens": ["The", "update", "shall", "not", "compromise", "the", "stability",
                "of", "the", "service", "."], "mask_index": 6, "k": 10},
    {"tokens": ["Users", "send", "requests", "to", "the", "server", "."],
     "mask_index": 5, "k": 15},
    {"tokens": ["network", "security"], "mask_index": 0, "k": 5},
    {"tokens": ["monitoring"], "mask_index": 0, "k": 3},
]


def is_whole_word(entry: str) -> bool:
    if entry.startswith("##"):
        return False
    if entry.startswith("[") and entry.endswith("]"):
        return False
    return any(c.isalpha() for c in entry)


def wordpiece(vocab: dict, word: str):
    pieces, start = [], 0
    while start < len(word):
        end = len(word)
        cur = None
        while end > start:
            sub = word[start:end]
            if start > 0:
                sub = "##" + sub
            if sub in vocab:
                cur = sub
                break
            end -= 1
        if cur is None:
            return ["[UNK]"]
        pieces.append(cur)
        start = end
    return pieces or ["[UNK]"]


def main() -> None:
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent
    out_dir = root / "tests" / "fixtures" / "tiny_model"
    out_dir.mkdir(parents=True, exist_ok=True)

    tokens = list(dict.fromkeys(
        SPECIALS + WORDS + PIECES + PUNCT + LETTERS + CONT_LETTERS + DIGITS))
    vocab = {t: i for i, t in enumerate(tokens)}

    torch.manual_seed(20260819)
    config = BertConfig(
        vocab_size=len(tokens),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=64,
        type_vocab_size=2,
        hidden_act="gelu",
        layer_norm_eps=1e-12,
    )
    model = BertForMaskedLM(config).eval()

    (out_dir / "vocab.txt").write_text("\n".join(tokens) + "\n")
    export_weights.write_config(config, out_dir, do_lower_case=False)
    export_weights.write_weights(model.state_dict(), out_dir / "weights.bin")

    expected = []
    with torch.no_grad():
        for q in QUERIES:
            ids = [vocab["[CLS]"]]
            mask_pos = None
            for i, tok in enumerate(q["tokens"]):
                if i == q["mask_index"]:
                    mask_pos = len(ids)
                    ids.append(vocab["[MASK]"])
                    continue
                for piece in wordpiece(vocab, tok):
                    ids.append(vocab.get(piece, vocab["[UNK]"]))
            ids.append(vocab["[SEP]"])
            logits = model(input_ids=torch.tensor([ids])).logits[0, mask_pos]
            probs = torch.softmax(logits.double(), dim=-1)
            order = torch.argsort(probs, descending=True, stable=True)
            preds = []
            for idx in order.tolist():
                if not is_whole_word(tokens[idx]):
                    continue
                preds.append({"term": tokens[idx], "confidence": probs[idx].item()})
                if len(preds) == q["k"]:
                    break
            expected.append({**q, "expected": preds})

    fixture = {"note": "reference outputs from the original implementation",
               "queries": expected}
    (root / "tests" / "fixtures" / "tiny_expected.json").write_text(
        json.dumps(fixture, indent=1) + "\n")
    size = (out_dir / "weights.bin").stat().st_size
    print(f"fixture written: vocab={len(tokens)} weights={size} bytes")


if __name__ == "__main__":
    main()
