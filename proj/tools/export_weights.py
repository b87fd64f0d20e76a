#!/usr/bin/env python3
"""Convert a Hugging Face BERT masked-LM checkpoint to the local backend format.

Produces a directory containing:
  config.json   - the subset of the model config the C++ engine needs
  vocab.txt     - one WordPiece per line (id = line number)
  weights.bin   - binary tensor pack, magic "RTWB" (see load_weights in C++)

The MLM decoder weight is tied to the word embeddings and therefore omitted.

Usage: export_weights.py <hf_model_dir_or_name> <out_dir>
"""

import json
import struct
import sys
from pathlib import Path


def keep_tensor(name: str) -> bool:
    if name.startswith(("bert.embeddings.", "bert.encoder.layer.")):
        return "position_ids" not in name
    if name.startswith("cls.predictions."):
        return "decoder" not in name  # tied to word embeddings
    return False


def write_weights(state_dict, path: Path) -> None:
    names = [n for n in sorted(state_dict) if keep_tensor(n)]
    with open(path, "wb") as f:
        f.write(b"RTWB")
        f.write(struct.pack("<II", 1, len(names)))
        for name in names:
            data = state_dict[name].detach().float().contiguous().cpu().numpy()
            nb = name.encode("utf-8")
            f.write(struct.pack("<I", len(nb)))
            f.write(nb)
            f.write(struct.pack("<I", data.ndim))
            for d in data.shape:
                f.write(struct.pack("<Q", d))
            f.write(data.tobytes())


def write_config(config, out_dir: Path, do_lower_case: bool) -> None:
    cfg = {
        "hidden_size": config.hidden_size,
        "num_hidden_layers": config.num_hidden_layers,
        "num_attention_heads": config.num_attention_heads,
        "intermediate_size": config.intermediate_size,
        "max_position_embeddings": config.max_position_embeddings,
        "vocab_size": config.vocab_size,
        "type_vocab_size": config.type_vocab_size,
        "layer_norm_eps": config.layer_norm_eps,
        "do_lower_case": do_lower_case,
    }
    (out_dir / "config.json").write_text(json.dumps(cfg, indent=2) + "\n")


def write_vocab(tokenizer, out_dir: Path) -> None:
    vocab = sorted(tokenizer.get_vocab().items(), key=lambda kv: kv[1])
    with open(out_dir / "vocab.txt", "w", encoding="utf-8") as f:
        for token, _ in vocab:
            f.write(token + "\n")


def export(model, tokenizer, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    do_lower = bool(getattr(tokenizer, "do_lower_case", False))
    write_config(model.config, out_dir, do_lower)
    write_vocab(tokenizer, out_dir)
    write_weights(model.state_dict(), out_dir / "weights.bin")


def main() -> None:
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    from transformers import BertForMaskedLM, BertTokenizer

    model = BertForMaskedLM.from_pretrained(sys.argv[1])
    tokenizer = BertTokenizer.from_pretrained(sys.argv[1])
    export(model, tokenizer, Path(sys.argv[2]))
    print(f"exported to {sys.argv[2]}")


if __name__ == "__main__":
    main()
