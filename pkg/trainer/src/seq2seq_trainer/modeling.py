"""Model and text-codec construction for both run modes.

``tiny`` mode builds a small randomly initialized encoder-decoder with a
word-level vocabulary extracted from the training pairs; it trains from
scratch in seconds on CPU and needs no downloaded weights. Any other model
string is treated as a pretrained checkpoint name or local path and loaded
through the transformers auto classes with its own subword tokenizer.
"""

import json
import re
from pathlib import Path

import torch
from transformers import (
    AutoModelForSeq2SeqLM,
    AutoTokenizer,
    T5Config,
    T5ForConditionalGeneration,
)

PAD_ID, EOS_ID, UNK_ID = 0, 1, 2
_SPECIALS = ("<pad>", "</s>", "<unk>")
_TOKEN_RE = re.compile(r"\w+|[^\w\s]")
_CODEC_FILE = "codec.json"
_VOCAB_FILE = "vocab.json"


def _detokenize(tokens: list[str]) -> str:
    """Invert word-level tokenization into the canonical query spacing:
    no space around parentheses, none before commas, one after."""
    text = " ".join(tokens)
    text = re.sub(r"\s+([,)])", r"\1", text)
    text = re.sub(r"\s+\(", "(", text)
    text = re.sub(r"\(\s+", "(", text)
    return text


def _pad_batch(rows: list[list[int]], pad_value: int) -> torch.Tensor:
    width = max(len(r) for r in rows)
    return torch.tensor([r + [pad_value] * (width - len(r)) for r in rows])


class TinyCodec:
    """Word-level encode/decode over a vocabulary built from training text."""

    kind = "tiny"

    def __init__(self, vocab: dict):
        self.vocab = vocab
        self.inverse = {i: t for t, i in vocab.items()}

    @classmethod
    def build(cls, texts) -> "TinyCodec":
        tokens = set()
        for text in texts:
            tokens.update(_TOKEN_RE.findall(text))
        vocab = {t: i for i, t in enumerate(_SPECIALS)}
        for token in sorted(tokens):
            vocab[token] = len(vocab)
        return cls(vocab)

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def _encode_one(self, text: str, max_length: int) -> list[int]:
        ids = [self.vocab.get(t, UNK_ID) for t in _TOKEN_RE.findall(text)]
        return ids[: max_length - 1] + [EOS_ID]

    def encode_batch(self, texts, max_length: int):
        rows = [self._encode_one(t, max_length) for t in texts]
        input_ids = _pad_batch(rows, PAD_ID)
        attention_mask = (input_ids != PAD_ID).long()
        return input_ids, attention_mask

    def labels_batch(self, texts, max_length: int) -> torch.Tensor:
        rows = [self._encode_one(t, max_length) for t in texts]
        return _pad_batch(rows, -100)

    def decode_batch(self, ids) -> list[str]:
        texts = []
        for row in ids.tolist():
            tokens = []
            for token_id in row:
                if token_id == EOS_ID:
                    break
                if token_id in (PAD_ID, -100):
                    continue
                tokens.append(self.inverse.get(token_id, "<unk>"))
            texts.append(_detokenize(tokens))
        return texts

    def save(self, directory) -> None:
        path = Path(directory) / _VOCAB_FILE
        path.write_text(
            json.dumps(self.vocab, ensure_ascii=False, indent=0), encoding="utf-8"
        )

    @classmethod
    def load(cls, directory) -> "TinyCodec":
        vocab = json.loads(
            (Path(directory) / _VOCAB_FILE).read_text(encoding="utf-8")
        )
        return cls(vocab)


class HfCodec:
    """Pretrained subword tokenizer behind the same batch interface."""

    kind = "hf"

    def __init__(self, tokenizer):
        self.tokenizer = tokenizer

    def encode_batch(self, texts, max_length: int):
        enc = self.tokenizer(
            list(texts),
            padding=True,
            truncation=True,
            max_length=max_length,
            return_tensors="pt",
        )
        return enc["input_ids"], enc["attention_mask"]

    def labels_batch(self, texts, max_length: int) -> torch.Tensor:
        ids, _ = self.encode_batch(texts, max_length)
        labels = ids.clone()
        labels[ids == self.tokenizer.pad_token_id] = -100
        return labels

    def decode_batch(self, ids) -> list[str]:
        return self.tokenizer.batch_decode(ids, skip_special_tokens=True)

    def save(self, directory) -> None:
        self.tokenizer.save_pretrained(directory)

    @classmethod
    def load(cls, directory) -> "HfCodec":
        return cls(AutoTokenizer.from_pretrained(directory))


def build_tiny_model(vocab_size: int) -> T5ForConditionalGeneration:
    config = T5Config(
        vocab_size=vocab_size,
        d_model=128,
        d_ff=256,
        d_kv=32,
        num_layers=2,
        num_heads=4,
        dropout_rate=0.1,
        pad_token_id=PAD_ID,
        eos_token_id=EOS_ID,
        decoder_start_token_id=PAD_ID,
    )
    return T5ForConditionalGeneration(config)


def create(model_spec: str, train_sources, train_targets):
    """Build (model, codec) for training. Tiny mode derives its vocabulary
    from both sides of the training pairs; anything else loads pretrained."""
    if model_spec == "tiny":
        codec = TinyCodec.build(list(train_sources) + list(train_targets))
        return build_tiny_model(codec.vocab_size), codec
    tokenizer = AutoTokenizer.from_pretrained(model_spec)
    model = AutoModelForSeq2SeqLM.from_pretrained(model_spec)
    return model, HfCodec(tokenizer)


def save_checkpoint(directory, model, codec) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(directory)
    codec.save(directory)
    (directory / _CODEC_FILE).write_text(
        json.dumps({"kind": codec.kind}), encoding="utf-8"
    )


def load_checkpoint(directory):
    directory = Path(directory)
    marker = json.loads((directory / _CODEC_FILE).read_text(encoding="utf-8"))
    if marker["kind"] == "tiny":
        codec = TinyCodec.load(directory)
        model = T5ForConditionalGeneration.from_pretrained(directory)
    else:
        codec = HfCodec.load(directory)
        model = AutoModelForSeq2SeqLM.from_pretrained(directory)
    model.eval()
    return model, codec
