"""Fine-tuning loop: AdamW, linear learning-rate decay, best-dev selection."""

import json
import logging
import random
import time
from pathlib import Path

import torch
import transformers

from .config import TrainConfig
from .data import read_pairs
from .metrics import exact_match_rate
from .modeling import create, load_checkpoint, save_checkpoint
from .predicting import greedy_decode

log = logging.getLogger(__name__)

TRAIN_EM_CAP = 512  # pairs scored for the post-training sanity check


def _batch_stream(pairs, batch_size: int, rng: random.Random):
    """Endless stream of epoch-shuffled batches (tail batches included)."""
    order = list(range(len(pairs)))
    while True:
        rng.shuffle(order)
        for start in range(0, len(order), batch_size):
            yield [pairs[i] for i in order[start : start + batch_size]]


def _exact_match_over(model, codec, pairs, cfg: TrainConfig) -> float:
    model.eval()
    predicted = greedy_decode(
        model, codec, [source for source, _ in pairs],
        max_input_length=cfg.max_input_length,
        max_output_length=cfg.max_output_length,
    )
    return exact_match_rate(predicted, [target for _, target in pairs])


def train(cfg: TrainConfig) -> dict:
    """Run the fine-tuning protocol; returns the manifest (also written to
    ``out_dir/manifest.json``, next to the selected ``checkpoint/``).

    Dev exact match is evaluated every ``eval_every`` steps and at the last
    step; the best-scoring checkpoint is kept (first such step wins ties).
    An empty dev file downgrades selection to the final checkpoint with a
    warning. An empty training file is an error.
    """
    started = time.time()
    pairs = read_pairs(cfg.train_tsv)
    if not pairs:
        raise ValueError(f"training file is empty: {cfg.train_tsv}")
    dev_pairs = read_pairs(cfg.dev_tsv)
    if not dev_pairs:
        log.warning(
            "dev file %s is empty; selection falls back to the final checkpoint",
            cfg.dev_tsv,
        )

    rng = random.Random(cfg.seed)
    torch.manual_seed(cfg.seed)
    model, codec = create(
        cfg.model, [s for s, _ in pairs], [t for _, t in pairs]
    )
    model.train()
    optimizer = torch.optim.AdamW(model.parameters(), lr=cfg.learning_rate)
    scheduler = torch.optim.lr_scheduler.LambdaLR(
        optimizer, lambda step: max(0.0, (cfg.steps - step) / cfg.steps)
    )

    out_dir = Path(cfg.out_dir)
    checkpoint_dir = out_dir / "checkpoint"
    stream = _batch_stream(pairs, cfg.batch_size, rng)
    best_score, best_step = -1.0, None
    history = []
    last_loss = None

    for step in range(1, cfg.steps + 1):
        batch = next(stream)
        input_ids, attention_mask = codec.encode_batch(
            [s for s, _ in batch], cfg.max_input_length
        )
        labels = codec.labels_batch([t for _, t in batch], cfg.max_output_length)
        loss = model(
            input_ids=input_ids, attention_mask=attention_mask, labels=labels
        ).loss
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        scheduler.step()
        last_loss = float(loss.detach())

        if dev_pairs and (step % cfg.eval_every == 0 or step == cfg.steps):
            score = _exact_match_over(model, codec, dev_pairs, cfg)
            history.append({"step": step, "dev_exact_match": score})
            log.info("step %d: loss %.4f, dev exact match %.4f", step, last_loss, score)
            if score > best_score:
                best_score, best_step = score, step
                save_checkpoint(checkpoint_dir, model, codec)
            model.train()

    if dev_pairs:
        selection = "best-dev"
    else:
        selection = "final"
        best_score, best_step = None, cfg.steps
        save_checkpoint(checkpoint_dir, model, codec)

    # sanity direction check on the selected checkpoint (logged, not enforced)
    model, codec = load_checkpoint(checkpoint_dir)
    train_score = _exact_match_over(model, codec, pairs[:TRAIN_EM_CAP], cfg)
    if best_score is not None and train_score < best_score:
        log.warning(
            "train exact match %.4f below dev %.4f", train_score, best_score
        )

    manifest = {
        "config": cfg.to_json_obj(),
        "model_kind": codec.kind,
        "selection": selection,
        "best_step": best_step,
        "best_dev_exact_match": best_score,
        "train_exact_match": train_score,
        "train_not_worse_than_dev": (
            None if best_score is None else train_score >= best_score
        ),
        "final_train_loss": last_loss,
        "dev_history": history,
        "train_examples": len(pairs),
        "dev_examples": len(dev_pairs),
        "versions": {
            "torch": torch.__version__,
            "transformers": transformers.__version__,
        },
        "determinism": (
            "single-process run; python and torch RNGs seeded from config.seed; "
            "repeat runs on one machine and library build are bit-identical "
            "(timing aside)"
        ),
        "timing": {"wall_seconds": round(time.time() - started, 3)},
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest
