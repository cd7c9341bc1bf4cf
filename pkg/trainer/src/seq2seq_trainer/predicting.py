"""Greedy decoding from a trained checkpoint into the predictions contract."""

import logging

import torch

from .data import read_prediction_inputs, write_predictions
from .modeling import load_checkpoint

log = logging.getLogger(__name__)


def greedy_decode(
    model, codec, texts, *, max_input_length: int, max_output_length: int,
    batch_size: int = 32,
) -> list[str]:
    decoded = []
    for start in range(0, len(texts), batch_size):
        chunk = list(texts[start : start + batch_size])
        input_ids, attention_mask = codec.encode_batch(chunk, max_input_length)
        with torch.no_grad():
            generated = model.generate(
                input_ids=input_ids,
                attention_mask=attention_mask,
                max_new_tokens=max_output_length,
                do_sample=False,
                num_beams=1,
            )
        decoded.extend(codec.decode_batch(generated))
    return decoded


def predict(
    checkpoint_dir, annotated_tsv, meta_tsv, out_path, *,
    batch_size: int = 32, max_input_length: int = 64, max_output_length: int = 64,
) -> int:
    """Decode one query text per input example and write the predictions TSV.

    Ids map bijectively onto the input and keep its order. A batch whose
    decoding raises gets empty texts (scored as absent/parse failures
    downstream) instead of aborting the run.
    """
    model, codec = load_checkpoint(checkpoint_dir)
    ids, questions = read_prediction_inputs(annotated_tsv, meta_tsv)
    texts = []
    for start in range(0, len(questions), batch_size):
        chunk = questions[start : start + batch_size]
        try:
            texts.extend(
                greedy_decode(
                    model, codec, chunk,
                    max_input_length=max_input_length,
                    max_output_length=max_output_length,
                    batch_size=batch_size,
                )
            )
        except Exception:
            log.warning(
                "decoding failed for examples %d..%d; emitting empty predictions",
                start, start + len(chunk) - 1, exc_info=True,
            )
            texts.extend([""] * len(chunk))
    return write_predictions(out_path, ids, texts)
