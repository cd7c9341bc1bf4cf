import logging

import pytest
from transformers.utils import logging as hf_logging

from seq2seq_trainer import TrainConfig, train

# one question pattern per target query; the tiny model can master the
# mapping from scratch in a few hundred steps
PATTERNS = (
    ("director of ENT", "directed_by(ENT, X)"),
    ("writer of ENT", "written_by(ENT, X)"),
    ("stars of ENT", "starred_actors(ENT, X)"),
    ("films with actor ENT", "starred_actors_reverse(ENT, X)"),
    ("films codirected with ENT", "directed_by(ENT, X), directed_by_reverse(X, Y)"),
    (
        "genres via writer of ENT",
        "written_by(ENT, X), written_by_reverse(X, Y), has_genre(Y, Z)",
    ),
)


def write_pairs(path, pairs):
    path.write_text(
        "".join(f"{source}\t{target}\n" for source, target in pairs),
        encoding="utf-8",
    )


@pytest.fixture(autouse=True)
def _quiet_transformers():
    hf_logging.disable_progress_bar()
    logging.getLogger("seq2seq_trainer").setLevel(logging.WARNING)


@pytest.fixture(scope="session")
def toy_files(tmp_path_factory):
    """train/dev pair files plus the aligned annotated/meta pair for predict."""
    root = tmp_path_factory.mktemp("toy_task")
    write_pairs(root / "train.tsv", list(PATTERNS) * 25)
    write_pairs(root / "dev.tsv", PATTERNS)
    write_pairs(root / "annotated.tsv", PATTERNS)
    hops = (1, 1, 1, 1, 2, 3)
    (root / "meta.tsv").write_text(
        "".join(
            f"{hop}hop-{i:06d}\t{hop}\tEntity {i}\ta|b\n"
            for i, hop in enumerate(hops, start=1)
        ),
        encoding="utf-8",
    )
    return root


@pytest.fixture(scope="session")
def trained_run(toy_files, tmp_path_factory):
    """One tiny-model training run shared by the learning and predict tests."""
    hf_logging.disable_progress_bar()
    out = tmp_path_factory.mktemp("trained_run")
    manifest = train(
        TrainConfig(
            train_tsv=str(toy_files / "train.tsv"),
            dev_tsv=str(toy_files / "dev.tsv"),
            out_dir=str(out),
            model="tiny",
            steps=400,
            eval_every=50,
            learning_rate=5e-4,
            batch_size=8,
            seed=0,
        )
    )
    return out, manifest
