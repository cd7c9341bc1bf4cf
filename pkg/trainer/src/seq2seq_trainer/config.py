"""Training configuration with the fine-tuning protocol's defaults."""

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for fine-tuning a question-to-query translator.

    ``model`` is a pretrained checkpoint name or local path, or the string
    ``"tiny"`` for a small randomly initialized encoder-decoder with a
    word-level vocabulary built from the training file. The tiny mode needs
    no downloaded weights and is meant for tests and offline demos; the
    defaults below otherwise match the reference fine-tuning protocol.
    """

    train_tsv: str
    dev_tsv: str
    out_dir: str
    model: str = "t5-small"
    steps: int = 5000
    learning_rate: float = 5e-5
    batch_size: int = 8
    eval_every: int = 250
    seed: int = 0
    max_input_length: int = 64
    max_output_length: int = 64

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.eval_every < 1:
            raise ValueError(f"eval_every must be >= 1, got {self.eval_every}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.max_input_length < 1 or self.max_output_length < 1:
            raise ValueError("sequence length limits must be >= 1")

    def to_json_obj(self) -> dict:
        return asdict(self)
