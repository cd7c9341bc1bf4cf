"""TSV file contracts shared with the annotation/evaluation package.

Three formats cross the package boundary, all UTF-8 TSV:

- training pairs: ``masked question<TAB>gold query`` (annotated/sample files)
- example metadata: ``id<TAB>hop<TAB>entity<TAB>answer1|answer2|...``
- predictions: ``id<TAB>predicted query text``, one line per input example
"""

from pathlib import Path


class TsvFormatError(ValueError):
    """A TSV line does not match its contract; carries the 1-based line number."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _read_lines(path) -> list[str]:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    return lines


def read_pairs(path) -> list[tuple[str, str]]:
    """Read (source, target) training pairs; exactly two columns per line."""
    pairs = []
    for line_no, line in enumerate(_read_lines(path), start=1):
        cols = line.split("\t")
        if len(cols) != 2:
            raise TsvFormatError(
                f"expected 'source<TAB>target', got {len(cols)} columns", line_no
            )
        pairs.append((cols[0], cols[1]))
    return pairs


def read_prediction_inputs(annotated_tsv, meta_tsv) -> tuple[list[str], list[str]]:
    """Read aligned (ids, masked questions) for prediction.

    Questions come from the annotated file, ids from the metadata sidecar;
    the two are line-aligned by construction and checked here.
    """
    pairs = read_pairs(annotated_tsv)
    ids = []
    seen = set()
    for line_no, line in enumerate(_read_lines(meta_tsv), start=1):
        cols = line.split("\t")
        if len(cols) != 4:
            raise TsvFormatError(
                f"expected 'id<TAB>hop<TAB>entity<TAB>answers', got {len(cols)} columns",
                line_no,
            )
        if cols[0] in seen:
            raise TsvFormatError(f"duplicate example id {cols[0]!r}", line_no)
        seen.add(cols[0])
        ids.append(cols[0])
    if len(ids) != len(pairs):
        raise TsvFormatError(
            f"metadata has {len(ids)} rows but annotated file has {len(pairs)}",
            min(len(ids), len(pairs)) + 1,
        )
    return ids, [source for source, _ in pairs]


def write_predictions(path, ids, texts) -> int:
    """Write the predictions contract: one ``id<TAB>text`` line per example.

    Tabs and newlines inside a generated text would break the format, so
    they are replaced by single spaces.
    """
    if len(ids) != len(texts):
        raise ValueError(f"{len(ids)} ids but {len(texts)} texts")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for example_id, text in zip(ids, texts):
            clean = " ".join(str(text).split())
            handle.write(f"{example_id}\t{clean}\n")
    return len(ids)
