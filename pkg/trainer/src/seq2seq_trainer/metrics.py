"""Exact-match scoring on whitespace-normalized text.

Gold query files are written in one canonical spacing, so string equality
after collapsing whitespace runs is the selection metric during training.
Structural equivalence (variable renaming etc.) is the downstream
evaluator's concern, not this package's.
"""


def normalize(text: str) -> str:
    return " ".join(text.split())


def exact_match(predicted: str, gold: str) -> bool:
    return normalize(predicted) == normalize(gold)


def exact_match_rate(predicted, gold) -> float:
    predicted = list(predicted)
    gold = list(gold)
    if len(predicted) != len(gold):
        raise ValueError(f"{len(predicted)} predictions but {len(gold)} references")
    if not gold:
        return 0.0
    hits = sum(exact_match(p, g) for p, g in zip(predicted, gold))
    return hits / len(gold)
