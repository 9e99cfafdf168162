"""Performance and fairness metrics from confusion counts.

Degenerate denominators yield an explicit ``None`` ("undefined") rather
than a coerced zero, so reports stay honest about what was measurable.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import OntoGuardError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise OntoGuardError("confusion counts must be non-negative")

    @property
    def positives(self) -> int:
        return self.tp + self.fn

    @property
    def negatives(self) -> int:
        return self.fp + self.tn

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def favorable(self) -> int:
        """Predicted-positive count, the favorable outcome."""
        return self.tp + self.fp


@dataclass(frozen=True)
class GroupedCounts:
    privileged: ConfusionCounts
    unprivileged: ConfusionCounts


def _ratio(num, den):
    return None if den == 0 else num / den


def performance(counts: ConfusionCounts) -> dict:
    """recall, false_alarm, accuracy, precision, f1 (None = undefined)."""
    recall = _ratio(counts.tp, counts.positives)
    false_alarm = _ratio(counts.fp, counts.negatives)
    accuracy = _ratio(counts.tp + counts.tn, counts.total)
    precision = _ratio(counts.tp, counts.tp + counts.fp)
    if precision is None or recall is None or precision + recall == 0:
        f1 = None
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return {
        "recall": recall,
        "false_alarm": false_alarm,
        "accuracy": accuracy,
        "precision": precision,
        "f1": f1,
    }


def fairness(groups: GroupedCounts) -> dict:
    """aod, eod, spd, di between unprivileged and privileged groups."""
    priv, unpriv = groups.privileged, groups.unprivileged
    tpr_p = _ratio(priv.tp, priv.positives)
    tpr_u = _ratio(unpriv.tp, unpriv.positives)
    fpr_p = _ratio(priv.fp, priv.negatives)
    fpr_u = _ratio(unpriv.fp, unpriv.negatives)
    fav_p = _ratio(priv.favorable, priv.total)
    fav_u = _ratio(unpriv.favorable, unpriv.total)

    eod = None if tpr_u is None or tpr_p is None else tpr_u - tpr_p
    if None in (fpr_u, fpr_p, tpr_u, tpr_p):
        aod = None
    else:
        aod = 0.5 * ((fpr_u - fpr_p) + (tpr_u - tpr_p))
    spd = None if fav_u is None or fav_p is None else fav_u - fav_p
    if fav_u is None or fav_p is None or fav_p == 0:
        di = None
    else:
        di = fav_u / fav_p
    return {"aod": aod, "eod": eod, "spd": spd, "di": di}
