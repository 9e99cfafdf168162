import pytest
from hypothesis import given
from hypothesis import strategies as st

from ontoguard import (
    ConfusionCounts, GroupedCounts, OntoGuardError, fairness, performance,
)

counts = st.builds(ConfusionCounts,
                   tp=st.integers(0, 50), fp=st.integers(0, 50),
                   tn=st.integers(0, 50), fn=st.integers(0, 50))
groups = st.builds(GroupedCounts, privileged=counts, unprivileged=counts)


def test_perfect_classifier_hits_the_ideal_values():
    result = performance(ConfusionCounts(tp=10, fp=0, tn=10, fn=0))
    assert result == {"recall": 1.0, "false_alarm": 0.0, "accuracy": 1.0,
                      "precision": 1.0, "f1": 1.0}


def test_identical_groups_hit_the_ideal_fairness_values():
    c = ConfusionCounts(tp=8, fp=2, tn=7, fn=3)
    result = fairness(GroupedCounts(privileged=c, unprivileged=c))
    assert result == {"aod": 0.0, "eod": 0.0, "spd": 0.0, "di": 1.0}


def test_hand_computed_performance_case():
    result = performance(ConfusionCounts(tp=3, fp=1, tn=0, fn=1))
    assert result["precision"] == pytest.approx(0.75)
    assert result["recall"] == pytest.approx(0.75)
    assert result["f1"] == pytest.approx(0.75)
    assert result["accuracy"] == pytest.approx(0.6)
    assert result["false_alarm"] == pytest.approx(1.0)


def test_hand_computed_fairness_case():
    # privileged TPR 0.9, unprivileged TPR 0.5, both FPRs 0.2
    priv = ConfusionCounts(tp=9, fn=1, fp=2, tn=8)
    unpriv = ConfusionCounts(tp=5, fn=5, fp=2, tn=8)
    result = fairness(GroupedCounts(privileged=priv, unprivileged=unpriv))
    assert result["eod"] == pytest.approx(-0.4)
    assert result["aod"] == pytest.approx(-0.2)
    assert result["spd"] == pytest.approx(7 / 20 - 11 / 20)
    assert result["di"] == pytest.approx(7 / 11)


def test_zero_denominators_report_undefined_not_zero():
    result = performance(ConfusionCounts(tp=0, fp=0, tn=5, fn=0))
    assert result["precision"] is None
    assert result["recall"] is None
    assert result["f1"] is None
    assert result["false_alarm"] == 0.0

    empty = ConfusionCounts(tp=0, fp=0, tn=0, fn=0)
    assert performance(empty)["accuracy"] is None
    grouped = fairness(GroupedCounts(privileged=empty,
                                     unprivileged=ConfusionCounts(1, 1, 1, 1)))
    assert grouped == {"aod": None, "eod": None, "spd": None, "di": None}


def test_zero_privileged_favorable_rate_leaves_di_undefined():
    priv = ConfusionCounts(tp=0, fp=0, tn=5, fn=5)
    unpriv = ConfusionCounts(tp=3, fp=1, tn=3, fn=3)
    result = fairness(GroupedCounts(privileged=priv, unprivileged=unpriv))
    assert result["di"] is None
    assert result["spd"] is not None


def test_negative_counts_are_rejected():
    with pytest.raises(OntoGuardError):
        ConfusionCounts(tp=-1, fp=0, tn=0, fn=0)


def reference_fairness(priv, unpriv):
    """Spreadsheet-style recomputation, independent of the implementation."""
    def rate(num, den):
        return num / den if den else None

    tpr_p = rate(priv.tp, priv.tp + priv.fn)
    tpr_u = rate(unpriv.tp, unpriv.tp + unpriv.fn)
    fpr_p = rate(priv.fp, priv.fp + priv.tn)
    fpr_u = rate(unpriv.fp, unpriv.fp + unpriv.tn)
    fav_p = rate(priv.tp + priv.fp, priv.tp + priv.fp + priv.tn + priv.fn)
    fav_u = rate(unpriv.tp + unpriv.fp,
                 unpriv.tp + unpriv.fp + unpriv.tn + unpriv.fn)
    out = {}
    out["eod"] = None if None in (tpr_u, tpr_p) else tpr_u - tpr_p
    out["aod"] = (None if None in (fpr_u, fpr_p, tpr_u, tpr_p)
                  else ((fpr_u - fpr_p) + (tpr_u - tpr_p)) / 2)
    out["spd"] = None if None in (fav_u, fav_p) else fav_u - fav_p
    out["di"] = (None if fav_u is None or fav_p is None or fav_p == 0
                 else fav_u / fav_p)
    return out


@given(groups)
def test_fairness_matches_the_reference_recomputation(g):
    assert fairness(g) == reference_fairness(g.privileged, g.unprivileged)


@given(groups, st.integers(1, 9))
def test_fairness_is_scale_invariant(g, factor):
    def scaled(c):
        return ConfusionCounts(c.tp * factor, c.fp * factor,
                               c.tn * factor, c.fn * factor)

    big = GroupedCounts(privileged=scaled(g.privileged),
                        unprivileged=scaled(g.unprivileged))
    base = fairness(g)
    grown = fairness(big)
    for key in base:
        if base[key] is None:
            assert grown[key] is None
        else:
            assert grown[key] == pytest.approx(base[key])


@given(groups)
def test_swapping_groups_negates_differences_and_inverts_di(g):
    forward = fairness(g)
    backward = fairness(GroupedCounts(privileged=g.unprivileged,
                                      unprivileged=g.privileged))
    for key in ("aod", "eod", "spd"):
        if forward[key] is None:
            continue
        assert backward[key] == pytest.approx(-forward[key])
    if forward["di"] not in (None, 0):
        assert backward["di"] == pytest.approx(1 / forward["di"])


@given(counts)
def test_performance_invariants(c):
    result = performance(c)
    if result["accuracy"] is not None:
        assert 0.0 <= result["accuracy"] <= 1.0
    precision, recall, f1 = result["precision"], result["recall"], result["f1"]
    if precision is not None and recall is not None and precision + recall > 0:
        assert f1 == pytest.approx(2 * precision * recall / (precision + recall))
