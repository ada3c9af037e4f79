from stubstar import seqcheck
from stubstar.feasibility import eg_divergence_report
from stubstar.feasibility.diagnostics import classify, eg_verdicts
from stubstar.model import Ensemble, Partition


def test_classify_labels():
    v = {"paper": True, "constant_fixed": False, "recursion_fixed": True, "classical": False}
    assert classify(v, False) == "paper_only:constant"
    assert classify({**v, "paper": False}, False) == "agree_infeasible"
    both = {"paper": True, "constant_fixed": True, "recursion_fixed": True, "classical": False}
    assert classify(both, False) == "paper_only:both"


def test_k_plus_one_constant_admits_non_graphical():
    # four vertices each wanting 4 neighbours among 3 others: at k = 4 the row
    # reads 16 <= 12 classically but 16 <= 20 with k(k+1)
    e = Ensemble({Partition([4, 4, 4, 4]): 4}, 4)
    v = eg_verdicts(e)
    assert not seqcheck.check_erdos_gallai([4, 4, 4, 4])
    assert v["classical"] is False
    assert v["paper"] is True and v["constant_fixed"] is False


def test_report_classifies_every_ensemble():
    rep = eg_divergence_report(500, delta=4, seed=0)
    assert len(rep.labels) == 500
    assert rep.classical_mismatch == 0
    assert set(rep.counts) <= {
        "agree_feasible", "agree_infeasible",
        *(f"{s}:{c}" for s in ("paper_only", "classical_only") for c in ("constant", "recursion", "either", "both")),
    }
    text = rep.to_text()
    assert text.startswith("EG row comparison: 500 ensembles") and f"divergent: {rep.divergences}" in text


def test_report_deterministic():
    assert eg_divergence_report(100, seed=5).labels == eg_divergence_report(100, seed=5).labels
