import json
from fractions import Fraction

import pytest

from latsurj.certifier import is_surjective
from latsurj.ensembles import (
    Distribution,
    EnsembleSpec,
    derive_seed,
    sample_matrix,
)
from latsurj.experiments import (
    CORANK,
    EXPOSURE,
    SINGULARITY,
    SYMMETRIC,
    TRIVIAL,
    ExperimentConfig,
    run_experiment,
    wilson_interval,
)

U01 = Distribution.uniform([0, 1])
POINT0 = Distribution(((0, Fraction(1)),))
POINT1 = Distribution(((1, Fraction(1)),))


def test_wilson_interval_basics():
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    assert 0.0 <= lo and hi <= 1.0
    lo0, hi0 = wilson_interval(0, 100)
    assert lo0 == 0.0 and hi0 > 0
    assert wilson_interval(100, 100)[1] == 1.0
    # wider at lower confidence? no: narrower
    lo90, hi90 = wilson_interval(50, 100, confidence=0.90)
    assert hi90 - lo90 < hi - lo


def test_corank_point_mass_at_zero():
    cfg = ExperimentConfig(CORANK, n=5, trials=20, master_seed=1, dist=POINT0, p=3)
    rep = run_experiment(cfg)
    by_label = {o.label: o for o in rep.outcomes}
    assert by_label["corank=5"].count == 20
    assert sum(o.count for o in rep.outcomes) == 20  # frequencies partition


def test_corank_report_has_predictions():
    cfg = ExperimentConfig(CORANK, n=12, trials=60, master_seed=5, dist=U01, p=2, tolerance=0.2)
    rep = run_experiment(cfg)
    by_label = {o.label: o for o in rep.outcomes}
    assert by_label["corank=0"].prediction == pytest.approx(0.2887880950866, abs=1e-9)
    assert by_label["corank=0"].tail_bound is not None
    assert rep.all_pass  # 0.2 tolerance is generous at these sizes


def test_trivial_experiment_p_restricted():
    cfg = ExperimentConfig(
        TRIVIAL,
        n=10,
        trials=400,
        master_seed=11,
        dist=U01,
        u=2,
        primes=(2,),
        mode="p_restricted",
        tolerance=0.08,
    )
    rep = run_experiment(cfg)
    o = rep.outcomes[0]
    assert o.label == "trivial_p_part"
    # prediction: prod_k (1 - 2^-(k+2)) = 0.7701015868976 (rational oracle)
    assert o.prediction == pytest.approx(0.7701015868976, abs=1e-9)
    assert o.passed


def test_singularity_point_mass_always_singular():
    cfg = ExperimentConfig(
        SINGULARITY, n=3, trials=10, master_seed=3, dist=POINT1, mode="det", max_singular=0
    )
    rep = run_experiment(cfg)
    by_label = {o.label: o for o in rep.outcomes}
    assert by_label["singular"].count == 10
    assert by_label["singular"].passed is False
    assert "singularity_curves" in rep.extra


def test_singularity_dense_uniform_rare():
    cfg = ExperimentConfig(
        SINGULARITY, n=40, trials=100, master_seed=8, dist=U01, mode="det"
    )
    rep = run_experiment(cfg)
    by_label = {o.label: o for o in rep.outcomes}
    assert by_label["singular"].freq <= 0.02


def test_singularity_mod_p_mode():
    cfg = ExperimentConfig(
        SINGULARITY, n=20, trials=30, master_seed=4, dist=U01, mode="mod_p", p=2
    )
    rep = run_experiment(cfg)
    count = {o.label: o.count for o in rep.outcomes}
    # mod-2 rank deficiency is common (limit ~ 0.711)
    assert count["singular"] > 5


def test_symmetric_experiment_spot_checks_symmetry():
    cfg = ExperimentConfig(
        SYMMETRIC, n=12, trials=10, master_seed=6, dist=U01, u=8, min_frequency=0.0
    )
    rep = run_experiment(cfg)
    assert rep.config["u"] == 8
    assert rep.outcomes[0].label == "trivial"


def test_symmetric_default_u_formula():
    import math

    cfg = ExperimentConfig(SYMMETRIC, n=40, trials=2, master_seed=6, dist=U01, b=1.0)
    rep = run_experiment(cfg)
    assert rep.config["u"] == math.ceil(math.sqrt(40 * math.log(40)))  # 13


def test_exposure_experiment_traces_and_rows():
    cfg = ExperimentConfig(
        EXPOSURE, n=10, trials=8, master_seed=9, dist=U01, b=1.5, min_frequency=0.0
    )
    rep = run_experiment(cfg)
    assert len(rep.extra["runs"]) == 8
    traces = rep.artifacts["traces"]
    for t in traces:
        for p, traj in t.trajectories.items():
            assert all(a >= b for a, b in zip(traj, traj[1:]))
        if t.achieved:
            assert is_surjective(t.final_matrix).is_surjective


def test_trial_matrices_recoverable_from_seed():
    cfg = ExperimentConfig(CORANK, n=6, trials=3, master_seed=123, dist=U01, p=2)
    run_experiment(cfg)
    # the matrix of trial i is fully determined by (master_seed, i)
    spec = EnsembleSpec("iid_rect", 6, U01, derive_seed(123, 1), m=6)
    assert sample_matrix(spec) == sample_matrix(spec)


# -- determinism across worker counts ----------------------------------------


@pytest.mark.parametrize(
    "kind,extra",
    [
        (CORANK, dict(p=2)),
        (TRIVIAL, dict(u=1, tolerance=0.5)),
        (SINGULARITY, dict(mode="det")),
        (SYMMETRIC, dict(u=3)),
        (EXPOSURE, dict(b=1.0)),
    ],
)
def test_reports_identical_across_thread_counts(kind, extra):
    reports = []
    for threads in (1, 3, 7):
        cfg = ExperimentConfig(
            kind, n=8, trials=12, master_seed=77, dist=U01, threads=threads, **extra
        )
        reports.append(run_experiment(cfg).canonical_json())
    assert reports[0] == reports[1] == reports[2]


def test_report_serialization_schema():
    cfg = ExperimentConfig(CORANK, n=6, trials=5, master_seed=2, dist=U01, p=2)
    rep = run_experiment(cfg)
    doc = json.loads(rep.to_json())
    assert set(doc) >= {"config", "outcomes", "seed", "runtime_ms", "meta"}
    for o in doc["outcomes"]:
        assert set(o) == {
            "label",
            "count",
            "freq",
            "ci_lo",
            "ci_hi",
            "prediction",
            "tail_bound",
            "pass",
        }
    csv = rep.to_csv()
    assert csv.splitlines()[0] == "label,count,freq,ci_lo,ci_hi,prediction,tail_bound,pass"
    # canonical form excludes volatile fields
    canon = json.loads(rep.canonical_json())
    assert "runtime_ms" not in canon and "meta" not in canon


def test_unknown_experiment_rejected():
    cfg = ExperimentConfig(CORANK, n=4, trials=2, master_seed=1, dist=U01, p=2)
    from dataclasses import replace

    with pytest.raises(ValueError):
        run_experiment(replace(cfg, experiment="nope"))
