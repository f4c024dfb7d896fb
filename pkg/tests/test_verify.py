"""불변식 검증 스위트"""

import pytest

from src.core.similarity import (
    SimilarityKind,
    SimilarityMatrix,
    backward_proportions,
    forward_proportions,
    nbi_weights,
)
from src.errors import VerificationError
from src.experiment.config import build_config
from src.experiment.oracles import toy_graph, random_graphs
from src.experiment.verify import (
    check_auc_band,
    check_toy_tie,
    check_grm_and_cf,
    check_hamming_identity,
    check_mid_rank_ties,
    check_normalization,
    check_oracle_equivalence,
    check_scale_invariance,
    run_verification,
    verify,
)


def csi_without_sqrt(graph):
    """제곱근을 빠뜨린 잘못된 CSI"""
    w = nbi_weights(graph)
    fsp, bsp = forward_proportions(w), backward_proportions(w)
    product = fsp.matrix.multiply(bsp.matrix.T.tocsr()).tocsr()
    return SimilarityMatrix(SimilarityKind.CSI, product, fsp.live)


@pytest.fixture
def graphs():
    return random_graphs(15, seed=3)


def test_toy_tie_check_passes():
    assert check_toy_tie().passed


def test_oracle_equivalence_passes(graphs):
    results = check_oracle_equivalence(graphs)
    assert [r.check_name for r in results] == ["nbi_dense_oracle", "csi_dense_oracle", "csi_closed_form"]
    assert all(r.passed for r in results)
    assert all(r.difference <= 1e-12 for r in results)


def test_normalization_checks_pass(graphs):
    assert all(r.passed for r in check_normalization([toy_graph(), *graphs]))


def test_missing_sqrt_is_caught(graphs):
    assert not check_toy_tie(csi_without_sqrt).passed
    results = {r.check_name: r for r in check_oracle_equivalence(graphs, csi_without_sqrt)}
    assert results["nbi_dense_oracle"].passed
    assert not results["csi_closed_form"].passed
    assert not results["csi_dense_oracle"].passed


def test_verify_raises_for_broken_csi():
    config = build_config({"verify_graphs": 10, "seed": 1})
    with pytest.raises(VerificationError) as err:
        verify(config, csi_fn=csi_without_sqrt, auc_instances=10)
    assert "csi_closed_form" in str(err.value)
    assert err.value.exit_code == 3


def test_suite_passes_for_reference_csi():
    report = run_verification(build_config({"verify_graphs": 10}))
    assert report.passed, [c.check_name for c in report.failures]
    assert report.get("hamming_identity") is not None
    assert report.get("auc_sampling_band").actual >= 99


def test_auc_band_reports_counts():
    result = check_auc_band(instances=20, n_samples=20_000, seed=4, min_pass=0)
    assert result.passed
    assert 0 <= result.actual <= 20


def test_hamming_and_mid_rank_checks(graphs):
    assert check_hamming_identity(graphs).passed
    assert check_mid_rank_ties(seed=2).passed


def test_scale_and_baseline_checks(graphs):
    assert check_scale_invariance(graphs).passed
    assert all(r.passed for r in check_grm_and_cf(graphs))
