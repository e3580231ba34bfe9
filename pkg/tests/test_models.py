import numpy as np
import pytest

from app.core.errors import ArgumentError, ContiguityError, DomainError, DuplicateRecordError
from app.core.models import BinSpec, Comment, Dataset, Thread, bin_of, validate
from app.services.synth import GeneratorConfig, generate_markov


@pytest.mark.parametrize("value, expected", [(0.95, 9), (0.0, 0), (1.0, 9), (0.05, 0), (0.3, 3), (0.9, 9), (0.1, 1)])
def test_bin_of_left_rule(value, expected):
    assert bin_of(value, BinSpec(0.1)) == expected


def test_bin_of_right_rule_sends_edges_down():
    spec = BinSpec(0.1, "right")
    assert bin_of(0.1, spec) == 0
    assert bin_of(0.0, spec) == 0
    assert bin_of(1.0, spec) == 9
    assert bin_of(0.95, spec) == 9


@pytest.mark.parametrize("value", [-0.01, 1.2, float("nan")])
def test_bin_of_rejects_outside_unit_interval(value):
    with pytest.raises(DomainError):
        bin_of(value, BinSpec(0.1))


@pytest.mark.parametrize("width", [0.1, 0.05, 0.3, 0.25, 1.0])
def test_binning_partitions_unit_interval(width):
    spec = BinSpec(width)
    grid = np.linspace(0, 1, 10_001)
    bins = spec.digitize(grid)
    assert bins.min() == 0 and bins.max() == spec.n_bins - 1
    # monótono: cada bin es un intervalo contiguo
    assert np.all(np.diff(bins) >= 0)
    assert set(bins.tolist()) == set(range(spec.n_bins))


def test_binspec_rejects_bad_width():
    with pytest.raises(ArgumentError):
        BinSpec(0.0)
    with pytest.raises(ArgumentError):
        BinSpec(1.5)


def test_non_dividing_width_closes_last_bin():
    spec = BinSpec(0.3)
    assert spec.n_bins == 4
    assert spec.edges[-1] == 1.0
    assert bin_of(1.0, spec) == 3


def test_thread_from_comments_sorts_by_index():
    t = Thread.from_comments("t", [Comment(1, 0.2, 0.3), Comment(0, 0.1, 0.4)])
    assert t.p_pos.tolist() == [0.1, 0.2]
    assert [c.index for c in t.comments] == [0, 1]


def test_thread_from_comments_gap_and_duplicate():
    with pytest.raises(ContiguityError, match="t1"):
        Thread.from_comments("t1", [Comment(0, 0.1, 0.1), Comment(2, 0.1, 0.1)])
    with pytest.raises(DuplicateRecordError):
        Thread.from_comments("t2", [Comment(0, 0.1, 0.1), Comment(0, 0.2, 0.1)])


def test_empty_thread_rejected():
    with pytest.raises(ArgumentError):
        Thread("t", [], [])


def test_dataset_counts_and_views(two_threads):
    assert two_threads.n_threads == 2
    assert two_threads.n_comments == int(two_threads.lengths.sum()) == 5
    assert two_threads.positions.tolist() == [0, 1, 0, 1, 2]
    assert two_threads.thread(1).thread_id == "b"
    assert Dataset.from_threads(two_threads.threads) == two_threads


def test_dataset_is_read_only(two_threads):
    with pytest.raises(ValueError):
        two_threads.p_pos[0] = 0.3


def test_equality_ignores_source_label(two_threads):
    assert two_threads.with_values(source_label="otro") == two_threads


def test_reversed_threads(two_threads):
    rev = two_threads.reversed_threads()
    assert rev.p_pos.tolist() == [0.9, 0.1, 1.0, 0.95, 0.5]
    assert rev.reversed_threads() == two_threads


def test_validate_reports_range_violation():
    ds = Dataset.from_arrays(["a"], [2], [0.5, 1.2], [0.1, 0.2])
    report = validate(ds)
    assert len(report.violations) == 1
    v = report.violations[0]
    assert (v.kind, v.thread_id, v.index) == ("range", "a", 1)


def test_validate_reports_duplicate_ids():
    ds = Dataset.from_arrays(["a", "a"], [1, 1], [0.5, 0.5], [0.1, 0.2])
    assert [v.kind for v in validate(ds).violations] == ["duplicate_thread_id"]


def test_validate_empty_dataset():
    report = validate(Dataset.empty())
    assert (report.n_threads, report.n_comments, len(report.violations)) == (0, 0, 0)


def test_validate_synthetic_dataset_is_clean(markov2):
    ds = generate_markov(markov2, GeneratorConfig(thread_count=2, mean_length=10, seed=3))
    report = validate(ds)
    assert report.ok and report.n_threads == 2
