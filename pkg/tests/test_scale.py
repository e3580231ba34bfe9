import time

import pytest

from app.cli import main
from app.services.ingest import write_dataset
from app.services.synth import GeneratorConfig, MarkovModel, generate_markov


@pytest.mark.slow
def test_mi_on_two_and_a_half_million_comments(tmp_path, capsys):
    ds = generate_markov(
        MarkovModel.persistent(2, 0.9),
        GeneratorConfig(thread_count=50_000, length_law="fixed", mean_length=50, seed=1),
    )
    assert ds.n_comments == 2_500_000
    path = tmp_path / "big.jsonl"
    write_dataset(ds, path)

    start = time.perf_counter()
    assert main(["mi", "--input", str(path), "--seed", "1"]) == 0
    elapsed = time.perf_counter() - start
    assert elapsed < 60, f"mi tardó {elapsed:.1f} s"
    assert "no shuffle" in capsys.readouterr().out
