import json

import pytest

from app.core.errors import ContiguityError, DomainError, DuplicateRecordError, InputNotFoundError, ParseError
from app.core.models import Dataset
from app.services.ingest import infer_format, read_dataset, write_dataset
from app.services.synth import GeneratorConfig, MarkovModel, generate_markov


def _write_lines(path, rows):
    path.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
    return path


def _rec(tid, idx, pos=0.5, sub=0.5, **extra):
    return {"thread_id": tid, "index": idx, "p_pos": pos, "p_sub": sub, **extra}


def test_read_jsonl_two_threads_any_order(tmp_path):
    path = _write_lines(tmp_path / "d.jsonl", [
        _rec("b", 1, 0.2), _rec("a", 0, 0.1), _rec("b", 0, 0.3), _rec("a", 1, 0.4),
    ])
    ds = read_dataset(path)
    assert ds.n_threads == 2 and ds.n_comments == 4
    # hilos por primera aparición, comentarios por índice
    assert ds.thread_ids == ("b", "a")
    assert ds.p_pos.tolist() == [0.3, 0.2, 0.1, 0.4]


def test_extra_fields_are_ignored(tmp_path):
    path = _write_lines(tmp_path / "d.jsonl", [_rec("a", 0, model="lm-v2", text_len=120)])
    assert read_dataset(path).n_comments == 1


def test_gap_raises_contiguity_error_naming_thread(tmp_path):
    path = _write_lines(tmp_path / "d.jsonl", [_rec("t7", 0), _rec("t7", 2)])
    with pytest.raises(ContiguityError, match="t7"):
        read_dataset(path)


def test_duplicate_record(tmp_path):
    path = _write_lines(tmp_path / "d.jsonl", [_rec("a", 0), _rec("a", 1), _rec("a", 0)])
    with pytest.raises(DuplicateRecordError, match="1 y 3"):
        read_dataset(path)


def test_malformed_line_reports_line_number(tmp_path):
    path = tmp_path / "d.jsonl"
    path.write_text(json.dumps(_rec("a", 0)) + "\n{not json\n", encoding="utf-8")
    with pytest.raises(ParseError) as exc:
        read_dataset(path)
    assert exc.value.line == 2


def test_out_of_range_probability_has_location(tmp_path):
    path = _write_lines(tmp_path / "d.jsonl", [_rec("a", 0), _rec("a", 1, pos=1.2)])
    with pytest.raises(DomainError, match=":2:"):
        read_dataset(path)


def test_missing_file(tmp_path):
    with pytest.raises(InputNotFoundError, match="nope.jsonl"):
        read_dataset(tmp_path / "nope.jsonl")


def test_csv_reader(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("thread_id,index,p_pos,p_sub\nx,1,0.25,0.5\nx,0,0.75,1.0\n", encoding="utf-8")
    ds = read_dataset(path)
    assert ds.p_pos.tolist() == [0.75, 0.25]


def test_csv_bad_number_line(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("thread_id,index,p_pos,p_sub\nx,0,0.75,1.0\nx,1,abc,0.5\n", encoding="utf-8")
    with pytest.raises(ParseError) as exc:
        read_dataset(path)
    assert exc.value.line == 3


def test_invalid_utf8_reports_line_number(tmp_path):
    path = tmp_path / "d.jsonl"
    path.write_bytes(json.dumps(_rec("a", 0)).encode() + b"\n" + b"{\"thread_id\": \"\xff\"}\n")
    with pytest.raises(ParseError) as exc:
        read_dataset(path)
    assert exc.value.line == 2


def test_csv_nul_byte_is_parse_error(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("thread_id,index,p_pos,p_sub\nx,0,0.5\x00,0.5\n", encoding="utf-8")
    with pytest.raises(ParseError) as exc:
        read_dataset(path)
    assert exc.value.line == 2


@pytest.mark.parametrize("index", [10**30, 2**62])
def test_huge_index_is_parse_error(tmp_path, index):
    path = _write_lines(tmp_path / "d.jsonl", [_rec("a", index)])
    with pytest.raises(ParseError, match="demasiado grande"):
        read_dataset(path)



def test_write_empty_dataset(tmp_path):
    write_dataset(Dataset.empty(), tmp_path / "e.jsonl")
    write_dataset(Dataset.empty(), tmp_path / "e.csv")
    assert (tmp_path / "e.jsonl").read_text() == ""
    assert (tmp_path / "e.csv").read_text() == "thread_id,index,p_pos,p_sub\n"
    assert read_dataset(tmp_path / "e.csv") == Dataset.empty()


def test_write_single_comment_is_one_line(tmp_path):
    ds = Dataset.from_arrays(["only"], [1], [0.1], [0.2])
    write_dataset(ds, tmp_path / "one.jsonl")
    lines = (tmp_path / "one.jsonl").read_text().splitlines()
    assert len(lines) == 1
    assert json.loads(lines[0]) == {"thread_id": "only", "index": 0, "p_pos": 0.1, "p_sub": 0.2}


@pytest.mark.parametrize("suffix", ["jsonl", "csv"])
def test_round_trip_markov_data(tmp_path, suffix):
    model = MarkovModel.persistent(3, 0.8)
    ds = generate_markov(model, GeneratorConfig(thread_count=500, mean_length=20, seed=5))
    assert ds.n_comments > 5_000
    path = tmp_path / f"m.{suffix}"
    write_dataset(ds, path)
    assert read_dataset(path) == ds


def test_round_trip_1e5_comments(tmp_path):
    model = MarkovModel.persistent(2, 0.9)
    ds = generate_markov(model, GeneratorConfig(thread_count=2_000, length_law="fixed", mean_length=50, seed=9))
    assert ds.n_comments == 100_000
    write_dataset(ds, tmp_path / "big.jsonl")
    back = read_dataset(tmp_path / "big.jsonl")
    assert back == ds
    assert back.p_sub.tobytes() == ds.p_sub.tobytes()


def test_infer_format():
    assert infer_format("x.csv") == "csv"
    assert infer_format("x.jsonl") == "jsonl"
    assert infer_format("x.csv", "jsonl") == "jsonl"
