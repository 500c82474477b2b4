import json
import os
import random
import subprocess
from pathlib import Path

import pytest

import recasm

CORPUS = Path(os.environ.get("RECASM_CORPUS_DIR", Path(__file__).resolve().parents[2] / "corpus"))


def source(name):
    return (CORPUS / f"{name}.recasm").read_text()


def primes(count):
    out, n = [], 2
    while len(out) < count:
        if all(n % d for d in range(2, int(n**0.5) + 1)):
            out.append(n)
        n += 1
    return out


@pytest.mark.parametrize("name", ["mergesort", "quicksort"])
@pytest.mark.parametrize("policy", ["synchronous", "interleaving", "random-subset"])
def test_sorts_match_sorted(name, policy):
    rng = random.Random(7)
    for seed in range(3):
        xs = [rng.randint(-50, 50) for _ in range(rng.randint(0, 10))]
        e = recasm.run(source(name), {"unsorted_list": xs}, policy=policy, seed=seed)
        assert e.status == "quiescent"
        assert e.output() == sorted(xs)


def test_sieve_stream():
    e = recasm.Engine(source("sieve"))
    e.run(60)
    seen = []
    for line in e.trace().splitlines()[1:]:
        for m in json.loads(line)["moves"]:
            for u in m["updates"]:
                if u["loc"]["symbol"] == "out_prime":
                    seen.append(u["value"])
    assert seen[:8] == primes(8)


def test_parse_error_location():
    with pytest.raises(ValueError, match=r"<string>:2:\d+: "):
        recasm.format_program("main rule m() {\n  x := := 1 }")


def test_transforms_and_postulates():
    wrapped = recasm.transform("wrap", source("mergesort"))
    assert recasm.format_program(wrapped) == wrapped
    e = recasm.run(wrapped, {"unsorted_list": [3, 1, 2]}, policy="random-subset", seed=2)
    assert e.output() == [1, 2, 3]
    assert recasm.check_postulates(e.trace())["pass"] is True
    with pytest.raises(ValueError):
        recasm.transform("flatten", source("mergesort"))


def test_enumerate_format():
    runs = recasm.enumerate_runs(source("counters"), depth=1)
    assert runs["format"] == 1
    assert len(runs["runs"]) == 3


def test_cli_exit_codes(tmp_path):
    code, out, _ = recasm.cli(["run", str(CORPUS / "mergesort.recasm"), "--input", '{"unsorted_list":[2,1]}'])
    assert code == 0
    assert json.loads(out)["outputs"]["sorted_list"] == [1, 2]
    assert recasm.cli(["run", str(CORPUS / "conflict.recasm")])[0] == 2


@pytest.mark.skipif("RECASM_BIN" not in os.environ, reason="needs the built executable")
def test_executable_trace_is_deterministic(tmp_path):
    args = [os.environ["RECASM_BIN"], "run", str(CORPUS / "quicksort.recasm"), "--input",
            '{"unsorted_list":[5,3,9,1]}', "--policy", "random-subset", "--seed", "4"]
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    subprocess.run(args + ["--trace", str(a)], check=True, capture_output=True)
    subprocess.run(args + ["--trace", str(b)], check=True, capture_output=True)
    assert a.read_bytes() == b.read_bytes()
