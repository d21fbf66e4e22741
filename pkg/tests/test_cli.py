import json
import subprocess
import sys
from pathlib import Path

import pytest

from pirforms.cli import main
from pirforms.modules import Submodule
from pirforms.reports import EXAMPLES, analyze, parse_instance

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, doc, name="inst.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


def redacted(text):
    d = json.loads(text)
    d["timing"] = None
    return d


@pytest.mark.parametrize("name", sorted(EXAMPLES))
def test_golden_reports(capsys, tmp_path, name):
    code, out, _ = run(capsys, "example", name)
    assert code == 0 and json.loads(out) == EXAMPLES[name]
    code, out, _ = run(capsys, "analyze", "--json", write(tmp_path, out))
    assert code == 0
    got = json.dumps(redacted(out), indent=2) + "\n"
    assert got == (GOLDEN / f"{name}.json").read_text()


def test_example_documents():
    assert EXAMPLES["paper-z4"] == {"ring": {"family": "Zp", "p": 2, "n": 2}, "module": [4, 4],
                                    "gram": [[2, 1], [1, 2]]}
    assert EXAMPLES["semisimple-hyperbolic"]["gram"] == [[0, 1], [1, 0]]
    assert EXAMPLES["cyclic-unit"]["module"] == [9]


def test_z4_report_values():
    r = analyze(parse_instance(EXAMPLES["paper-z4"]))
    assert (r["anisotropic"], r["quasi_anisotropic"]) == (False, False)
    assert r["lr"] == [[2, 0], [0, 2]] and r["rr_oracle"] == []
    assert r["unit_rescaling"]["invariant"]


def test_descriptors_round_trip():
    for doc in [EXAMPLES["paper-z4"], {"ring": {"family": "Zp", "p": 3, "n": 3}, "module": [3, 27, 9],
                                       "gram": [[9, 0, 0], [0, 1, 0], [0, 0, 3]]}]:
        inst = parse_instance(doc)
        r = analyze(inst)
        comp = inst.components[0]
        for key in ("lr", "ur", "rr_oracle"):
            gens = r[key]
            # back to local coordinates, then canonicalize
            local = [[g[j] for j in comp.index] for g in gens]
            L = Submodule.from_generators(comp.form.shape, local)
            assert sorted(map(list, (tuple(inst.globalize(comp, x)) for x in L.generators()))) == sorted(gens)


def test_gram_qz_matches_gram(capsys, tmp_path):
    a = write(tmp_path, {"module": [3], "gram_qz": [["1/3"]]}, "a.json")
    b = write(tmp_path, {"ring": {"modulus": 3}, "module": [3], "gram": [[1]]}, "b.json")
    ra, rb = run(capsys, "analyze", "--json", a)[1], run(capsys, "analyze", "--json", b)[1]
    assert redacted(ra) == redacted(rb)
    r = redacted(ra)
    assert r["nondegenerate"] and r["anisotropic"]
    a = write(tmp_path, {"ring": {"modulus": 36}, "module": [4, 9], "gram_qz": [["1/4", 0], [0, "2/9"]]}, "c.json")
    b = write(tmp_path, {"ring": {"modulus": 36}, "module": [4, 9], "gram": [[9, 0], [0, 8]]}, "d.json")
    assert redacted(run(capsys, "analyze", "--json", a)[1]) == redacted(run(capsys, "analyze", "--json", b)[1])


def test_composite_modulus_has_a_section_per_prime(capsys, tmp_path):
    path = write(tmp_path, {"ring": {"modulus": 12}, "module": [4, 4, 3], "gram": [[6, 3, 0], [3, 6, 0], [0, 0, 4]]})
    code, out, _ = run(capsys, "analyze", "--json", path)
    r = json.loads(out)
    assert code == 0 and [e["p"] for e in r["primes"]] == [2, 3]
    assert r["rr_oracle"] == [] and r["lr"] == [[2, 0, 0], [0, 2, 0]]


def test_polynomial_ring_input(capsys, tmp_path):
    path = write(tmp_path, {"ring": {"family": "Fpt", "p": 2, "n": 2}, "module": [4, 4],
                            "gram": [[[0, 1], 1], [1, [0, 1]]]})
    code, out, _ = run(capsys, "analyze", path)
    assert code == 0 and "anisotropic        no" in out


@pytest.mark.parametrize("doc,where", [
    ('{"module": [4], "gram": [[1]]', "line 1"),
    ({"module": [4], "gram": [[1]]}, "ring"),
    ({"ring": {"modulus": 12}, "module": [5], "gram": [[0]]}, "module[0]"),
    ({"ring": {"family": "Zp", "p": 4, "n": 1}, "module": [4], "gram": [[1]]}, "ring.p"),
    ({"ring": {"family": "Zp", "p": 2, "n": 2}, "module": [4, 4], "gram": [[1, 2], [3, 1]]}, "gram"),
    ({"ring": {"family": "Zp", "p": 2, "n": 2}, "module": [4, 2], "gram": [[1, 1], [1, 2]]}, "gram"),
    ({"module": [3], "gram_qz": [["1/9"]]}, "gram_qz[0][0]"),
    ({"module": [3], "gram_qz": [["x"]]}, "gram_qz[0][0]"),
    ({"ring": {"family": "Qp", "p": 2, "n": 2}, "module": [4], "gram": [[1]]}, "ring.family"),
    ({"ring": {"modulus": 4}, "module": [4], "gram": [[1]], "extra": 1}, "extra"),
    ({"ring": {"modulus": 4}, "module": [4], "gram": [[1.5]]}, "gram[0][0]"),
])
def test_malformed_input_exit_code(capsys, tmp_path, doc, where):
    code, _, err = run(capsys, "analyze", write(tmp_path, doc))
    assert code == 2 and where in err


def test_missing_file(capsys, tmp_path):
    assert run(capsys, "analyze", str(tmp_path / "nope.json"))[0] == 2


def test_budget_exhaustion(capsys, tmp_path):
    path = write(tmp_path, {"ring": {"family": "Zp", "p": 2, "n": 3}, "module": [8, 8], "gram": [[1, 0], [0, 1]]})
    assert run(capsys, "analyze", "--budget", "32", path)[0] == 3
    code, out, _ = run(capsys, "analyze", "--budget", "32", "--no-oracle", "--json", path)
    assert code == 0 and json.loads(out)["rr_oracle"] is None


def test_budget_from_environment(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("ANISO_BUDGET", "16")
    path = write(tmp_path, {"ring": {"family": "Zp", "p": 2, "n": 3}, "module": [8, 8], "gram": [[1, 0], [0, 1]]})
    assert run(capsys, "analyze", path)[0] == 3


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "main1", "--p", "3", "--max-len", "2")
    assert code == 0 and "0 failures" in out
    code, out, _ = run(capsys, "verify", "--suite", "srt", "--p", "2", "--max-len", "3", "--json")
    assert code == 0 and json.loads(out)["passed"]


@pytest.mark.parametrize("argv", [
    ["verify", "--suite", "nope"],
    ["verify", "--suite", "main1", "--p", "4"],
    ["verify", "--suite", "main1", "--max-len", "0"],
    ["verify", "--suite", "main1", "--shapes", "2,x"],
    ["verify", "--suite", "main1", "--shapes", "3", "--ring-length", "2"],
    ["example", "nope"],
])
def test_bad_parameters(capsys, argv):
    with pytest.raises(SystemExit) as e:
        sys.exit(main(argv))
    assert e.value.code == 2


def test_verify_reports_violations(capsys, monkeypatch):
    from pirforms import oracle

    def broken(ctx, res):
        return [("always fails", "forced")]

    monkeypatch.setitem(oracle._CHECKS, "ji", broken)
    code, out, _ = run(capsys, "verify", "--suite", "ji", "--p", "2", "--max-len", "1", "--json")
    d = json.loads(out)
    assert code == 1 and not d["passed"]
    replay = d["failures"][0]["instance"]
    assert parse_instance(replay).components[0].form.shape.factor_lengths == (1,)


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "pirforms", "example", "cyclic-unit"],
                         capture_output=True, text=True, check=True).stdout
    assert json.loads(out) == EXAMPLES["cyclic-unit"]
