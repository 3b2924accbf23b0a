import json
import subprocess
import sys

import pytest

from digifix import io
from digifix import lattice as L
from digifix.cli import main
from digifix.fixsets import verify_cold, verify_freezing
from digifix.maps import PointMap


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


@pytest.mark.parametrize("X", [
    L.cube([2, 1], 2),
    L.cycle(6),
    L.product([L.cycle(4), L.interval(0, 1)], u=1),
    L.product([L.interval(0, 2), L.interval(0, 2)]),
    L.make_image([(0, 0, 1), (5, 5, 5)], L.CU(3)),
])
def test_image_round_trip(X):
    doc = io.image_to_json(X)
    assert doc["format"] == 1
    Y = io.image_from_json(json.loads(io.dumps(doc)))
    assert Y == X and Y.neighbors == X.neighbors


def test_product_factors_survive_round_trip():
    P = L.product([L.interval(0, 2), L.interval(0, 2)])
    Q = io.image_from_json(io.image_to_json(P))
    assert [len(F) for F in Q.info["factors"]] == [3, 3]


def test_map_and_verdict_round_trip():
    X = L.box([(0, 2), (0, 2)], 2)
    f = PointMap(X, X, tuple(range(len(X))))
    assert io.map_from_json(io.map_to_json(f), X) == f
    for v in (verify_cold(X, X.indices_of([(0, 0), (2, 2)]), 1), verify_freezing(X, L.boundary(X))):
        doc = json.loads(io.dumps(io.verdict_to_json(v)))
        back = io.verdict_from_json(doc, X)
        assert back.status == v.status and back.witness == v.witness
        assert back.certificate == json.loads(json.dumps(io._plain(v.certificate)))
        assert back.stats.to_dict() == v.stats.to_dict()


def test_family_descriptors():
    assert len(io.generate({"family": "contract_not_pointed"})) == 17
    assert len(io.generate({"family": "irreducible_at_point"})) == 5
    W = io.generate({"family": "wedge", "left": {"family": "cycle", "n": 5},
                     "right": {"family": "cycle", "n": 6}, "x0": 0})
    assert len(W) == 10
    with pytest.raises(io.DocumentError):
        io.generate({"family": "torus"})
    with pytest.raises(io.DocumentError):
        io.generate({"family": "cycle"})
    with pytest.raises(io.DocumentError):
        io.image_from_json({"format": 2, "points": [], "adjacency": {"type": "cu", "u": 1}})


def test_cli_freezing_examples(tmp_path, capsys):
    img = tmp_path / "cube_3x2_c1.json"
    code, doc, _ = run(capsys, "generate", "--family", '{"family":"cube","m":[3,2],"u":1}', "--out", str(img))
    assert code == 0
    corners = tmp_path / "corners.json"
    corners.write_text('{"points": [[0,0],[3,0],[0,2],[3,2]]}')
    code, doc, _ = run(capsys, "freezing", "--image", str(img), "--candidate", str(corners))
    assert code == 0 and doc["status"] == "HOLDS" and doc["query"]["candidate"] == [0, 2, 9, 11]

    c4 = tmp_path / "c4.json"
    run(capsys, "generate", "--family", '{"family":"cycle","n":4}', "--out", str(c4))
    code, doc, _ = run(capsys, "freezing", "--image", str(c4), "--candidate", "[0,1,2]")
    assert code == 1 and doc["status"] == "FAILS" and doc["witness"] != [0, 1, 2, 3]


def test_cli_spectrum_and_other_verbs(capsys):
    rect = '{"family":"box","ranges":[[1,2],[1,2]],"u":1}'
    code, doc, _ = run(capsys, "spectrum", "--image", rect, "--threads", "1")
    assert code == 0 and doc["spectrum"] == [0, 1, 2, 3, 4]
    code, doc, _ = run(capsys, "spectrum", "--image", rect, "--mode", "targeted", "--point", "[1,1]")
    assert code == 0 and doc["spectrum"] == [1, 2, 3, 4]
    code, doc, _ = run(capsys, "info", "--image", rect)
    assert code == 0 and doc["info"]["points"] == 4 and doc["info"]["diameter"] == 2
    code, doc, _ = run(capsys, "rigidity", "--image", '{"family":"cycle","n":6}')
    assert code == 1
    code, doc, _ = run(capsys, "contractible", "--image", '{"family":"interval","a":0,"b":3}')
    assert code == 0 and len(doc["certificate"]["chain"]) >= 2
    code, doc, _ = run(capsys, "reducible", "--image", '{"family":"cycle","n":5}')
    assert code == 1
    code, doc, _ = run(capsys, "cold", "--image", '{"family":"interval","a":0,"b":1}', "--candidate", "[0]", "--s", "1")
    assert code == 0
    code, doc, _ = run(capsys, "minimal", "--image", '{"family":"cycle","n":9}', "--candidate", "[0,3,6]")
    assert code == 0
    code, doc, _ = run(capsys, "minimum", "--image", '{"family":"cycle","n":9}')
    assert code == 0 and doc["size"] == 3
    code, doc, _ = run(capsys, "continuity", "--image", '{"family":"interval","a":0,"b":2}', "--map", '{"assignment":[0,2,2]}')
    assert code == 1 and doc["certificate"]["broken_edges"] == [[0, 1]]


def test_cli_input_errors(tmp_path, capsys):
    code, doc, err = run(capsys, "info", "--image", '{"dim": 1, "points": [[0]')
    assert code == 3 and "line 1 column" in doc["error"] and "line 1 column" in err
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "dim": 1,\n  "points": [[0],,]\n}')
    code, doc, _ = run(capsys, "info", "--image", str(bad))
    assert code == 3 and "line 3" in doc["error"]
    code, doc, _ = run(capsys, "info", "--image", str(tmp_path / "missing.json"))
    assert code == 3
    code, doc, _ = run(capsys, "cold", "--image", '{"family":"interval","a":0,"b":1}', "--candidate", "[0]")
    assert code == 3 and "--s" in doc["error"]
    code, doc, _ = run(capsys, "freezing", "--image", '{"family":"interval","a":0,"b":1}', "--candidate", "[7]")
    assert code == 3


def test_cli_budget_flags_and_environment(capsys, monkeypatch):
    img = '{"family":"box","ranges":[[0,3],[0,3]],"u":2}'
    code, doc, _ = run(capsys, "freezing", "--image", img, "--candidate", "[0,3,12,15]", "--budget-nodes", "0")
    assert code == 2 and doc["status"] == "INCONCLUSIVE"
    monkeypatch.setenv("DIGIFIX_BUDGET_NODES", "0")
    code, doc, _ = run(capsys, "freezing", "--image", img, "--candidate", "[0,3,12,15]")
    assert code == 2 and doc["query"]["budget"]["nodes"] == 0
    code, doc, _ = run(capsys, "freezing", "--image", img, "--candidate", "[0,3,12,15]", "--budget-nodes", "100000")
    assert code == 1
    monkeypatch.setenv("DIGIFIX_BUDGET_NODES", "lots")
    code, doc, _ = run(capsys, "info", "--image", img)
    assert code == 3


def test_cli_output_is_byte_identical(tmp_path, capsys):
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        main(["cold", "--image", '{"family":"box","ranges":[[0,2],[0,2]],"u":2}',
              "--candidate", "[0,8]", "--s", "1", "--out", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    main(["freezing", "--image", '{"family":"cycle","n":5}', "--candidate", "[0,2]", "--timing"])
    assert "timing" in json.loads(capsys.readouterr().out)


def _manifest(tmp_path, queries, budget={"nodes": 100000}):
    path = tmp_path / "manifest.json"
    doc = {"format": 1, "queries": queries}
    if budget is not None:
        doc["budget"] = budget
    path.write_text(json.dumps(doc))
    return str(path)


def test_batch(tmp_path, capsys):
    queries = [
        {"name": "c9", "verb": "freezing", "image": {"family": "cycle", "n": 9}, "candidate": [0, 3, 6], "expect": "HOLDS"},
        {"name": "c4", "verb": "freezing", "image": {"family": "cycle", "n": 4}, "candidate": [0, 1, 2], "expect": "FAILS"},
        {"name": "sq", "verb": "spectrum", "image": {"family": "box", "ranges": [[1, 2], [1, 2]]},
         "expect": "HOLDS", "expect_spectrum": [0, 1, 2, 3, 4]},
    ]
    code, doc, _ = run(capsys, "batch", _manifest(tmp_path, queries), "--threads", "1")
    assert code == 0 and doc["mismatched"] == [] and len(doc["summary"]) == 3

    queries[1]["expect"] = "HOLDS"
    code, doc, err = run(capsys, "batch", _manifest(tmp_path, queries), "--threads", "2")
    assert code == 1 and doc["mismatched"] == ["c4"] and "c4" in err

    code, doc, _ = run(capsys, "batch", _manifest(tmp_path, []))
    assert code == 0 and doc["summary"] == []
    code, doc, _ = run(capsys, "batch", _manifest(tmp_path, queries[:1], budget=None))
    assert code == 3 and "budget" in doc["error"]
    code, doc, _ = run(capsys, "batch", str(tmp_path / "nope.json"))
    assert code == 3


def test_batch_relative_paths(tmp_path, capsys):
    (tmp_path / "img.json").write_text(json.dumps(io.image_to_json(L.cycle(9))))
    path = _manifest(tmp_path, [{"name": "rel", "verb": "freezing", "image": "img.json",
                                 "candidate": [0, 3, 6], "expect": "HOLDS"}])
    code, doc, _ = run(capsys, "batch", path)
    assert code == 0


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "digifix.cli", "freezing", "--image", '{"family":"cycle","n":4}',
                          "--candidate", "[0,1,2]"], capture_output=True, text=True)
    assert res.returncode == 1 and json.loads(res.stdout)["status"] == "FAILS"
