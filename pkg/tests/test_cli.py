import json

import pytest

from localsearch_cc import formats as F
from localsearch_cc.cli import SCHEMA, main
from localsearch_cc.embeddings import embed_hyp_odd


def _records(capsys):
    out = capsys.readouterr().out
    recs = [json.loads(line) for line in out.splitlines() if line.startswith("{")]
    assert all(r["schema"] == SCHEMA for r in recs)
    return recs


def test_pipeline_exact(capsys):
    assert main(["pipeline", "--H", "k4", "--M", "2", "--seed", "1"]) == 0
    (rec,) = _records(capsys)
    assert rec["correspondence"] == "exact" and rec["max_degree"] <= 4


def test_verify_embedding_builtin(capsys):
    assert main(["verify-embedding", "builtin:odd", "--n", "3"]) == 0
    assert _records(capsys)[0]["ok"] is True


def test_protocol_on_prisoners_dilemma(capsys):
    assert main(["protocol", "run", "detect-exact-2p", "--instance", "builtin:pd", "--seed", "2"]) == 0
    assert _records(capsys)[0]["verdict"] == "exact"
    assert main(["protocol", "run", "detect-exact-2p", "--instance", "builtin:mp"]) == 0
    assert _records(capsys)[0]["verdict"] == "not exact"


def test_generate_then_reduce_and_solve(tmp_path, capsys):
    path = tmp_path / "v.txt"
    assert main(["gen", "vetols", "--graph", "hypercube:4", "--W", "6", "--seed", "3",
                 "--out", str(path)]) == 0
    assert main(["reduce", "--instance", str(path), "--to", "sumls"]) == 0
    assert _records(capsys)[0]["correspondence"] == "exact"
    q = tmp_path / "q.txt"
    assert main(["gen", "query", "--graph", "hypercube:5", "--W", "32", "--out", str(q)]) == 0
    assert main(["solve", "--alg", "steepest", "--instance", str(q), "--start", "0"]) == 0
    assert _records(capsys)[0]["queries"] >= 6


def test_game_check_and_pebb_reduce(tmp_path, capsys):
    g = tmp_path / "g.txt"
    assert main(["gen", "game-planted", "--N", "3", "--seed", "4", "--out", str(g)]) == 0
    assert main(["game", "check", "--instance", str(g)]) == 0
    assert _records(capsys)[0]["exact"] is False
    p = tmp_path / "p.txt"
    assert main(["gen", "pebb", "--M", "3", "--seed", "5", "--out", str(p)]) == 0
    assert main(["reduce", "--instance", str(p), "--to", "vetols"]) == 0
    assert _records(capsys)[0]["correspondence"] == "exact"


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["protocol", "run", "no-such-protocol", "--instance", "x"])
    assert exc.value.code == 2


def test_broken_embedding_exits_3(tmp_path, capsys):
    text = F.format_embedding(embed_hyp_odd(2), "hypercube:2", "odd:3")
    lines = text.splitlines()
    phis = [i for i, l in enumerate(lines) if l.startswith("phi")]
    target = lines[phis[1]].split("->")[1]
    lines[phis[0]] = lines[phis[0]].split("->")[0] + "->" + target
    path = tmp_path / "bad.txt"
    path.write_text("\n".join(lines) + "\n")
    assert main(["verify-embedding", str(path)]) == 3
    assert _records(capsys)[0]["ok"] is False


def test_bad_input_exits_4(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("sumls W=3 graph=path:2\nfA 0 1\n")
    assert main(["oracle", "--instance", str(path)]) == 4
    assert _records(capsys)[0]["kind"] == "error"
    assert main(["oracle", "--instance", str(tmp_path / "missing.txt")]) == 4
