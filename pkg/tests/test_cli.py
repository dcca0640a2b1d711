import json
import subprocess
import sys

import pytest

from rp3moves import io
from rp3moves.cli import run


@pytest.fixture()
def files(tmp_path, s3, s2, rp3_small):
    paths = {}
    for name, T in (("s3", s3), ("s2", s2), ("rp3", rp3_small)):
        p = tmp_path / f"{name}.tri"
        p.write_text(io.write_tri(T))
        paths[name] = p
    return paths


def report(capsys):
    return json.loads(capsys.readouterr().out)


def test_validate_ok(files, capsys):
    assert run(["validate", str(files["s3"]), "--json"]) == 0
    assert report(capsys)["report"]["valid"] is True


def test_validate_rejects_invalid(tmp_path, capsys):
    p = tmp_path / "bad.tri"
    p.write_text("tri 3\ntet 0 1 2 3\n")
    assert run(["validate", str(p)]) == 1
    assert "rejected" in capsys.readouterr().err


def test_missing_file_rejected(tmp_path):
    assert run(["homology", str(tmp_path / "nope.tri")]) == 1


def test_malformed_file_rejected(tmp_path):
    p = tmp_path / "bad.tri"
    p.write_text("tri 3\ntet 0 1 2\n")
    assert run(["validate", str(p)]) == 1


def test_homology(files, capsys):
    assert run(["homology", str(files["rp3"]), "--json"]) == 0
    assert report(capsys)["homology"]["text"] == "(Z, Z/2, 0, Z)"


def test_simplify_sphere_rejected_by_homology_gate(files, capsys):
    assert run(["rp3", "simplify", str(files["s3"])]) == 1
    assert "homology" in capsys.readouterr().err


def test_outputs_never_overwrite_inputs(files):
    before = files["s3"].read_text()
    assert run(["subdivide", str(files["s3"]), "--emit", str(files["s3"])]) == 1
    assert files["s3"].read_text() == before
    assert run(["subdivide", str(files["s3"]), "--emit", str(files["s3"]), "--force"]) == 0
    assert len(io.read_tri(files["s3"].read_text()).facets) == 120


def test_budgets_must_be_positive(files):
    assert run(["distance", str(files["s3"]), str(files["s3"]), "--depth", "0"]) == 1
    assert run(["normal", "findp2", str(files["s3"]), "--time-limit", "-1"]) == 1


def test_usage_errors_are_rejections():
    assert run(["no-such-command"]) == 1
    assert run([]) == 1


def test_distance_budget_incomplete(files, tmp_path):
    sd = tmp_path / "sd.tri"
    assert run(["subdivide", str(files["s2"]), "--emit", str(sd)]) == 0
    assert run(["distance", str(files["s2"]), str(sd), "--states", "20", "--depth", "12"]) == 2
    out = tmp_path / "path.moves"
    assert run(["distance", str(files["s2"]), str(sd), "--kinds", "expand", "--depth", "12",
                "--emit", str(out)]) == 0
    assert run(["moves", "replay", str(files["s2"]), str(out)]) == 0


def test_replay_bad_moves_rejected(files, tmp_path):
    m = tmp_path / "bad.moves"
    m.write_text("C 0 1\n")
    assert run(["moves", "replay", str(files["s3"]), str(m)]) == 1


def test_replay_wrong_hash_rejected(files, tmp_path):
    m = tmp_path / "empty.moves"
    m.write_text("")
    assert run(["moves", "replay", str(files["s3"]), str(m), "--expect-hash", "0" * 64]) == 1


def test_cells_commands_round_trip(files, tmp_path, capsys):
    cell = tmp_path / "s3.cell"
    assert run(["dual", str(files["s3"]), "--emit", str(cell)]) == 0
    assert io.write_cell(io.read_cell(cell.read_text())) == cell.read_text()
    oc = tmp_path / "oc.tri"
    assert run(["ordercx", str(cell), "--emit", str(oc)]) == 0
    moves, start, after = tmp_path / "d.moves", tmp_path / "start.tri", tmp_path / "after.cell"
    capsys.readouterr()
    assert run(["del2", str(cell), "*0.1", "--emit-moves", str(moves), "--emit-start", str(start),
                "--emit", str(after), "--json"]) == 0
    assert report(capsys)["moves"] == 14
    assert run(["moves", "replay", str(start), str(moves)]) == 0
    assert run(["del2", str(cell), "*0"]) == 1


def test_normal_commands(files, tmp_path, capsys):
    d = tmp_path / "fund"
    assert run(["normal", "enumerate", str(files["s3"]), "--emit-dir", str(d), "--json"]) == 0
    r = report(capsys)
    assert r["result"]["count"] == 15 and r["result"]["complete"]
    nsv = sorted(d.iterdir())
    assert len(nsv) == 15
    assert run(["normal", "euler", str(files["s3"]), str(nsv[0]), "--json"]) == 0
    assert report(capsys)["surface"]["euler_characteristic"] == 2
    out = tmp_path / "sum.nsv"
    assert run(["normal", "sum", str(nsv[0]), str(nsv[1]), "--tri", str(files["s3"]), "--emit", str(out)]) == 0
    capsys.readouterr()
    assert run(["normal", "kneser", str(files["s3"]), str(out), "--json"]) == 0
    assert report(capsys)["report"]["two_sided_components"] == 2
    assert run(["normal", "findp2", str(files["s3"]), "--json"]) == 0
    assert report(capsys)["result"]["status"] == "none"


def test_normal_sum_incompatible_rejected(files, tmp_path):
    d = tmp_path / "fund"
    run(["normal", "enumerate", str(files["s3"]), "--emit-dir", str(d)])
    quads = [p for p in sorted(d.iterdir()) if any(int(c) for line in p.read_text().splitlines()[1:]
                                                     for c in line.split()[4:])]
    codes = {run(["normal", "sum", str(a), str(b)]) for a in quads for b in quads}
    assert codes == {0, 1}


def test_findp2_on_small_rp3(files, tmp_path, capsys):
    out = tmp_path / "p.nsv"
    assert run(["normal", "findp2", str(files["rp3"]), "--emit", str(out), "--json"]) == 0
    assert report(capsys)["result"]["status"] == "found"
    assert run(["normal", "euler", str(files["rp3"]), str(out), "--json"]) == 0
    s = report(capsys)["surface"]
    assert s["euler_characteristic"] == 1 and s["orientable"] is False


def test_rp2_commands(tmp_path, capsys):
    ep = tmp_path / "ep"
    assert run(["rp2", "endpoints", "--emit", str(ep)]) == 0
    capsys.readouterr()
    assert run(["rp2", "reduce", str(ep / "z2.cell"), "--json"]) == 0
    assert report(capsys)["endpoint"] == "z2"
    d = tmp_path / "d.cell"
    assert run(["rp2", "dual", str(ep / "z1.tri"), "--emit", str(d)]) == 0
    assert run(["rp2", "reduce", str(d)]) == 0


def test_rp3_certificates_replay(tmp_path, capsys):
    z1 = tmp_path / "z1.tri"
    assert run(["rp3", "standard", "--which", "z1", "--emit", str(z1)]) == 0
    moves, cert = tmp_path / "zz.moves", tmp_path / "cert.json"
    assert run(["rp3", "z1z2", "--emit", str(moves), "--cert", str(cert)]) == 0
    d = json.loads(cert.read_text())
    assert d["moves_file"] == "cert.moves" and (tmp_path / "cert.moves").exists()
    capsys.readouterr()
    assert run(["moves", "replay", str(cert), "--json"]) == 0
    assert report(capsys)["final_hash"] == d["final_hash"]
    assert run(["moves", "replay", str(z1), str(moves)]) == 0


def test_simplify_certificate_replays(tmp_path, tz1):
    from rp3moves.moves import greedy_contractions, replay

    T = replay(greedy_contractions(tz1, max_moves=30))
    src = tmp_path / "t.tri"
    src.write_text(io.write_tri(T))
    cert = tmp_path / "out.json"
    assert run(["rp3", "simplify", str(src), "--cert", str(cert)]) == 0
    assert run(["moves", "replay", str(cert)]) == 0


def test_identical_inputs_give_identical_bytes(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["rp3", "z1z2", "--cert", str(a)])
    run(["rp3", "z1z2", "--cert", str(b)])
    assert a.read_text() == b.read_text().replace("b.moves", "a.moves")
    assert (tmp_path / "a.moves").read_bytes() == (tmp_path / "b.moves").read_bytes()


def test_console_script(files):
    proc = subprocess.run([sys.executable, "-m", "rp3moves.cli", "validate", str(files["s3"])],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "valid: True" in proc.stdout
