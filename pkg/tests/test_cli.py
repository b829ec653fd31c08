import json
import shutil
import subprocess

import pytest

from perepair.cli import main


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def make_plan(capsys, tmp_path, *extra):
    path = tmp_path / "plan.json"
    rc, out, _ = run(capsys, "plan", "--construction", "1", "--s", "2",
                     "--primes", "3,5", "--t", "3,3", "--k", "2",
                     "--out", str(path), *extra)
    assert rc == 0
    return path


def test_plan_c2_summary(capsys, tmp_path):
    path = tmp_path / "p.json"
    rc, out, _ = run(capsys, "plan", "--construction", "2", "--base-bits", "2",
                     "--r", "8", "--primes", "2,3,5", "--out", str(path))
    assert rc == 0
    assert "n=17 k=9" in out
    assert "L=30" in out
    assert "GF(2^60)" in out
    assert path.exists()


def test_plan_c1_toy(capsys, tmp_path):
    path = make_plan(capsys, tmp_path)
    assert json.loads(path.read_text())["k"] == 2


def test_plan_json_mode(capsys, tmp_path):
    path = tmp_path / "p.json"
    rc, out, _ = run(capsys, "--json", "plan", "--construction", "1", "--s", "2",
                     "--primes", "3,5", "--t", "3,3", "--out", str(path))
    assert rc == 0
    payload = json.loads(out)
    assert payload["n"] == 6 and payload["k"] == 2
    assert payload["t"] == [3, 3]
    assert payload["path"] == str(path)


def test_plan_conflicting_k_and_d_is_usage_error(capsys, tmp_path):
    with pytest.raises(SystemExit) as e:
        run(capsys, "plan", "--construction", "1", "--t", "3,3", "--s", "2",
            "--k", "2", "--d", "5", "--out", str(tmp_path / "x.json"))
    assert e.value.code == 2


def test_plan_flag_mixups_are_usage_errors(capsys, tmp_path):
    for argv in (
        ["plan", "--construction", "1", "--s", "2"],             # missing --t
        ["plan", "--construction", "2", "--r", "8"],             # missing primes
        ["plan", "--construction", "2", "--r", "8",
         "--primes", "2,3", "--k", "4"],                         # k is derived
        ["plan", "--construction", "1", "--t", "3,3", "--s", "2",
         "--r", "8"],                                            # r is c2-only
    ):
        with pytest.raises(SystemExit) as e:
            run(capsys, *argv, "--out", str(tmp_path / "x.json"))
        assert e.value.code == 2


def test_plan_validation_failure_exits_3(capsys, tmp_path):
    rc, _, err = run(capsys, "plan", "--construction", "1", "--t", "3,3",
                     "--s", "2", "--primes", "4,5",
                     "--out", str(tmp_path / "x.json"))
    assert rc == 3
    assert "BAD_PRIME" in err


def test_cluster_and_repair_flow(capsys, tmp_path):
    plan = make_plan(capsys, tmp_path)
    cluster = tmp_path / "cluster.txt"
    rc, out, _ = run(capsys, "cluster", "--plan", str(plan), "--seed", "42",
                     "--out", str(cluster))
    assert rc == 0 and cluster.exists()

    transcript = tmp_path / "tr.json"
    rc, out, _ = run(capsys, "repair", "--cluster", str(cluster),
                     "--node", "4", "--out", str(transcript))
    assert rc == 0
    assert out.strip() == "bits=45 cutset=45 verified=true"
    payload = json.loads(transcript.read_text())
    assert payload["bits_transmitted"] == 45
    assert payload["verified"] is True
    assert payload["strategy"] == "pe"
    # node 4 sits in the prime-5 group: five 3-bit responses per helper
    assert len(payload["transfer_log"]) == len(payload["helpers"]) * 5
    assert sum(e[2] for e in payload["transfer_log"]) == 45


def test_repair_naive_reports_bits_without_cutset(capsys, tmp_path):
    plan = make_plan(capsys, tmp_path)
    cluster = tmp_path / "c.txt"
    run(capsys, "cluster", "--plan", str(plan), "--seed", "1",
        "--out", str(cluster))
    rc, out, _ = run(capsys, "repair", "--cluster", str(cluster),
                     "--node", "0", "--strategy", "naive")
    assert rc == 0
    assert out.strip() == "bits=60 verified=true"


def test_repair_json_mode(capsys, tmp_path):
    plan = make_plan(capsys, tmp_path)
    cluster = tmp_path / "c.txt"
    run(capsys, "cluster", "--plan", str(plan), "--seed", "1",
        "--out", str(cluster))
    rc, out, _ = run(capsys, "--json", "repair", "--cluster", str(cluster),
                     "--node", "2")
    assert rc == 0
    payload = json.loads(out)
    assert payload["cutset_bits"] == 45
    assert all(p == "trace_response" for _, _, _, p in payload["transfer_log"])


def test_repair_node_out_of_range_is_usage_error(capsys, tmp_path):
    plan = make_plan(capsys, tmp_path)
    cluster = tmp_path / "c.txt"
    run(capsys, "cluster", "--plan", str(plan), "--seed", "1",
        "--out", str(cluster))
    with pytest.raises(SystemExit) as e:
        run(capsys, "repair", "--cluster", str(cluster), "--node", "9")
    assert e.value.code == 2


def test_repair_missing_cluster_exits_3(capsys, tmp_path):
    rc, _, err = run(capsys, "repair",
                     "--cluster", str(tmp_path / "nope.txt"), "--node", "0")
    assert rc == 3
    assert "CORRUPT_FILE" in err


def test_repair_is_deterministic(capsys, tmp_path):
    plan = make_plan(capsys, tmp_path)
    cluster = tmp_path / "c.txt"
    run(capsys, "cluster", "--plan", str(plan), "--seed", "3",
        "--out", str(cluster))
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "repair", "--cluster", str(cluster), "--node", "1",
        "--out", str(a))
    run(capsys, "repair", "--cluster", str(cluster), "--node", "1",
        "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_bound_values(capsys):
    rc, out, _ = run(capsys, "bound", "--k", "8", "--t", "1")
    assert rc == 0 and out.strip() == "510510"
    rc, out, _ = run(capsys, "bound", "--k", "3", "--t", "3")
    assert rc == 0 and out.strip() == "1"
    # a non-uniform flexibility list
    rc, out, _ = run(capsys, "--json", "bound", "--k", "8", "--t", "2,3,3")
    assert json.loads(out)["L_min"] == 6


def test_tradeoff_csv(capsys, tmp_path):
    rc, out, _ = run(capsys, "tradeoff", "--n", "14", "--k", "10")
    lines = out.strip().splitlines()
    assert lines[0] == "t,L_min,d_max,beta_bar_min_num,beta_bar_min_den"
    assert len(lines) == 5
    assert lines[1] == "1,223092870,13,13,4"
    assert lines[4] == "4,2,10,10,1"

    path = tmp_path / "t.csv"
    rc, _, _ = run(capsys, "tradeoff", "--n", "14", "--k", "10",
                   "--out", str(path))
    assert rc == 0
    assert path.read_text() == out


def test_reproduce_example2(capsys):
    rc, out, _ = run(capsys, "reproduce", "example2")
    assert rc == 0
    assert "example2: PASS" in out
    assert out.count(" ok") == 17 * 3


def test_reproduce_example2_json(capsys):
    rc, out, _ = run(capsys, "--json", "reproduce", "example2")
    payload = json.loads(out)
    assert payload["pass"] is True
    bits = [c["got"] for c in payload["checks"] if c["label"].endswith("bits")]
    assert bits == [300] * 7 + [220] * 6 + [156] * 4


def test_reproduce_unknown_name_is_usage_error(capsys):
    with pytest.raises(SystemExit) as e:
        run(capsys, "reproduce", "example3")
    assert e.value.code == 2


def test_console_script_is_wired():
    exe = shutil.which("perepair")
    if exe is None:
        pytest.skip("console script not installed")
    proc = subprocess.run([exe, "bound", "--k", "9", "--t", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "9699690"
