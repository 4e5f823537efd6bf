import json
import subprocess
import sys

import pytest

from rpa_rm import records
from rpa_rm.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_encode_formats(capsys):
    assert run(capsys, "encode", "--m", "2", "--r", "1", "--message", "001") == (0, "0101\n", "")
    code, out, _ = run(capsys, "encode", "--m", "3", "--r", "1", "--message", "1000", "--format", "hex")
    assert (code, out) == (0, "ff\n")
    code, out, _ = run(capsys, "encode", "--m", "3", "--r", "1", "--message", "0100", "--format", "json")
    rec = json.loads(out)
    assert rec["codeword"] == "00001111" and rec["k"] == 4 and rec["command"] == "encode"


def test_encode_length_mismatch_is_domain_error(capsys):
    code, _, err = run(capsys, "encode", "--m", "3", "--r", "1", "--message", "01")
    assert code == 1 and "expected 4 bits" in err


def test_decode(capsys):
    code, out, _ = run(capsys, "decode", "--m", "3", "--r", "1", "--llrs", "1,1,1,-1,1,1,1,1")
    assert (code, out) == (0, "00000000\n")
    code, out, _ = run(capsys, "decode", "--m", "4", "--r", "2", "--llrs", ",".join(["2"] * 15 + ["-2"]), "--format", "json")
    assert json.loads(out)["codeword"] == "0" * 16
    code, _, _ = run(capsys, "decode", "--m", "3", "--r", "1", "--llrs", "1,1")
    assert code == 1


def test_simulate_json_and_csv(capsys, tmp_path):
    args = ["simulate", "--m", "5", "--r", "2", "--channel", "bsc:0.05", "--trials", "200", "--seed", "4"]
    code, out, _ = run(capsys, *args)
    rec = json.loads(out)
    assert code == 0 and rec["trials_run"] == 200 and rec["Z"] == pytest.approx(2 * (0.05 * 0.95) ** 0.5)
    dest = tmp_path / "r.csv"
    code, out, _ = run(capsys, *args, "--workers", "2", "--format", "csv", "--out", str(dest), "--with-bound")
    assert code == 0 and out == ""
    back = records.from_csv(dest.read_text(), "simulate+bound")[0]
    assert back["frame_errors"] == rec["frame_errors"] and back["workers"] == 2
    assert back["bound_log_q_r"] is not None


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"m": 5, "r": 2, "channel": "bec:0.3", "trials": 128, "seed": 8}))
    code, out, _ = run(capsys, "simulate", "--config", str(cfg), "--trials", "256")
    rec = json.loads(out)
    assert code == 0 and rec["trials"] == 256 and rec["seed"] == 8 and rec["channel"] == "bec:0.3"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "simulate", "--config", str(cfg))[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", "--m", "5", "--r", "2", "--channel", "bsc:0.05", "--trials", "0"],
        ["simulate", "--m", "5", "--r", "2", "--channel", "bsc:0.6", "--trials", "10"],
        ["bound", "--m", "6", "--r", "2", "--z", "0.3", "--channel", "bsc:0.1"],
        ["bound", "--m", "6", "--r", "2"],
        ["channel", "--channel", "bsc:0.6"],
        ["encode", "--m", "3"],
        ["nonsense"],
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_bound_and_threshold(capsys):
    code, out, _ = run(capsys, "bound", "--m", "128", "--z", "0.6", "--r", "7")
    rec = json.loads(out)
    assert code == 0 and rec["threshold"] == pytest.approx(7.126, abs=1e-3) and rec["r_below_threshold"]
    code, out, _ = run(capsys, "bound", "--m", "6", "--r", "5", "--z", "0.9")
    rec = json.loads(out)
    assert rec["vacuous"] and rec["q_r_clamped"] == 1.0
    code, out, _ = run(capsys, "threshold", "--m", "128", "--channel", "bsc:0.1", "--format", "csv")
    row = records.from_csv(out, "threshold")[0]
    assert row["Z"] == pytest.approx(0.6)


def test_channel_command(capsys):
    code, out, _ = run(capsys, "channel", "--channel", "bsc:0.1", "--combine", "1")
    rec = json.loads(out)
    assert rec["combined_z"][0] == pytest.approx(0.768375, abs=1e-6)
    assert rec["z_upper_bound"][0] == pytest.approx(0.84)
    code, out, _ = run(capsys, "channel", "--channel", "awgn:1.0", "--combine", "2")
    rec = json.loads(out)
    assert rec["quantize_levels"] == 64 and len(rec["combined_z"]) == 2
    assert all(z <= b + 1e-9 for z, b in zip(rec["combined_z"], rec["z_upper_bound"]))


def test_help_lists_columns():
    proc = subprocess.run([sys.executable, "-m", "rpa_rm", "simulate", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "fer_ci95_high" in proc.stdout
