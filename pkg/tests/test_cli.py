import json
import subprocess
import sys

import pytest

from danzerkit.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_corollary_csv(capsys):
    code, out, _ = run(["gen", "--construction", "corollary", "--dim", "2", "--eta", "1", "--window", "-8", "8", "-8", "8"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "# dim=2"
    assert all(len(l.split(",")) == 2 for l in lines[1:])


@pytest.mark.parametrize("construction", ["optical", "peres-golden", "peres-sud"])
def test_gen_other_constructions(construction, capsys):
    code, out, _ = run(["gen", "--construction", construction, "--window", "-3", "3", "-3", "3"], capsys)
    assert code == 0 and out.startswith("# dim=2\n") and len(out.splitlines()) > 10


def test_gen_net(capsys):
    code, out, _ = run(["gen", "--construction", "net", "--dim", "2", "--n", "1"], capsys)
    assert code == 0 and len(out.splitlines()) == 115


def test_block_verify_json(capsys):
    code, out, _ = run(["dispersion", "--block-verify", "--i", "2"], capsys)
    rep = json.loads(out)
    assert rep["max_window_defect_exact"] == "241/512"
    assert rep["pass"] is False and rep["certified_bound"] is None
    assert code == 1


def test_block_verify_exact_sup(capsys):
    code, out, _ = run(["dispersion", "--block-verify", "--i", "1", "--exact-sup"], capsys)
    rep = json.loads(out)
    assert rep["exact_sup_over_xi"]["exact"] == "1/4"
    assert rep["exact_sup_within_claim"] is True


def test_netcheck(capsys):
    code, out, _ = run(["netcheck", "--dim", "2", "--n", "1"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["epsilon"] == 0.25 and rep["max_empty_area"] < 0.25 and rep["pass"] is True


def test_netcheck_3d_reports_failure(capsys):
    code, out, _ = run(["netcheck", "--dim", "3", "--n", "1", "--resolution", "4"], capsys)
    rep = json.loads(out)
    assert rep["exact"] is False and rep["pass"] is False and code == 1


def test_dispersion_modes(capsys):
    code, out, _ = run(["dispersion", "--points", "0", "1/4", "1/2", "3/4"], capsys)
    assert json.loads(out)["dispersion"]["exact"] == "1/8" and code == 0
    code, out, _ = run(["dispersion", "--sequence", "sud", "--N", "16", "--m", "2", "--xi", "1/8"], capsys)
    assert code == 0 and json.loads(out)["dispersion"]["exact"] is not None
    code, out, _ = run(["dispersion", "--sequence", "golden", "--N", "16"], capsys)
    assert code == 0 and json.loads(out)["dispersion"]["exact"] is None
    code, out, _ = run(["dispersion", "--sequence", "sud", "--N", "8", "--m-max", "3", "--xi-grid", "3"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["m_range"] == [0, 3] and "argmax_m" in rep


def test_density(capsys):
    code, out, _ = run(["density", "--construction", "corollary", "--T", "4", "8", "16"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["pass"] is True and len(rep["series_density_bound"]) == 3
    code, out, _ = run(["density", "--construction", "optical", "--T", "4", "8"], capsys)
    assert code == 0 and "band_d_log" in json.loads(out)


def test_seq(capsys):
    code, out, _ = run(["seq", "--start", "1", "--stop", "10"], capsys)
    lines = out.splitlines()
    assert lines[0] == "index,value_numerator,value_log2_denominator"
    assert lines[5] == "5,1,1"
    assert lines[2] == "2,0,9"
    code2, out2, _ = run(["seq", "--start", "1", "--stop", "10", "--sequence", "interleave"], capsys)
    assert out2 == out


def test_visibility_probe_and_curve(capsys, tmp_path):
    code, out, _ = run(["visibility", "--construction", "corollary", "--epsilon", "0.5", "0.25", "--count", "50"], capsys)
    rep = json.loads(out)
    assert code == 0 and len(rep["probes"]) == 2 and rep["pass"] is True
    csv_path = tmp_path / "c.csv"
    code, out, _ = run(["visibility", "--construction", "peres-golden", "--curve", "--epsilon", "0.5", "0.25",
                        "--count", "30", "--ladder-steps", "20", "--out-csv", str(csv_path)], capsys)
    assert code == 0
    assert csv_path.read_text().splitlines()[0] == "epsilon,length"


def test_usage_errors(capsys):
    code, _, err = run(["gen", "--construction", "corollary", "--window", "1", "2"], capsys)
    assert code == 2 and "window" in err
    code, _, _ = run(["dispersion", "--block-verify", "--i", "4"], capsys)
    assert code == 2
    code, _, _ = run(["visibility", "--construction", "optical", "--epsilon", "0.5"], capsys)
    assert code == 2
    code, _, _ = run(["seq", "--start", "0"], capsys)
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        main(["nosuch"])
    assert exc.value.code == 2


def test_budget_exit_code(capsys):
    code, _, err = run(["gen", "--construction", "corollary", "--window", "-800", "800", "-800", "800", "--budget", "1000"], capsys)
    assert code == 3 and "lattice-forests" in err
    code, _, err = run(["gen", "--construction", "peres-golden", "--window", "-800", "800", "-800", "800", "--budget", "10"], capsys)
    assert code == 3 and "peres-forest" in err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "danzerkit", "seq", "--stop", "3"], capture_output=True, text=True, check=True)
    assert out.stdout.splitlines()[1] == "1,0,1"


def test_threads_flag_does_not_change_output(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["--threads", "1", "netcheck", "--n", "1", "--out", str(a)])
    main(["--threads", "2", "netcheck", "--n", "1", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
