import json
import subprocess
import sys
import pytest

from hoteq.cli import main
from hoteq.io import (FormatError, fixture_names, instance_to_dict, load_instance,
                      loads_instance, parse_result)
from hoteq.reflect import gen_hard


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, json.loads(out.out) if out.out.strip() else None, out.err


def test_verify_fig1(capsys):
    code, doc, _ = run(capsys, "verify", "--instance", "fig1.json", "--profile", "0,2,10")
    assert code == 0 and doc["status"] == "equilibrium"
    assert doc["utilities"] == ["10", "10", "10"]


def test_verify_fig1_failure_witness(capsys):
    code, doc, _ = run(capsys, "verify", "--instance", "fig1.json", "--profile", "0,5,10")
    assert code == 1 and doc["status"] == "none"
    assert doc["witness"]["candidate"] == 2 and doc["witness"]["gain"] == "10"


def test_verify_table1_embedded_profile(capsys):
    code, doc, _ = run(capsys, "verify", "--instance", "table1.json")
    assert code == 0 and doc["profile"][0] == "7/4"


def test_verify_eps(capsys):
    code, doc, _ = run(capsys, "verify", "--instance", "fig1.json", "--profile", "0,5,10",
                       "--epsilon", "10")
    assert code == 0 and doc["status"] == "eps_equilibrium"


def test_profile_ambiguity(capsys):
    code, doc, err = run(capsys, "verify", "--instance", "table1.json", "--profile", "1,2,3,4,5,6,7,8")
    assert code == 2 and doc["status"] == "error" and "both" in err


def test_delta_ambiguity(capsys):
    code, _, err = run(capsys, "el-check", "--instance", "violation.json", "--delta", "1/100")
    assert code == 2 and "delta" in err


def test_missing_profile(capsys):
    code, _, err = run(capsys, "verify", "--instance", "fig1.json")
    assert code == 2 and "profile" in err


def test_bad_profile_text(capsys):
    code, _, err = run(capsys, "verify", "--instance", "fig1.json", "--profile", "0,x,10")
    assert code == 2 and "--profile" in err
    code, _, _ = run(capsys, "verify", "--instance", "fig1.json", "--profile", "0,0,10")
    assert code == 2


def test_unknown_instance(capsys):
    code, doc, err = run(capsys, "solve", "--instance", "nope.json")
    assert code == 2 and "nope.json" in err


def test_argparse_errors_exit_2(capsys):
    assert main(["solve"]) == 2
    assert main(["frobnicate"]) == 2
    capsys.readouterr()


def test_solve_modes(capsys):
    code, doc, _ = run(capsys, "solve", "--instance", "fig1.json")
    assert code == 0 and doc["mode"] == "grid" and doc["profile"] == ["0", "2", "10"]
    code, doc, _ = run(capsys, "solve", "--instance", "fig1.json", "--mode", "grid", "--epsilon", "1")
    assert code == 2


def test_solve_finite_set(tmp_path, capsys):
    doc = {"version": 1, "m": 3, "space": {"type": "finite", "positions": ["1", "3", "4", "6", "7"]},
           "voters": {"atoms": [{"pos": "1", "weight": "2"}, {"pos": "5", "weight": "3"},
                                {"pos": "7", "weight": "2"}]}}
    path = tmp_path / "noeq.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "solve", "--instance", str(path))
    assert code == 1 and out["status"] == "none" and out["mode"] == "dp"
    code, out, _ = run(capsys, "oracle", "--instance", str(path))
    assert code == 1 and out["count"] == 0
    code, out, _ = run(capsys, "solve", "--instance", str(path), "--epsilon", "7")
    assert code == 0 and out["status"] == "eps_equilibrium"


def test_deviate(capsys):
    code, doc, _ = run(capsys, "deviate", "--instance", "fig1.json", "--profile", "0,2,10", "--gap", "2")
    assert code == 0 and doc["status"] == "equilibrium"
    code, doc, _ = run(capsys, "deviate", "--instance", "fig1.json", "--profile", "0,5,10", "--gap", "1")
    assert code == 0 and doc["status"] == "none"
    code, _, _ = run(capsys, "deviate", "--instance", "fig1.json", "--profile", "0,2,10", "--gap", "4")
    assert code == 2


def test_shift_and_gen_hard(tmp_path, capsys):
    inst, _ = load_instance("fig4.json")
    path = tmp_path / "fig4_bare.json"
    path.write_text(json.dumps(instance_to_dict(inst)))
    code, doc, _ = run(capsys, "shift", "--instance", str(path), "--profile", "0,2,29/3,16,18")
    assert code == 0 and doc["profile"][2] == "19/2" and len(doc["trace"]) == 1
    code, doc, _ = run(capsys, "gen-hard", "--k", "2")
    assert code == 0 and doc["profile"][0] == "7/4"
    inst, _ = loads_instance(json.dumps(doc["instance"]))
    assert inst == gen_hard(2)[0]
    code, _, _ = run(capsys, "gen-hard", "--k", "0")
    assert code == 2


def test_el_check_and_quantiles(capsys):
    code, doc, _ = run(capsys, "el-check", "--instance", "violation.json")
    assert code == 0 and all(doc["conditions"].values())
    code, doc, _ = run(capsys, "verify", "--instance", "violation.json")
    assert code == 1
    code, doc, _ = run(capsys, "quantiles", "--instance", "violation.json")
    assert code == 0 and doc["guarantee"]["kind"] == "quantile"


def test_outputs_are_deterministic(capsys):
    first = run(capsys, "solve", "--instance", "fig1.json")
    second = run(capsys, "solve", "--instance", "fig1.json")
    assert first == second


def test_result_round_trip(capsys):
    main(["verify", "--instance", "fig1.json", "--profile", "0,2,10"])
    doc = parse_result(capsys.readouterr().out)
    assert doc["profile"] == [0, 2, 10]


def test_instance_round_trip():
    for name in fixture_names():
        inst, extras = load_instance(name)
        again, extras2 = loads_instance(json.dumps(
            instance_to_dict(inst, extras.get("profile"), extras.get("delta"))))
        assert again == inst and extras2 == extras


@pytest.mark.parametrize("doc, where", [
    ({"m": 1}, "instance.version"),
    ({"version": 1, "m": 0}, "instance.m"),
    ({"version": 1, "m": 1, "space": {"type": "disc"}}, "instance.space.type"),
    ({"version": 1, "m": 1, "space": {"type": "interval", "R": 3}}, "instance.space.R"),
    ({"version": 1, "m": 1, "space": {"type": "interval", "R": "3"},
      "voters": {"atoms": [{"pos": "1.5", "weight": "1"}]}}, "instance.voters.atoms[0].pos"),
])
def test_format_errors_name_field(doc, where):
    with pytest.raises(FormatError, match=None) as info:
        loads_instance(json.dumps(doc))
    assert where in str(info.value)


def test_json_errors_give_position():
    with pytest.raises(FormatError, match=r"<string>:1:\d+"):
        loads_instance("{")


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hoteq.cli", "verify", "--instance", "fig1.json",
                           "--profile", "0,2,10"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "equilibrium"
