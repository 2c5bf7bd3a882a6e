import json
from pathlib import Path

import pytest

from lwecert.cli import main

ROOT = Path(__file__).resolve().parent.parent

# seeded invocations whose artifacts must replay byte for byte; {d} is the run directory
REPLAY = [
    "sample --n 2 --m 3 --q 13 --alpha 1/221 --seed 0 --out {d}/inst.json",
    "cert gen --instance {d}/inst.json --out {d}/cert.json",
    "cert verify --instance {d}/inst.json --cert {d}/cert.json --out {d}/verify.json",
    "invert --instance {d}/inst.json --method bruteforce --out {d}/inv_bf.json",
    "invert --instance {d}/inst.json --method trapdoor --cert {d}/cert.json --out {d}/inv_td.json",
    "invert --instance {d}/inst.json --method oracle:bruteforce --out {d}/inv_obf.json",
    "invert --instance {d}/inst.json --method oracle:trapdoor --cert {d}/cert.json --out {d}/inv_otd.json",
    "lattice qary-basis --matrix {d}/A.json --out {d}/qary.json",
    "lattice minima --matrix {d}/A.json --kind qary --bound 169 --k 3 --out {d}/minima.json",
    "experiment rank --n 2 --m 6 --q 5 --trials 500 --seed 3 --out {d}/rank.json",
    "experiment tail --n 4 --m 16 --q 257 --alpha 1/20 --trials 300 --seed 7 --out {d}/tail.json",
    "experiment short --n 1 --m 4 --q 11 --r 2 --trials 200 --seed 5 --out {d}/short.json",
    "experiment transference --n 1 --m 3 --q 7 --trials 10 --seed 9 --out {d}/transference.json",
    "experiment count-lattices --n 2 --m 3 --q 3 --out {d}/count.json",
    "laq gen-script inner_nonneg --n 2 --out {d}/gen.json",
    "laq check " + str(ROOT / "scripts" / "inner_nonneg_n2.laq") + " --out {d}/check.json",
    "translate --formula (lt (*f a b) c) --precision 2 --check-equiv 200 --seed 11 --export cnf "
    "--out {d}/translate.json",
]


def run_replay(d: Path) -> dict[str, bytes]:
    d.mkdir(parents=True, exist_ok=True)
    (d / "A.json").write_text(json.dumps({"rows": 3, "cols": 1, "modulus": 13, "entries": [1, 5, 8]}))
    for line in REPLAY:
        argv = [a.replace("{d}", str(d)) for a in _split(line)]
        code = main(argv)
        assert code == 0, (line, code)
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def _split(line: str) -> list[str]:
    # keep the parenthesised formula in one argument
    if "--formula (" in line:
        head, rest = line.split("--formula ", 1)
        depth, k = 0, 0
        for k, ch in enumerate(rest):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0:
                break
        return head.split() + ["--formula", rest[:k + 1]] + rest[k + 1:].split()
    return line.split()


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_replay_is_byte_identical(tmp_path):
    first = run_replay(tmp_path / "a")
    second = run_replay(tmp_path / "b")
    assert first.keys() == second.keys() and len(first) == len(REPLAY) + 1
    for name in first:
        assert first[name] == second[name], name


def test_sample_without_seed_records_one(tmp_path, capsys):
    code, out, _ = run(["sample", "--n", "1", "--m", "2", "--q", "5", "--json"], capsys)
    assert code == 0
    assert isinstance(json.loads(out)["seed"], int)


def test_cert_round_trip_and_invert(tmp_path, capsys):
    inst, cert = tmp_path / "i.json", tmp_path / "c.json"
    assert run(["sample", "--n", "2", "--m", "3", "--q", "13", "--alpha", "1/221", "--seed", "5",
                "--out", str(inst)], capsys)[0] == 0
    assert run(["cert", "gen", "--instance", str(inst), "--out", str(cert)], capsys)[0] == 0
    code, out, _ = run(["cert", "verify", "--instance", str(inst), "--cert", str(cert), "--json"], capsys)
    assert code == 0 and json.loads(out)["valid"] is True
    code, out, _ = run(["invert", "--instance", str(inst), "--method", "oracle:trapdoor", "--cert",
                        str(cert), "--json"], capsys)
    data = json.loads(out)
    sample = json.loads(inst.read_text())["instance"]
    assert code == 0 and data["preimage"] == {"s": sample["s"], "epsilon": sample["epsilon"]}
    assert data["queries"] == 2 * 4 + 3 * 5


def test_domain_outcomes_exit_1(tmp_path, capsys):
    inst = tmp_path / "i.json"
    run(["sample", "--n", "2", "--m", "3", "--q", "13", "--alpha", "1/221", "--seed", "1", "--out", str(inst)], capsys)
    code, _, err = run(["cert", "gen", "--instance", str(inst)], capsys)
    assert code == 1 and json.loads(err)["error"] == "domain"
    code, _, _ = run(["invert", "--instance", str(inst), "--method", "bruteforce", "--z", "1,2"], capsys)
    assert code == 2
    code, _, _ = run(["translate", "--formula", "(lti i j)", "--sigma", _write(tmp_path, {"index": {"i": 9, "j": 1}}),
                      "--precision", "2"], capsys)
    assert code == 1


def _write(tmp_path, obj) -> str:
    p = tmp_path / "obj.json"
    p.write_text(json.dumps(obj))
    return str(p)


def test_laq_check_shipped_script(capsys):
    code, out, _ = run(["laq", "check", str(ROOT / "scripts" / "cauchy_schwarz_n2.laq"), "--json"], capsys)
    assert code == 0 and json.loads(out)["accepted"]


def test_laq_check_rejects_mutated_script(tmp_path, capsys):
    text = (ROOT / "scripts" / "inner_nonneg_n1.laq").read_text().replace("Ord8", "Ord7")
    f = tmp_path / "bad.laq"
    f.write_text(text)
    code, out, _ = run(["laq", "check", str(f), "--json"], capsys)
    assert code == 1 and json.loads(out)["step"] == "s14"


def test_laq_eval(tmp_path, capsys):
    v = _write(tmp_path, {"field": {"x": "1/2"}})
    code, out, _ = run(["laq", "eval", "(int (*f 2f x))", v, "--json"], capsys)
    assert code == 0 and json.loads(out)["value"] is True


def test_gen_script_prints_text(capsys):
    code, out, _ = run(["laq", "gen-script", "inner_nonneg", "--n", "1"], capsys)
    assert code == 0 and out == (ROOT / "scripts" / "inner_nonneg_n1.laq").read_text()


def test_experiment_tail(capsys):
    code, out, _ = run(["experiment", "tail", "--n", "4", "--m", "16", "--q", "257", "--alpha", "1/20",
                        "--trials", "2000", "--seed", "7", "--json"], capsys)
    rep = json.loads(out)["report"]
    assert code == 0 and rep["successes"] / rep["trials"] >= 0.99


@pytest.mark.parametrize("argv", [["nosuch"], ["sample", "--n", "2", "--m", "3", "--q", "5", "--alpha", "0.5"],
                                  ["laq", "gen-script", "inner_nonneg", "--n", "9"],
                                  ["sample", "--n", "1", "--m", "1", "--q", "5", "--max-nodes", "0"]])
def test_usage_errors_exit_2(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_resource_ceiling_exit_3(tmp_path, capsys):
    m = _write(tmp_path, {"rows": 4, "cols": 3, "modulus": 101, "entries": list(range(12))})
    code, _, err = run(["lattice", "lambda1", "--matrix", m, "--kind", "modular", "--bound", "50",
                        "--max-nodes", "100"], capsys)
    assert code == 3 and json.loads(err)["error"] == "resource"
