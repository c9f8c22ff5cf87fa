import json

from symlift.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    payload = json.loads(out.splitlines()[0]) if out.startswith("{") else out
    return code, payload


def test_lift_kernel_rho(capsys):
    code, payload = run(
        capsys, "lift", "kernel", "--n", "3", "--route", "both", "--word", "r[1] r[2] r[3]"
    )
    assert code == 0
    assert payload["schema"] == "symlift/1"
    assert payload["verdict"] == "in" and payload["agree"] is True


def test_lift_kernel_negative_exit(capsys):
    code, payload = run(capsys, "lift", "kernel", "--n", "3", "--word", "a[1,2]")
    assert code == 1 and payload["verdict"] == "out"


def test_lift_eval(capsys):
    code, payload = run(capsys, "lift", "eval", "--n", "3", "--word", "a[1,2]")
    assert code == 0
    assert payload["restriction"]["images"] == {"x1": "x2 x1^-1 x2", "x2": "x2"}


def test_symaut_relations(capsys):
    code, payload = run(capsys, "symaut", "relations", "--n", "4")
    assert code == 0 and payload["relations"]["all_pass"]


def test_symaut_eval_and_nf(capsys):
    code, payload = run(capsys, "symaut", "eval", "--n", "3", "--word", "a[1,2]")
    assert code == 0
    assert payload["images"][0] == {"conjugator": "y2", "target": 1, "sign": 1}
    code, payload = run(capsys, "symaut", "nf", "--n", "3", "--word", "r[2] a[1,2]")
    assert code == 0 and payload["pure"] == "a[1,2]^-1" and payload["rho"] == [0, 1, 0]


def test_words_commands(capsys):
    code, payload = run(capsys, "words", "normalize", "--ctx", "F:3", "--word", "y1 y1^-1 y2")
    assert code == 0 and payload["word"] == "y2"
    code, payload = run(
        capsys, "words", "conjugacy", "--ctx", "H:3:2", "--u", "z1 z2 z1", "--v", "z2"
    )
    assert code == 0 and payload["witness"] == "z1"
    code, payload = run(
        capsys, "words", "inner", "--ctx", "H:3:2", "--images", "z2 z1 z2;z2;z3"
    )
    assert code == 1 and payload["inner"] is False
    code, payload = run(capsys, "words", "project", "--n", "2", "--k", "3", "--word", "y1^4 y2^3")
    assert code == 0 and payload["word"] == "z1"
    code, payload = run(capsys, "words", "even-to-x", "--n", "3", "--word", "z1 z2")
    assert code == 0 and payload["word"] == "x1 x2^-1"


def test_kernel_certify_and_verify(capsys, tmp_path):
    code, payload = run(capsys, "kernel", "certify", "--n", "3", "--word", "a[1,2] a[1,2]")
    assert code == 0 and payload["status"] == "certified"
    cert_file = tmp_path / "cert.json"
    cert_file.write_text(json.dumps(payload["certificate"]))
    code, payload = run(
        capsys, "kernel", "verify", "--cert", str(cert_file), "--word", "a[1,2] a[1,2]"
    )
    assert code == 0 and payload["verified"] is True
    # mismatched target word
    code, payload = run(capsys, "kernel", "verify", "--cert", str(cert_file), "--word", "a[1,2]")
    assert code == 1 and payload["verified"] is False
    code, payload = run(capsys, "kernel", "certify", "--n", "3", "--word", "a[1,2]")
    assert code == 1 and payload["status"] == "absent"


def test_complex_commands(capsys):
    code, payload = run(capsys, "complex", "poset", "--n", "3")
    assert code == 0 and payload["poset"]["size"] == 4
    code, payload = run(capsys, "complex", "homology", "--n", "3")
    assert code == 0 and payload["homology"]["euler_characteristic"] == 1
    code, payload = run(capsys, "complex", "ball", "--ctx", "H:3:2", "--radius", "1")
    assert code == 0 and payload["ball"]["counts"] == [1, 3]
    code, out = run(capsys, "complex", "poset", "--n", "3", "--format", "dot")
    assert code == 0 and out.startswith("digraph")
    code, payload = run(capsys, "complex", "stabilizer", "--n", "3", "--tree", "1,3;3,2")
    assert code == 0 and payload["stabilizer"]["vertex_auts"] == ["a[1,3]"]
    code, payload = run(
        capsys, "complex", "quotient-check", "--n", "3", "--samples", "8", "--seed", "3"
    )
    assert code == 0 and payload["quotient_check"]["all_pass"]


def test_braid_commands(capsys):
    code, payload = run(capsys, "braid", "act", "--n", "3", "--word", "1")
    assert code == 0 and payload["images"][0]["conjugator"] == "y1"
    code, payload = run(
        capsys, "braid", "search", "--n", "3", "--k", "2", "--max-len", "3"
    )
    assert code == 0 and payload["search"]["flagged"] == []


def test_malformed_input_exits_2(capsys):
    code, payload = run(capsys, "lift", "kernel", "--n", "3", "--word", "a[1,1]")
    assert code == 2 and "error" in payload
    code, payload = run(capsys, "words", "normalize", "--ctx", "Q:9", "--word", "e")
    assert code == 2 and "error" in payload


def test_usage_error_exits_2(capsys):
    assert main(["lift", "kernel", "--n", "3"]) == 2  # missing --word
    capsys.readouterr()


def test_selftest_fault_injection(capsys, monkeypatch):
    # corrupt one relation family and expect the named check to fail
    import symlift.symaut as symaut_mod

    def broken(n, ctx):
        from symlift.symaut import RelationCheck

        yield RelationCheck("injected_fault", (0,), False)

    monkeypatch.setattr(
        symaut_mod, "RELATION_FAMILIES", symaut_mod.RELATION_FAMILIES + (broken,)
    )
    code, payload = run(capsys, "selftest", "--level", "quick", "--seed", "3")
    assert code == 1
    failing = [c for c in payload["checks"] if not c["passed"]]
    assert [c["name"] for c in failing] == ["presentation"]
    assert "injected_fault(0,)" in failing[0]["ranks"]["3"]["failures"]
