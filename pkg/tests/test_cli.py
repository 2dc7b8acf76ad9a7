import json

from click.testing import CliRunner

from fillink.cli import main


def run(*args):
    return CliRunner().invoke(main, list(args))


class TestMatrixCommand:
    def test_k1_table(self):
        result = run("matrix", "--dim", "2", "--k", "1", "--standard")
        assert result.exit_code == 0, result.output
        assert "(1-x) P_y" in result.output
        assert "(1-y) l_xy" in result.output
        assert "injective: yes" in result.output

    def test_k0_identity_3d(self):
        result = run("matrix", "--dim", "3", "--k", "0", "--standard")
        assert result.exit_code == 0
        lines = [l for l in result.output.splitlines() if l.strip().startswith("P_")]
        assert len(lines) == 3

    def test_json_output(self, tmp_path):
        target = tmp_path / "matrix.json"
        result = run("matrix", "--dim", "2", "--k", "2", "--json", str(target))
        assert result.exit_code == 0
        data = json.loads(target.read_text())
        assert data["matrix"]["entries"][3] == [0, 0, 1, 4]
        assert data["matrix"]["k"] == 2

    def test_link_file(self, tmp_path):
        spec = {
            "dim": 2,
            "components": [{"direction": [1, -1], "label": "l_0", "offsetSeed": 1}],
        }
        path = tmp_path / "link.json"
        path.write_text(json.dumps(spec))
        result = run("matrix", "--dim", "2", "--k", "1", "--link", str(path))
        assert result.exit_code == 0
        assert "injective: no" in result.output
        assert "kernel witness" in result.output

    def test_standard_and_link_conflict(self, tmp_path):
        path = tmp_path / "link.json"
        path.write_text("{}")
        result = run("matrix", "--dim", "2", "--k", "1", "--standard", "--link", str(path))
        assert result.exit_code == 2

    def test_bad_link_is_usage_error(self, tmp_path):
        path = tmp_path / "link.json"
        path.write_text(json.dumps({"dim": 2, "components": []}))
        result = run("matrix", "--dim", "3", "--k", "0", "--link", str(path))
        assert result.exit_code == 2


class TestCertifyCommand:
    def test_m2_trivial(self):
        result = run("certify", "--dim", "2", "--m", "2")
        assert result.exit_code == 0
        assert "CERTIFIED" in result.output

    def test_m5_both_modes(self):
        result = run("certify", "--dim", "2", "--m", "5", "--mode", "both")
        assert result.exit_code == 0
        assert "oracle agrees" in result.output
        assert "CERTIFIED" in result.output

    def test_m5_3d(self, tmp_path):
        target = tmp_path / "cert.json"
        result = run("certify", "--dim", "3", "--m", "5", "--json", str(target))
        assert result.exit_code == 0
        data = json.loads(target.read_text())
        assert data["verdict"] is True
        assert len(data["link"]["components"]) == 7

    def test_bad_m_exits_2(self):
        result = run("certify", "--dim", "2", "--m", "1")
        assert result.exit_code == 2


class TestWordCommand:
    def test_triple_commutator(self):
        result = run("word", "[[x,y],z]")
        assert result.exit_code == 0
        assert "lower-central depth: 3" in result.output
        assert "phi_3 image:" in result.output

    def test_commutator_depth2(self):
        result = run("word", "[x,y]")
        assert result.exit_code == 0
        assert "lower-central depth: 2" in result.output

    def test_generator_no_phi(self):
        result = run("word", "x")
        assert result.exit_code == 0
        assert "lower-central depth: 1" in result.output
        assert "not applicable" in result.output

    def test_parse_error_exits_2(self):
        result = run("word", "[x,")
        assert result.exit_code == 2


class TestFingersCommand:
    def test_small_sweep(self):
        result = run("fingers", "--dim", "2", "--k", "2", "--seeds", "5")
        assert result.exit_code == 0
        assert "no violations" in result.output

    def test_save_and_replay(self, tmp_path):
        saved = tmp_path / "map.json"
        result = run(
            "fingers", "--dim", "2", "--k", "1", "--seeds", "1",
            "--save-map", str(saved), "--seed", "3",
        )
        assert result.exit_code == 0 and saved.exists()
        replay = run("fingers", "--dim", "2", "--k", "1", "--replay", str(saved))
        assert replay.exit_code == 0
        assert "checked 1 map(s)" in replay.output

    def test_missing_replay_file(self):
        result = run("fingers", "--replay", "/nonexistent/map.json")
        assert result.exit_code == 2


class TestFailureExitCodes:
    def test_failed_certificate_exits_4(self, monkeypatch):
        import fillink.cli as cli_mod

        def fake_post(server, path, payload):
            return {
                "m": 4,
                "dim": 2,
                "link": {"dim": 2, "components": []},
                "degrees": [
                    {
                        "j": 0,
                        "injective": False,
                        "matrixRef": "deg-0",
                        "boundaryVanishing": True,
                        "oracleChecked": False,
                        "oracleMatch": None,
                        "ranks": {"bareiss": 1, "smith": 1},
                        "kernelWitness": [1, -1],
                    }
                ],
                "verdict": False,
                "lemmaChain": [],
                "geometricDepth": 0,
                "matrices": {},
            }

        monkeypatch.setattr(cli_mod, "_post", fake_post)
        result = run("certify", "--dim", "2", "--m", "4")
        assert result.exit_code == 4
        assert "FAILED" in result.output
        assert "kernel witness" in result.output

    def test_finger_violations_exit_4(self, monkeypatch):
        import fillink.cli as cli_mod

        def fake_post(server, path, payload):
            return {
                "dim": 2,
                "k": 1,
                "link": {"dim": 2, "components": []},
                "seedsChecked": 1,
                "elementsPerSeed": 3,
                "ok": False,
                "violations": [
                    {
                        "element": "(1-x) P_x",
                        "line": "l_xy",
                        "filtration": 1,
                        "required": 2,
                        "seed": 0,
                    }
                ],
                "savedMap": None,
            }

        monkeypatch.setattr(cli_mod, "_post", fake_post)
        result = run("fingers", "--dim", "2", "--k", "1", "--seeds", "1")
        assert result.exit_code == 4
        assert "violation" in result.output

    def test_oracle_disagreement_exits_3(self, monkeypatch):
        import fillink.cli as cli_mod

        def fake_post(server, path, payload):
            return {
                "link": {"dim": 2, "components": []},
                "matrix": {"k": 0, "rows": ["P_y"], "cols": ["l_y"], "entries": [[1]]},
                "geometric": {"k": 0, "rows": ["P_y"], "cols": ["l_y"], "entries": [[2]]},
                "modesAgree": False,
                "injective": True,
                "kernelWitness": None,
            }

        monkeypatch.setattr(cli_mod, "_post", fake_post)
        result = run("matrix", "--dim", "2", "--k", "0", "--mode", "both")
        assert result.exit_code == 3
        assert "NO" in result.output


class TestGeometricMode:
    def test_matrix_geometric_mode(self):
        result = run("matrix", "--dim", "2", "--k", "1", "--mode", "geometric")
        assert result.exit_code == 0
        assert "injective: yes" in result.output

    def test_matrix_both_modes_agree(self):
        result = run("matrix", "--dim", "3", "--k", "1", "--mode", "both")
        assert result.exit_code == 0
        assert "geometric oracle agreement: yes" in result.output


class TestRemoteServer:
    def test_cli_against_running_service(self, tmp_path):
        import socket
        import subprocess
        import sys
        import time

        import httpx

        with socket.socket() as probe:
            probe.bind(("127.0.0.1", 0))
            port = probe.getsockname()[1]
        proc = subprocess.Popen(
            [sys.executable, "-m", "uvicorn", "fillink.service:app", "--port", str(port)],
            stdout=subprocess.DEVNULL,
            stderr=subprocess.DEVNULL,
        )
        base = f"http://127.0.0.1:{port}"
        try:
            for _ in range(100):
                try:
                    if httpx.get(f"{base}/health", timeout=1.0).status_code == 200:
                        break
                except httpx.HTTPError:
                    time.sleep(0.1)
            else:
                raise RuntimeError("service did not come up")
            result = run("--server", base, "matrix", "--dim", "2", "--k", "1")
            assert result.exit_code == 0, result.output
            assert "injective: yes" in result.output
            word_result = run("--server", base, "word", "[x,y]")
            assert word_result.exit_code == 0
            assert "lower-central depth: 2" in word_result.output
        finally:
            proc.terminate()
            proc.wait(timeout=10)

    def test_unreachable_server_exits_2(self):
        result = run("--server", "http://127.0.0.1:9", "matrix", "--dim", "2", "--k", "0")
        assert result.exit_code == 2
        assert "cannot reach service" in result.output
