import json
import threading
import time

import pytest

from proxyfaug.cli import main


def run(args):
    return main([str(a) for a in args])


class TestAugmentCommand:
    def test_end_to_end(self, experiment_dir, capsys):
        code = run(["augment",
                    "--train", experiment_dir["train"],
                    "--out", experiment_dir["out"],
                    "--seed", 7, "--range", 25, "--smax", 2,
                    "--ncross", 4, "--pmut", 0.3])
        assert code == 0
        out = capsys.readouterr().out
        assert "augmented 40 ->" in out
        assert (experiment_dir["out"] / "augmented.csv").exists()
        manifest = json.loads((experiment_dir["out"] / "augment_manifest.json").read_text())
        assert manifest["params"] == {
            "range_m": 25.0, "max_cluster_size": 2, "crossovers_per_pair": 4,
            "mutation_prob": 0.3, "seed": 7,
        }
        assert manifest["output_size"] <= manifest["size_bound"]

    def test_rerun_same_seed_is_byte_identical(self, experiment_dir, tmp_path):
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        for out in (out1, out2):
            assert run(["augment", "--train", experiment_dir["train"],
                        "--out", out, "--seed", 3, "--range", 25]) == 0
        assert (out1 / "augmented.csv").read_bytes() == (out2 / "augmented.csv").read_bytes()

    def test_missing_input_file_exit_2(self, tmp_path, capsys):
        missing = tmp_path / "absent.csv"
        code = run(["augment", "--train", missing, "--out", tmp_path / "out"])
        assert code == 2
        assert "absent.csv" in capsys.readouterr().err

    def test_missing_required_flag_exit_2(self, tmp_path, capsys):
        code = run(["augment", "--out", tmp_path / "out"])
        assert code == 2
        assert "--train" in capsys.readouterr().err

    def test_threads_env_fallback(self, experiment_dir, monkeypatch):
        monkeypatch.setenv("PROXYFAUG_THREADS", "2")
        assert run(["augment", "--train", experiment_dir["train"],
                    "--out", experiment_dir["out"], "--range", 25]) == 0
        manifest = json.loads((experiment_dir["out"] / "augment_manifest.json").read_text())
        assert manifest["threads"] == 2


class TestEvaluateCommand:
    def test_test_split(self, experiment_dir, capsys):
        code = run(["evaluate", "--train", experiment_dir["train"],
                    "--test", experiment_dir["test"],
                    "--out", experiment_dir["out"], "--k", 3, "--beta", 2.6])
        assert code == 0
        out = capsys.readouterr().out
        assert "median=" in out
        report = json.loads((experiment_dir["out"] / "report.json").read_text())
        assert report["params"]["k"] == 3
        assert report["counts"]["queries"] == 15

    def test_split_choice_is_exclusive(self, experiment_dir, capsys):
        code = run(["evaluate", "--train", experiment_dir["train"],
                    "--validation", experiment_dir["validation"],
                    "--test", experiment_dir["test"],
                    "--out", experiment_dir["out"]])
        assert code == 2
        assert "exactly one" in capsys.readouterr().err

        code = run(["evaluate", "--train", experiment_dir["train"],
                    "--out", experiment_dir["out"]])
        assert code == 2

    def test_mismatched_schema_exit_2(self, experiment_dir, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("bs0,lat,lon\n-100,51.2,4.4\n")
        code = run(["evaluate", "--train", experiment_dir["train"],
                    "--test", bad, "--out", experiment_dir["out"]])
        assert code == 2
        assert "basestation" in capsys.readouterr().err


class TestTuneCommand:
    def test_range_syntax(self, experiment_dir, capsys):
        code = run(["tune", "--train", experiment_dir["train"],
                    "--validation", experiment_dir["validation"],
                    "--out", experiment_dir["out"], "--ks", "1-3"])
        assert code == 0
        lines = (experiment_dir["out"] / "ksweep.csv").read_text().splitlines()
        assert lines[0] == "k,mean_m,median_m"
        assert [line.split(",")[0] for line in lines[1:]] == ["1", "2", "3"]

    def test_invalid_k_exit_2(self, experiment_dir, capsys):
        code = run(["tune", "--train", experiment_dir["train"],
                    "--validation", experiment_dir["validation"],
                    "--out", experiment_dir["out"], "--ks", "0"])
        assert code == 2
        assert "invalid k: 0" in capsys.readouterr().err


class TestConfigFile:
    def test_config_supplies_values_and_flags_override(self, experiment_dir, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text(
            f"train = {experiment_dir['train']}\n"
            f"out = {experiment_dir['out']}\n"
            "seed = 11\n"
            "range = 25\n"
        )
        assert run(["augment", "--config", config]) == 0
        manifest = json.loads((experiment_dir["out"] / "augment_manifest.json").read_text())
        assert manifest["params"]["seed"] == 11

        assert run(["augment", "--config", config, "--seed", 12]) == 0
        manifest = json.loads((experiment_dir["out"] / "augment_manifest.json").read_text())
        assert manifest["params"]["seed"] == 12

    def test_unknown_config_key_exit_2(self, tmp_path, capsys):
        config = tmp_path / "run.cfg"
        config.write_text("nonsense = 1\n")
        assert run(["augment", "--config", config]) == 2
        assert "nonsense" in capsys.readouterr().err


@pytest.fixture(scope="module")
def live_server():
    import uvicorn

    from proxyfaug.service import create_app

    config = uvicorn.Config(create_app(), host="127.0.0.1", port=0, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10.0
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("uvicorn did not start")
        time.sleep(0.02)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5.0)


class TestServerMode:
    def test_augment_over_http(self, live_server, experiment_dir, capsys):
        code = run(["augment", "--server", live_server,
                    "--train", experiment_dir["train"],
                    "--out", experiment_dir["out"], "--range", 25, "--seed", 4])
        assert code == 0
        assert (experiment_dir["out"] / "augmented.csv").exists()

    def test_http_input_error_exit_2(self, live_server, tmp_path, capsys):
        code = run(["augment", "--server", live_server,
                    "--train", tmp_path / "absent.csv", "--out", tmp_path / "out"])
        assert code == 2
        assert "absent.csv" in capsys.readouterr().err

    def test_unreachable_server_exit_1(self, experiment_dir, capsys):
        code = run(["augment", "--server", "http://127.0.0.1:1",
                    "--train", experiment_dir["train"], "--out", experiment_dir["out"]])
        assert code == 1
        assert "cannot reach server" in capsys.readouterr().err
