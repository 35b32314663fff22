import json
import logging

import pytest

from main import EXIT_CONFIG_ERROR, EXIT_OK, build_parser, main


@pytest.fixture(autouse=True)
def quiet_env(monkeypatch, tmp_path):
    monkeypatch.setenv("FQGEOM_ENABLE_FILE_LOGGING", "false")
    monkeypatch.setenv("FQGEOM_LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.delenv("FQGEOM_WORKERS", raising=False)
    yield
    # main() installs a console handler bound to the captured stderr
    root = logging.getLogger()
    for handler in [h for h in root.handlers if getattr(h, "_fqgeom", False)]:
        root.removeHandler(handler)
        handler.close()


class TestParser:
    def test_lists(self):
        args = build_parser().parse_args(["scan", "--q", "3,5", "--sizes", "4,9"])
        assert args.q == [3, 5]
        assert args.sizes == [4, 9]

    def test_parse_error_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["scan", "--q", "three", "--sizes", "4"])
        assert exc.value.code == 2

    def test_scan_needs_sizes(self):
        with pytest.raises(SystemExit) as exc:
            main(["scan", "--q", "3"])
        assert exc.value.code == 2


class TestCommands:
    def test_not_prime(self, capsys):
        assert main(["verify", "--q", "4"]) == EXIT_CONFIG_ERROR
        assert "NotPrime" in capsys.readouterr().err

    def test_bad_environment(self, monkeypatch):
        monkeypatch.setenv("FQGEOM_WORKERS", "0")
        assert main(["verify", "--q", "3", "--suite", "sphere"]) == EXIT_CONFIG_ERROR

    def test_verify_suite(self, capsys):
        assert main(["verify", "--q", "3", "--suite", "identity2", "--trials", "2"]) == EXIT_OK
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "# schema_version=1"
        assert out[1] == "suite,case,passed,lhs,rhs,detail"
        assert out[2].startswith("identity2,")

    def test_count(self, tmp_path, capsys):
        path = tmp_path / "pair.txt"
        path.write_text("3 2\n0 0\n1 0\n")
        assert main(["count", str(path), "--k", "1", "--mode", "exact"]) == EXIT_OK
        out = capsys.readouterr().out.splitlines()
        assert out[-1] == "3,2,1,2,exact,O,2,2,2,1,1"

    def test_count_bad_file(self, tmp_path):
        path = tmp_path / "broken.txt"
        path.write_text("3 2\n0 5\n")
        assert main(["count", str(path)]) == EXIT_CONFIG_ERROR
        assert main(["count", str(tmp_path / "missing.txt")]) == EXIT_CONFIG_ERROR

    def test_scan_json_to_file(self, tmp_path):
        out = tmp_path / "scan.json"
        code = main(["scan", "--q", "3", "--sizes", "3,9", "--trials", "2", "--seed", "5",
                     "--format", "json", "--out", str(out)])
        assert code == EXIT_OK
        rows = json.loads(out.read_text())
        assert [(r["set_size"], r["trial"]) for r in rows] == [(3, 0), (3, 1), (9, 0)]
        assert rows[-1]["T_count"] == 3

    def test_construct(self, capsys):
        assert main(["construct", "--variant", "nullprod", "--q", "13"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out.splitlines()[0])
        assert report["construction"] == "null_product_set"
        assert report["passed"] is True

    def test_construct_wrong_residue(self):
        assert main(["construct", "--variant", "minkowski", "--q", "13"]) == EXIT_CONFIG_ERROR
