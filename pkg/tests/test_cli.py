import pytest

from cli import main
from utils.commands import parse_window, run_command
from utils.errors import ParseError, UnknownCommand, UsageError
from utils.reports import Report, emit_report, parse_report, render_text
from utils.workspace import Workspace, load_workspace

SHIFTED_SUM = """field Q
algebra A quiver
  vertices 1
  arrow x 0 0
  relation x^3
  cap 3
end
module R over A regular
complex Q from stalk R
complex Q1 from shift Q 1
complex U from sum Q Q1
"""

SQUARE_NONZERO = """field Q
algebra A quiver
  vertices 1
  arrow x 0 0
  relation x^2
  cap 2
end
complex B over A explicit 0 2
  term 0 regular
  term 1 regular
  term 2 regular
  diff 0 = 2 2 : 0 1 ; 0 0
  diff 1 = 2 2 : 1 0 ; 0 1
end
"""


@pytest.fixture(scope="module")
def saved_two_loop(tmp_path_factory):
    path = tmp_path_factory.mktemp("ws") / "two_loop.ws"
    assert main(["example", "two-loop", f"save={path}"]) == 0
    return str(path)


def _write(tmp_path, text):
    path = tmp_path / "input.ws"
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestExitCodes:
    def test_example_passes(self, capsys):
        assert main(["example", "apr-tilt"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("derived-chronicles report v1: example apr-tilt\n")
        assert "verdict: PASS" in out

    def test_mutation_on_saved_workspace(self, saved_two_loop, capsys):
        assert main(["--workspace", saved_two_loop, "mutate", "X=T2", "M=T1"]) == 0
        assert "verdict: PASS" in capsys.readouterr().out

    def test_mutation_alias(self, saved_two_loop, capsys):
        argv = ["--workspace", saved_two_loop, "thm41", "X=T2", "M=T1", "window=-3..3"]
        assert main(argv) == 0
        out = capsys.readouterr().out
        assert "report v1: mutate" in out
        assert "verdict: PASS" in out

    def test_composition_map_alias(self, saved_two_loop, capsys):
        assert main(["--workspace", saved_two_loop, "lemma35", "X=T2", "Y=T2", "Z=T2"]) == 0
        assert "verdict: PASS" in capsys.readouterr().out

    def test_two_loop_example_alias(self, capsys):
        assert main(["example", "dugas"]) == 0
        assert capsys.readouterr().out.startswith("derived-chronicles report v1: example two-loop\n")

    def test_unknown_command(self):
        assert main(["frobnicate"]) == 2

    def test_missing_example_name(self):
        assert main(["example"]) == 2

    def test_missing_argument(self, saved_two_loop):
        assert main(["--workspace", saved_two_loop, "mutate", "X=T2"]) == 2

    def test_unreadable_workspace(self, tmp_path):
        assert main(["--workspace", str(tmp_path / "absent.ws"), "homology", "C=T"]) == 2
        assert main(["--workspace", _write(tmp_path, "field Q\nbogus\n"), "homology", "C=T"]) == 2

    def test_invariant_violation(self, tmp_path, capsys):
        assert main(["--workspace", _write(tmp_path, SQUARE_NONZERO), "homology", "C=B"]) == 3
        assert capsys.readouterr().err.startswith("error:")

    def test_failed_verdict(self, tmp_path, capsys):
        assert main(["--workspace", _write(tmp_path, SHIFTED_SUM), "tilting-check", "T=U"]) == 1
        out = capsys.readouterr().out
        assert "verdict: FAIL" in out
        assert "failing: [-1, 1]" in out

    def test_field_disagreeing_with_workspace(self, tmp_path):
        assert main(["--workspace", _write(tmp_path, SHIFTED_SUM), "--field", "Fp:5", "homology", "C=U"]) == 2

    def test_bad_window(self, tmp_path):
        assert main(["--workspace", _write(tmp_path, SHIFTED_SUM), "--window", "3..1", "homology", "C=U"]) == 2


class TestOutput:
    def test_output_is_deterministic(self, saved_two_loop, capsys):
        argv = ["--workspace", saved_two_loop, "k-hom", "X=T2", "Y=T1"]
        main(argv)
        first = capsys.readouterr().out
        main(argv)
        assert capsys.readouterr().out == first

    def test_structured_format(self, saved_two_loop, capsys):
        assert main(["--workspace", saved_two_loop, "--format", "structured", "k-hom", "X=T2", "Y=T1", "n=1"]) == 0
        report = parse_report(capsys.readouterr().out)
        assert report.command == "k-hom"
        assert report.data["dim"] == 2

    def test_out_file(self, saved_two_loop, tmp_path, capsys):
        out = tmp_path / "report.json"
        assert main(["--workspace", saved_two_loop, "--out", str(out), "homology", "C=T2"]) == 0
        capsys.readouterr()
        report = parse_report(out.read_text(encoding="utf-8"))
        assert report.command == "homology"
        assert report.table("cohomology").shape[0] > 0

    def test_save_workspace_keeps_new_objects(self, saved_two_loop, tmp_path, capsys):
        target = tmp_path / "extended.ws"
        argv = ["--workspace", saved_two_loop, "--save-workspace", str(target), "cone", "f=f", "name=Cf"]
        assert main(argv) == 0
        capsys.readouterr()
        extended = load_workspace(str(target))
        assert extended.get("Cf", "complex") == extended.get("C", "complex")


class TestReports:
    def test_empty_report_is_header_only(self):
        assert render_text(Report()) == "derived-chronicles report v1\n"

    def test_structured_round_trip(self):
        report = Report("k-hom", True, {"dim": 2}, {"homotopy_hom": [{"shift": 0, "dim": 2}]})
        assert parse_report(emit_report(report, "structured")) == report

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            emit_report(Report(), "yaml")

    def test_unsupported_version(self):
        with pytest.raises(ParseError):
            parse_report('{"version": 99}')


class TestRunCommand:
    def test_example_without_cli(self):
        report = run_command(Workspace(), "example apr-tilt")
        assert report.verdict is True
        assert "B" in report.data["objects"]

    def test_unknown_command(self):
        with pytest.raises(UnknownCommand):
            run_command(Workspace(), "frobnicate")

    @pytest.mark.parametrize("text", ["1", "3..1", "a..b"])
    def test_bad_windows(self, text):
        with pytest.raises(UsageError):
            parse_window(text)

    @pytest.mark.parametrize("module,dims", [("AplusX1", [6, 1, 1, 1, 1]), ("AplusX2", [9, 1, 1, 1, 1])])
    def test_yoneda_on_the_nakayama_example(self, nakayama_workspace, module, dims):
        args = {"A": "nak3", "N": module, "phi": "0..4", "L": "8"}
        report = run_command(nakayama_workspace, "yoneda", args)
        assert report.verdict is True
        assert report.data["dims"] == dims
        assert report.data["associative"] and report.data["unital"]

    def test_unknown_example(self):
        with pytest.raises(UnknownCommand):
            run_command(Workspace(), "example pentagon")
