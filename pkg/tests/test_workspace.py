import pytest

from models.complexes import homology
from models.dg import TableDGAlgebra
from utils.errors import InvariantError, ParseError, UsageError
from utils.workspace import load_workspace, parse_workspace, save_workspace, serialize_workspace

TRUNCATED = """
field Q
# k[x]/(x^3)
algebra A quiver
  vertices 1
  arrow x 0 0
  relation x^3
  cap 3
end
"""

OBJECTS = TRUNCATED + """
module R over A regular
module X1 over A quotient x
module X2 over A quotient x^2
module S over A sum R X1
module O over A syzygy X1
complex P from resolve X1 4
complex Q from stalk R
complex Q1 from shift Q 1
complex T over A explicit -1 0
  term -1 regular
  term 0 regular
  diff -1 = 3 3 : 0 1 0 ; 0 0 1 ; 0 0 0
end
map m T -> T 0
  comp -1 leftmult x
  comp 0 leftmult x
end
complex C from cone m
complex U from sum T Q
dg L from end T
checks {"note": 1}
"""

SQUARE_NONZERO = TRUNCATED + """
complex B over A explicit 0 2
  term 0 regular
  term 1 regular
  term 2 regular
  diff 0 = 3 3 : 0 1 0 ; 0 0 1 ; 0 0 0
  diff 1 = 3 3 : 0 1 0 ; 0 0 1 ; 0 0 0
end
"""


@pytest.fixture(scope="module")
def objects():
    return parse_workspace(OBJECTS)


class TestParsing:
    def test_empty_text(self):
        assert len(parse_workspace("")) == 0
        assert len(parse_workspace("# nothing here\n\n")) == 0

    def test_quiver_algebra(self):
        ws = parse_workspace(TRUNCATED)
        A = ws.get("A", "algebra")
        assert A.dim == 3
        assert A.labels == ("e", "x", "x^2")

    def test_table_algebra(self):
        ws = parse_workspace("""
field Fp:7
algebra D table 2
  labels e a
  unit 1 0
  mult 0 0 = 1 0
  mult 0 1 = 0 1
  mult 1 0 = 0 1
end
""")
        D = ws.get("D")
        assert D.dim == 2
        assert str(D.field) == "Fp:7"

    def test_module_constructors(self, objects):
        dims = {name: objects.get(name).dim for name in objects.names("module")}
        assert dims == {"R": 3, "X1": 1, "X2": 2, "S": 4, "O": 2}

    def test_complex_constructors(self, objects):
        assert objects.get("P").dims() == {-4: 3, -3: 3, -2: 3, -1: 3, 0: 3}
        assert objects.get("P").truncation == 4
        assert (objects.get("Q1").lo, objects.get("Q1").hi) == (-1, -1)
        assert objects.get("C").dims() == {-2: 3, -1: 6, 0: 3}
        assert objects.get("U").dims() == {-1: 3, 0: 6}
        assert homology(objects.get("T"), 0).dim == 1

    def test_map_and_dg(self, objects):
        m = objects.get("m", "map")
        assert m.is_chain_map()
        L = objects.get("L", "dg")
        assert isinstance(L, TableDGAlgebra)
        assert L.name == "L"
        assert objects.checks == {"note": 1}

    def test_lookup_with_wrong_kind(self, objects):
        with pytest.raises(UsageError):
            objects.get("R", "complex")
        with pytest.raises(UsageError):
            objects.get("missing")

    def test_summary(self, objects):
        table = objects.summary()
        assert list(table.columns) == ["name", "kind", "description"]
        assert len(table) == len(objects)


class TestErrors:
    def test_square_of_differential(self):
        with pytest.raises(InvariantError, match="degree 0"):
            parse_workspace(SQUARE_NONZERO)

    @pytest.mark.parametrize("text", [
        "field Fp:4\n",
        "frobnicate now\n",
        TRUNCATED + "module X over A twisted\n",
        TRUNCATED + "module X over B regular\n",
        TRUNCATED + "complex Z from shift NOPE 1\n",
        TRUNCATED + "complex Z over A explicit 0 0\n  term 0 regular\n",
        TRUNCATED + "module R over A regular\nmodule R over A regular\n",
        TRUNCATED + "complex Z over A explicit 0 1\n  term 0 regular\n  diff 0 = 2 2 : 1 0 ; 0 1\nend\n",
    ], ids=["field", "directive", "module-form", "reference", "complex-reference", "missing-end",
            "duplicate", "matrix-shape"])
    def test_parse_errors(self, text):
        with pytest.raises(ParseError):
            parse_workspace(text)

    def test_parse_error_reports_line(self):
        with pytest.raises(ParseError) as excinfo:
            parse_workspace("field Q\n\nbogus\n")
        assert excinfo.value.line == 3


class TestRoundTrip:
    @pytest.mark.parametrize("fixture", ["two_loop_workspace", "nakayama_workspace", "apr_workspace"])
    def test_examples(self, fixture, request):
        ws = request.getfixturevalue(fixture)
        text = serialize_workspace(ws)
        again = parse_workspace(text)
        assert again == ws
        assert serialize_workspace(again) == text

    def test_parsed_objects(self, objects):
        assert parse_workspace(serialize_workspace(objects)) == objects

    def test_save_and_load(self, objects, tmp_path):
        path = tmp_path / "objects.ws"
        save_workspace(objects, str(path))
        assert load_workspace(str(path)) == objects

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(UsageError):
            load_workspace(str(tmp_path / "absent.ws"))
