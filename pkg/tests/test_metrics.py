"""Tests for function classification, per-cell vectors and document aggregation."""

from __future__ import annotations

from itertools import combinations

import pytest
from conftest import md, notebook_bytes
from hypothesis import given, settings
from hypothesis import strategies as st
from nbformat.v4 import new_raw_cell

from cellscope.builtins_registry import get_registry
from cellscope.ingest import parse_notebook, parse_script
from cellscope.metrics import (
    METRIC_NAMES,
    CellMetricVector,
    FunctionCategory,
    build_context,
    cell_coupling,
    classify_call,
    document_metrics,
    function_coupling,
    markdown_runs,
    mean_pairwise_overlap,
    parse_code_cells,
)
from cellscope.pyast import FunctionDef, LineCounts


def categories(source: str) -> dict[str, FunctionCategory]:
    doc = parse_script(source.encode("utf-8"), "s.py")
    (parsed,) = parse_code_cells(doc)
    assert parsed.facts is not None
    context = build_context([parsed])
    return {
        call.full_name: classify_call(call, context.imports, context.def_names, get_registry())
        for call in parsed.facts.calls
    }


@pytest.mark.parametrize(
    ("source", "name", "expected"),
    [
        ("len(x)", "len", FunctionCategory.BUILT_IN),
        ("def len(x):\n    pass\nlen(1)", "len", FunctionCategory.USER_DEFINED),
        ("def helper():\n    pass\nhelper()", "helper", FunctionCategory.USER_DEFINED),
        ("import pandas as pd\npd.read_csv('f')", "pd.read_csv", FunctionCategory.API),
        ("import numpy\nnumpy.array([1])", "numpy.array", FunctionCategory.API),
        ("import os.path\nos.path.join('a')", "os.path.join", FunctionCategory.API),
        ("from os.path import join\njoin('a')", "join", FunctionCategory.API),
        ("from pandas import DataFrame as DF\nDF()", "DF", FunctionCategory.API),
        ("from m import print\nprint(1)", "print", FunctionCategory.BUILT_IN),
        ("from os import path\npath.join('a')", "path.join", FunctionCategory.OTHER),
        ("from m import *\nfoo()", "foo", FunctionCategory.OTHER),
        ("df.head()", "df.head", FunctionCategory.OTHER),
        ("x = [1]\nx.append(2)", "x.append", FunctionCategory.OTHER),
        ("unknown_fn()", "unknown_fn", FunctionCategory.OTHER),
        ("(lambda: 1)()", "<expr>", FunctionCategory.OTHER),
        ("obj.method().other()", "<expr>.other", FunctionCategory.OTHER),
        # built-ins
        ("print('x')", "print", FunctionCategory.BUILT_IN),
        ("sorted([2, 1])", "sorted", FunctionCategory.BUILT_IN),
        ("isinstance(1, int)", "isinstance", FunctionCategory.BUILT_IN),
        ("range(3)", "range", FunctionCategory.BUILT_IN),
        ("print(abs(-1))", "abs", FunctionCategory.BUILT_IN),
        ("__import__('os')", "__import__", FunctionCategory.BUILT_IN),
        ("import os\nprint(os.getcwd())", "print", FunctionCategory.BUILT_IN),
        # a definition beats everything else for plain names
        ("def print(x):\n    pass\nprint(1)", "print", FunctionCategory.USER_DEFINED),
        ("from helpers import run\ndef run():\n    pass\nrun()", "run", FunctionCategory.USER_DEFINED),
        ("def open(p):\n    pass\nfrom io import open\nopen('f')", "open", FunctionCategory.USER_DEFINED),
        ("import helper\ndef helper():\n    pass\nhelper()", "helper", FunctionCategory.USER_DEFINED),
        ("def outer():\n    def inner():\n        pass\n    inner()", "inner", FunctionCategory.USER_DEFINED),
        ("async def fetch():\n    pass\nfetch()", "fetch", FunctionCategory.USER_DEFINED),
        ("main()\ndef main():\n    pass", "main", FunctionCategory.USER_DEFINED),
        # a built-in name beats a from-import of the same name
        ("from builtins import len\nlen([])", "len", FunctionCategory.BUILT_IN),
        ("from m import *\nround(1.5)", "round", FunctionCategory.BUILT_IN),
        # from-imports
        ("from pandas import read_csv\nread_csv('f')", "read_csv", FunctionCategory.API),
        ("from . import helper\nhelper()", "helper", FunctionCategory.API),
        ("from .utils import load as ld\nld()", "ld", FunctionCategory.API),
        ("from typing import cast\ncast(int, 1)", "cast", FunctionCategory.API),
        ("import numpy as np\nfrom numpy import zeros\nzeros(3)", "zeros", FunctionCategory.API),
        ("from pandas import DataFrame as DF\nDataFrame()", "DataFrame", FunctionCategory.OTHER),
        # dotted paths need a module import of their head
        ("import os\nos.getcwd()", "os.getcwd", FunctionCategory.API),
        ("import sys\nsys.exit(0)", "sys.exit", FunctionCategory.API),
        ("import numpy as np\nnp.linalg.norm(v)", "np.linalg.norm", FunctionCategory.API),
        ("import matplotlib.pyplot as plt\nplt.plot([1])", "plt.plot", FunctionCategory.API),
        ("import a.b.c\na.b.c.run()", "a.b.c.run", FunctionCategory.API),
        ("import os\nos.sep.join(['a'])", "os.sep.join", FunctionCategory.API),
        ("import json\ndef json():\n    pass\njson.dumps(1)", "json.dumps", FunctionCategory.API),
        ("from m import *\nimport os\nos.getcwd()", "os.getcwd", FunctionCategory.API),
        ("import numpy as np\nnumpy.zeros(1)", "numpy.zeros", FunctionCategory.OTHER),
        ("import os.path\npath.join('a')", "path.join", FunctionCategory.OTHER),
        ("from matplotlib import pyplot as plt\nplt.plot([1])", "plt.plot", FunctionCategory.OTHER),
        ("x = np.zeros(2)", "np.zeros", FunctionCategory.OTHER),
        ("def helper():\n    pass\nobj.helper()", "obj.helper", FunctionCategory.OTHER),
        ("self.update()", "self.update", FunctionCategory.OTHER),
        # a module import never classifies a plain call
        ("import numpy as np\nnp()", "np", FunctionCategory.OTHER),
        # callees that are not rooted in a name
        ("import os\nos.path.join('a', 'b').upper()", "<expr>.upper", FunctionCategory.OTHER),
        ("import collections\ncollections.Counter('ab').most_common(1)", "collections.Counter", FunctionCategory.API),
        ("class K:\n    pass\nK()", "K", FunctionCategory.OTHER),
        ("f = len\nf([])", "f", FunctionCategory.OTHER),
    ],
)
def test_classify_call(source: str, name: str, expected: FunctionCategory) -> None:
    assert categories(source)[name] is expected


def test_imports_in_earlier_cells_classify_later_calls(make_notebook) -> None:
    doc = make_notebook("import numpy as np", "np.zeros(3)\nnp.zeros(4)\nnp.ones(2)")
    vectors, _ = document_metrics(doc)
    assert (vectors[1].api_unique, vectors[1].api_count) == (2, 3)


def test_definitions_in_later_cells_still_count_as_user(make_notebook) -> None:
    doc = make_notebook("helper()", "def helper():\n    return 1")
    vectors, metrics = document_metrics(doc)
    assert vectors[0].user_count == 1
    assert metrics.user_count == 1


def test_extended_comments_include_markdown_run(make_notebook) -> None:
    doc = make_notebook(
        md("one\ntwo\nthree"),
        "x = 1",
        "# own comment\ny = 2",
        md("a\nb"),
        md("c\nd\ne"),
        "z = 3",
    )
    vectors, metrics = document_metrics(doc)

    assert [v.extended_comment_loc for v in vectors] == [3, 1, 5]
    assert metrics.extended_comment_loc == 9
    assert metrics.comment_loc == 1


def test_markdown_runs_reset_on_raw_cells(make_notebook) -> None:
    doc = make_notebook(md("a"), new_raw_cell("r"), md("b\nc"), "x = 1", md("tail"))
    assert markdown_runs(doc) == {3: 2}


def test_comment_density() -> None:
    doc = parse_script(("x = 1\n" * 50 + "# c\n" * 10).encode(), "s.py")
    _, metrics = document_metrics(doc)
    assert metrics.sloc == 50
    assert metrics.comment_loc_per_line == pytest.approx(0.2)


def test_empty_script_has_no_ratios() -> None:
    _, metrics = document_metrics(parse_script(b"", "empty.py"))
    assert metrics.sloc == 0
    assert metrics.comment_loc_per_line is None
    assert metrics.cyclomatic == 1
    assert metrics.npavg is None


def test_cyclomatic_is_cell_maximum(make_notebook) -> None:
    doc = make_notebook(
        "if a:\n    pass\nif b:\n    pass",
        "if a:\n    pass\nif b:\n    pass\nif c:\n    pass\nif d:\n    pass",
    )
    vectors, metrics = document_metrics(doc)
    assert [v.cyclomatic for v in vectors] == [3, 5]
    assert metrics.cyclomatic == 5


def test_unparsable_cell_keeps_line_metrics(make_notebook) -> None:
    doc = make_notebook("%matplotlib inline\nimport os", "x = len([1])\n# note")
    vectors, metrics = document_metrics(doc)

    assert not vectors[0].parse_ok
    assert vectors[0].line_counts.sloc == 2
    assert metrics.sloc == 3
    assert metrics.builtin_count == 1
    assert (metrics.analyzed_cells, metrics.failed_cells) == (2, 1)


def test_npavg() -> None:
    source = b"def a(x, y):\n    pass\ndef b():\n    pass\ndef c(*args, **kw):\n    pass\n"
    doc = parse_script(source, "s.py")
    _, metrics = document_metrics(doc)
    assert metrics.npavg == pytest.approx(4 / 3)


def test_function_coupling() -> None:
    defs = [
        FunctionDef("f", 0, frozenset({"print", "len"}), (1, 0)),
        FunctionDef("g", 0, frozenset({"print"}), (3, 0)),
        FunctionDef("h", 0, frozenset({"len", "print", "open"}), (5, 0)),
    ]
    # pairs: f-g 1, f-h 2, g-h 1
    assert function_coupling(defs) == pytest.approx(4 / 3)
    assert function_coupling(defs[:1]) == 0.0


def test_cell_coupling_ignores_unparsable_cells() -> None:
    def vector(index: int, names: set[str], ok: bool = True) -> CellMetricVector:
        return CellMetricVector(index, LineCounts(), 0, variables_used=frozenset(names), parse_ok=ok)

    cells = [vector(0, {"df", "x"}), vector(1, {"df"}), vector(2, {"df", "x"}, ok=False)]
    assert cell_coupling(cells) == 1.0


def test_script_has_no_cell_coupling(make_script) -> None:
    _, metrics = document_metrics(make_script("x = 1\n"))
    assert metrics.cell_coupling is None


def test_metric_names_cover_every_value() -> None:
    assert "cell_coupling" in METRIC_NAMES
    assert "api_count_per_line" in METRIC_NAMES
    assert "sloc_per_line" not in METRIC_NAMES
    assert "analyzed_cells" not in METRIC_NAMES


SCALE_CELLS = (
    "import numpy as np\n# load\nx = np.arange(10)\n",
    "def norm(v):\n    return v / len(v)\n\nprint(norm(x))\n",
    "if x.sum() > 3:\n    y = sorted(x)\n",
)


def test_doubling_content_doubles_sums_and_keeps_ratios(make_notebook) -> None:
    _, once = document_metrics(make_notebook(*SCALE_CELLS))
    _, twice = document_metrics(make_notebook(*SCALE_CELLS, *SCALE_CELLS))

    for name in ("sloc", "comment_loc", "blank_loc", "builtin_count", "api_count", "user_count"):
        assert getattr(twice, name) == 2 * getattr(once, name)
    for name in ("comment_loc_per_line", "builtin_count_per_line", "api_count_per_line"):
        assert getattr(twice, name) == pytest.approx(getattr(once, name))


# ───────────────────────── properties ───────────────────────

STATEMENTS = [
    "x = 1",
    "# comment",
    "",
    "y = len([x])",
    "import os",
    "z = os.path.join('a', 'b')",
    "def f(a, b):\n    return print(a, b)",
    "if x:\n    y = 2",
    "for i in range(3):\n    x += i",
    "class K:\n    pass",
    's = """\n# inside\n"""',
    "w = f(1, 2) if y else None",
]


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from(STATEMENTS), max_size=12))
def test_script_equals_single_cell_notebook(statements: list[str]) -> None:
    source = "\n".join(statements) + ("\n" if statements else "")
    script_vectors, script_metrics = document_metrics(parse_script(source.encode(), "s.py"))
    notebook = parse_notebook(notebook_bytes(source), "s.ipynb")
    nb_vectors, nb_metrics = document_metrics(notebook)

    assert script_vectors == nb_vectors
    script_values = script_metrics.as_dict()
    nb_values = nb_metrics.as_dict()
    assert script_values.pop("cell_coupling") is None
    assert nb_values.pop("cell_coupling") == 0.0
    assert script_values == nb_values


CALLEES = ["g", "h", "k", "m", "n"]
VARIABLES = ["a", "b", "c", "d"]


def coupling_cell(index: int, calls: frozenset[str], variables: frozenset[str]) -> str:
    lines = []
    if variables:
        names = sorted(variables)
        lines.append(", ".join(names) + ", = " + ", ".join("0" for _ in names) + ",")
    lines.append(f"def f{index}():")
    lines.extend(f"    {name}()" for name in sorted(calls))
    if not calls:
        lines.append("    pass")
    return "\n".join(lines) + "\n"


def brute_force_overlap(sets: list[frozenset[str]]) -> float:
    pairs = list(combinations(range(len(sets)), 2))
    if not pairs:
        return 0.0
    return sum(len(sets[i] & sets[j]) for i, j in pairs) / len(pairs)


@pytest.mark.slow
@settings(max_examples=1000, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.frozensets(st.sampled_from(CALLEES)),
            st.frozensets(st.sampled_from(VARIABLES)),
        ),
        min_size=1,
        max_size=6,
    )
)
def test_coupling_matches_pairwise_oracle(cells: list[tuple[frozenset[str], frozenset[str]]]) -> None:
    sources = [coupling_cell(i, calls, variables) for i, (calls, variables) in enumerate(cells)]
    notebook = parse_notebook(notebook_bytes(*sources), "c.ipynb")
    _, metrics = document_metrics(notebook)

    assert metrics.function_coupling == pytest.approx(
        brute_force_overlap([calls for calls, _ in cells])
    )
    assert metrics.cell_coupling == pytest.approx(
        brute_force_overlap([variables for _, variables in cells])
    )


def test_mean_pairwise_overlap_small_inputs() -> None:
    assert mean_pairwise_overlap([]) == 0.0
    assert mean_pairwise_overlap([frozenset({"a"})]) == 0.0
    assert mean_pairwise_overlap([frozenset({"a", "b"}), frozenset({"b", "a"})]) == 2.0
