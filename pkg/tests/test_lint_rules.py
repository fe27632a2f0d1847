"""Tests for the built-in lint rules, each run on its own."""

from __future__ import annotations

import pytest

from cellscope.ingest import parse_script
from cellscope.lint import flatten, run_checks
from cellscope.lint.rule_api import Category, LintFinding
from cellscope.lint.rules import BUILTIN_RULES
from cellscope.lint.rules.best_practices import (
    RedefinedOuterName,
    StringConcatenation,
    UnnecessaryAssignBeforeReturn,
    UnusedAliasedImport,
    UnusedImport,
)
from cellscope.lint.rules.code_style import (
    DottedRawImport,
    MissingArithmeticWhitespace,
    MissingImportNewline,
    MissingTrailingComma,
    MissingWhitespaceAfterPunctuation,
)
from cellscope.lint.rules.error_proneness import (
    BlockVariableOverlap,
    NoEffectStatement,
    OuterScopeShadowing,
    UndefinedVariable,
)


def check(rule_cls: type, source: str) -> list[LintFinding]:
    flat = flatten(parse_script(source.encode("utf-8"), "snippet.py"))
    return run_checks(flat, [rule_cls()])


def lines(findings: list[LintFinding]) -> list[int]:
    return [f.local_line for f in findings]


# (rule, source, expected local lines)
POSITIVE = [
    (BlockVariableOverlap, "x = 1\nfor x in range(3):\n    pass\n", [2]),
    (BlockVariableOverlap, "def f(item):\n    for item in []:\n        pass\n", [2]),
    (BlockVariableOverlap, "f = open('a')\nwith open('b') as f:\n    pass\n", [2]),
    (
        BlockVariableOverlap,
        "err = None\ntry:\n    pass\nexcept ValueError as err:\n    pass\n",
        [4],
    ),
    (BlockVariableOverlap, "for i in range(3):\n    pass\nfor i in range(2):\n    pass\n", [3]),
    (
        BlockVariableOverlap,
        "with open('a') as fh:\n    pass\nwith open('b') as fh:\n    pass\n",
        [3],
    ),
    (NoEffectStatement, "x = 1\nx\n", [2]),
    (NoEffectStatement, "a = 1\na + 1\n", [2]),
    (NoEffectStatement, "def f():\n    'doc'\n    1 == 2\n", [3]),
    (NoEffectStatement, "[1, 2]\n", [1]),
    (OuterScopeShadowing, "x = 1\ndef f(x):\n    return x\n", [2]),
    (OuterScopeShadowing, "data = []\ndef load():\n    data = [1]\n    return data\n", [3]),
    (OuterScopeShadowing, "import os\ndef f():\n    for os in []:\n        pass\n", [3]),
    (UndefinedVariable, "print(y)\n", [1]),
    (UndefinedVariable, "x = z + 1\n", [1]),
    (UndefinedVariable, "result = model.fit()\nmodel = 1\n", [1]),
    (UndefinedVariable, "counter += 1\n", [1]),
    (MissingImportNewline, "import os\nx = os.sep\n", [2]),
    (MissingImportNewline, "import os\nimport sys\nprint(os, sys)\n", [3]),
    (MissingImportNewline, "from a import b\n@b\ndef f():\n    pass\n", [2]),
    (MissingWhitespaceAfterPunctuation, "a=[1,2]\n", [1]),
    (MissingWhitespaceAfterPunctuation, "f(a,b)\n", [1]),
    (MissingWhitespaceAfterPunctuation, "d = {'k':1}\n", [1]),
    (MissingWhitespaceAfterPunctuation, "x = 1;y = 2\n", [1]),
    (DottedRawImport, "import os.path\n", [1]),
    (DottedRawImport, "import a.b.c\n", [1]),
    (DottedRawImport, "import os, xml.dom\n", [1]),
    (MissingArithmeticWhitespace, "x = a+b\n", [1]),
    (MissingArithmeticWhitespace, "y = 2*x\n", [1]),
    (MissingArithmeticWhitespace, "z = (a)/b\n", [1]),
    (MissingArithmeticWhitespace, "w = a-1\n", [1]),
    (MissingTrailingComma, "x = [\n    1,\n    2\n]\n", [3]),
    (MissingTrailingComma, "f(\n    a,\n    b\n)\n", [3]),
    (MissingTrailingComma, "d = {\n    'k': 1\n}\n", [2]),
    (MissingTrailingComma, "t = (\n    1,\n    2\n)\n", [3]),
    (UnusedImport, "import os\n", [1]),
    (UnusedImport, "from collections import OrderedDict\n", [1]),
    (UnusedImport, "import os.path\n", [1]),
    (UnusedImport, "import os, sys\nprint(sys)\n", [1]),
    (UnusedAliasedImport, "import numpy as np\n", [1]),
    (UnusedAliasedImport, "from os import path as p\n", [1]),
    (UnusedAliasedImport, "import matplotlib.pyplot as plt\nimport os\nprint(os)\n", [1]),
    (RedefinedOuterName, "x = 1\ndef f(x):\n    return x\n", [2]),
    (RedefinedOuterName, "def f():\n    g = 1\n    return g\ng = 2\n", [1]),
    (RedefinedOuterName, "import os\ndef f(os):\n    return os\n", [2]),
    (StringConcatenation, "s = 'a' + name\n", [1]),
    (StringConcatenation, "s = name + 'b'\n", [1]),
    (StringConcatenation, "s = f'{x}' + y\n", [1]),
    (StringConcatenation, "s = ''\ns += 'lit'\n", [2]),
    (UnnecessaryAssignBeforeReturn, "def f():\n    x = 1\n    return x\n", [3]),
    (
        UnnecessaryAssignBeforeReturn,
        "def f(a):\n    if a:\n        y = a * 2\n        return y\n    return 0\n",
        [4],
    ),
    (UnnecessaryAssignBeforeReturn, "def f():\n    z: int = 3\n    return z\n", [3]),
]

NEGATIVE = [
    (BlockVariableOverlap, "for i in range(3):\n    pass\ni = 0\n"),
    (BlockVariableOverlap, "for i in range(3):\n    x = i\n"),
    (BlockVariableOverlap, "x = 1\ndef f():\n    for x in []:\n        pass\n"),
    (BlockVariableOverlap, "with open('a') as f:\n    f = 2\n"),
    (NoEffectStatement, "print(1)\n"),
    (NoEffectStatement, 'def f():\n    """Docstring."""\n    return 1\n'),
    (NoEffectStatement, "async def f(x):\n    await x\n"),
    (NoEffectStatement, "def g():\n    yield 1\n"),
    (NoEffectStatement, "class A:\n    ...\n"),
    (OuterScopeShadowing, "def f(x):\n    return x\nx = 1\n"),
    (OuterScopeShadowing, "x = 1\ndef f(y):\n    return x + y\n"),
    (OuterScopeShadowing, "x = 1\ndef f():\n    global x\n    x = 2\n"),
    (UndefinedVariable, "x = 1\nprint(x)\n"),
    (UndefinedVariable, "import os\nos.getcwd()\n"),
    (UndefinedVariable, "def f():\n    return undefined_inside\n"),
    (UndefinedVariable, "from m import *\nfoo()\n"),
    (UndefinedVariable, "for i in range(3):\n    print(i)\n"),
    (UndefinedVariable, "squares = [v * v for v in range(3)]\n"),
    (UndefinedVariable, "xs = [1]\nys = [y := v for v in xs]\nprint(y)\n"),
    (MissingImportNewline, "import os\n\nx = os.sep\n"),
    (MissingImportNewline, "import os\nimport sys\n"),
    (MissingImportNewline, "x = 1\ny = 2\n"),
    (MissingImportNewline, "import os\n\n\ndef f():\n    pass\n"),
    (MissingWhitespaceAfterPunctuation, "a = [1, 2]\n"),
    (MissingWhitespaceAfterPunctuation, "x = s[1:2]\n"),
    (MissingWhitespaceAfterPunctuation, "if x:\n    pass\n"),
    (MissingWhitespaceAfterPunctuation, "t = (1,)\n"),
    (MissingWhitespaceAfterPunctuation, "s = 'a,b'\n"),
    (MissingWhitespaceAfterPunctuation, "# a,b\n"),
    (DottedRawImport, "import os.path as osp\n"),
    (DottedRawImport, "from os import path\n"),
    (DottedRawImport, "import os\n"),
    (MissingArithmeticWhitespace, "x = a + b\n"),
    (MissingArithmeticWhitespace, "x = -1\n"),
    (MissingArithmeticWhitespace, "x = a**b\n"),
    (MissingArithmeticWhitespace, "f(*args)\n"),
    (MissingArithmeticWhitespace, "x = 'a+b'\n"),
    (MissingArithmeticWhitespace, "x = a +b\n"),
    (MissingTrailingComma, "x = [\n    1,\n    2,\n]\n"),
    (MissingTrailingComma, "x = [1, 2]\n"),
    (MissingTrailingComma, "x = [1,\n     2]\n"),
    (MissingTrailingComma, "f(\n    x for x in y\n)\n"),
    (MissingTrailingComma, "x = []\n"),
    (UnusedImport, "import os\nprint(os.sep)\n"),
    (UnusedImport, "import numpy as np\n"),
    (UnusedImport, "from __future__ import annotations\n"),
    (UnusedImport, "from m import *\n"),
    (UnusedAliasedImport, "import numpy as np\nnp.zeros(3)\n"),
    (UnusedAliasedImport, "import os\n"),
    (UnusedAliasedImport, "from os import path as p\nprint(p)\n"),
    (RedefinedOuterName, "def f(a):\n    return a\n"),
    (RedefinedOuterName, "x = 1\ndef f():\n    return x\n"),
    (RedefinedOuterName, "x = 1\ndef f():\n    global x\n    x = 2\n"),
    (StringConcatenation, "n = 1 + 2\n"),
    (StringConcatenation, "s = ''.join([a, b])\n"),
    (StringConcatenation, "s = f'{a}{b}'\n"),
    (StringConcatenation, "s = 'a' 'b'\n"),
    (StringConcatenation, "n = 0\nn += 1\n"),
    (UnnecessaryAssignBeforeReturn, "def f():\n    return 1\n"),
    (UnnecessaryAssignBeforeReturn, "def f():\n    x = 1\n    print(x)\n    return x\n"),
    (UnnecessaryAssignBeforeReturn, "def f():\n    x = 1\n    return x + 1\n"),
    (UnnecessaryAssignBeforeReturn, "def f():\n    x, y = 1, 2\n    return x\n"),
]


@pytest.mark.parametrize(("rule_cls", "source", "expected"), POSITIVE)
def test_rule_reports(rule_cls: type, source: str, expected: list[int]) -> None:
    findings = check(rule_cls, source)
    assert lines(findings) == expected
    assert {f.rule_id for f in findings} == {rule_cls.rule_id}


@pytest.mark.parametrize(("rule_cls", "source"), NEGATIVE)
def test_rule_stays_quiet(rule_cls: type, source: str) -> None:
    assert check(rule_cls, source) == []


@pytest.mark.parametrize("rule_cls", BUILTIN_RULES)
def test_every_rule_has_three_fixtures_each_way(rule_cls: type) -> None:
    assert sum(r is rule_cls for r, _, _ in POSITIVE) >= 3
    assert sum(r is rule_cls for r, _ in NEGATIVE) >= 3


def test_catalog_ids_and_categories() -> None:
    by_category: dict[Category, list[str]] = {}
    for rule_cls in BUILTIN_RULES:
        rule = rule_cls()
        by_category.setdefault(rule.category, []).append(rule.rule_id)
        assert rule.description

    assert by_category[Category.ERROR_PRONENESS] == ["WPS440", "NOEFFECT", "WPS442", "E0602"]
    assert by_category[Category.CODE_STYLE] == ["I201", "E231", "WPS301", "E226", "C812"]
    assert by_category[Category.BEST_PRACTICES] == ["F401", "W0611", "W0621", "WPS336", "R504"]


def test_lexical_rules_do_not_need_a_tree() -> None:
    lexical = {r.rule_id for r in (rule_cls() for rule_cls in BUILTIN_RULES) if not r.requires_tree}
    assert lexical == {"E231", "E226"}


def test_messages() -> None:
    assert check(UnusedImport, "import os\n")[0].message == "'os' imported but unused"
    assert check(UnusedImport, "from os import path\n")[0].message == "'os.path' imported but unused"
    assert check(UndefinedVariable, "print(y)\n")[0].message == "Undefined variable 'y'"
    assert check(MissingWhitespaceAfterPunctuation, "a=[1,2]\n")[0].message == (
        "Missing whitespace after ','"
    )


def test_undefined_variable_subject_and_column() -> None:
    (finding,) = check(UndefinedVariable, "x = 1\ny = x + z\n")
    assert finding.subject == "z"
    assert (finding.local_line, finding.column) == (2, 8)


def test_undefined_variable_class_body_sees_module_names() -> None:
    source = "size = 3\nclass Box:\n    width = size\n    height = width\n"
    assert check(UndefinedVariable, source) == []


def test_undefined_variable_builtins_and_dunders() -> None:
    assert check(UndefinedVariable, "print(len(__name__), ValueError)\n") == []


def test_undefined_variable_annotations() -> None:
    eager = "def f(x: Frame) -> None:\n    pass\n"
    lazy = "from __future__ import annotations\n" + eager
    assert [f.subject for f in check(UndefinedVariable, eager)] == ["Frame"]
    assert check(UndefinedVariable, lazy) == []


def test_trailing_comma_reported_at_end_of_last_element() -> None:
    (finding,) = check(MissingTrailingComma, "x = [\n    1,\n    22\n]\n")
    assert (finding.local_line, finding.column) == (3, 6)


def test_whitespace_rule_column_points_at_comma() -> None:
    (finding,) = check(MissingWhitespaceAfterPunctuation, "a = [1,2]\n")
    assert finding.column == 6


def test_shadowing_reported_once_per_name() -> None:
    source = "x = 1\ndef f(x):\n    x = 2\n    return x\n"
    assert len(check(OuterScopeShadowing, source)) == 1
    assert len(check(RedefinedOuterName, source)) == 1


def test_comprehension_walrus_binds_outside_but_loop_variable_does_not() -> None:
    source = "ys = [y := v for v in range(3)]\nprint(y, v)\n"
    assert [f.subject for f in check(UndefinedVariable, source)] == ["v"]
