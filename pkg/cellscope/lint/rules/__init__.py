"""Built-in rule catalog, grouped by category in report order."""

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

BUILTIN_RULES = (
    BlockVariableOverlap,
    NoEffectStatement,
    OuterScopeShadowing,
    UndefinedVariable,
    MissingImportNewline,
    MissingWhitespaceAfterPunctuation,
    DottedRawImport,
    MissingArithmeticWhitespace,
    MissingTrailingComma,
    UnusedImport,
    UnusedAliasedImport,
    RedefinedOuterName,
    StringConcatenation,
    UnnecessaryAssignBeforeReturn,
)

__all__ = ["BUILTIN_RULES"]
