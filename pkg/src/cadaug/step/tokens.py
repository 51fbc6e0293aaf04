"""Token kinds shared by the scanner implementations.

A scanner turns Part 21 text into a list of ``(kind, start, end)`` tuples
over the source string; comments and whitespace are dropped. The compiled
scanner mirrors these codes, so keep the numeric values stable.
"""

KEYWORD = 0   # FILE_NAME, CARTESIAN_POINT, ISO-10303-21, ...
INTEGER = 1
REAL = 2
STRING = 3    # includes the surrounding quotes
ENUM = 4      # .T., .UNSPECIFIED., ...
REF = 5       # #123
LPAREN = 6
RPAREN = 7
COMMA = 8
SEMI = 9
EQ = 10
STAR = 11
DOLLAR = 12
BINARY = 13   # "0A1B"

NAMES = {
    KEYWORD: "keyword",
    INTEGER: "integer",
    REAL: "real",
    STRING: "string",
    ENUM: "enum",
    REF: "entity reference",
    LPAREN: "'('",
    RPAREN: "')'",
    COMMA: "','",
    SEMI: "';'",
    EQ: "'='",
    STAR: "'*'",
    DOLLAR: "'$'",
    BINARY: "binary",
}
