from enum import IntEnum, StrEnum


class BoundaryKind(StrEnum):
    PERIODIC = "periodic"
    TWISTED = "twisted"
    TOROIDAL = "toroidal"


class BondKind(StrEnum):
    PLAIN = "plain"
    TWISTED = "twisted"
    TOROIDAL = "toroidal"


class CheckStatus(StrEnum):
    PASS = "PASS"
    FAIL = "FAIL"
    SKIPPED = "SKIPPED"


class ExitCode(IntEnum):
    SUCCESS = 0
    CONFIG_ERROR = 2
    SOLVER_FAILURE = 3
    ORACLE_MISMATCH = 4


class CellStatus(StrEnum):
    OK = "ok"
    OUTSIDE_REGION = "outside-region"
