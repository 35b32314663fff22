"""
Data contracts for batch runs: run configuration and the row types emitted as
CSV/JSON. Column order of every row type is fixed; CSV_SCHEMA_VERSION is bumped
whenever it changes.
"""
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Optional, Tuple

from errors import FqGeomError

CSV_SCHEMA_VERSION = 1
OUTPUT_FORMATS = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines the output of a batch run"""
    q_list: Tuple[int, ...]
    d: int = 2
    k: int = 1
    mode: str = "fast"          # "fast" | "exact"
    group: str = "O"            # "O" | "SO"
    trials: int = 1
    seed: int = 20240601
    size_schedule: Tuple[int, ...] = ()
    output_format: str = "csv"
    worker_count: int = 1
    timings: bool = False
    group_budget: int = 10_000_000

    def __post_init__(self):
        object.__setattr__(self, 'q_list', tuple(int(q) for q in self.q_list))
        object.__setattr__(self, 'size_schedule', tuple(int(s) for s in self.size_schedule))
        if not self.q_list:
            raise FqGeomError("at least one q is required")
        if self.d < 1:
            raise FqGeomError(f"dimension must be positive, got {self.d}")
        if self.k < 1:
            raise FqGeomError(f"k must be at least 1, got {self.k}")
        if self.mode not in ("fast", "exact"):
            raise FqGeomError(f"unknown mode {self.mode!r}")
        if self.group not in ("O", "SO"):
            raise FqGeomError(f"unknown group variant {self.group!r}")
        if self.trials < 1:
            raise FqGeomError(f"trials must be at least 1, got {self.trials}")
        if not 0 <= self.seed < 2 ** 64:
            raise FqGeomError("seed must fit in 64 bits")
        if self.output_format not in OUTPUT_FORMATS:
            raise FqGeomError(f"unknown output format {self.output_format!r}")
        if self.worker_count < 1:
            raise FqGeomError(f"worker count must be at least 1, got {self.worker_count}")
        if self.group_budget < 1:
            raise FqGeomError(f"group budget must be positive, got {self.group_budget}")


@dataclass(frozen=True)
class ScanRow:
    q: int
    d: int
    k: int
    set_size: int
    trial: int
    seed: int
    T_count: int
    S_count: int
    elapsed_ms: Optional[float] = None

    @staticmethod
    def header(timings: bool = False) -> List[str]:
        names = [f.name for f in fields(ScanRow)]
        return names if timings else names[:-1]

    def as_row(self, timings: bool = False) -> List[Any]:
        values = [getattr(self, name) for name in self.header(timings)]
        return values

    def to_dict(self, timings: bool = False) -> Dict[str, Any]:
        return dict(zip(self.header(timings), self.as_row(timings)))


@dataclass(frozen=True)
class CountRow:
    """One `count` run over a point-set file"""
    q: int
    d: int
    k: int
    set_size: int
    mode: str
    group: str
    T_fast: int
    T_exact: Optional[int]
    S_count: int
    degenerate_classes: int
    nondegenerate_classes: int

    @staticmethod
    def header() -> List[str]:
        return [f.name for f in fields(CountRow)]

    def as_row(self) -> List[Any]:
        return ["" if v is None else v for v in (getattr(self, n) for n in self.header())]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class SuiteResult:
    """Outcome of one verification case"""
    suite: str
    case: str
    passed: bool
    lhs: Any = None
    rhs: Any = None
    detail: str = ""
    extras: Dict[str, Any] = field(default_factory=dict)

    @staticmethod
    def header() -> List[str]:
        return ["suite", "case", "passed", "lhs", "rhs", "detail"]

    def as_row(self) -> List[Any]:
        return [self.suite, self.case, self.passed,
                "" if self.lhs is None else self.lhs,
                "" if self.rhs is None else self.rhs, self.detail]

    def to_dict(self) -> Dict[str, Any]:
        out = dict(zip(self.header(), [self.suite, self.case, self.passed, self.lhs, self.rhs, self.detail]))
        out.update(self.extras)
        return out
