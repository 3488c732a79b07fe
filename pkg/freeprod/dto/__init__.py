"""
Data Transfer Objects (DTOs) for freeprod reports.
Provides the JSON report structures shared by the CLI and the HTTP API.
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional


@dataclass
class SubgroupDTO:
    """One Euler-characteristic-zero subgroup containing the word."""
    kind: str
    generators: List[str]
    alpha_class: int
    beta: int

    def to_dict(self):
        return asdict(self)


@dataclass
class AnalyzeReportDTO:
    word: str
    group: str
    kind: str
    H_gamma: List[SubgroupDTO]
    mixture: List[List[int]]
    mean: Dict[str, str]
    moments: Dict[str, Dict[str, str]]
    classes: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self):
        return asdict(self)

    def to_markdown_row(self) -> str:
        gens = '; '.join('<' + ', '.join(h.generators) + '>' for h in self.H_gamma)
        return f"| {self.group} | {self.word} | {self.mean['exact']} | {gens} |"


@dataclass
class TorsionReportDTO:
    """Finite-order words: E[fix] grows like N^(1/order)."""
    word: str
    group: str
    kind: str
    order: int
    leading_exponent: Dict[str, str]
    reference: Dict[str, Any]

    def to_dict(self):
        return asdict(self)

    def to_markdown_row(self) -> str:
        return f"| {self.group} | {self.word} | N^{self.leading_exponent['exact']} | finite order {self.order} |"


@dataclass
class ExactRowDTO:
    N: int
    fix: Dict[str, str]
    fix2: Optional[Dict[str, str]] = None
    cycles: Dict[str, Dict[str, str]] = field(default_factory=dict)
    scaled_error: Optional[float] = None


@dataclass
class ExactReportDTO:
    word: str
    group: str
    rows: List[ExactRowDTO]
    limit: Optional[Dict[str, str]] = None
    error_exponent: Optional[str] = None
    correction_slope: Optional[float] = None

    def to_dict(self):
        return asdict(self)

    def to_csv(self) -> str:
        cycle_keys = sorted({k for r in self.rows for k in r.cycles}, key=int)
        header = ['N', 'fix', 'fix_decimal', 'fix2', 'fix2_decimal']
        header += [f"cyc{k}" for k in cycle_keys] + ['scaled_error']
        lines = [','.join(header)]
        for r in self.rows:
            cells = [str(r.N), r.fix['exact'], r.fix['decimal'],
                     r.fix2['exact'] if r.fix2 else '', r.fix2['decimal'] if r.fix2 else '']
            cells += [r.cycles[k]['exact'] if k in r.cycles else '' for k in cycle_keys]
            cells.append('' if r.scaled_error is None else repr(r.scaled_error))
            lines.append(','.join(cells))
        return '\n'.join(lines) + '\n'


@dataclass
class SampleReportDTO:
    word: str
    group: str
    N: int
    trials: int
    seed: int
    fix: Dict[str, Any]
    cycles: Dict[str, Dict[str, Any]]
    exact_mean: Optional[Dict[str, str]] = None

    def to_dict(self):
        return asdict(self)


@dataclass
class BruteReportDTO:
    word: str
    group: str
    N: int
    total_homs: int
    fix_distribution: Dict[str, int]
    moments: Dict[str, Dict[str, str]]
    cycle_distributions: Dict[str, Dict[str, int]]
    cycle_means: Dict[str, Dict[str, str]]
    identity_probability: Dict[str, str]
    joint: Optional[Dict[str, Any]] = None

    def to_dict(self):
        return asdict(self)


@dataclass
class ResolutionReportDTO:
    word: str
    group: str
    count: int
    zero_count: int
    quotients: List[Dict[str, Any]]

    def to_dict(self):
        return asdict(self)


@dataclass
class CheckDTO:
    name: str
    passed: bool
    detail: str = ''


@dataclass
class VerifyReportDTO:
    passed: bool
    checks: List[CheckDTO]

    def to_dict(self):
        return asdict(self)

    @property
    def failures(self) -> List[CheckDTO]:
        return [c for c in self.checks if not c.passed]


@dataclass
class ApiResponseDTO:
    """Standard API response wrapper."""
    success: bool
    data: Optional[Any] = None
    error: Optional[str] = None

    def to_dict(self):
        result = {'success': self.success}
        if self.data is not None:
            result['data'] = self.data
        if self.error:
            result['error'] = self.error
        return result
