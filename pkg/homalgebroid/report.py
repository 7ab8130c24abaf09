"""Verification reports: named check entries with witnesses and exact residuals."""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence

logger = logging.getLogger(__name__)

PASS = 'pass'
FAIL = 'fail'
INFO = 'info'

REPORT_FORMAT = 'homalgebroid-report/1'


def is_zero_value(value: Any) -> bool:
    """True for a zero RingElement / Section / tensor, or a nested list of them."""
    if value is None:
        return True
    if isinstance(value, (list, tuple)):
        return all(is_zero_value(v) for v in value)
    if isinstance(value, (int, float)):
        return value == 0
    return bool(getattr(value, 'is_zero'))


def render_value(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return '[' + ', '.join(render_value(v) for v in value) + ']'
    return str(value)


@dataclass
class CheckResult:
    """One named check: status, number of cases, first failing witness and residual."""
    name: str
    status: str
    cases: int = 0
    witness: Optional[List[str]] = None
    residual: Optional[str] = None
    detail: str = ''

    @property
    def passed(self) -> bool:
        return self.status != FAIL

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'status': self.status,
            'cases': self.cases,
            'witness': self.witness,
            'residual': self.residual,
            'detail': self.detail,
        }

    def render(self) -> str:
        line = f"[{self.status.upper():4}] {self.name} ({self.cases} cases)"
        if self.witness is not None:
            line += f" witness=({', '.join(self.witness)})"
        if self.residual is not None:
            line += f" residual={self.residual}"
        if self.detail:
            line += f" -- {self.detail}"
        return line


class LawCheck:
    """Accumulates residuals of one law; the first nonzero residual is the witness."""

    def __init__(self, name: str, informational: bool = False):
        self.name = name
        self.informational = informational
        self.cases = 0
        self.witness: Optional[List[str]] = None
        self.residual: Any = None
        self.detail = ''

    def record(self, witness: Sequence, residual: Any) -> bool:
        self.cases += 1
        if self.witness is None and not is_zero_value(residual):
            self.witness = [str(w) for w in witness]
            self.residual = residual
            return False
        return True

    def fail(self, witness: Sequence, detail: str) -> None:
        """Record a failure that has no algebraic residual (e.g. degeneracy)."""
        self.cases += 1
        if self.witness is None:
            self.witness = [str(w) for w in witness]
            self.detail = detail

    @property
    def ok(self) -> bool:
        return self.witness is None

    def result(self) -> CheckResult:
        if self.informational:
            return CheckResult(self.name, INFO, self.cases, self.witness,
                               render_value(self.residual) if self.residual is not None else '0',
                               self.detail)
        if self.ok:
            return CheckResult(self.name, PASS, self.cases, detail=self.detail)
        residual = render_value(self.residual) if self.residual is not None else None
        logger.warning("%s failed at (%s): %s", self.name, ', '.join(self.witness),
                       residual or self.detail)
        return CheckResult(self.name, FAIL, self.cases, self.witness, residual, self.detail)


@dataclass
class VerificationReport:
    """Ordered list of check entries plus an overall verdict."""
    subject: str = ''
    seed: Optional[int] = None
    entries: List[CheckResult] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)

    def add(self, entry) -> CheckResult:
        if isinstance(entry, LawCheck):
            entry = entry.result()
        self.entries.append(entry)
        return entry

    def add_all(self, laws: Iterable) -> None:
        for law in laws:
            self.add(law)

    def extend(self, other: 'VerificationReport') -> None:
        """Append entries of ``other`` whose names are not present yet.

        A repeated name keeps its first position; if the repeat fails where the
        first entry did not, the failing entry takes that position.
        """
        positions = {e.name: i for i, e in enumerate(self.entries)}
        for entry in other.entries:
            index = positions.get(entry.name)
            if index is None:
                positions[entry.name] = len(self.entries)
                self.entries.append(entry)
                continue
            existing = self.entries[index]
            if existing.status == entry.status:
                logger.debug("Dropping repeated entry %s (%s)", entry.name, entry.status)
            elif entry.status == FAIL:
                logger.warning("Entry %s was %s and now fails; keeping the failure",
                               entry.name, existing.status)
                self.entries[index] = entry
            else:
                logger.warning("Entry %s repeated as %s; keeping %s",
                               entry.name, entry.status, existing.status)

    def names(self) -> List[str]:
        return [e.name for e in self.entries]

    def get(self, name: str) -> Optional[CheckResult]:
        for entry in self.entries:
            if entry.name == name:
                return entry
        return None

    def failures(self) -> List[CheckResult]:
        return [e for e in self.entries if e.status == FAIL]

    def section(self, prefix: str) -> 'VerificationReport':
        """Entries whose name starts with ``prefix``."""
        return VerificationReport(self.subject, self.seed,
                                  [e for e in self.entries if e.name.startswith(prefix)])

    @property
    def passed(self) -> bool:
        return not self.failures()

    @property
    def verdict(self) -> str:
        return PASS if self.passed else FAIL

    def to_dict(self, include_timings: bool = False) -> Dict[str, Any]:
        data = {
            'format': REPORT_FORMAT,
            'subject': self.subject,
            'seed': self.seed,
            'verdict': self.verdict,
            'checks': [e.to_dict() for e in self.entries],
        }
        if include_timings:
            data['timings'] = {k: round(v, 6) for k, v in self.timings.items()}
        return data

    def to_json(self, include_timings: bool = False, indent: int = 2) -> str:
        return json.dumps(self.to_dict(include_timings), indent=indent) + '\n'

    def render_text(self, include_timings: bool = False) -> str:
        lines = [f"Report for {self.subject or '<structure>'} (seed {self.seed})"]
        lines.extend(e.render() for e in self.entries)
        if include_timings:
            for name, elapsed in self.timings.items():
                lines.append(f"  time {name}: {elapsed:.3f}s")
        failed = len(self.failures())
        lines.append(f"Verdict: {self.verdict.upper()} "
                     f"({len(self.entries) - failed}/{len(self.entries)} entries without failure)")
        return '\n'.join(lines) + '\n'
