from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

Key = Tuple[Tuple[str, int], ...]

PASS = 'pass'
FALSIFICATION = 'FALSIFICATION'
VACUOUS = 'vacuous'
SKIPPED = 'skipped'
INFO = 'info'


def make_key(**indices: int) -> Key:
    """Keyed index tuple in a fixed order, e.g. (('q', 1), ('w', 2))"""
    return tuple(indices.items())


def key_text(key: Key) -> str:
    return ','.join(f"{name}={value}" for name, value in key)


@dataclass(frozen=True)
class Violation:
    """A failed identity with the basis element that witnesses it"""
    identity: str
    indices: Key = ()
    witness: str = ''


@dataclass(frozen=True)
class Measurement:
    """One keyed number: a dimension, a rank, a count"""
    key: Key
    measure: str
    value: int


@dataclass
class CheckReport:
    """Outcome of a single check: violations plus every measured number"""
    check: str
    violations: List[Violation] = field(default_factory=list)
    measurements: List[Measurement] = field(default_factory=list)
    vacuous: bool = False
    skipped: List[str] = field(default_factory=list)

    def fail(self, identity: str, witness: str = '', **indices: int):
        self.violations.append(Violation(identity, make_key(**indices), witness))

    def measure(self, measure: str, value: int, **indices: int):
        self.measurements.append(Measurement(make_key(**indices), measure, int(value)))

    def extend(self, other: 'CheckReport'):
        self.violations.extend(other.violations)
        self.measurements.extend(other.measurements)
        self.skipped.extend(other.skipped)

    @property
    def verdict(self) -> str:
        if self.violations:
            return FALSIFICATION
        if self.vacuous:
            return VACUOUS
        return PASS


@dataclass(frozen=True)
class ReportRecord:
    """One emitted line of a verification report"""
    suite: str
    check: str
    fixture: str
    key: str
    measure: str
    value: str
    verdict: str
    witness: str = ''

    @property
    def sort_key(self) -> Tuple:
        return (self.suite, self.fixture, self.check, self.key, self.measure, self.verdict, self.witness)

    def to_dict(self) -> Dict:
        """Convert to dictionary for serialization"""
        return {
            'suite': self.suite,
            'check': self.check,
            'fixture': self.fixture,
            'key': self.key,
            'measure': self.measure,
            'value': self.value,
            'verdict': self.verdict,
            'witness': self.witness
        }


@dataclass
class RunReport:
    """A full run: provenance header plus sorted records"""
    command: str
    field: str
    max_degree: int
    max_weight: int
    seed: int
    records: List[ReportRecord] = field(default_factory=list)
    fixture_hashes: Dict[str, str] = field(default_factory=dict)
    suite_versions: Dict[str, str] = field(default_factory=dict)
    engine_version: Optional[str] = None

    @property
    def falsified(self) -> bool:
        return any(r.verdict == FALSIFICATION for r in self.records)

    @property
    def exit_status(self) -> int:
        return 1 if self.falsified else 0

    def add_check(self, suite: str, fixture: str, report: CheckReport):
        """Flatten a CheckReport into records"""
        for m in report.measurements:
            self.records.append(ReportRecord(
                suite, report.check, fixture, key_text(m.key), m.measure, str(m.value), INFO
            ))
        for v in report.violations:
            self.records.append(ReportRecord(
                suite, report.check, fixture, key_text(v.indices), v.identity, '', FALSIFICATION, v.witness
            ))
        for block in report.skipped:
            self.records.append(ReportRecord(suite, report.check, fixture, block, 'block', '', SKIPPED))
        self.records.append(ReportRecord(suite, report.check, fixture, '', 'verdict', '', report.verdict))

    def sorted_records(self) -> List[ReportRecord]:
        return sorted(self.records, key=lambda r: r.sort_key)

    def header(self) -> Dict[str, str]:
        head = {
            'command': self.command,
            'field': self.field,
            'truncation': f"{self.max_degree},{self.max_weight}",
            'seed': str(self.seed),
        }
        if self.engine_version:
            head['engine_version'] = self.engine_version
        for name in sorted(self.fixture_hashes):
            head[f"fixture.{name}"] = self.fixture_hashes[name]
        for name in sorted(self.suite_versions):
            head[f"suite.{name}"] = self.suite_versions[name]
        return head
