"""
Verification campaigns: which checks each suite runs, on which fixtures,
and how their reports are folded into one RunReport.
"""

import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from src import __version__
from src.models.errors import ResourceCapError, TruncationError
from src.models.exactlin import Field
from src.models.report import CheckReport, RunReport
from src.models.simplicial import SimplicialAlgebra, Truncation, eta_map, label_text
from src.services.bar import build_bar, check_fused_operators, fused_degeneracy, fused_face, verify_appendix
from src.services.fixtures import DEFAULT_FIXTURES, FIXTURES, get_fixture
from src.services.schema import export_schema, parse_schema
from src.services.sseq import dold_puppe_check, e0_page, power_quotient_check
from src.services.tower import (
    check_delta_powers, check_iterated_tower, check_tower_level, check_tower_surjectivity,
    connectivity_report, convergence_check, tower_limit_report, twisting_check,
)
from utils.helpers import fixture_hash

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ('human', 'csv', 'record')

SUITES = ('appendix', 'tower', 'connectivity', 'convergence', 'dold-puppe', 'e0')

SUITE_VERSIONS = {
    'appendix': '1.1',
    'tower': '1.2',
    'connectivity': '1.0',
    'convergence': '1.1',
    'dold-puppe': '1.0',
    'e0': '1.0',
}

# Suites whose statements need a connected algebra default to K(k,1) alone
SUITE_FIXTURES = {
    'appendix': DEFAULT_FIXTURES,
    'tower': DEFAULT_FIXTURES,
    'connectivity': ('K1',),
    'convergence': DEFAULT_FIXTURES,
    'dold-puppe': ('K1',),
    'e0': ('K1',),
}

CONNECTIVITY_PAIRS = ((1, 2), (1, 3), (2, 2), (2, 3))


@dataclass
class RunConfig:
    """Resolved settings of one command-line run"""
    field: Field
    truncation: Truncation
    command: str
    fixtures: Tuple[str, ...] = ()
    input_path: Optional[Path] = None
    output: str = 'human'
    seed: int = 0
    cap: Optional[int] = None
    t: Optional[int] = None
    q: Optional[int] = None
    s: Optional[int] = None
    p: Optional[int] = None
    samples: int = 8

    def __post_init__(self):
        if self.truncation.max_degree < 1:
            raise ValueError("N must be at least 1")
        if self.output not in OUTPUT_FORMATS:
            raise ValueError(f"unknown output format {self.output!r}; use one of {', '.join(OUTPUT_FORMATS)}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.cap is not None and self.cap < 1:
            raise ValueError("cap must be positive")
        for name in self.fixtures:
            if name not in FIXTURES:
                raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}")

    @property
    def N(self) -> int:
        return self.truncation.max_degree

    @property
    def W(self) -> int:
        return self.truncation.max_weight

    def weights(self, limit: int) -> List[int]:
        return list(range(1, min(limit, self.W) + 1))


def load_input(config: RunConfig) -> Dict[str, SimplicialAlgebra]:
    """The objects a command runs on: the parsed input file, or the named fixtures"""
    if config.input_path is not None:
        text = Path(config.input_path).read_text()
        X = parse_schema(text, config.field, config.truncation, name=Path(config.input_path).stem)
        return {X.name: X}
    names = config.fixtures or DEFAULT_FIXTURES
    return {name: get_fixture(name, config.field, config.truncation) for name in names}


def sampled_fused_check(X: SimplicialAlgebra, r: int, n_max: int, weights: Sequence[int],
                        rng: random.Random, samples: int, cap: Optional[int] = None) -> CheckReport:
    """
    Spot-check the fused structure maps of b^r X on randomly drawn trees

    Args:
        X: Weight-graded simplicial algebra
        r: Iterate of the bar construction
        n_max: Highest degree sampled
        weights: Weights sampled
        rng: Seeded generator; the draw order is fixed by the block order
        samples: Trees drawn per block
        cap: Block cap

    Returns:
        Report naming the first disagreeing tree per operator
    """
    report = CheckReport(f"sampled fused operators r={r}")
    B = build_bar(X, r, cap)
    for w in weights:
        for n in range(1, n_max + 1):
            try:
                basis = list(B.basis(n, w))
            except ResourceCapError as exc:
                report.skipped.append(f"n={exc.n},w={exc.w},r={exc.r}")
                continue
            drawn = rng.sample(basis, min(samples, len(basis)))
            report.measure('sampled', len(drawn), n=n, w=w)
            for tree in drawn:
                for i in range(n + 1):
                    if B.face_column(i, n, tree) != fused_face(r, i, n).apply_column(X, n, tree):
                        report.fail('fused face', label_text(tree), i=i, n=n, w=w)
                    if n + 1 <= n_max and B.degeneracy_column(i, n, tree) != \
                            fused_degeneracy(r, i, n).apply_column(X, n, tree):
                        report.fail('fused degeneracy', label_text(tree), i=i, n=n, w=w)
    return report


def _appendix(X: SimplicialAlgebra, config: RunConfig, rng: random.Random) -> List[CheckReport]:
    q_max = min(3, config.N - 1)
    weights = config.weights(3)
    return [
        verify_appendix(X, q_max, weights, config.cap),
        check_fused_operators(X, 2, min(3, config.N), weights, config.cap),
        sampled_fused_check(X, 3, min(2, config.N), config.weights(2), rng, config.samples, config.cap),
    ]


def _tower(X: SimplicialAlgebra, config: RunConfig, rng: random.Random) -> List[CheckReport]:
    n_max = min(3, config.N)
    weights = config.weights(4)
    reports = []
    for r in range(1, 4):
        reports.append(check_tower_level(X, r, n_max, weights, config.cap))
        reports.append(check_delta_powers(X, r, n_max, weights, config.cap))
    reports.append(check_iterated_tower(X, 1, 1, min(2, config.N), config.weights(3), config.cap))
    reports.append(check_tower_surjectivity(eta_map(X), 1, min(2, config.N), config.weights(3), config.cap))
    q_max = min(2, config.N - 1)
    for n in range(2, 4):
        reports.append(twisting_check(X, n, q_max, config.weights(3), config.cap))
    return reports


def _connectivity(X: SimplicialAlgebra, config: RunConfig, rng: random.Random) -> List[CheckReport]:
    pairs = CONNECTIVITY_PAIRS if config.t is None and config.s is None else \
        ((1 if config.t is None else config.t, 2 if config.s is None else config.s),)
    q_max = min(3, config.N - 1)
    return [connectivity_report(X, t, s, q_max, config.weights(4), config.cap) for t, s in pairs]


def _convergence(X: SimplicialAlgebra, config: RunConfig, rng: random.Random) -> List[CheckReport]:
    t = 2 if config.t is None else config.t
    q = 0 if config.q is None else config.q
    if q + 1 > config.N:
        raise TruncationError(f"pi_{q} needs N >= {q + 1}")
    return [
        convergence_check(X, t, q, config.weights(4), config.cap),
        tower_limit_report(X, q, min(2 * t + q - 1, 4), config.weights(4), config.cap),
    ]


def _dold_puppe(X: SimplicialAlgebra, config: RunConfig, rng: random.Random) -> List[CheckReport]:
    powers = (config.p,) if config.p else (2, 3)
    return [dold_puppe_check(X, p, min(3, config.N - 1), config.weights(4)) for p in powers]


def _e0(X: SimplicialAlgebra, config: RunConfig, rng: random.Random) -> List[CheckReport]:
    q_max = min(2, config.N - 1)
    weights = config.weights(4)
    powers = (config.p,) if config.p else (1, 2, 3)
    reports = [power_quotient_check(X, p, q_max, weights, config.cap) for p in powers]
    _, page = e0_page(X, 2 if config.s is None else config.s, 3, q_max, weights, config.cap)
    reports.append(page)
    return reports


SUITE_RUNNERS: Dict[str, Callable[[SimplicialAlgebra, RunConfig, random.Random], List[CheckReport]]] = {
    'appendix': _appendix,
    'tower': _tower,
    'connectivity': _connectivity,
    'convergence': _convergence,
    'dold-puppe': _dold_puppe,
    'e0': _e0,
}


def new_run_report(config: RunConfig) -> RunReport:
    return RunReport(
        command=config.command,
        field=config.field.tag,
        max_degree=config.N,
        max_weight=config.W,
        seed=config.seed,
        engine_version=__version__,
    )


def run_verification(config: RunConfig, suite: str) -> RunReport:
    """
    Run one suite (or all of them) and assemble the report

    Args:
        config: Resolved run settings
        suite: A name from SUITES or 'all'

    Returns:
        RunReport with every dimension, rank, witness and skipped block
    """
    suites = SUITES if suite == 'all' else (suite,)
    if any(name not in SUITE_RUNNERS for name in suites):
        raise KeyError(f"unknown suite {suite!r}; known: {', '.join(SUITES)}, all")
    run = new_run_report(config)
    explicit = config.input_path is not None or bool(config.fixtures)
    objects: Dict[str, SimplicialAlgebra] = load_input(config) if explicit else {}
    for name in suites:
        run.suite_versions[name] = SUITE_VERSIONS[name]
        if explicit:
            targets = objects
        else:
            targets = {}
            for fixture in SUITE_FIXTURES[name]:
                if fixture not in objects:
                    objects[fixture] = get_fixture(fixture, config.field, config.truncation)
                targets[fixture] = objects[fixture]
        for fixture, X in targets.items():
            if fixture not in run.fixture_hashes:
                run.fixture_hashes[fixture] = fixture_hash(export_schema(X))
            rng = random.Random(f"{config.seed}:{name}:{fixture}")
            logger.info("suite %s on %s", name, fixture)
            for report in SUITE_RUNNERS[name](X, config, rng):
                logger.info("  %s: %s", report.check, report.verdict)
                run.add_check(name, fixture, report)
    return run
