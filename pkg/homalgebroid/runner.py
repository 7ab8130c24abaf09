"""Dispatch of named checks over a loaded structure file, and phase-space emission."""

import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from homalgebroid.algebroid import (LIE, canonical_symplectic_form, check_hom_algebroid,
                                    check_hom_lie_algebra, check_hom_lie_algebroid,
                                    check_left_symmetric, check_metric, check_subalgebroid,
                                    check_symplectic)
from homalgebroid.calculus import check_exterior
from homalgebroid.config import AppConfig, load_config
from homalgebroid.connection import (check_left_symmetric_connection, check_representation,
                                     dual_representation, levi_civita,
                                     lie_derivative_representation, verify_levi_civita)
from homalgebroid.errors import AttachmentError
from homalgebroid.parakahler import (build_phase_space, check_almost_product, check_para_complex,
                                     check_para_hermitian, check_para_kahler,
                                     verify_parakahler_suite)
from homalgebroid.report import VerificationReport
from homalgebroid.sampling import Sampler
from homalgebroid.structure_file import StructureFile, write_structure
from homalgebroid.timing import CheckTimings, timer

logger = logging.getLogger(__name__)

CHECK_ORDER = (
    'homliealgebra', 'homliealgebroid', 'homalgebroid', 'subalgebroid', 'representation',
    'exterior', 'metric', 'levicivita', 'symplectic', 'leftsymmetric', 'almostproduct',
    'paracomplex', 'parahermitian', 'parakahler',
)

# attachments each check needs, and the bracket kind it applies to (None: either)
REQUIREMENTS: Dict[str, Tuple[Tuple[str, ...], Optional[str]]] = {
    'homliealgebra': ((), LIE),
    'homliealgebroid': ((), LIE),
    'homalgebroid': ((), 'product'),
    'subalgebroid': (('subalgebroid',), None),
    'representation': ((), LIE),
    'exterior': ((), LIE),
    'metric': (('metric',), None),
    'levicivita': (('metric',), LIE),
    'symplectic': (('symplectic',), None),
    'leftsymmetric': (('symplectic',), None),
    'almostproduct': (('product_structure',), None),
    'paracomplex': (('product_structure',), None),
    'parahermitian': (('metric', 'product_structure'), LIE),
    'parakahler': (('metric', 'product_structure'), LIE),
}


def _available(sf: StructureFile, name: str) -> Optional[str]:
    """Reason ``name`` cannot run on ``sf``, or None."""
    needs, kind = REQUIREMENTS[name]
    for attachment in needs:
        if getattr(sf, attachment) is None:
            return f"check '{name}' needs a {attachment.replace('_', ' ')} attachment"
    if kind is not None and sf.structure.kind != kind:
        return f"check '{name}' applies to {kind}-kind structures only"
    if name == 'paracomplex' and not sf.ring.is_scalar and sf.split is None:
        return "check 'paracomplex' over a polynomial ring needs a declared split"
    return None


def default_selection(sf: StructureFile) -> List[str]:
    """Every check whose attachments are present, in canonical order."""
    return [name for name in CHECK_ORDER if _available(sf, name) is None]


def parse_selection(text: Optional[str]) -> Optional[List[str]]:
    """Split a comma-separated ``--only`` value.

    Raises:
        AttachmentError: for an unknown check name.
    """
    if not text:
        return None
    names = [part.strip() for part in text.split(',') if part.strip()]
    unknown = [name for name in names if name not in REQUIREMENTS]
    if unknown:
        raise AttachmentError(f"Unknown check(s): {', '.join(unknown)} "
                              f"(known: {', '.join(CHECK_ORDER)})")
    return names


def _representation(sf: StructureFile, sampler: Sampler) -> VerificationReport:
    S = sf.structure
    adjoint = lie_derivative_representation(S)
    report = check_representation(S, adjoint, sampler, 'representation.adjoint')
    report.extend(check_representation(S, dual_representation(S, adjoint), sampler,
                                       'representation.coadjoint'))
    return report


def _leftsymmetric(sf: StructureFile, sampler: Sampler) -> VerificationReport:
    if sf.structure.is_lie:
        return check_left_symmetric_connection(sf.structure, sf.symplectic, sampler)
    return check_left_symmetric(sf.structure, sf.symplectic, sampler)


def _levicivita(sf: StructureFile, sampler: Sampler) -> VerificationReport:
    S = sf.structure
    report = check_metric(S, sf.metric, sampler)
    report.extend(verify_levi_civita(S, sf.metric, levi_civita(S, sf.metric), sampler))
    return report


def _parakahler(sf: StructureFile, sampler: Sampler) -> VerificationReport:
    data, report = check_para_kahler(sf.structure, sf.metric, sf.product_structure, sf.split, sampler)
    if data is not None:
        report.extend(verify_parakahler_suite(data, sampler))
    return report


CHECKS: Dict[str, Callable[[StructureFile, Sampler], VerificationReport]] = {
    'homliealgebra': lambda sf, s: check_hom_lie_algebra(sf.structure, s),
    'homliealgebroid': lambda sf, s: check_hom_lie_algebroid(sf.structure, s),
    'homalgebroid': lambda sf, s: check_hom_algebroid(sf.structure, s),
    'subalgebroid': lambda sf, s: check_subalgebroid(sf.structure, sf.subalgebroid, s),
    'representation': _representation,
    'exterior': lambda sf, s: check_exterior(sf.structure, s),
    'metric': lambda sf, s: check_metric(sf.structure, sf.metric, s),
    'levicivita': _levicivita,
    'symplectic': lambda sf, s: check_symplectic(sf.structure, sf.symplectic, s),
    'leftsymmetric': _leftsymmetric,
    'almostproduct': lambda sf, s: check_almost_product(sf.structure, sf.product_structure),
    'paracomplex': lambda sf, s: check_para_complex(sf.structure, sf.product_structure, sf.split),
    'parahermitian': lambda sf, s: check_para_hermitian(sf.structure, sf.metric,
                                                        sf.product_structure, sf.split, s),
    'parakahler': _parakahler,
}


def resolve_seed(sf: StructureFile, seed: Optional[int], config: AppConfig) -> int:
    """CLI seed, then the file's seed, then the configured default."""
    if seed is not None:
        return seed
    if sf.seed is not None:
        return sf.seed
    return config.verification.default_seed


@timer
def run_checks(sf: StructureFile, selection: Optional[Sequence[str]] = None,
               seed: Optional[int] = None, config: Optional[AppConfig] = None,
               timings: Optional[CheckTimings] = None) -> VerificationReport:
    """Run the selected checks (default: all applicable) and merge their entries.

    Raises:
        AttachmentError: a selected check lacks its attachment or does not
            apply to the structure's kind.
    """
    config = config or load_config()
    timings = timings or CheckTimings()
    names = list(selection) if selection else default_selection(sf)
    for name in names:
        if name not in CHECKS:
            raise AttachmentError(f"Unknown check '{name}'")
        reason = _available(sf, name)
        if reason:
            raise AttachmentError(reason)
    seed = resolve_seed(sf, seed, config)
    sampler = Sampler(seed, config.verification)
    report = VerificationReport(sf.name, sampler.seed)
    ordered = [name for name in CHECK_ORDER if name in names]
    for name in ordered:
        logger.debug("Running %s on %s", name, sf.name)
        with timings.measure(name):
            report.extend(CHECKS[name](sf, sampler))
    report.timings = timings.summary()
    logger.info("%s: %s (%d entries, %d failing)", sf.name, report.verdict.upper(),
                len(report.entries), len(report.failures()))
    return report


def emit_phase_space(sf: StructureFile, out_path: Optional[str] = None,
                     seed: Optional[int] = None, config: Optional[AppConfig] = None) -> StructureFile:
    """Phase space of ``sf`` with the connection from its metric (or the declared one).

    Raises:
        AttachmentError: neither a metric nor a connection is attached.
        PreconditionError: the connection is not a representation.
    """
    config = config or load_config()
    S = sf.structure
    if not S.is_lie:
        raise AttachmentError("phase-space needs a lie-kind structure")
    if sf.metric is not None:
        nabla = levi_civita(S, sf.metric)
    elif sf.connection is not None:
        nabla = sf.connection
    else:
        raise AttachmentError("phase-space needs a metric or a connection attachment")
    sampler = Sampler(resolve_seed(sf, seed, config), config.verification)
    name = f"{sf.name}_phase_space"
    phase = build_phase_space(S, nabla, name, sampler)
    result = StructureFile(
        name, phase,
        description=f"Phase space of {sf.name} built from its {nabla.name} connection",
        symplectic=canonical_symplectic_form(S.rank, S.ring), seed=sf.seed)
    if out_path:
        write_structure(result, out_path, config.report.indent)
    return result
