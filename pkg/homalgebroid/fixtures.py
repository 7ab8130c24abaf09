"""Builtin example structures, stored as structure-file documents."""

import copy
import json
import logging
from typing import Any, Dict, List, Sequence

from homalgebroid.structure_file import FORMAT, StructureFile, from_dict

logger = logging.getLogger(__name__)

SCALAR_RING = {'kind': 'scalar', 'variables': []}


def _diag(values: Sequence[str]) -> List[List[str]]:
    n = len(values)
    return [[values[i] if i == j else '0' for j in range(n)] for i in range(n)]


def _block(upper: str, lower: str, m: int) -> List[List[str]]:
    """[[0, upper*I], [lower*I, 0]] of size 2m."""
    n = 2 * m
    matrix = [['0'] * n for _ in range(n)]
    for k in range(m):
        matrix[k][m + k] = upper
        matrix[m + k][k] = lower
    return matrix


def _units(n: int, indices: Sequence[int]) -> List[List[str]]:
    return [['1' if i == k else '0' for i in range(n)] for k in indices]


def _document(name: str, description: str, rank: int, phi: List[List[str]],
              entries: List[list], **extra) -> Dict[str, Any]:
    document = {
        'format': FORMAT,
        'name': name,
        'description': description,
        'ring': extra.pop('ring', SCALAR_RING),
        'bundle': {'rank': rank, 'Phi': phi},
        'bracket': {'kind': extra.pop('kind', 'lie'), 'entries': entries},
    }
    document.update(extra)
    return document


FIXTURES: Dict[str, Dict[str, Any]] = {
    'abelian_n2': _document(
        'abelian_n2',
        'Abelian rank-2 hom-Lie algebra with a hyperbolic twist, split metric and area form.',
        2, _diag(['2', '1/2']), [],
        metric=_block('1', '1', 1),
        symplectic=_block('1', '-1', 1)),
    'rank2_affine': _document(
        'rank2_affine',
        'The affine algebra [e1,e2] = e2 with the identity twist, split metric and area form.',
        2, _diag(['1', '1']), [[1, 2, 2, '1']],
        metric=_block('1', '1', 1),
        symplectic=_block('1', '-1', 1)),
    'heisenberg_hom': _document(
        'heisenberg_hom',
        'Heisenberg hom-Lie algebra [e1,e2] = e3 twisted by diag(2,3,6); span{e1,e3} is a subalgebroid.',
        3, _diag(['2', '3', '6']), [[1, 2, 3, '1']],
        subalgebroid=_units(3, [0, 2])),
    'poly_rank1_qscale': _document(
        'poly_rank1_qscale',
        'Rank-1 hom-Lie algebroid over QQ[x] with phi*(x) = 2x and anchor phi* o d/dx; '
        'the metric 1/x^2 is the only invariant one up to scale.',
        1, [['1/2']], [],
        ring={'kind': 'polynomial', 'variables': ['x'],
              'phi_star': ['2*x'], 'phi_star_inverse': ['1/2*x']},
        anchor=[['1']],
        metric=[['1/x^2']]),
    'double_zero_poisson': _document(
        'double_zero_poisson',
        'A + A* for abelian A twisted by diag(2,3), zero Poisson part, pairing metric, '
        'K = (Phi_A^-1, -Phi_A*^-1); para-Kaehler with vanishing Levi-Civita connection.',
        4, _diag(['2', '3', '1/2', '1/3']), [],
        metric=_block('1', '1', 2),
        symplectic=_block('1', '-1', 2),
        product_structure=_diag(['1/2', '1/3', '-2', '-3']),
        split={'plus': _units(4, [0, 1]), 'minus': _units(4, [2, 3])}),
    'foliation_block': _document(
        'foliation_block',
        'Two affine blocks with twist diag(1,-1,-1,1) and K = (Phi^-1, -Phi^-1): a para-complex structure.',
        4, _diag(['1', '-1', '-1', '1']), [[1, 2, 2, '1'], [3, 4, 3, '1']],
        product_structure=_diag(['1', '-1', '1', '-1'])),
    'double_sheared_mutant': _document(
        'double_sheared_mutant',
        'Pairing-metric double over [e1,e2] = e1; para-Hermitian, but the Levi-Civita connection '
        'moves A^-1 off itself so phi_A o K is not parallel.',
        4, _diag(['2', '1', '1/2', '1']),
        [[1, 2, 1, '1'], [1, 3, 4, '-1/2'], [2, 3, 3, '1/4']],
        metric=_block('1', '1', 2),
        product_structure=_diag(['1/2', '1', '-2', '-1']),
        split={'plus': _units(4, [0, 1]), 'minus': _units(4, [2, 3])}),
}


def fixture_names() -> List[str]:
    return list(FIXTURES)


def fixture_document(name: str) -> Dict[str, Any]:
    """A fresh copy of the named document.

    Raises:
        KeyError: unknown example name.
    """
    if name not in FIXTURES:
        raise KeyError(f"Unknown example '{name}' (available: {', '.join(FIXTURES)})")
    return copy.deepcopy(FIXTURES[name])


def load_fixture(name: str) -> StructureFile:
    return from_dict(fixture_document(name), source=f"<example {name}>")


def fixture_text(name: str, indent: int = 2) -> str:
    return json.dumps(fixture_document(name), indent=indent) + '\n'


def write_fixture(name: str, path: str, indent: int = 2) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        f.write(fixture_text(name, indent))
    logger.info("Wrote example %s to %s", name, path)
