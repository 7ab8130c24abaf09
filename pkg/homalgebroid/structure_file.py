"""Structure description files: a versioned JSON document per hom-Lie algebroid.

Indices in the file are 1-based. Bracket entries are sparse ``[i, j, k, value]``
quadruples (unlisted coefficients are zero; a lie-kind file lists i < j only).
Values are integers or expression strings in the ring variables. Attachments
(metric, symplectic form, K, connection) may be rational functions.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from homalgebroid.algebroid import LIE, PRODUCT, HomAlgebroidStructure, HomBundle, Section
from homalgebroid.connection import Connection
from homalgebroid.errors import AlgebroidError, StructureParseError
from homalgebroid.expression import ExpressionError, render
from homalgebroid.linalg import Matrix
from homalgebroid.parakahler import AdaptedSplit
from homalgebroid.ring import (FRACTION, KINDS, POLYNOMIAL, SCALAR, CoefficientRing, RingElement,
                               RingEndomorphism, TwistedDerivation)

logger = logging.getLogger(__name__)

FORMAT = 'homalgebroid/1'


@dataclass
class StructureFile:
    """A parsed structure plus its optional attachments."""
    name: str
    structure: HomAlgebroidStructure
    description: str = ''
    metric: Optional[Matrix] = None
    symplectic: Optional[Matrix] = None
    product_structure: Optional[Matrix] = None
    split: Optional[AdaptedSplit] = None
    subalgebroid: Optional[List[Section]] = None
    connection: Optional[Connection] = None
    seed: Optional[int] = None
    source: str = field(default='', compare=False)

    @property
    def ring(self) -> CoefficientRing:
        return self.structure.ring

    def attachments(self) -> List[str]:
        names = ('metric', 'symplectic', 'product_structure', 'split', 'subalgebroid', 'connection')
        return [name for name in names if getattr(self, name) is not None]


class _Reader:
    """Walks the decoded document, raising StructureParseError with a dotted path."""

    def __init__(self, source: str):
        self.source = source

    def error(self, path: str, message: str) -> StructureParseError:
        return StructureParseError(message, path=f"{self.source}:{path}" if self.source else path)

    def require(self, data: Dict[str, Any], key: str, path: str):
        if not isinstance(data, dict):
            raise self.error(path, "expected an object")
        if key not in data:
            raise self.error(f"{path}.{key}" if path else key, "missing required field")
        return data[key]

    def block(self, data: Dict[str, Any], key: str, path: str, required: bool = True):
        """A nested object; None when optional and absent."""
        where = f"{path}.{key}" if path else key
        if not required and (not isinstance(data, dict) or data.get(key) is None):
            return None
        value = self.require(data, key, path)
        if not isinstance(value, dict):
            raise self.error(where, f"expected an object, got {type(value).__name__}")
        return value

    def text(self, data: Dict[str, Any], key: str, default: str = '') -> str:
        value = data.get(key)
        if value is None:
            return default
        if not isinstance(value, str):
            raise self.error(key, f"expected a string, got {type(value).__name__}")
        return value

    def integer(self, value, path: str, minimum: Optional[int] = None) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.error(path, f"expected an integer, got {value!r}")
        if minimum is not None and value < minimum:
            raise self.error(path, f"must be at least {minimum}")
        return value

    def element(self, ring: CoefficientRing, value, path: str) -> RingElement:
        if isinstance(value, bool) or isinstance(value, float):
            raise self.error(path, f"{value!r} is not an exact value; write integers or 'p/q'")
        if not isinstance(value, (int, str)):
            raise self.error(path, f"expected an integer or expression string, got {value!r}")
        try:
            return ring(value)
        except ExpressionError as e:
            column = f" (column {e.column})" if e.column else ''
            raise self.error(path, f"{e.message}{column} in '{value}'") from e

    def vector(self, ring: CoefficientRing, value, length: int, path: str) -> List[RingElement]:
        if not isinstance(value, list) or len(value) != length:
            raise self.error(path, f"expected a list of {length} entries")
        return [self.element(ring, v, f"{path}[{i}]") for i, v in enumerate(value)]

    def matrix(self, ring: CoefficientRing, value, n: int, path: str) -> Matrix:
        if not isinstance(value, list) or len(value) != n:
            raise self.error(path, f"expected {n} rows")
        return [self.vector(ring, row, n, f"{path}[{i}]") for i, row in enumerate(value)]

    def sparse(self, ring: CoefficientRing, value, n: int, path: str, lie: bool) -> List[List[List]]:
        table = [[[ring.zero] * n for _ in range(n)] for _ in range(n)]
        seen = set()
        if not isinstance(value, list):
            raise self.error(path, "expected a list of [i, j, k, value] entries")
        for index, entry in enumerate(value):
            where = f"{path}[{index}]"
            if not isinstance(entry, list) or len(entry) != 4:
                raise self.error(where, "expected [i, j, k, value]")
            i, j, k = (self.integer(x, where, 1) for x in entry[:3])
            if max(i, j, k) > n:
                raise self.error(where, f"index out of range for rank {n}")
            if lie and i >= j:
                raise self.error(where, "lie-kind entries need i < j")
            if (i, j, k) in seen:
                raise self.error(where, f"duplicate entry ({i},{j},{k})")
            seen.add((i, j, k))
            coefficient = self.element(ring, entry[3], f"{where}[3]")
            table[i - 1][j - 1][k - 1] = coefficient
            if lie:
                table[j - 1][i - 1][k - 1] = -coefficient
        return table


def _ring(reader: _Reader, block) -> Tuple[CoefficientRing, RingEndomorphism]:
    kind = reader.require(block, 'kind', 'ring')
    if kind not in KINDS:
        raise reader.error('ring.kind', f"unknown ring kind '{kind}' (expected one of {', '.join(KINDS)})")
    variables = block.get('variables', [])
    if not isinstance(variables, list) or not all(isinstance(v, str) for v in variables):
        raise reader.error('ring.variables', "expected a list of variable names")
    try:
        ring = CoefficientRing(kind, tuple(variables))
        if ring.is_scalar:
            return ring, RingEndomorphism.identity(ring)
        images = block.get('phi_star', variables)
        inverse = block.get('phi_star_inverse')
        images = reader.vector(ring.polynomial_ring(), images, len(variables), 'ring.phi_star')
        if inverse is not None:
            inverse = reader.vector(ring.polynomial_ring(), inverse, len(variables),
                                    'ring.phi_star_inverse')
        return ring, RingEndomorphism(ring, images, inverse)
    except StructureParseError:
        raise
    except AlgebroidError as e:
        raise reader.error('ring', str(e)) from e


def from_dict(data: Dict[str, Any], source: str = '') -> StructureFile:
    """Build a StructureFile from a decoded document.

    Raises:
        StructureParseError: schema violations and expression syntax errors.
        InvalidStructureError, DegenerateError: construction-time invariants.
    """
    reader = _Reader(source)
    if not isinstance(data, dict):
        raise reader.error('', "top level must be an object")
    version = reader.require(data, 'format', '')
    if version != FORMAT:
        raise reader.error('format', f"unsupported format '{version}' (expected '{FORMAT}')")
    ring, endomorphism = _ring(reader, reader.block(data, 'ring', ''))
    attached = ring.fraction_ring()

    bundle_block = reader.block(data, 'bundle', '')
    n = reader.integer(reader.require(bundle_block, 'rank', 'bundle'), 'bundle.rank', 1)
    twist = reader.matrix(ring, reader.require(bundle_block, 'Phi', 'bundle'), n, 'bundle.Phi')
    twist_inverse = None
    if bundle_block.get('Phi_inverse') is not None:
        twist_inverse = reader.matrix(ring, bundle_block['Phi_inverse'], n, 'bundle.Phi_inverse')
    bundle = HomBundle(ring, n, endomorphism, twist, twist_inverse)

    bracket_block = reader.block(data, 'bracket', '')
    kind = bracket_block.get('kind', LIE)
    if kind not in (LIE, PRODUCT):
        raise reader.error('bracket.kind', f"expected '{LIE}' or '{PRODUCT}', got '{kind}'")
    table = reader.sparse(ring, bracket_block.get('entries', []), n, 'bracket.entries', kind == LIE)

    anchors = None
    if data.get('anchor') is not None:
        rows = data['anchor']
        if not isinstance(rows, list) or len(rows) != n:
            raise reader.error('anchor', f"expected one coefficient list per basis section ({n})")
        anchors = [TwistedDerivation(endomorphism,
                                     tuple(reader.vector(ring, row, ring.ngens, f'anchor[{i}]')))
                   for i, row in enumerate(rows)]
    name = reader.text(data, 'name') or 'structure'
    structure = HomAlgebroidStructure(bundle, table, anchors, kind, name)

    result = StructureFile(name, structure, reader.text(data, 'description'), source=source)
    for key in ('metric', 'symplectic', 'product_structure'):
        if data.get(key) is not None:
            setattr(result, key, reader.matrix(attached, data[key], n, key))
    block = reader.block(data, 'split', '', required=False)
    if block is not None:
        sides = []
        for side in ('plus', 'minus'):
            vectors = reader.require(block, side, 'split')
            if not isinstance(vectors, list):
                raise reader.error(f'split.{side}', "expected a list of vectors")
            sides.append([Section(reader.vector(ring, v, n, f'split.{side}[{i}]'))
                          for i, v in enumerate(vectors)])
        result.split = AdaptedSplit(*sides)
    if data.get('subalgebroid') is not None:
        vectors = data['subalgebroid']
        if not isinstance(vectors, list) or not vectors:
            raise reader.error('subalgebroid', "expected a non-empty list of vectors")
        result.subalgebroid = [Section(reader.vector(ring, v, n, f'subalgebroid[{i}]'))
                               for i, v in enumerate(vectors)]
    if data.get('connection') is not None:
        entries = reader.sparse(attached, data['connection'], n, 'connection', lie=False)
        result.connection = Connection(structure, entries, name='declared')
    if data.get('seed') is not None:
        result.seed = reader.integer(data['seed'], 'seed', 0)
    logger.debug("Loaded %s (rank %d over %s) with attachments %s", name, n, ring,
                 result.attachments())
    return result


def loads(text: str, source: str = '') -> StructureFile:
    """Parse a structure file's text.

    Raises:
        StructureParseError: JSON syntax errors carry line and column.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise StructureParseError(e.msg, line=e.lineno, column=e.colno, path=source) from e
    return from_dict(data, source)


def parse_structure(path: str) -> StructureFile:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise StructureParseError(f"cannot read file: {e.strerror}", path=path) from e
    return loads(text, path)


# -- serialization ----------------------------------------------------------

def _text(value: RingElement) -> str:
    return render(value)


def _matrix(matrix: Matrix) -> List[List[str]]:
    return [[_text(x) for x in row] for row in matrix]


def _entries(table: Sequence[Sequence], lie: bool) -> List[list]:
    entries = []
    n = len(table)
    for i in range(n):
        for j in range(i + 1 if lie else 0, n):
            for k, c in enumerate(table[i][j].coords):
                if c:
                    entries.append([i + 1, j + 1, k + 1, _text(c)])
    return entries


def _values(sf: StructureFile):
    S = sf.structure
    yield from (x for row in S.bundle.twist for x in row)
    yield from (c for row in S.table for entry in row for c in entry.coords)
    yield from (q for d in S.anchors for q in d.coefficients)
    if sf.split is not None:
        yield from (c for b in sf.split.plus + sf.split.minus for c in b.coords)
    if sf.subalgebroid is not None:
        yield from (c for b in sf.subalgebroid for c in b.coords)


def to_dict(sf: StructureFile) -> Dict[str, Any]:
    """Canonical document for ``sf``; from_dict(to_dict(sf)) reproduces it.

    A polynomial ring is written as its fraction field when a structural
    coefficient is a proper rational function.
    """
    S = sf.structure
    ring = S.ring
    kind = ring.kind
    if kind == POLYNOMIAL and any(not v.is_polynomial for v in _values(sf)):
        kind = FRACTION
    data: Dict[str, Any] = {'format': FORMAT, 'name': sf.name}
    if sf.description:
        data['description'] = sf.description
    ring_block: Dict[str, Any] = {'kind': kind, 'variables': list(ring.variables)}
    if kind != SCALAR:
        ring_block['phi_star'] = [_text(p) for p in S.endomorphism.images]
        ring_block['phi_star_inverse'] = [_text(p) for p in S.endomorphism.inverse_images]
    data['ring'] = ring_block
    data['bundle'] = {'rank': S.rank, 'Phi': _matrix(S.bundle.twist)}
    data['bracket'] = {'kind': S.kind, 'entries': _entries(S.table, S.is_lie)}
    if S.has_anchor:
        data['anchor'] = [[_text(q) for q in d.coefficients] for d in S.anchors]
    for key in ('metric', 'symplectic', 'product_structure'):
        value = getattr(sf, key)
        if value is not None:
            data[key] = _matrix(value)
    if sf.split is not None:
        data['split'] = {'plus': [[_text(c) for c in b.coords] for b in sf.split.plus],
                         'minus': [[_text(c) for c in b.coords] for b in sf.split.minus]}
    if sf.subalgebroid is not None:
        data['subalgebroid'] = [[_text(c) for c in b.coords] for b in sf.subalgebroid]
    if sf.connection is not None:
        data['connection'] = _entries(sf.connection.table, lie=False)
    if sf.seed is not None:
        data['seed'] = sf.seed
    return data


def dumps(sf: StructureFile, indent: int = 2) -> str:
    return json.dumps(to_dict(sf), indent=indent) + '\n'


def write_structure(sf: StructureFile, path: str, indent: int = 2) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        f.write(dumps(sf, indent))
    logger.info("Wrote %s to %s", sf.name, path)
