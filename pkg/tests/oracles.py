"""Naive reference implementations used to cross-check the calculus module.

Everything here works on plain dicts keyed by increasing index tuples and
recomputes wedges and evaluations from determinants, sharing nothing with
homalgebroid.calculus except the structure's bracket, twist and anchor.
"""

import itertools

from homalgebroid.algebroid import Section


def inversions(perm):
    count = 0
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                count += 1
    return count


def sign(perm):
    return -1 if inversions(perm) % 2 else 1


def minor(sections, columns, ring):
    """det of the matrix whose (a, b) entry is sections[a][columns[b]]."""
    total = ring.zero
    k = len(columns)
    for perm in itertools.permutations(range(k)):
        term = ring.one
        for a in range(k):
            term = term * sections[a].coords[columns[perm[a]]]
        total = total + term if sign(perm) > 0 else total - term
    return total


def evaluate(values, degree, sections, ring):
    """omega(s_1, ..., s_q) for omega = sum_K values[K] e^K."""
    if degree == 0:
        return values.get((), ring.zero)
    total = ring.zero
    for columns, value in values.items():
        total = total + value * minor(sections, columns, ring)
    return total


def wedge(sections, rank, ring):
    """s_1 ^ ... ^ s_k as {increasing K: coefficient}."""
    result = {}
    for columns in itertools.combinations(range(rank), len(sections)):
        value = minor(sections, columns, ring)
        if value:
            result[columns] = value
    return result


def accumulate(target, source, factor):
    for key, value in source.items():
        total = target.get(key) + factor * value if key in target else factor * value
        if total:
            target[key] = total
        else:
            target.pop(key, None)


def twisted_value(S, values, degree, sections):
    """phi_A^dagger(omega)(y_1..y_q) = phi*(omega(phi_A^-1 y_1, ...))."""
    return S.endomorphism(evaluate(values, degree, [S.phi_inverse(y) for y in sections], S.ring))


def exterior_derivative(S, values, degree):
    basis = S.basis_sections()
    result = {}
    for columns in itertools.combinations(range(S.rank), degree + 1):
        z = [basis[c] for c in columns]
        pulled = [S.phi_inverse(y) for y in z]
        total = S.ring.zero
        for i in range(degree + 1):
            rest = [p for k, p in enumerate(pulled) if k != i]
            term = S.anchor_apply(z[i], evaluate(values, degree, rest, S.ring))
            total = total + term if i % 2 == 0 else total - term
        for i in range(degree + 1):
            for j in range(i + 1, degree + 1):
                arguments = [S.bracket(pulled[i], pulled[j])]
                arguments += [y for k, y in enumerate(z) if k not in (i, j)]
                term = twisted_value(S, values, degree, arguments)
                total = total + term if (i + j) % 2 == 0 else total - term
        if total:
            result[columns] = total
    return result


def lie_derivative_form(S, z, values, degree):
    basis = S.basis_sections()
    result = {}
    for columns in itertools.combinations(range(S.rank), degree):
        args = [basis[c] for c in columns]
        pulled = [S.phi_inverse(y) for y in args]
        total = S.anchor_apply(S.phi(z), evaluate(values, degree, pulled, S.ring))
        for i in range(degree):
            changed = list(args)
            changed[i] = S.bracket(z, pulled[i])
            total = total - twisted_value(S, values, degree, changed)
        if total:
            result[columns] = total
    return result


def factors(values, rank, ring):
    """Decomposable terms (c_I e_{i1}) ^ e_{i2} ^ ... of a multivector."""
    terms = []
    for columns, value in sorted(values.items()):
        sections = []
        for position, i in enumerate(columns):
            coords = [ring.zero] * rank
            coords[i] = value if position == 0 else ring.one
            sections.append(Section(coords))
        terms.append(sections)
    return terms


def schouten(S, u_values, v_values, convention='graded'):
    """Hom-Schouten bracket; 'verbatim' carries the extra (-1)^(p+1) prefactor."""
    ring, rank = S.ring, S.rank
    result = {}
    for u in factors(u_values, rank, ring):
        for v in factors(v_values, rank, ring):
            p, q = len(u), len(v)
            if p + q - 1 > rank:
                continue
            prefactor = -1 if convention == 'verbatim' and (p + 1) % 2 else 1
            for i in range(p):
                for j in range(q):
                    rest = ([S.phi(x) for k, x in enumerate(u) if k != i] +
                            [S.phi(y) for k, y in enumerate(v) if k != j])
                    term = wedge([S.bracket(u[i], v[j])] + rest, rank, ring)
                    accumulate(result, term, prefactor * (1 if (i + j) % 2 == 0 else -1))
    return result


def nijenhuis(S, K, x, y):
    """N(X,Y) with P(x) = Phi . phi*(K x), written out with plain loops."""
    ring, n = S.ring, S.rank
    phi = S.endomorphism
    Phi = S.bundle.twist

    def P(v):
        moved = [phi(sum((K[r][c] * v.coords[c] for c in range(n)), ring.zero)) for r in range(n)]
        return Section(sum((Phi[r][c] * moved[c] for c in range(n)), ring.zero) for r in range(n))

    px, py = P(x), P(y)
    return S.bracket(px, py) - P(S.bracket(px, y)) - P(S.bracket(x, py)) + S.bracket(x, y)
