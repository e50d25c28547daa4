"""Composite-moment oracle for the superposed field.

The superposed modes are a = a1 + a2 and b = b1 + b2, where (a1, b1) is the
coherent pair and (a2, b2) the subharmonic pair, and c = a + b. The two pairs
are independent, so every normally ordered word expands binomially and
factorizes into one moment from each subsystem table. No Gaussian
factorization is assumed.
"""

import re
from dataclasses import dataclass
from math import comb

from cavityq.errors import MalformedInputError
from cavityq.oracles.tables import MAX_ORDER, MomentTable, Word, check_order, coherent_moment_table

SUPERPOSED_COMMUTATOR = 2.0
COMPOSITE_COMMUTATOR = 4.0

_TOKEN = re.compile(r"\s*(c\+|c†|c)(?:\^(\d+))?")


@dataclass(frozen=True)
class CompositeWord:
    """Normally ordered word c+^creations c^annihilations."""

    creations: int
    annihilations: int

    def __post_init__(self) -> None:
        if self.creations < 0 or self.annihilations < 0:
            raise MalformedInputError("word exponents must be non-negative")
        check_order(self.creations + self.annihilations)

    @classmethod
    def parse(cls, text: str) -> "CompositeWord":
        """Parse words such as ``c+^2 c^2``, ``c†c`` or ``c^2``."""
        creations = annihilations = 0
        position = 0
        seen_annihilator = False
        while position < len(text.rstrip()):
            match = _TOKEN.match(text, position)
            if match is None or match.end() == position:
                raise MalformedInputError(f"cannot parse composite word {text!r}")
            power = int(match.group(2) or 1)
            if match.group(1) == "c":
                seen_annihilator = True
                annihilations += power
            elif seen_annihilator:
                raise MalformedInputError(f"word {text!r} is not normally ordered")
            else:
                creations += power
            position = match.end()
        return cls(creations, annihilations)


def superposed_moment(word: Word, coherent: MomentTable, subharmonic: MomentTable) -> complex:
    """<a+^p a^q b+^r b^s> of the superposed modes from the two subsystem tables.

    Raises:
        MissingMomentError: If a needed subsystem moment is absent.
    """
    p, q, r, s = word
    check_order(p + q + r + s)
    total = 0j
    for i in range(p + 1):
        for j in range(q + 1):
            for k in range(r + 1):
                for m in range(s + 1):
                    weight = comb(p, i) * comb(q, j) * comb(r, k) * comb(s, m)
                    total += (
                        weight
                        * coherent[(i, j, k, m)]
                        * subharmonic[(p - i, q - j, r - k, s - m)]
                    )
    return total


def composite_moment(
    word: CompositeWord | str,
    coherent: MomentTable,
    subharmonic: MomentTable,
) -> complex:
    """<c+^m c^n> with c = a + b, expanded over the superposed-mode moments."""
    if isinstance(word, str):
        word = CompositeWord.parse(word)
    m, n = word.creations, word.annihilations
    total = 0j
    for i in range(m + 1):
        for j in range(n + 1):
            total += (
                comb(m, i)
                * comb(n, j)
                * superposed_moment((i, j, m - i, n - j), coherent, subharmonic)
            )
    return total


@dataclass(frozen=True)
class CompositeObservables:
    """Observables of the superposed field evaluated from moment tables alone."""

    mean_photon: float
    photon_variance: float
    plus_var: float
    minus_var: float
    epr_sum: float
    g2_a: float | None
    g2_b: float | None
    g2_ab: float | None


def _ratio(numerator: complex, denominator: complex) -> float | None:
    if abs(denominator) == 0.0:
        return None
    return (numerator / denominator).real


def _epr_sum(coherent: MomentTable, subharmonic: MomentTable) -> float:
    """(du)^2 + (dv)^2 for u = (x_a + x_b)/sqrt 2, v = (p_a - p_b)/sqrt 2."""

    def moment(word: Word) -> complex:
        return superposed_moment(word, coherent, subharmonic)

    a, b = moment((0, 1, 0, 0)), moment((0, 0, 0, 1))
    a_dag, b_dag = a.conjugate(), b.conjugate()
    n_a, n_b = moment((1, 1, 0, 0)), moment((0, 0, 1, 1))
    a_sq, b_sq = moment((0, 2, 0, 0)), moment((0, 0, 0, 2))
    a_dag_sq, b_dag_sq = moment((2, 0, 0, 0)), moment((0, 0, 2, 0))
    ab, a_dag_b_dag = moment((0, 1, 0, 1)), moment((1, 0, 1, 0))
    a_dag_b, b_dag_a = moment((1, 0, 0, 1)), moment((0, 1, 1, 0))
    comm = SUPERPOSED_COMMUTATOR

    var_xa = a_sq + a_dag_sq + 2 * n_a + comm - (a + a_dag) ** 2
    var_xb = b_sq + b_dag_sq + 2 * n_b + comm - (b + b_dag) ** 2
    cov_x = ab + a_dag_b_dag + a_dag_b + b_dag_a - (a + a_dag) * (b + b_dag)
    var_pa = 2 * n_a + comm - a_sq - a_dag_sq + (a_dag - a) ** 2
    var_pb = 2 * n_b + comm - b_sq - b_dag_sq + (b_dag - b) ** 2
    cov_p = -(a_dag_b_dag - a_dag_b - b_dag_a + ab) + (a_dag - a) * (b_dag - b)

    var_u = (var_xa + var_xb + 2 * cov_x) / 2
    var_v = (var_pa + var_pb - 2 * cov_p) / 2
    return (var_u + var_v).real


def composite_observables(coherent: MomentTable, subharmonic: MomentTable) -> CompositeObservables:
    """Photon statistics, quadratures, correlations and EPR sum of c from moment tables."""
    if min(coherent.order, subharmonic.order) < MAX_ORDER:
        raise MalformedInputError(f"composite observables need order-{MAX_ORDER} tables")

    def c_moment(text: str) -> complex:
        return composite_moment(text, coherent, subharmonic)

    def moment(word: Word) -> complex:
        return superposed_moment(word, coherent, subharmonic)

    mean_c = c_moment("c")
    number = c_moment("c+ c")
    c_sq = c_moment("c^2")
    c_dag_sq = c_moment("c+^2")
    variance = c_moment("c+^2 c^2") + COMPOSITE_COMMUTATOR * number - number**2
    plus = COMPOSITE_COMMUTATOR + 2 * number + c_sq + c_dag_sq - (mean_c + mean_c.conjugate()) ** 2
    minus = (
        COMPOSITE_COMMUTATOR
        + 2 * number
        - c_sq
        - c_dag_sq
        + (mean_c.conjugate() - mean_c) ** 2
    )

    n_a, n_b = moment((1, 1, 0, 0)), moment((0, 0, 1, 1))
    return CompositeObservables(
        mean_photon=number.real,
        photon_variance=variance.real,
        plus_var=plus.real,
        minus_var=minus.real,
        epr_sum=_epr_sum(coherent, subharmonic),
        g2_a=_ratio(moment((2, 2, 0, 0)), n_a * n_a),
        g2_b=_ratio(moment((0, 0, 2, 2)), n_b * n_b),
        g2_ab=_ratio(moment((1, 1, 1, 1)), n_a * n_b),
    )


def fluctuation_factorization_residual(subharmonic: MomentTable) -> float:
    """|<c'+^2 c'^2> - <c'+^2><c'^2> - 2<c'+c'>^2| for the zero-mean part c' = a2 + b2."""
    vacuum = coherent_moment_table(0.0)
    fourth = composite_moment("c+^2 c^2", vacuum, subharmonic)
    creation = composite_moment("c+^2", vacuum, subharmonic)
    pair = creation * composite_moment("c^2", vacuum, subharmonic)
    number = composite_moment("c+ c", vacuum, subharmonic)
    return abs(fourth - pair - 2 * number**2)
