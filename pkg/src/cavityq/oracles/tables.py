"""Tables of normally ordered two-mode moments <a+^p a^q b+^r b^s>."""

from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from itertools import product
from types import MappingProxyType

from cavityq.errors import MissingMomentError, OrderTooHighError

MAX_ORDER = 4

Word = tuple[int, int, int, int]


def words_up_to(order: int) -> Iterator[Word]:
    """All exponent tuples (p, q, r, s) with p + q + r + s <= order."""
    for word in product(range(order + 1), repeat=4):
        if sum(word) <= order:
            yield word


def check_order(order: int) -> None:
    """Reject orders beyond MAX_ORDER."""
    if order > MAX_ORDER:
        raise OrderTooHighError(order, MAX_ORDER)


@dataclass(frozen=True)
class MomentTable:
    """Normally ordered moments of one two-mode subsystem, keyed by (p, q, r, s)."""

    order: int
    values: Mapping[Word, complex] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", MappingProxyType(dict(self.values)))

    def __getitem__(self, word: Word) -> complex:
        try:
            return self.values[word]
        except KeyError:
            raise MissingMomentError(word) from None

    def __contains__(self, word: object) -> bool:
        return word in self.values

    def __len__(self) -> int:
        return len(self.values)


def coherent_moment_table(q: complex, order: int = MAX_ORDER) -> MomentTable:
    """Moments of the product coherent state |q, q>: every word factorizes to powers of q."""
    check_order(order)
    q = complex(q)
    conj = q.conjugate()
    return MomentTable(
        order=order,
        values={
            (p, k, r, s): conj ** (p + r) * q ** (k + s) for p, k, r, s in words_up_to(order)
        },
    )
