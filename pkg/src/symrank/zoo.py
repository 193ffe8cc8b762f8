"""Registry of stock operators used by the command line and the test suite.

name                n  k  V  W  verdict           constant rank
gradient            2  1  1  2  Elliptic          1
gradient3           3  1  1  3  Elliptic          1
divergence          3  1  3  1  ConstantRank      1
curl                3  1  3  3  ConstantRank      2
laplacian           2  2  1  1  Elliptic          1
symmetric_gradient  2  1  2  3  Elliptic          2
d1d2                2  2  1  1  NonConstantRank   (0 on the axes, 1 off)
wave                2  2  1  1  NonConstantRank   (0 on the diagonals, 1 off)
"""

from dataclasses import dataclass
from typing import Callable

from .operators import Operator
from .rank import Verdict


class UnknownOperatorError(LookupError):
    """Requested zoo operator does not exist."""


@dataclass(frozen=True)
class ZooEntry:
    name: str
    build: Callable[[], Operator]
    expected_verdict: Verdict
    expected_rank: int | None  # constant rank on the sphere, when it is constant


def _axis(n: int, j: int) -> tuple[int, ...]:
    return tuple(1 if i == j else 0 for i in range(n))


def _gradient(n: int) -> Operator:
    name = "gradient" if n == 2 else f"gradient{n}"
    terms = []
    for j in range(n):
        matrix = tuple((1.0,) if i == j else (0.0,) for i in range(n))
        terms.append((_axis(n, j), matrix))
    return Operator(name=name, n=n, k=1, dim_v=1, dim_w=n, terms=tuple(terms))


def _divergence() -> Operator:
    terms = []
    for j in range(3):
        row = tuple(1.0 if i == j else 0.0 for i in range(3))
        terms.append((_axis(3, j), (row,)))
    return Operator(name="divergence", n=3, k=1, dim_v=3, dim_w=1, terms=tuple(terms))


def _curl() -> Operator:
    # symbol at xi is the cross product matrix v -> i xi x v
    terms = (
        (_axis(3, 0), ((0.0, 0.0, 0.0), (0.0, 0.0, -1.0), (0.0, 1.0, 0.0))),
        (_axis(3, 1), ((0.0, 0.0, 1.0), (0.0, 0.0, 0.0), (-1.0, 0.0, 0.0))),
        (_axis(3, 2), ((0.0, -1.0, 0.0), (1.0, 0.0, 0.0), (0.0, 0.0, 0.0))),
    )
    return Operator(name="curl", n=3, k=1, dim_v=3, dim_w=3, terms=terms)


def _laplacian() -> Operator:
    terms = (((2, 0), ((1.0,),)), ((0, 2), ((1.0,),)))
    return Operator(name="laplacian", n=2, k=2, dim_v=1, dim_w=1, terms=terms)


def _symmetric_gradient() -> Operator:
    # rows are the entries e11, e12 (= e21), e22 of the symmetrized gradient
    terms = (
        ((1, 0), ((1.0, 0.0), (0.0, 0.5), (0.0, 0.0))),
        ((0, 1), ((0.0, 0.0), (0.5, 0.0), (0.0, 1.0))),
    )
    return Operator(name="symmetric_gradient", n=2, k=1, dim_v=2, dim_w=3, terms=terms)


def _d1d2() -> Operator:
    return Operator(name="d1d2", n=2, k=2, dim_v=1, dim_w=1, terms=(((1, 1), ((1.0,),)),))


def _wave() -> Operator:
    terms = (((2, 0), ((1.0,),)), ((0, 2), ((-1.0,),)))
    return Operator(name="wave", n=2, k=2, dim_v=1, dim_w=1, terms=terms)


_ENTRIES = (
    ZooEntry("gradient", lambda: _gradient(2), Verdict.ELLIPTIC, 1),
    ZooEntry("gradient3", lambda: _gradient(3), Verdict.ELLIPTIC, 1),
    ZooEntry("divergence", _divergence, Verdict.CONSTANT_RANK, 1),
    ZooEntry("curl", _curl, Verdict.CONSTANT_RANK, 2),
    ZooEntry("laplacian", _laplacian, Verdict.ELLIPTIC, 1),
    ZooEntry("symmetric_gradient", _symmetric_gradient, Verdict.ELLIPTIC, 2),
    ZooEntry("d1d2", _d1d2, Verdict.NON_CONSTANT_RANK, None),
    ZooEntry("wave", _wave, Verdict.NON_CONSTANT_RANK, None),
)

_REGISTRY = {entry.name: entry for entry in _ENTRIES}


def zoo_list() -> list[ZooEntry]:
    """All registered entries in registry order."""
    return list(_ENTRIES)


def zoo_entry(name: str) -> ZooEntry:
    try:
        return _REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(_REGISTRY))
        raise UnknownOperatorError(f"unknown operator {name!r} (known: {known})") from None


def zoo_get(name: str) -> Operator:
    """Build the named operator; raises UnknownOperatorError for unknown names."""
    return zoo_entry(name).build()
