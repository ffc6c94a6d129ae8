"""Reference product relations among scalar and mixed Pauli products.

Each entry states a product of two factors and the reduced right-hand side.
They serve as a regression table for :func:`multiply`; the verification
suite re-derives every right-hand side and compares coefficient by
coefficient.  Monomial strings use ``(i,j)`` for scalar products and
``[p,r,s]`` for mixed products.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .monomial import OperatorPoly


@dataclass(frozen=True)
class Relation:
    name: str
    left: str
    right: str
    result: dict = field(default_factory=dict)
    n: int = 6

    def lhs(self) -> tuple[OperatorPoly, OperatorPoly]:
        return (
            OperatorPoly.parse({self.left: 1}, self.n),
            OperatorPoly.parse({self.right: 1}, self.n),
        )

    def rhs(self) -> OperatorPoly:
        return OperatorPoly.parse(self.result, self.n)


PRODUCT_RELATIONS: tuple[Relation, ...] = (
    Relation("pair-square", "(1,2)", "(1,2)", {"1": 3, "(1,2)": -2}),
    Relation("pair-pair-chain", "(1,2)", "(2,3)", {"(1,3)": 1, "[1,2,3]": -1j}),
    Relation(
        "pair-times-mixed",
        "(1,2)",
        "[1,2,3]",
        {"[1,2,3]": -1, "(1,3)": -2j, "(2,3)": 2j},
    ),
    Relation(
        "mixed-times-pair",
        "[1,2,3]",
        "(1,2)",
        {"[1,2,3]": -1, "(1,3)": 2j, "(2,3)": -2j},
    ),
    Relation(
        "pair-times-mixed-one-shared",
        "(1,2)",
        "[2,3,4]",
        {"[1,3,4]": 1, "(1,3)(2,4)": -1j, "(1,4)(2,3)": 1j},
    ),
    Relation(
        "mixed-times-pair-one-shared",
        "[2,3,4]",
        "(1,2)",
        {"[1,3,4]": 1, "(1,3)(2,4)": 1j, "(1,4)(2,3)": -1j},
    ),
    Relation(
        "mixed-square",
        "[1,2,3]",
        "[1,2,3]",
        {"1": 6, "(1,2)": -2, "(1,3)": -2, "(2,3)": -2},
    ),
    Relation(
        "mixed-mixed-two-shared",
        "[1,2,3]",
        "[1,2,4]",
        {
            "(1,3)(2,4)": -1,
            "(1,4)(2,3)": -1,
            "(3,4)": 2,
            "[1,3,4]": 1j,
            "[2,3,4]": 1j,
        },
    ),
    Relation(
        "mixed-mixed-one-shared",
        "[1,2,3]",
        "[1,4,5]",
        {
            "(2,4)(3,5)": 1,
            "(2,5)(3,4)": -1,
            "[3,4,5](1,2)": -1j,
            "[2,4,5](1,3)": 1j,
        },
    ),
)

# Two mixed products on disjoint sites expand as a 3x3 determinant of
# scalar products.
MIXED_DETERMINANT = Relation(
    "mixed-determinant",
    "[1,2,3]",
    "[4,5,6]",
    {
        "(1,4)(2,5)(3,6)": 1,
        "(1,4)(2,6)(3,5)": -1,
        "(1,5)(2,4)(3,6)": -1,
        "(1,5)(2,6)(3,4)": 1,
        "(1,6)(2,4)(3,5)": 1,
        "(1,6)(2,5)(3,4)": -1,
    },
)

ALL_RELATIONS: tuple[Relation, ...] = PRODUCT_RELATIONS + (MIXED_DETERMINANT,)
