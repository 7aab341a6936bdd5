"""Exception hierarchy.

Everything raised on purpose by the library derives from ``ForgeError``.
Validation problems (bad input structures) derive from ``ValidationError``;
the CLI maps those to exit code 1.
"""

from __future__ import annotations


class ForgeError(Exception):
    pass


class ValidationError(ForgeError):
    pass


class UnknownElement(ValidationError):
    def __init__(self, element):
        super().__init__(f"unknown element {element!r}")
        self.element = element


class DuplicateElement(ValidationError):
    def __init__(self, element):
        super().__init__(f"duplicate element id {element!r}")
        self.element = element


class AntisymmetryViolation(ValidationError):
    def __init__(self, x, y):
        super().__init__(f"order is not antisymmetric: {x!r} <= {y!r} <= {x!r}")
        self.x = x
        self.y = y


class NotALattice(ValidationError):
    def __init__(self, x=None, y=None, message=None):
        if message is None:
            message = f"no sup or inf for {x!r}, {y!r}"
        super().__init__(message)
        self.x = x
        self.y = y


class NotDistributive(ValidationError):
    def __init__(self, witness):
        x, y, z = witness
        super().__init__(f"distributive law fails at x={x!r}, y={y!r}, z={z!r}")
        self.witness = witness


class EmptyKey(ValidationError):
    def __init__(self, kind):
        super().__init__(f"empty argument set in {kind} table")
        self.kind = kind


class NotSup(ValidationError):
    """``a`` was declared the join of ``X`` but is not its supremum.

    ``witness`` is an upper bound ``b`` of ``X`` with ``a`` not below it, or
    ``None`` when ``a`` is not even an upper bound of ``X``.
    """

    def __init__(self, a, X, witness):
        if witness is None:
            msg = f"{a!r} is not an upper bound of {sorted(X)!r}"
        else:
            msg = f"{a!r} is not the sup of {sorted(X)!r}: {witness!r} is a smaller upper bound"
        super().__init__(msg)
        self.a = a
        self.X = frozenset(X)
        self.witness = witness


class NotInf(ValidationError):
    def __init__(self, a, X, witness):
        if witness is None:
            msg = f"{a!r} is not a lower bound of {sorted(X)!r}"
        else:
            msg = f"{a!r} is not the inf of {sorted(X)!r}: {witness!r} is a larger lower bound"
        super().__init__(msg)
        self.a = a
        self.X = frozenset(X)
        self.witness = witness


class SizeLimit(ForgeError):
    def __init__(self, cap):
        super().__init__(f"more than {cap} congruences")
        self.cap = cap


class TableNotTotal(ValidationError):
    def __init__(self, x, y):
        super().__init__(f"table not total: missing entry for ({x!r}, {y!r})")
        self.pair = (x, y)


class AxiomViolation(ValidationError):
    """A Boolean-value table breaks one of the measured axioms.

    ``clause`` names the axiom (``"reflexive"``, ``"transitive"``, ``"order"``,
    ``"join"``, ``"meet"``) and ``witness`` holds the offending elements.
    """

    def __init__(self, clause, witness):
        super().__init__(f"axiom {clause!r} violated at {witness!r}")
        self.clause = clause
        self.witness = witness


class EmptyArgument(ForgeError):
    def __init__(self, what):
        super().__init__(f"{what} must be nonempty")


class EmptyDomain(ForgeError):
    def __init__(self, kind):
        super().__init__(f"the {kind} domain is empty")
        self.kind = kind


class ValueLatticeMismatch(ForgeError):
    pass


class TermBlowup(ForgeError):
    def __init__(self, n, cap):
        super().__init__(f"{n} affine terms exceed the cap of {cap}")
        self.n = n
        self.cap = cap


class CapExceeded(ForgeError):
    """Raised when term enumeration runs past its size cap.

    ``partial`` holds the quotient built so far (with ``closed`` false).
    """

    def __init__(self, partial, message="size cap exceeded"):
        super().__init__(message)
        self.partial = partial


class TermParseError(ForgeError):
    pass


class IsometryViolation(ValidationError):
    pass


class VerificationFailed(ForgeError):
    pass


class RelationViolation(ValidationError):
    pass


class NotAHomomorphism(ValidationError):
    pass
