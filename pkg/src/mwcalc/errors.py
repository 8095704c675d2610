"""Exception hierarchy shared by every module."""


class MWCalcError(Exception):
    """Base class for all library errors."""


class FieldMismatch(MWCalcError):
    pass


class ZeroInput(MWCalcError):
    pass


class ZeroPolynomial(ZeroInput):
    pass


class NotIrreducible(MWCalcError):
    pass


class UnsupportedField(MWCalcError):
    pass


class UnsupportedPolynomial(MWCalcError):
    """Raised when factorization over Q would need more than rational roots."""


class NotAnExtension(MWCalcError):
    pass


class UnsupportedDegree(MWCalcError):
    pass


class NotAUniformizer(MWCalcError):
    pass


class IllTypedWord(MWCalcError):
    pass


class SourceTargetMismatch(MWCalcError):
    pass


class ImproperIntersection(MWCalcError):
    pass


class UnsupportedBase(MWCalcError):
    pass


class UnsupportedMorphism(MWCalcError):
    pass


class NotFiniteOverTarget(MWCalcError):
    pass


class NotAComplex(MWCalcError):
    """Differentials fail d o d = 0."""


class UnsupportedCompositionCase(MWCalcError):
    pass


class SchemeMismatch(MWCalcError):
    pass


class UnsupportedSchemes(MWCalcError):
    pass


class UnsupportedExtension(MWCalcError):
    pass


class UnknownSuite(MWCalcError):
    pass


class ExprError(MWCalcError):
    """Base for expression-language errors."""


class ParseError(ExprError):
    def __init__(self, message, line, column, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        detail = f"{message} at line {line}, column {column}"
        if self.expected:
            detail += f" (expected {' or '.join(repr(e) for e in self.expected)})"
        super().__init__(detail)


class UnknownSymbol(ExprError):
    pass


class TypeMismatch(ExprError):
    pass


class UnboundName(ExprError):
    pass


class Unknown:
    """Tri-state verdict: neither proved equal nor proved different."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNKNOWN"

    def __bool__(self):
        raise TypeError("UNKNOWN verdict has no truth value")


UNKNOWN = Unknown()
