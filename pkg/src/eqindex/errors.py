"""Exception types shared across the engine."""


class EngineError(Exception):
    """Base class for every error raised by the engine."""


class InvalidLattice(EngineError):
    """An exponent does not lie on the requested lattice."""


class SingularFactor(EngineError):
    """A binomial factor (1 - q^0 g^0)^k was requested."""


class NotRenderable(EngineError):
    """A factor list cannot be expanded as a series in the requested frame."""


class WindowExceeded(EngineError):
    """A coefficient was requested outside the certified window."""


class NotPolynomial(EngineError):
    """A summed index failed the polynomial tail certificate."""


class InvalidLevel(EngineError):
    """A level index outside 0..J0 was requested."""


class EmptyWeightSet(EngineError):
    """A weight set J was empty."""


class ZeroWeight(EngineError):
    """A zero weight was supplied where only nonzero weights are allowed."""


class MissingSpinCData(EngineError):
    """A Spin^c construction was requested on a component without l_c."""


class InvalidGrading(EngineError):
    """A tau_e grading was requested on an expression without spinor factor."""


class IncompatibleTwist(EngineError):
    """The twist of an operator needs data the component does not carry."""


class InvalidDatum(EngineError):
    """A manifold datum violates the input schema.

    ``pointer`` is a JSON pointer to the offending field.
    """

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.message = message
        self.pointer = pointer or "/"
