"""Exception types shared across the library."""


class SketchforgeError(Exception):
    """Base class for all structured library errors."""


class UnknownObject(SketchforgeError):
    pass


class NotComposable(SketchforgeError):
    pass


class NotExplicit(SketchforgeError):
    pass


class EmptyLabelSet(SketchforgeError):
    pass


class BadParam(SketchforgeError):
    pass


class LevelMismatch(SketchforgeError):
    pass


class IndexOutOfRange(SketchforgeError):
    pass


class CarrierConflict(SketchforgeError):
    pass


class CarrierUnderdetermined(SketchforgeError):
    pass


class NotStrict(SketchforgeError):
    pass


class NotFunctorial(SketchforgeError):
    pass


class BoundExceeded(SketchforgeError):
    pass


class SortMismatch(SketchforgeError):
    pass


class NotConePreserving(SketchforgeError):
    pass


class NotInjectiveOnObjects(SketchforgeError):
    pass


class TupleIndexCollision(SketchforgeError):
    pass


class UnsupportedGenerator(SketchforgeError):
    pass
