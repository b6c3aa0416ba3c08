"""Exception types shared across the package."""


class ProfileError(ValueError):
    """Code profile parameters violate their constraints."""


class DegenerateCurveError(ValueError):
    """Frenet frame construction hit a rank-deficient derivative set."""

    def __init__(self, order, message=None):
        self.order = order
        super().__init__(message or f"curve is degenerate at frame order {order}")


class GeometricDegeneracyError(ValueError):
    """Circumradius denominator vanished away from the zero-separation limit
    (the chord is parallel to the tangent, i.e. a straight-line segment)."""


class TrainingError(RuntimeError):
    """Decoder network training diverged."""

    def __init__(self, message, epoch=None, learning_rate=None):
        self.epoch = epoch
        self.learning_rate = learning_rate
        super().__init__(message)
