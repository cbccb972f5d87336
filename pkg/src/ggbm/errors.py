class NumericalError(RuntimeError):
    """A computation finished but its result failed an accuracy or sanity check."""


class AccuracyWarning(UserWarning):
    """Result returned, but outside the range where its accuracy is certified."""
