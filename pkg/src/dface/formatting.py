"""One float format for every text artifact, so reruns are byte-identical."""

__all__ = ["fmt"]


def fmt(value: float) -> str:
    """Nine significant digits, shortest form ("%.9g")."""
    return "%.9g" % value
