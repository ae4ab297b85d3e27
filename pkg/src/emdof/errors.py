"""Exception hierarchy shared by all modules."""


class EmdofError(Exception):
    """Base class for every error raised by this package."""


class GeometryError(EmdofError, ValueError):
    pass


class SingularityError(EmdofError, ValueError):
    """A Green's function was evaluated at (or too close to) its source point."""


class ShapeError(EmdofError, ValueError):
    pass


class DegenerateSpectrumError(EmdofError, ValueError):
    pass


class SolverError(EmdofError, RuntimeError):
    """Eigensolver failed to converge or received non-finite input."""


class ConfigError(EmdofError, ValueError):
    """Invalid experiment configuration.

    ``problems`` holds ``(field_path, message)`` pairs so callers can report
    every offending field at once.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [("", problems)]
        self.problems = list(problems)
        text = "; ".join(f"{p}: {m}" if p else m for p, m in self.problems)
        super().__init__(text)
