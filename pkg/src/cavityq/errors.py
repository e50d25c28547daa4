"""Exception hierarchy for cavityq.

Every error carries the process exit code the command line maps it to.
"""

EXIT_USAGE = 2
EXIT_DOMAIN = 3


class CavityQError(Exception):
    """Base class for all cavityq errors."""

    exit_code: int = EXIT_DOMAIN


class ParameterError(CavityQError, ValueError):
    """Raw physical parameters are unusable."""

    exit_code = EXIT_USAGE


class NonPositiveKappaError(ParameterError):
    """Cavity decay rate is zero or negative."""

    def __init__(self, kappa: float) -> None:
        self.kappa = kappa
        super().__init__(f"kappa must be > 0, got {kappa!r}")


class NegativeRateError(ParameterError):
    """Coupling or drive amplitude is negative."""

    def __init__(self, name: str, value: float) -> None:
        self.name = name
        self.value = value
        super().__init__(f"{name} must be >= 0, got {value!r}")


class NonFiniteError(ParameterError):
    """A numeric input is NaN or infinite."""

    def __init__(self, name: str, value: float) -> None:
        self.name = name
        self.value = value
        super().__init__(f"{name} must be finite, got {value!r}")


class NegativeTimeError(CavityQError, ValueError):
    """Evaluation time lies before the start of the evolution."""

    exit_code = EXIT_USAGE

    def __init__(self, t: float) -> None:
        self.t = t
        super().__init__(f"time must be >= 0, got {t!r}")


class ThresholdDivergenceError(CavityQError):
    """A steady-state quantity diverges at or above threshold (2*gamma >= kappa)."""

    def __init__(self, observable: str, kappa: float, gamma: float) -> None:
        self.observable = observable
        self.kappa = kappa
        self.gamma = gamma
        super().__init__(
            f"{observable} diverges for kappa={kappa!r}, gamma={gamma!r} "
            "(steady state requires 2*gamma < kappa)"
        )


class MalformedInputError(CavityQError, ValueError):
    """An argument violates the structural precondition of an operation."""

    exit_code = EXIT_USAGE


class UndefinedCorrelationError(CavityQError):
    """A normalized correlation has a vanishing denominator (vacuum field)."""

    def __init__(self, observable: str) -> None:
        self.observable = observable
        super().__init__(f"{observable} is undefined for the vacuum field (0/0)")


class StepSizeTooLargeError(CavityQError):
    """Fixed integration step exceeds the stability guard."""

    exit_code = EXIT_USAGE

    def __init__(self, dt: float, rate: float, limit: float) -> None:
        self.dt = dt
        self.rate = rate
        self.limit = limit
        super().__init__(f"dt={dt!r} too large: dt*rate={dt * rate:.6g} exceeds {limit}")


class NoConvergenceError(CavityQError):
    """Steady-state detection did not succeed before t_end."""

    def __init__(self, t_end: float, drift: float) -> None:
        self.t_end = t_end
        self.drift = drift
        super().__init__(f"no steady state by t={t_end!r} (moment drift {drift:.3e})")


class TruncationTooSmallError(CavityQError):
    """Fock cutoff cannot hold the state to the required accuracy."""

    def __init__(self, truncation: int, population: float) -> None:
        self.truncation = truncation
        self.population = population
        super().__init__(
            f"Fock truncation N={truncation} too small: top-level population "
            f"{population:.3e} (increase --fock-dim)"
        )


class OrderTooHighError(CavityQError, ValueError):
    """Requested moment order exceeds what the table supports."""

    exit_code = EXIT_USAGE

    def __init__(self, order: int, limit: int) -> None:
        self.order = order
        self.limit = limit
        super().__init__(f"moment order {order} exceeds limit {limit}")


class MissingMomentError(CavityQError, KeyError):
    """A moment needed by the composite expansion is absent from its table."""

    def __init__(self, word: tuple[int, int, int, int]) -> None:
        self.word = word
        super().__init__(f"moment <a+^{word[0]} a^{word[1]} b+^{word[2]} b^{word[3]}> missing")

    def __str__(self) -> str:
        return str(self.args[0])


class DivergentError(CavityQError, ValueError):
    """Gaussian integral does not converge for the supplied coefficients."""

    exit_code = EXIT_USAGE
