"""Exception hierarchy.

Three branches map onto the CLI exit codes: validation problems (bad
config, bad data, estimands that are rejected by design) exit with 1,
numerical failures (solvers, positivity, unstable derivatives) with 2,
and verification failures (an influence function that does not match
its numerical derivative) with 3.
"""
from __future__ import annotations


class InfluenceLabError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(InfluenceLabError):
    """Invalid input: configuration, schema, data file, or estimand request."""

    exit_code = 1


class SchemaError(ValidationError):
    """Schema or value inconsistent with declared roles and kinds."""


class CsvParseError(ValidationError):
    """A data file could not be parsed; message names the row and column."""


class ConfigError(ValidationError):
    """A config file could not be parsed; message names the line."""


class NotPathwiseDifferentiableError(ValidationError):
    """Requested functional admits no finite-variance influence function."""


class NuisanceError(ValidationError):
    """A required nuisance slot is missing or of the wrong shape."""


class NumericalError(InfluenceLabError):
    """Numerical failure during estimation or verification."""

    exit_code = 2


class PositivityError(NumericalError):
    """A conditioning cell or event has zero (or near-zero) probability."""


class SingularityError(NumericalError):
    """Normal equations are singular; a ridge penalty would regularize them."""


class SeparationError(NumericalError):
    """Logistic coefficients diverged, indicating separated classes."""


class ExtrapolationError(NumericalError):
    """Kernel prediction requested too far outside the training sample."""


class SolverError(NumericalError):
    """Root finder or iterative solver failed to converge."""


class DerivativeUnstableError(NumericalError):
    """Richardson extrapolation did not stabilize within the step budget."""


class IntegrationError(NumericalError):
    """Adaptive quadrature did not converge to the requested tolerance."""


class RunFailedError(NumericalError):
    """Too many replications of a simulation were excluded."""


class VerificationError(InfluenceLabError):
    """An influence-function check exceeded its tolerance."""

    exit_code = 3


def exit_code_for(exc: BaseException) -> int:
    """Exit code for an exception, defaulting to the validation code."""
    if isinstance(exc, InfluenceLabError):
        for klass in (ValidationError, NumericalError, VerificationError):
            if isinstance(exc, klass):
                return klass.exit_code
    return 1
