"""Domain error types raised by the public operations."""


class PmdbError(Exception):
    """Base class for every recoverable domain error in this package."""


# telemetry store

class OutOfOrderSample(PmdbError):
    """Sample timestamp does not strictly increase for its sensor."""


class NegativeReading(PmdbError):
    """Power or cumulative energy reading below zero."""


class EnergyRegression(PmdbError):
    """Cumulative energy counter decreased between samples."""


class UnknownSensor(PmdbError):
    """Selector names a sensor the store has never seen."""


class EmptySeries(PmdbError):
    """A selected sensor has no samples inside the query interval."""


class NoSampleBefore(PmdbError):
    """No sample exists at or before the requested timestamp."""


# cluster simulator

class InvalidTopology(PmdbError):
    pass


class UnknownPState(PmdbError):
    """Frequency is not a member of the supported P-state list."""


class UnknownNode(PmdbError):
    pass


# job registry

class DuplicateApid(PmdbError):
    pass


class EmptyNodeSet(PmdbError):
    pass


class UnknownApid(PmdbError):
    pass


class AlreadyFinished(PmdbError):
    pass


class EndBeforeStart(PmdbError):
    pass


# energy accounting

class JobOpen(PmdbError):
    """Job has no end timestamp yet, so it cannot be accounted."""


class MissingSamples(PmdbError):
    """Store does not cover the requested nodes or interval."""


class NonPositiveDuration(PmdbError):
    pass


class NonPositiveRate(PmdbError):
    pass


# pm_counters files

class MalformedContent(PmdbError):
    pass


class UnitMismatch(PmdbError):
    """File carries a unit suffix that does not belong to it."""


# RUR lines

class NoEnergyField(PmdbError):
    pass


class MalformedLine(PmdbError):
    pass


class ApidNotFound(PmdbError):
    pass


# tuner

class BelowMinimum(PmdbError):
    """Requested frequency is below the slowest supported P-state."""


class InvalidSplit(PmdbError):
    pass


class EmptyGrid(PmdbError):
    pass


class NonPositiveBeta(PmdbError):
    pass


# validation scenarios

class UnknownScenario(PmdbError):
    pass


class UnknownBaseline(PmdbError):
    pass


class ZeroEnsemble(PmdbError):
    pass


class PeriodTooSmall(PmdbError):
    """Requested sampling period is finer than the native series period."""
