"""Exception hierarchy.

Every error carries the CLI exit code it maps to: 1 for bad input, 2 when a
stream is well formed but cannot be analyzed, 3 for anything else.
"""


class NsaqaError(Exception):
    exit_code = 3


class InputError(NsaqaError):
    exit_code = 1


class AnalysisError(NsaqaError):
    exit_code = 2


# -- input ------------------------------------------------------------------

class MalformedDocument(InputError):
    pass


class SchemaViolation(InputError):
    def __init__(self, field, detail="missing or wrong type"):
        self.field = field
        super().__init__(f"{field}: {detail}")


class InvariantViolation(InputError):
    def __init__(self, field, detail="invariant violated"):
        self.field = field
        super().__init__(f"{field}: {detail}")


class ConfigError(InputError):
    pass


class EmptyCorpus(InputError):
    pass


class UnknownAspect(InputError):
    pass


class MissingGroundTruth(InputError):
    pass


class InfeasibleScript(InputError):
    pass


# -- analysis ---------------------------------------------------------------

class ZeroVector(AnalysisError):
    pass


class DegenerateJoint(AnalysisError):
    pass


class AliasingSuspected(AnalysisError):
    pass


class NoUsablePose(AnalysisError):
    pass


class NeverLeavesPlatform(AnalysisError):
    pass


class NoEntryDetected(AnalysisError):
    pass


class TakeoffNotObserved(AnalysisError):
    pass


class AmbiguousFacing(AnalysisError):
    pass


class AmbiguousRotation(AnalysisError):
    pass


class PhaseAbsent(AnalysisError):
    pass


class NoApplicableAspects(AnalysisError):
    pass


class AllZeroWeights(AnalysisError):
    pass


class InconsistentInputs(AnalysisError):
    pass


# -- report templates (library data problems are internal errors) ------------

class TemplateError(NsaqaError):
    pass


class MissingPlaceholder(TemplateError):
    def __init__(self, name):
        self.name = name
        super().__init__(name)


class UnknownPlaceholder(TemplateError):
    def __init__(self, name):
        self.name = name
        super().__init__(name)
