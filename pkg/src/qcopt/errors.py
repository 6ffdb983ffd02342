"""Exception hierarchy shared across the package."""


class QCOptError(Exception):
    """Base class for all errors raised by qcopt."""


class ValidationError(QCOptError, ValueError):
    """Malformed or out-of-range input data."""


class UnknownKeyError(ValidationError):
    pass


class ScoreRangeError(ValidationError):
    def __init__(self, section_id, model_id, value):
        self.section_id = section_id
        self.model_id = model_id
        self.value = value
        super().__init__(
            f"score for section {section_id!r}, model {model_id!r} is {value!r}; "
            "expected a value in [0, 1]"
        )


class MissingScoreError(ValidationError):
    def __init__(self, section_id, model_id):
        self.section_id = section_id
        self.model_id = model_id
        super().__init__(f"missing score for section {section_id!r}, model {model_id!r}")


class MissingSectionError(ValidationError):
    def __init__(self, section_id):
        self.section_id = section_id
        super().__init__(f"no scores for section {section_id!r}")


class UnknownIdError(ValidationError):
    def __init__(self, kind, ident):
        self.kind = kind
        self.ident = ident
        super().__init__(f"unknown {kind} id {ident!r}")


class ConfigurationError(QCOptError):
    """An instance is structurally incomplete, e.g. a missing token length."""


class PreconditionError(QCOptError, ValueError):
    """A solver was called outside the regime it is defined for."""


class InfeasibleError(QCOptError):
    """No assignment satisfies the constraints."""


class InfeasibleBudgetError(InfeasibleError):
    def __init__(self, budget, min_budget):
        self.budget = budget
        self.min_budget = min_budget
        super().__init__(
            f"budget {budget:.6g} is below the cheapest full assignment "
            f"(minimum feasible budget {min_budget:.6g})"
        )


class SectionInfeasibleError(InfeasibleError):
    def __init__(self, section_id, max_score, quality_floor):
        self.section_id = section_id
        self.max_score = max_score
        self.quality_floor = quality_floor
        super().__init__(
            f"section {section_id!r} has no model meeting quality floor "
            f"{quality_floor:.6g} (best achievable score {max_score:.6g})"
        )


class InstanceTooLargeError(QCOptError):
    def __init__(self, n_assignments, limit):
        self.n_assignments = n_assignments
        self.limit = limit
        super().__init__(
            f"exhaustive search over {n_assignments} assignments exceeds the limit of {limit}"
        )


class LPStructureError(QCOptError, ValueError):
    """Dimension mismatch or otherwise malformed linear program."""


class DegenerateNumericsError(QCOptError, ArithmeticError):
    """Simplex could not find a pivot above the numerical threshold."""


class FlowStructureError(QCOptError):
    """Invalid flow network (e.g. a negative-cost residual cycle)."""


class VocabularyError(ValidationError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
