# The MIT License (MIT)
# Copyright © 2024 varpomdp developers

# Permission is hereby granted, free of charge, to any person obtaining a copy of this software and associated
# documentation files (the “Software”), to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense, and/or sell copies of the Software,
# and to permit persons to whom the Software is furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all copies or substantial portions of
# the Software.

# THE SOFTWARE IS PROVIDED “AS IS”, WITHOUT WARRANTY OF ANY KIND, EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO
# THE WARRANTIES OF MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION
# OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
# DEALINGS IN THE SOFTWARE.

class VarPomdpError(Exception):
    """Base class for every error raised by the varpomdp package."""

    default_message = "VAR-POMDP error"

    def __init__(self, message=None):
        self.message = message or self.default_message
        super().__init__(self.message)


class ModelValidationError(VarPomdpError):
    """Raised when a model fails validation. The report lists every violation."""

    default_message = "Model failed validation"

    def __init__(self, report, message=None):
        self.report = report
        super().__init__(message or f"{self.default_message}: {report.summary()}")


class DimensionMismatchError(VarPomdpError):
    default_message = "Observation dimension does not match the model"


class HistoryWarmupError(VarPomdpError):
    default_message = "Observation history holds fewer than r observations"


class ImpossibleObservationError(VarPomdpError):
    default_message = "Observation has zero likelihood under every reachable state"


class CholeskyError(VarPomdpError):
    default_message = "Covariance matrix is not symmetric positive definite"


class PctlSyntaxError(VarPomdpError):
    """Raised by the PCTL parser. `position` is the 0-based offset in the input text."""

    default_message = "Invalid PCTL formula"

    def __init__(self, message=None, position: int = 0):
        self.position = position
        super().__init__(f"{message or self.default_message} (at position {position})")


class UnsupportedFormulaError(VarPomdpError):
    default_message = "Formula is parsed but not supported for checking"


class LearnerError(VarPomdpError):
    default_message = "Learner failed"


class MissingActionsError(VarPomdpError):
    default_message = "Trajectory has no per-step actions"


class MissingLabelError(VarPomdpError):
    default_message = "Feature has no entry in the label map"


class PolicyError(VarPomdpError):
    default_message = "Policy cannot be constructed"


class PlannerError(VarPomdpError):
    default_message = "Planner failed"


class ConfigError(VarPomdpError):
    default_message = "Invalid configuration"
