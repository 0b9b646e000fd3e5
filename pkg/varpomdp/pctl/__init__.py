from .parser import parse_spec, PCTL_GRAMMAR
from .checker import partition_states, transform_model, check, CheckResult
