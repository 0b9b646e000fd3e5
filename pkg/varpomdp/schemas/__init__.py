from .model import Emission, VarPomdpModel, ValidationIssue, ValidationReport
from .belief import Belief, ObsHistory, Trajectory
from .spec import *
from .alpha import AlphaVector, AlphaVectorSet, BeliefSet, PartitionProbs
from .learner import *
