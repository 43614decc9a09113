"""Domain types for pathway selection in mediation models."""

from pathlasso.models.dataset import MediationDataset, StandardizedDataset, AugmentedDesign
from pathlasso.models.coefficients import PathwayCoefficients
from pathlasso.models.penalty import PenaltySpec, OmegaRule
from pathlasso.models.prox import ProxParams, ProxSolution
from pathlasso.models.solver import (
    AdmmState, SolverOptions, Precomp, FitResult, PathResult, Method,
)
from pathlasso.models.baselines import BkPathwayResult
from pathlasso.models.evaluation import SelectionResult, RocCurve, CvReport
from pathlasso.models.simulation import SimulationDesign, FullModelDesign, TruthRecord, Treatment
from pathlasso.models.refit import RefitPathway, RefitReport
from pathlasso.models.run_config import RunConfig

__all__ = [
    'MediationDataset',
    'StandardizedDataset',
    'AugmentedDesign',
    'PathwayCoefficients',
    'PenaltySpec',
    'OmegaRule',
    'ProxParams',
    'ProxSolution',
    'AdmmState',
    'SolverOptions',
    'Precomp',
    'FitResult',
    'PathResult',
    'Method',
    'BkPathwayResult',
    'SelectionResult',
    'RocCurve',
    'CvReport',
    'SimulationDesign',
    'FullModelDesign',
    'TruthRecord',
    'Treatment',
    'RefitPathway',
    'RefitReport',
    'RunConfig',
]
