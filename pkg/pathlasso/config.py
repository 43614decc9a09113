import os
from dotenv import load_dotenv

load_dotenv()

class Config:
    """Solver, grid and pipeline configuration."""

    # Solver
    MAX_ITER = int(os.getenv('PATHLASSO_MAX_ITER', '10000'))
    TOL_PRIMAL = float(os.getenv('PATHLASSO_TOL_PRIMAL', '1e-6'))
    TOL_CHANGE = float(os.getenv('PATHLASSO_TOL_CHANGE', '1e-8'))
    RHO = float(os.getenv('PATHLASSO_RHO', '1.0'))

    # Tuning grid
    LAMBDA_MIN = float(os.getenv('PATHLASSO_LAMBDA_MIN', '1e-6'))
    LAMBDA_MAX = float(os.getenv('PATHLASSO_LAMBDA_MAX', '1e2'))
    N_LAMBDA = int(os.getenv('PATHLASSO_N_LAMBDA', '50'))
    PHI = float(os.getenv('PATHLASSO_PHI', '2.0'))

    # Selection and inference
    SELECTION_CUTOFF = float(os.getenv('PATHLASSO_SELECTION_CUTOFF', '1e-3'))
    FDR_LEVEL = float(os.getenv('PATHLASSO_FDR_LEVEL', '0.05'))
    CV_FOLDS = int(os.getenv('PATHLASSO_CV_FOLDS', '10'))
    RESAMPLES = int(os.getenv('PATHLASSO_RESAMPLES', '500'))

    # Runtime
    THREADS = int(os.getenv('PATHLASSO_THREADS', '1'))
    LOG_LEVEL = os.getenv('PATHLASSO_LOG_LEVEL', 'WARNING')
