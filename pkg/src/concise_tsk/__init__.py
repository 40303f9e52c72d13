"""Concise zero-order TSK fuzzy systems built from enhanced soft subspace
clustering (per-rule feature selection) and Lasso (rule elimination)."""

from .errors import ConfigError, DataError, ModelFormatError, NumericalError
from .dataio import Dataset, NormParams, load_csv, fit_minmax, apply_minmax
from .essc import EsscConfig, EsscState, essc_fit, essc_objective
from .antecedent import RuleAntecedent, select_features, estimate_membership_params
from .inference import Rule, TskModel, map_to_firing_space, predict_regression, predict_class
from .consequent import LassoProblem, LassoSolution, fista_solve, soft_threshold
from .harness import TrainConfig, EvalReport, train_pipeline, kfold_split, grid_search_cv
from .rulebase_io import save_model, load_model, export_rules_text, export_activation_matrix

__version__ = "0.1.0"
