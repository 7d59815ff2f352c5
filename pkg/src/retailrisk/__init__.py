"""Retail-chain failure statistics: descriptive tables, logistic screens,
a Firth penalized-likelihood failure model, and failure-probability grids."""

from .dataset import (
    DataParseError,
    DataValidationError,
    Dataset,
    DerivedRatios,
    DesignMatrix,
    FirmYearRecord,
    dataset_to_csv,
    derive_ratios,
    design_matrix,
    embedded_dataset,
    parse_dataset,
)
from .descriptive import (
    ColumnSummary,
    CorrelationMatrix,
    DegenerateDataError,
    correlation_matrix,
    describe,
    mean_std,
    pearson_corr,
    shapiro_wilk,
)
from .firth import FirthFit, fit_firth, firth_score, lr_test, penalized_loglik
from .linalg import SingularMatrixError, cholesky, inverse_spd, log_det_spd, solve_spd
from .logistic import (
    DegenerateResponseError,
    MleFit,
    detect_separation,
    fit_logistic,
    log_likelihood,
    significance_code,
)
from .pipeline import (
    FINAL_MODEL_PREDICTORS,
    PredictionCell,
    PredictionTable,
    ScreenReport,
    fit_final_model,
    odds_ratio,
    predict_probability,
    probability_table,
    run_screen,
)
from .report import ReportDocument, Section, render

__version__ = "0.1.0"

__all__ = [
    "ColumnSummary",
    "CorrelationMatrix",
    "DataParseError",
    "DataValidationError",
    "Dataset",
    "DegenerateDataError",
    "DegenerateResponseError",
    "DerivedRatios",
    "DesignMatrix",
    "FINAL_MODEL_PREDICTORS",
    "FirmYearRecord",
    "FirthFit",
    "MleFit",
    "PredictionCell",
    "PredictionTable",
    "ReportDocument",
    "ScreenReport",
    "Section",
    "SingularMatrixError",
    "cholesky",
    "correlation_matrix",
    "dataset_to_csv",
    "derive_ratios",
    "describe",
    "design_matrix",
    "detect_separation",
    "embedded_dataset",
    "firth_score",
    "fit_final_model",
    "fit_firth",
    "fit_logistic",
    "inverse_spd",
    "log_det_spd",
    "log_likelihood",
    "lr_test",
    "mean_std",
    "odds_ratio",
    "parse_dataset",
    "pearson_corr",
    "penalized_loglik",
    "predict_probability",
    "probability_table",
    "render",
    "run_screen",
    "shapiro_wilk",
    "significance_code",
    "solve_spd",
]
