from .ecoc import (
    CVResult,
    EcocSvmClassifier,
    Standardizer,
    hinge_decode,
    kfold_cv,
    one_vs_one_coding,
    stratified_folds,
)
from .metrics import EvaluationReport, confusion_matrix, evaluate
from .svm import BinaryLinearSvm, LinearSVM, dual_objective, train_binary_svm

__all__ = [
    "BinaryLinearSvm",
    "CVResult",
    "EcocSvmClassifier",
    "EvaluationReport",
    "LinearSVM",
    "Standardizer",
    "confusion_matrix",
    "dual_objective",
    "evaluate",
    "hinge_decode",
    "kfold_cv",
    "one_vs_one_coding",
    "stratified_folds",
    "train_binary_svm",
]
