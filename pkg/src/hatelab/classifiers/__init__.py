from .forest import DecisionTreeClassifier, RandomForestClassifier
from .io import load_model, save_model
from .linear import (
    LinearSVMClassifier,
    LogisticRegressionClassifier,
    TrainingDivergedError,
    hinge_objective,
    logistic_objective,
)
from .naive_bayes import NaiveBayesClassifier
from .neighbors import KNNClassifier

__all__ = [
    "DecisionTreeClassifier",
    "KNNClassifier",
    "LinearSVMClassifier",
    "LogisticRegressionClassifier",
    "NaiveBayesClassifier",
    "RandomForestClassifier",
    "TrainingDivergedError",
    "hinge_objective",
    "load_model",
    "logistic_objective",
    "save_model",
]
