"""Classifier families behind one fit/predict/serialize contract."""

from cospread.models.base import FAMILIES, MajorityBaseline, TrainedModel
from cospread.models.bayes import BernoulliNB, GaussianNB
from cospread.models.boost import AdaBoost
from cospread.models.linear import LinearSVC, LogisticRegression, sigmoid
from cospread.models.svm import KernelSpec, KernelSVM
from cospread.models.tree import DecisionTree

__all__ = [
    "FAMILIES", "AdaBoost", "BernoulliNB", "DecisionTree", "GaussianNB", "KernelSVM",
    "KernelSpec", "LinearSVC", "LogisticRegression", "MajorityBaseline", "TrainedModel",
    "sigmoid",
]
