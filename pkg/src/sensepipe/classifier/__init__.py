from .config import GLOBAL, ClassifierConfig
from .io import dump_params, load_params
from .model import PARAM_NAMES, forward, init_params, loss_and_grads, predict, predict_proba, zero_params
from .train import TextClassifier, TrainingError, TrainLog, train
from .vocab import PAD, UNK, Vocabulary, VocabularyOverflow

__all__ = [
    "GLOBAL", "ClassifierConfig", "dump_params", "load_params", "PARAM_NAMES", "forward", "init_params",
    "loss_and_grads", "predict", "predict_proba", "zero_params", "TextClassifier", "TrainingError",
    "TrainLog", "train", "PAD", "UNK", "Vocabulary", "VocabularyOverflow",
]
