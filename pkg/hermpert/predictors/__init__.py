from hermpert.predictor import Predictor
from hermpert.predictors_config import PredictorsConfig

function_names = []
for name, value in PredictorsConfig.__dict__.items():
    if hasattr(value, "value") and isinstance(value.value, Predictor):
        for name, function in value.value.error_functions():
            function_names.append(name)
            globals()[name] = function

__all__ = function_names
