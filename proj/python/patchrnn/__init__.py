# SPDX-License-Identifier: Apache-2.0
"""Security patch classification with twin recurrent networks."""

import json

from ._patchrnn import (
    ConfigError,
    DimensionMismatch,
    Error,
    HunkCountMismatch,
    MalformedPatch,
    Model,
    Patch,
    __version__,
    compute_metrics,
    format_percent,
    lex,
    message_words,
    parse_patch,
    porter_stem,
    prepare,
    preprocess_message,
)
from ._patchrnn import default_config_json as _default_config_json

__all__ = [
    "ConfigError",
    "DimensionMismatch",
    "Error",
    "HunkCountMismatch",
    "MalformedPatch",
    "Model",
    "Patch",
    "__version__",
    "compute_metrics",
    "default_config",
    "format_percent",
    "lex",
    "message_words",
    "model_config",
    "parse_patch",
    "porter_stem",
    "prepare",
    "preprocess_message",
    "train",
]


def default_config():
    return json.loads(_default_config_json())


def train(patches, labels, w2v_epochs=5, **overrides):
    """Trains a model on patch texts; `overrides` replace default config keys."""
    config = default_config()
    unknown = set(overrides) - set(config)
    if unknown:
        raise ConfigError("unknown config keys: " + ", ".join(sorted(unknown)))
    config.update(overrides)
    return Model.train(list(patches), list(labels), json.dumps(config), w2v_epochs)


def model_config(model):
    return json.loads(model.config_json)
