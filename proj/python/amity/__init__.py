# Copyright 2026 The Amity Authors. All Rights Reserved.
# Licensed under the Apache License, Version 2.0 (the "License"); you may not
# use this file except in compliance with the License. You may obtain a copy at
# http://www.apache.org/licenses/LICENSE-2.0

"""Python bindings for the AMITY intent model, corpus tools and evaluation."""

from ._core import (
    AmityError,
    Corpus,
    EvalReport,
    Intent,
    Model,
    TagScore,
    Vocabulary,
    evaluate,
    fit_vocabulary,
    load_corpus,
    load_model,
    model_from_bytes,
    parse_corpus,
    read_evalset,
    tokenize,
    train,
)

__all__ = [
    "AmityError",
    "Corpus",
    "EvalReport",
    "Intent",
    "Model",
    "TagScore",
    "Vocabulary",
    "evaluate",
    "fit_vocabulary",
    "load_corpus",
    "load_model",
    "model_from_bytes",
    "parse_corpus",
    "read_evalset",
    "tokenize",
    "train",
]
