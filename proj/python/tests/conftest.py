# Copyright 2026 The Amity Authors. All Rights Reserved.
# Licensed under the Apache License, Version 2.0 (the "License"); you may not
# use this file except in compliance with the License. You may obtain a copy at
# http://www.apache.org/licenses/LICENSE-2.0

import os
import pathlib

import pytest

import amity

DATA = pathlib.Path(
    os.environ.get("AMITY_DATA_DIR", pathlib.Path(__file__).resolve().parents[2] / "data")
)


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def corpus():
    return amity.load_corpus(DATA / "corpus.json")


@pytest.fixture(scope="session")
def trained(corpus):
    model, history = amity.train(corpus, epochs=25, seed=7)
    return model, history
