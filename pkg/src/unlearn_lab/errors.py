"""Exceptions shared across the package."""


class UnlearnLabError(Exception):
    """Base class for all package errors."""


class EmptyCorpus(UnlearnLabError):
    """An operation that needs at least one document received none."""


class MissingColumn(UnlearnLabError):
    """A required CSV column is absent from the header."""

    def __init__(self, name: str):
        super().__init__(f"missing column: {name!r}")
        self.name = name


class AllZero(UnlearnLabError):
    """A contingency table with every cell zero has no defined statistic."""


class NegativeCount(UnlearnLabError):
    """Removing a batch would drive a count below zero, i.e. the data was never trained."""

    def __init__(self, token: str | None = None):
        what = f"token {token!r}" if token is not None else "class totals"
        super().__init__(f"removal would make {what} negative; batch was not previously trained")
        self.token = token


class UntrainedModel(UnlearnLabError):
    """Prediction was requested from a model with no training data."""


class EmptyBatch(UnlearnLabError):
    """A fit or unlearn call received an empty document batch."""


class UnknownBatch(UnlearnLabError):
    """The referenced batch id is not present in the batch log."""

    def __init__(self, batch_id, detail: str = ""):
        msg = f"unknown batch id: {batch_id}"
        if detail:
            msg = f"{msg} ({detail})"
        super().__init__(msg)
        self.batch_id = batch_id


class EmptyTestSet(UnlearnLabError):
    """Evaluation was requested on an empty test set."""


class MissingArtifact(UnlearnLabError):
    """A required artifact file is absent from the output directory."""

    def __init__(self, path):
        super().__init__(f"missing artifact: {path}")
        self.path = str(path)
