"""Domain errors raised across the workbench.

Every error carries a human-readable message; the HTTP layer maps the class
name into response bodies, so class names are part of the wire contract.
"""


class WorkbenchError(Exception):
    """Base class for all domain errors in this package."""


# --- data ingestion ---------------------------------------------------------

class ParseError(WorkbenchError):
    """A cell could not be parsed as a number; message includes row/column."""


class DuplicateId(WorkbenchError):
    """A sample id or feature name occurs more than once."""


class RaggedRow(WorkbenchError):
    """A data row does not match the expected number of cells."""


class NonFinite(WorkbenchError):
    """NaN/inf survived ingestion and imputation was not requested."""


class UnknownSample(WorkbenchError):
    """Clinical row references a sample id absent from the expression matrix."""


class NegativeTime(WorkbenchError):
    """Survival time below zero."""


class EmptyDataset(WorkbenchError):
    """Operation requires at least one sample."""


# --- PCA --------------------------------------------------------------------

class TooFewSamples(WorkbenchError):
    """PCA needs at least 3 samples."""


class TooFewFeatures(WorkbenchError):
    """PCA needs at least 2 features."""


class BadComponentIndex(WorkbenchError):
    """Component index out of range, or the two axes coincide."""


# --- partition tree ---------------------------------------------------------

class NotALeaf(WorkbenchError):
    """Split target already has children."""


class NotInternal(WorkbenchError):
    """Prune target has no children."""


class TooFewMembers(WorkbenchError):
    """Split target holds fewer than 3 samples."""


class EmptySide(WorkbenchError):
    """Divider line leaves one side of the split empty."""


class EmptyCluster(WorkbenchError):
    """Feature importance needs both member sets nonempty."""


class MissingFeature(WorkbenchError):
    """Classification row lacks a value for a feature used by a split rule."""


class InvalidLine(WorkbenchError):
    """Divider line normal is zero or non-normalizable."""


class SchemaVersionMismatch(WorkbenchError):
    """Model document schema id is not supported."""


class UnresolvableFeature(WorkbenchError):
    """Model document references a feature name absent from the matrix."""


# --- survival ---------------------------------------------------------------

class EmptyInput(WorkbenchError):
    """Estimator needs at least one record."""


class NoClinicalData(WorkbenchError):
    """No sample has a usable clinical record."""


# --- view models ------------------------------------------------------------

class NoFeatureSelected(WorkbenchError):
    """Point coloring needs a nonempty feature selection."""


class NoLabels(WorkbenchError):
    """Overlay needs at least one sample with a prior label."""


class UniverseMismatch(WorkbenchError):
    """Label comparison requires identical sample universes."""


# --- session service / CLI --------------------------------------------------

class UnknownNode(WorkbenchError):
    """Node id not present in the current tree."""


class StaleRevision(WorkbenchError):
    """Mutation carried an outdated revision token."""


class NoDataset(WorkbenchError):
    """Session has no dataset loaded yet."""


class ScriptError(WorkbenchError):
    """Replay script command failed; message includes the command index."""
