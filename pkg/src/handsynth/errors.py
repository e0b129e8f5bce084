"""Exception types raised across the package, grouped by subsystem."""


class HandSynthError(Exception):
    """Base class for all package errors."""


# --- asset container ---

class AssetError(HandSynthError):
    """Base class for asset pack problems."""


class MissingBlob(AssetError):
    """A blob declared in meta.json is absent on disk."""


class ShapeMismatch(AssetError):
    """An array does not match its declared shape (or a structurally required shape)."""


class ChecksumMismatch(AssetError):
    """Blob or file bytes do not match the recorded SHA-256."""


class InvalidWeights(AssetError):
    """Skinning-weight or joint-regressor rows do not sum to 1."""


class InvalidAsset(AssetError):
    """Structural invariant violated (kinematic tree, grasp transform, index bounds)."""


# --- hand model ---

class DimensionMismatch(HandSynthError):
    """Parameter vector length does not match the model."""


class NonFinitePose(HandSynthError):
    """Pose parameters contain NaN or inf."""


class RingCountMismatch(HandSynthError):
    """Forearm socket ring and hand wrist ring have different vertex counts."""


# --- scene sampling ---

class EmptyBank(HandSynthError):
    """Sampling requested from an empty asset bank."""


class EmptyPool(HandSynthError):
    """Background pool is empty."""


class SourceTooSmall(HandSynthError):
    """Background image too small to crop at the requested aspect."""


# --- rendering ---

class BehindCamera(HandSynthError):
    """Point projects behind (or onto) the camera plane."""


class EmptyViewportWarning(UserWarning):
    """Nothing rasterized into the viewport; mask is all zero."""


# --- compositing ---

class EmptyMask(HandSynthError):
    """Mask has no foreground pixel, bbox undefined."""


# --- interaction ---

class ParseError(HandSynthError):
    """OBJ (or prediction JSON) file could not be parsed."""


class DegenerateMesh(HandSynthError):
    """Mesh has no faces."""


class UnresolvedReference(HandSynthError):
    """A grasp or scene spec references an id absent from the asset pack."""


# --- dataset io ---

class IoError(HandSynthError):
    """Filesystem-level failure while reading or writing a sample."""


class InvariantViolation(HandSynthError):
    """Sample record is internally inconsistent; refused on write."""


class MissingSample(HandSynthError):
    """A ground-truth sample has no prediction (or a manifest entry is missing files)."""


class DuplicateId(HandSynthError):
    """Prediction file contains the same sample id twice."""


class MissingManifest(HandSynthError):
    """Dataset directory has no manifest.json."""


# --- metrics ---

class DegenerateInput(HandSynthError):
    """Point set too degenerate for the requested alignment."""


class EmptyInput(HandSynthError):
    """Metric called on an empty collection."""


# --- cli ---

class ConfigError(HandSynthError):
    """Generation/eval config is malformed."""
