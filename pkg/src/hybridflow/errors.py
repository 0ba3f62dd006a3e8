"""Exception hierarchy shared by all subpackages.

Every contract violation raises a dedicated class so callers (and tests)
can discriminate failure modes without string matching.
"""


class HybridFlowError(Exception):
    """Base class for all package-specific errors."""


# --- file format / codec errors -------------------------------------------

class FlowFormatError(HybridFlowError, ValueError):
    """A byte stream does not conform to a flow file format."""


class BadMagicError(FlowFormatError):
    """Leading magic value of a .flo stream is wrong."""


class TruncatedError(FlowFormatError):
    """Byte count of a .flo stream disagrees with its header."""


class NonPositiveDimsError(FlowFormatError):
    """Stored width or height is < 1."""


class WrongBitDepthError(FlowFormatError):
    """KITTI flow image is not 16-bit."""


class WrongChannelCountError(FlowFormatError):
    """KITTI flow image does not have exactly 3 channels."""


class RangeOverflowError(FlowFormatError):
    """A valid flow value exceeds the encodable range of the format."""


# --- geometry / metric errors ---------------------------------------------

class DimensionMismatchError(HybridFlowError, ValueError):
    """Operands do not share the required spatial dimensions."""


class EmptyMaskError(HybridFlowError, ValueError):
    """An evaluation mask selects no pixels."""


class TooSmallError(HybridFlowError, ValueError):
    """Input is spatially too small for the requested operation."""


# --- data generation / dataset errors -------------------------------------

class InvalidSpecError(HybridFlowError, ValueError):
    """A scene specification violates its invariants."""


class DatasetIOError(HybridFlowError, OSError):
    """Reading or writing dataset files failed."""


class IndexOutOfRangeError(HybridFlowError, IndexError):
    """Sample index outside the manifest's range."""


class CorruptFileError(DatasetIOError):
    """A stored dataset file fails to parse."""


# --- network errors ---------------------------------------------------------

class InvalidConfigError(HybridFlowError, ValueError):
    """A network configuration violates its invariants."""


class ShapeMismatchError(HybridFlowError, ValueError):
    """Tensor shapes are inconsistent with the layer specification."""


class CheckpointIOError(HybridFlowError, OSError):
    """A checkpoint file is unreadable or truncated."""


class FormatVersionMismatchError(HybridFlowError, ValueError):
    """Checkpoint format version is not supported."""


# --- training errors --------------------------------------------------------

class InvalidCyclesError(HybridFlowError, ValueError):
    """Cycle counts (n1, n2) violate their invariants."""


class EmptySourceError(HybridFlowError, ValueError):
    """A data source required by the schedule holds no samples."""


class SourceMismatchError(HybridFlowError, ValueError):
    """Batch source tag disagrees with the switch value."""


class MissingGroundTruthError(HybridFlowError, ValueError):
    """An operation requires ground truth the sample does not carry."""


class TooFewSamplesError(HybridFlowError, ValueError):
    """Calibration received fewer samples than required."""


class DegenerateVarianceError(HybridFlowError, ValueError):
    """Calibration target has zero variance."""


class NonFiniteLossError(HybridFlowError, RuntimeError):
    """Training loss became NaN or infinite."""

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record
