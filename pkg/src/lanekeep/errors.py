"""Exception types shared across the package."""


class LanekeepError(Exception):
    """Base class for package errors."""


class GeometryError(LanekeepError):
    """Invalid road geometry or out-of-range query."""


class VehicleLostError(LanekeepError):
    """Vehicle is too far from every lane center to be localized."""


class FrameError(LanekeepError):
    """Invalid image dimensions or contents."""


class ShapeError(LanekeepError):
    """Tensor shape mismatch in a network operation."""


class ModelFormatError(LanekeepError):
    """Model file is corrupt or has an unsupported magic/version."""


class DatasetError(LanekeepError):
    """Manifest or sample constraints violated."""


class TrainingDivergedError(LanekeepError):
    """Non-finite loss or activation encountered during training."""

    def __init__(self, message: str, batch: int | None = None, loss: float | None = None):
        super().__init__(message)
        self.batch = batch
        self.loss = loss


class MisalignedLogsError(LanekeepError):
    """Two trajectory logs cannot be compared tick by tick."""


class ConfigError(LanekeepError):
    """Bad run-config file: unknown key, bad value, or missing path."""
