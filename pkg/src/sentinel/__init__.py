"""Security-event recognition for surveillance streams.

Abandoned objects, objects moved by their owner or by someone else, and
thefts are recognised from a dual background model, object/person detection,
tracking and appearance verification.
"""

from sentinel.config import Config, load_config
from sentinel.core import BBox, Clock, ConfigurationError, Frame, Mask, centroid_distance, iou
from sentinel.events import EventKind, SecurityEvent

__version__ = "0.1.0"

__all__ = [
    "BBox", "Clock", "Config", "ConfigurationError", "EventKind", "Frame", "Mask", "SecurityEvent",
    "centroid_distance", "iou", "load_config", "__version__",
]
