"""Blind audio watermarking via the entropy of low-frequency wavelet coefficient pairs."""

__version__ = "0.1.0"

from .audio_io import AudioSignal, read_wav, write_wav
from .embedder import EmbedConfig, WatermarkKey, embed, read_key, write_key
from .extractor import ExtractResult, SyncResult, extract, find_sync
from .metrics import ber_percent, capacity, evaluate_clip, snr_db, wbe_statistics

__all__ = [
    "AudioSignal", "read_wav", "write_wav",
    "EmbedConfig", "WatermarkKey", "embed", "read_key", "write_key",
    "ExtractResult", "SyncResult", "extract", "find_sync",
    "ber_percent", "capacity", "evaluate_clip", "snr_db", "wbe_statistics",
    "__version__",
]
