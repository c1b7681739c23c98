"""Exception hierarchy shared across the console."""


class MixerError(Exception):
    """Base class for all console errors."""

    #: short machine-readable name used in protocol error events
    code = "error"


class UnknownControlError(MixerError):
    code = "unknown_control"


class WrongKindError(MixerError):
    code = "wrong_kind"


class OutOfRangeError(MixerError):
    code = "out_of_range"


class UnknownPresetError(MixerError):
    code = "unknown_preset"


class UnknownModeError(MixerError):
    code = "unknown_mode"


class EmptyInputError(MixerError):
    code = "empty_input"


class UnknownWordError(MixerError):
    code = "unknown_word"


class CellOccupiedError(MixerError):
    code = "cell_occupied"


class EmptyCellError(MixerError):
    code = "empty_cell"


class EmptyBoardError(MixerError):
    code = "empty_board"


class BusyError(MixerError):
    code = "busy"


class ConfigError(MixerError):
    code = "config"


class CorruptLogError(MixerError):
    code = "corrupt_log"

    def __init__(self, seq, message):
        super().__init__(f"record {seq}: {message}")
        self.seq = seq


class GatewayError(MixerError):
    """Base class for completion backend failures."""

    code = "gateway"
    retryable = False


class GatewayTimeoutError(GatewayError):
    code = "timeout"
    retryable = True


class RateLimitedError(GatewayError):
    code = "rate_limited"
    retryable = True


class AuthFailedError(GatewayError):
    code = "auth_failed"
    retryable = False


class BackendError(GatewayError):
    code = "backend"

    def __init__(self, message, status=None):
        super().__init__(message)
        self.status = status
        # transport-level and server-side failures are worth retrying,
        # client-side (4xx) mistakes are not
        self.retryable = status is None or status >= 500
