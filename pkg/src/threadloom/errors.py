"""Shared error types for provider-backed operations."""


class ProviderUnreachableError(Exception):
    """A remote provider could not be reached or returned a transport-level failure.

    Marked retryable so callers can distinguish transient outages from
    permanent input errors.
    """

    retryable = True

    def __init__(self, provider: str, detail: str):
        super().__init__(f"{provider}: {detail}")
        self.provider = provider
        self.detail = detail


class SnapshotMissError(Exception):
    """A replay provider was asked for a request that the snapshot does not contain."""
