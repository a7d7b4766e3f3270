"""Exception types shared across the package.

The CLI maps these onto its documented exit codes, so bound evaluators
should raise the specific type rather than a bare ValueError when the
situation is "the request was well-formed but this bound does not apply
here" (InapplicableBoundError) or "this sweep would not finish"
(GridTooLargeError).
"""


class ConfbcError(Exception):
    pass


class ChannelFormatError(ConfbcError):
    """Channel/system JSON that does not match the documented schema."""


class InapplicableBoundError(ConfbcError):
    """Bound preconditions not met by the given channel/parameters."""


class GridTooLargeError(ConfbcError):
    """Requested parameter grid exceeds the evaluation budget."""
