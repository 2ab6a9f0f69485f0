"""Exception hierarchy shared across the package."""


class MagicError(Exception):
    """Base class for all errors raised by magic_cd."""


class NetworkError(MagicError, ValueError):
    pass


class UnknownEndpoint(NetworkError):
    def __init__(self, node_id):
        super().__init__(f"edge endpoint {node_id!r} is not a declared node")
        self.node_id = node_id


class DuplicateNodeId(NetworkError):
    def __init__(self, node_id):
        super().__init__(f"node id {node_id!r} declared more than once")
        self.node_id = node_id


class SelfLoop(NetworkError):
    def __init__(self, node_id):
        super().__init__(f"self-loop on node {node_id!r}")
        self.node_id = node_id


class UndirectedNetwork(NetworkError):
    pass


class NonPositiveDocumentTimestamp(NetworkError):
    def __init__(self, node_id, timestamp):
        super().__init__(
            f"document {node_id!r} has timestamp {timestamp}; word nodes sit at 0, "
            "so documents must be >= 1"
        )
        self.node_id = node_id


class NotNatural(NetworkError):
    def __init__(self, violations):
        super().__init__(f"{len(violations)} edge(s) do not go forward in time")
        self.violations = violations


class ShapeMismatch(MagicError, ValueError):
    pass


class StaleCache(MagicError, RuntimeError):
    pass


class ZeroDiagonal(MagicError, ValueError):
    def __init__(self, k):
        super().__init__(f"interaction matrix has non-positive diagonal at community {k}")
        self.k = k


class TooFewEdges(MagicError, ValueError):
    pass


class EmptyCover(MagicError, ValueError):
    pass


class EmptyOrFullSet(MagicError, ValueError):
    pass


class ParseError(MagicError, ValueError):
    def __init__(self, line, reason, path=None):
        where = f"{path}:" if path else "line "
        super().__init__(f"{where}{line}: {reason}")
        self.line = line
        self.reason = reason
        self.path = path


class FormatVersionMismatch(MagicError, ValueError):
    pass
