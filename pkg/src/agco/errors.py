"""Exception hierarchy shared by the solvers."""


class AgcoError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(AgcoError, ValueError):
    """Capability vectors of different lengths were compared."""


class GraphError(AgcoError, ValueError):
    """A flow graph references a node that does not exist, or is otherwise malformed."""


class GraphShapeError(GraphError):
    """A flow graph is not layered as the chunked selection requires."""


class InstanceTooLargeError(AgcoError):
    def __init__(self, n_tasks, q, count, cap):
        self.n_tasks, self.q, self.count, self.cap = n_tasks, q, count, cap
        super().__init__(
            f"instance too large: C({n_tasks},{q}) = {count} task sets exceeds the "
            f"enumeration cap of {cap}"
        )


class InfeasibleError(AgcoError):
    """Demand cannot be met with the available (eligible) agents."""


class NodeBudgetExceeded(AgcoError):
    def __init__(self, nodes, incumbent, gap):
        self.nodes = nodes
        self.incumbent = incumbent
        self.gap = gap
        super().__init__(
            f"branch-and-bound node budget exhausted after {nodes} nodes (gap {gap:.3g})"
        )
