"""Exception types raised by loopflow operations."""


class LoopflowError(Exception):
    pass


class GridMismatch(LoopflowError, ValueError):
    pass


class NotDivergenceFree(LoopflowError, ValueError):
    def __init__(self, node, residual):
        self.node = node
        self.residual = residual
        super().__init__(f"divergence {residual} at node {node}")


class InconsistentCirculation(LoopflowError, ValueError):
    def __init__(self, cell_pair, discrepancy):
        self.cell_pair = cell_pair
        self.discrepancy = discrepancy
        super().__init__(f"potential mismatch {discrepancy} across cells {cell_pair}")


class NotIndecomposable(LoopflowError, ValueError):
    pass


class NotSimple(LoopflowError, ValueError):
    pass


class NotNested(LoopflowError, ValueError):
    def __init__(self, pair):
        self.pair = pair
        super().__init__(f"level sets {pair[0]} and {pair[1]} are not nested")


class NotNonNegative(LoopflowError, ValueError):
    pass


class IdenticallyZero(LoopflowError, ValueError):
    pass


class NotMonotone(LoopflowError, ValueError):
    pass


class NonTermination(LoopflowError, RuntimeError):
    def __init__(self, iteration_cap):
        self.iteration_cap = iteration_cap
        super().__init__(f"extraction loop exceeded {iteration_cap} iterations")


class NotAcyclic(LoopflowError, ValueError):
    def __init__(self, cycle):
        self.cycle = cycle
        super().__init__(f"support contains the directed cycle {cycle}")


class NotNormalized(LoopflowError, ValueError):
    pass


class PreconditionFailed(LoopflowError, ValueError):
    pass
