"""Exception hierarchy shared by all segdp modules."""


class SegdpError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SegdpError):
    """A run or dataset config file is malformed or contains unknown keys."""


class SpecError(SegdpError):
    """A dataset spec is internally inconsistent (e.g. unknown block label)."""


class NonFiniteCost(SegdpError):
    """An affiliation function returned NaN or a negative value."""


class InactiveLabel(SegdpError):
    """An assignment references a cluster that has no weights."""


class Infeasible(SegdpError):
    """The constraints admit no assignment at all (e.g. T < min_block)."""


class AllInfeasible(SegdpError):
    """Every terminal cell of the filled tensor is infinite."""


class CorruptBackpointer(SegdpError):
    """Path reconstruction reached an infinite cell; indicates a fill bug."""


class DomainError(SegdpError):
    """A physical model was evaluated outside its valid domain."""


class NonFiniteStart(SegdpError):
    """The optimizer objective is not finite at the starting point."""


class OptimizerDiverged(SegdpError):
    """The simplex collapsed without meeting tolerance."""


class AllClustersRemoved(SegdpError):
    """Characterization left no active cluster to assign points to."""


class LengthMismatch(SegdpError):
    """Two assignments being compared do not have the same length."""
