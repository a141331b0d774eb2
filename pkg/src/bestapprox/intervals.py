from dataclasses import dataclass


@dataclass(frozen=True)
class QuantileInterval:
    """Closed interval [lo, hi] with lo <= hi; endpoints may be infinite."""

    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def is_point(self):
        return self.lo == self.hi

    @property
    def length(self):
        return self.hi - self.lo

    @property
    def midpoint(self):
        return 0.5 * (self.lo + self.hi)

    def contains(self, x, tol=0.0):
        return self.lo - tol <= x <= self.hi + tol

    def select(self, selector):
        if selector == "min":
            return self.lo
        if selector == "max":
            return self.hi
        if selector == "mid":
            return self.midpoint
        raise ValueError(f"unknown selector {selector!r}")

    def as_list(self):
        return [self.lo, self.hi]
