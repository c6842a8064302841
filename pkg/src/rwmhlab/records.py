"""Result records shared by the formula, tv-shift and bound modules."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class MomentResult:
    value: object
    method: str
    error: float = 0.0

    def __float__(self):
        return float(self.value)


STRICTNESS = ("strict", "weak", "strict-except-opposite-pair", "equal", "info")


@dataclass
class BoundReport:
    """One inequality check. margin = rhs - lhs, where rhs is the bound side.

    `passed` means margin >= -error_bound. `strict_ok` additionally asks for a
    margin above the error bound, which is what a strict inequality promises.
    "equal" rows pass when |margin| <= error_bound; "info" rows always pass.
    Skipped checks carry the reason and no numbers.
    """

    theorem_id: str
    r: object = None
    lhs: object = None
    rhs: object = None
    strict_expected: str = "weak"
    error_bound: float = 0.0
    method: str = ""
    note: str = ""
    skipped: str | None = None
    lag: int | None = None
    margin: object = field(init=False, default=None)
    passed: bool = field(init=False, default=True)

    def __post_init__(self):
        if self.strict_expected not in STRICTNESS:
            raise ValueError(f"unknown strictness {self.strict_expected!r}")
        if self.skipped is None:
            self.margin = self.rhs - self.lhs
            if self.strict_expected == "equal":
                self.passed = bool(abs(self.margin) <= self.error_bound)
            elif self.strict_expected == "info":
                self.passed = True
            else:
                self.passed = bool(self.margin >= -self.error_bound)

    @property
    def strict_ok(self) -> bool:
        return self.skipped is None and bool(self.margin > self.error_bound)
