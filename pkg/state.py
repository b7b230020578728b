"""
State definitions for the verification suite graph.
"""
import operator
from typing import Annotated, List, Optional, TypedDict


class CheckRecord(TypedDict):
    """One verdict produced by a suite stage"""
    stage: str
    check: str
    value: float
    passed: bool


class VerificationState(TypedDict):
    """Suite settings plus the verdicts accumulated stage by stage"""
    checks: Annotated[List[CheckRecord], operator.add]
    seed: int
    threads: Optional[int]
    quick: bool                         # Reduced grids for smoke runs
    n_range: List[int]                  # [low, high] for the direct construction check
    tc_list: List[float]
    certified_n: Optional[int]          # Set by the certificate stage
