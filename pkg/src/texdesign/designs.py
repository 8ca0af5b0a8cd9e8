"""Model design triples: selection stage, compression stage, classifier."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

M1_CHOICES = ("FS", "AF")  # feature selection vs all features
M2_CHOICES = ("DC", "None")  # discriminant compression vs none
M3_CHOICES = ("SVM-LK", "SVM-RBF", "DT")


@dataclass(frozen=True)
class ModelVector:
    m1: str
    m2: str
    m3: str

    def __post_init__(self) -> None:
        if self.m1 not in M1_CHOICES:
            raise ValueError(f"m1 must be one of {M1_CHOICES}")
        if self.m2 not in M2_CHOICES:
            raise ValueError(f"m2 must be one of {M2_CHOICES}")
        if self.m3 not in M3_CHOICES:
            raise ValueError(f"m3 must be one of {M3_CHOICES}")

    @property
    def label(self) -> str:
        return f"{self.m1}+{self.m2}+{self.m3}"

    @property
    def file_stem(self) -> str:
        return self.label.replace("+", "_").replace("-", "").lower()

    @classmethod
    def from_label(cls, label: str) -> "ModelVector":
        parts = label.split("+")
        if len(parts) != 3:
            raise ValueError(f"design label must look like FS+DC+SVM-LK, got {label!r}")
        return cls(m1=parts[0], m2=parts[1], m3=parts[2])


def all_designs() -> tuple[ModelVector, ...]:
    """The 12 designs in fixed order: m1 outermost, m3 innermost."""
    return tuple(ModelVector(m1, m2, m3)
                 for m1, m2, m3 in product(M1_CHOICES, M2_CHOICES, M3_CHOICES))
