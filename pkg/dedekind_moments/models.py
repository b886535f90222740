"""Pydantic models shared by the numeric modules, services, CLI and API."""

from __future__ import annotations

import math
from typing import Annotated, Any, Literal

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    WithJsonSchema,
    model_validator,
)


def _to_complex(value: Any) -> complex:
    if isinstance(value, bool):
        raise ValueError("booleans are not complex numbers")
    if isinstance(value, (int, float, complex)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, dict) and {"re", "im"} <= value.keys():
        return complex(float(value["re"]), float(value["im"]))
    if isinstance(value, str):
        return complex(value.replace(" ", "").replace("i", "j"))
    raise ValueError(f"cannot interpret {value!r} as a complex number")


ComplexValue = Annotated[
    Any,
    BeforeValidator(_to_complex),
    PlainSerializer(lambda z: [z.real, z.imag], return_type=list),
    WithJsonSchema(
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
    ),
]


class ShiftTuple(BaseModel):
    """The four small complex shifts (alpha, beta, gamma, delta)."""

    alpha: ComplexValue = Field(0j, description="Shift on zeta(1/2+it).")
    beta: ComplexValue = Field(0j, description="Shift on L(1/2+it, chi).")
    gamma: ComplexValue = Field(0j, description="Shift on zeta(1/2-it).")
    delta: ComplexValue = Field(0j, description="Shift on L(1/2-it, chi-bar).")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _small(self) -> "ShiftTuple":
        for name in ("alpha", "beta", "gamma", "delta"):
            if abs(getattr(self, name)) > 0.1:
                raise ValueError(f"{name} must satisfy |{name}| <= 0.1")
        return self

    @classmethod
    def of(cls, alpha: complex, beta: complex, gamma: complex, delta: complex) -> "ShiftTuple":
        return cls(alpha=alpha, beta=beta, gamma=gamma, delta=delta)

    @classmethod
    def generic(cls, T: float, scale: float = 1e-2) -> "ShiftTuple":
        """Default tuple (1, 2, 3, 5) * scale * (1 + i/10) / log T."""
        c = scale * (1 + 0.1j) / math.log(T)
        return cls.of(c, 2 * c, 3 * c, 5 * c)

    @classmethod
    def random(cls, rng, scale: float = 0.05) -> "ShiftTuple":
        """Draw a seeded tuple with real and imaginary parts in [-scale, scale]."""
        vals = rng.uniform(-scale, scale, size=8)
        return cls.of(*(complex(vals[2 * i], vals[2 * i + 1]) for i in range(4)))

    def as_tuple(self) -> tuple[complex, complex, complex, complex]:
        return (self.alpha, self.beta, self.gamma, self.delta)

    @property
    def total(self) -> complex:
        return self.alpha + self.beta + self.gamma + self.delta

    def swap(self) -> "ShiftTuple":
        """Return (-gamma, -delta, -alpha, -beta)."""
        return ShiftTuple.of(-self.gamma, -self.delta, -self.alpha, -self.beta)

    def permuted(self, pattern: str) -> "ShiftTuple":
        """Build a tuple from a pattern such as ``"-g,b,-a,d"``."""
        lookup = {"a": self.alpha, "b": self.beta, "g": self.gamma, "d": self.delta}
        values = []
        for token in pattern.split(","):
            token = token.strip()
            sign = -1 if token.startswith("-") else 1
            values.append(sign * lookup[token.lstrip("-")])
        return ShiftTuple.of(*values)

    def conjugate(self) -> "ShiftTuple":
        return ShiftTuple.of(*(z.conjugate() for z in self.as_tuple()))

    def scaled(self, factor: float) -> "ShiftTuple":
        return ShiftTuple.of(*(factor * z for z in self.as_tuple()))

    def pole_gap(self) -> float:
        """Smallest modulus among the pole-controlling combinations."""
        a, b, g, d = self.as_tuple()
        combos = (a + g, b + d, a + d, b + g, a + b + g + d, a - b, g - d)
        return min(abs(z) for z in combos)


class QuadratureSpec(BaseModel):
    abs_tol: float = Field(1e-12, gt=0, description="Absolute tolerance.")
    rel_tol: float = Field(1e-10, gt=0, description="Relative tolerance.")
    max_subdivisions: int = Field(400, ge=1, description="Adaptive subdivision limit.")
    truncation_height: float = Field(
        6.0, gt=0, description="Cut-off |Im s| for vertical-line integrals."
    )

    model_config = ConfigDict(frozen=True)


class KernelSpec(BaseModel):
    """The AFE kernel G(s): exp(s^2/scale), optionally damped by exp(-s^4/quartic)."""

    kind: Literal["gaussian", "quartic-damped"] = Field("gaussian", description="Kernel family.")
    scale: float = Field(1.0, gt=0, description="Gaussian width parameter tau.")
    quartic: float = Field(200.0, gt=0, description="Quartic damping parameter lambda.")
    sigma: float = Field(1.0, gt=0, description="Abscissa of the contour.")
    nodes: int = Field(480, ge=16, description="Gauss-Legendre nodes on the contour.")

    model_config = ConfigDict(frozen=True)


class WeightSpec(BaseModel):
    """Smooth weight w(t) supported in [T/2, 4T] with transitions of width T0."""

    T: float = Field(1000.0, gt=10, description="Height parameter.")
    T0: float = Field(300.0, gt=0, description="Transition width.")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _regime(self) -> "WeightSpec":
        if self.T0 > self.T:
            raise ValueError("T0 must not exceed T")
        if self.T0 < self.T**0.6:
            raise ValueError("T0 must be at least T^0.6")
        if 2 * self.T0 > 3.5 * self.T:
            raise ValueError("transitions overlap")
        return self

    @property
    def support(self) -> tuple[float, float]:
        return (self.T / 2, 4 * self.T)


class SumTruncation(BaseModel):
    r_max: int = Field(20_000, ge=1, description="Largest r in the brute r-sum.")
    d_max: int = Field(20_000, ge=1, description="Largest d in the brute d-sum.")
    tail_bound: float = Field(0.0, ge=0, description="Certified bound on the neglected tail.")


class LocalFactorReport(BaseModel):
    prime: int
    closed_form: ComplexValue
    series_value: ComplexValue
    terms_used: int
    residual: float


class CheckResult(BaseModel):
    """One residual check with its tolerance and provenance."""

    name: str = Field(..., description="Check identifier.")
    suite: str = Field(..., description="Suite that produced the check.")
    value: ComplexValue | None = Field(None, description="Computed value, when meaningful.")
    reference: ComplexValue | None = Field(None, description="Oracle value, when meaningful.")
    residual: float = Field(..., description="Residual compared against the tolerance.")
    tolerance: float = Field(..., description="Acceptance threshold.")
    passed: bool = Field(..., description="Whether the residual is within tolerance.")
    oracle: str = Field("", description="Which independent route produced the reference.")
    details: dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def from_residual(
        cls,
        name: str,
        suite: str,
        residual: float,
        tolerance: float,
        *,
        mode: Literal["below", "above"] = "below",
        **extra: Any,
    ) -> "CheckResult":
        passed = residual <= tolerance if mode == "below" else residual > tolerance
        return cls(
            name=name, suite=suite, residual=float(residual), tolerance=tolerance, passed=passed, **extra
        )


class SuiteReport(BaseModel):
    suite: str
    version: str
    config: dict[str, Any] = Field(default_factory=dict)
    checks: list[CheckResult] = Field(default_factory=list)
    elapsed_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


class MomentReport(BaseModel):
    """Oracle versus six-term main term for one (h, k)."""

    h: int
    k: int
    T: float
    T0: float
    oracle: ComplexValue | None = None
    main_term: ComplexValue
    per_term: list[ComplexValue] = Field(..., min_length=6, max_length=6)
    residual: float | None = None
    relative_residual: float | None = None
    timings: dict[str, float] = Field(default_factory=dict)
    details: dict[str, Any] = Field(default_factory=dict)


Command = Literal["identities", "afe", "voronoi", "sums", "moment", "mollified", "all"]


class RunConfig(BaseModel):
    """Validated configuration for one CLI or API run."""

    command: Command = "identities"
    D: int | None = Field(None, description="Fundamental discriminant of a Kronecker character.")
    q: int | None = Field(None, ge=1, description="Modulus when a character table is given.")
    table_path: str | None = Field(None, description="JSON character table file.")
    shifts: ShiftTuple | None = Field(None, description="Explicit shift tuple.")
    T: float = Field(1000.0, gt=10)
    T0: float | None = Field(None, gt=0)
    h: int = Field(1, ge=1)
    k: int = Field(1, ge=1)
    t: float = Field(50.0, ge=10)
    s: ComplexValue = Field(1.5)
    d: int = Field(1, ge=1)
    c: int = Field(1)
    window: tuple[float, float] = Field((300.0, 8.0))
    ij: tuple[int, int] = Field((1, 1))
    rmax: int = Field(20_000, ge=1)
    dmax: int = Field(20_000, ge=1)
    mnmax: int | None = Field(None, ge=1)
    tol: float | None = Field(None, gt=0)
    threads: int = Field(1, ge=1)
    seed: int = 42
    out: str | None = None
    fmt: Literal["json", "jsonl", "csv"] = "json"
    coeffs_path: str | None = None
    samples_path: str | None = None

    @model_validator(mode="after")
    def _consistent(self) -> "RunConfig":
        if self.D is not None and self.q is not None and abs(self.D) != self.q:
            raise ValueError("q must equal |D| when both are given")
        if self.table_path is not None and self.q is None:
            raise ValueError("q is required with table_path")
        if self.ij[0] not in (1, 2) or self.ij[1] not in (1, 2):
            raise ValueError("ij entries must be 1 or 2")
        if self.command == "mollified" and self.coeffs_path is None:
            raise ValueError("coeffs_path is required for the mollified command")
        return self

    def weight(self) -> WeightSpec:
        T0 = self.T0 if self.T0 is not None else max(self.T**0.6, 0.4 * self.T)
        return WeightSpec(T=self.T, T0=T0)


class AfeTerms(BaseModel):
    """Both sides of the approximate functional equation at one height t."""

    t: float
    lhs: ComplexValue = Field(..., description="zeta L zeta L at 1/2 + shifts +- it.")
    first_sum: ComplexValue = Field(..., description="Sum weighted by V at the given shifts.")
    second_sum: ComplexValue = Field(..., description="Sum weighted by V at the swapped shifts.")
    x_factor: ComplexValue = Field(..., description="Exact Gamma-ratio factor X.")
    rhs: ComplexValue
    residual: float
    mn_max: int = Field(..., description="Largest product mn kept in both sums.")
    tail_bound: float = Field(..., description="Estimate of the neglected mn > mn_max mass.")


class VoronoiTerms(BaseModel):
    """Left side and the three right-side pieces of the twisted Voronoi formula."""

    lhs: ComplexValue
    residue_term: ComplexValue
    dual_plus: ComplexValue
    dual_minus: ComplexValue
    rhs: ComplexValue
    residual: float
    dual_length: int = Field(..., description="Number of dual terms kept on each side.")
    details: dict[str, Any] = Field(default_factory=dict)
