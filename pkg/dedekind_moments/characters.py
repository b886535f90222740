"""Dirichlet characters as explicit value tables."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from sympy import divisors, factorint

from .errors import CharacterError, PreconditionError

logger = logging.getLogger(__name__)

MAX_MODULUS = 10**6
INDUCED_SEARCH_LIMIT = 10**4
_TAB2 = (0, 1, 0, -1, 0, -1, 0, 1)


def kronecker_symbol(a: int, b: int) -> int:
    """Kronecker symbol (a|b) by the binary reciprocity recursion."""
    if b == 0:
        return 1 if abs(a) == 1 else 0
    if a % 2 == 0 and b % 2 == 0:
        return 0
    v = 0
    while b % 2 == 0:
        v += 1
        b //= 2
    k = 1 if v % 2 == 0 else _TAB2[a & 7]
    if b < 0:
        b = -b
        if a < 0:
            k = -k
    while True:
        if a == 0:
            return k if b == 1 else 0
        v = 0
        while a % 2 == 0:
            v += 1
            a //= 2
        if v % 2 == 1:
            k *= _TAB2[b & 7]
        if a & b & 2:
            k = -k
        r = abs(a)
        a = b % r
        b = r


def is_fundamental_discriminant(D: int) -> bool:
    if D == 1:
        return True
    if D == 0:
        return False

    def squarefree(m: int) -> bool:
        return all(e == 1 for e in factorint(abs(m)).values())

    if D % 4 == 1:
        return squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and squarefree(m)
    return False


@dataclass(frozen=True, eq=False)
class DirichletCharacter:
    """A character mod q held as its table chi(0), ..., chi(q-1)."""

    q: int
    values: np.ndarray = field(repr=False)
    parity: int
    primitive: bool
    gauss: complex
    label: str = ""

    def __call__(self, n):
        if isinstance(n, (int, np.integer)):
            return complex(self.values[int(n) % self.q])
        return self.values[np.mod(np.asarray(n, dtype=np.int64), self.q)]

    @property
    def is_real(self) -> bool:
        return bool(np.all(np.abs(self.values.imag) < 1e-12))

    @property
    def is_principal(self) -> bool:
        nonzero = self.values[np.abs(self.values) > 0.5]
        return bool(np.all(np.abs(nonzero - 1) < 1e-12))

    def conj(self) -> "DirichletCharacter":
        label = f"conj({self.label})" if self.label else ""
        return _build(self.q, self.values.conj(), label, check=False)

    def square(self) -> "DirichletCharacter":
        label = f"({self.label})^2" if self.label else ""
        return _build(self.q, self.values**2, label, check=False)

    def to_json(self) -> dict[str, Any]:
        if self.is_real:
            values: list[Any] = [int(round(v.real)) for v in self.values]
        else:
            values = [[float(v.real), float(v.imag)] for v in self.values]
        return {"q": self.q, "values": values, "label": self.label}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "DirichletCharacter":
        raw = data.get("values")
        if "q" not in data or raw is None:
            raise CharacterError("character JSON needs 'q' and 'values'")
        values = [complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v) for v in raw]
        return character_from_table(int(data["q"]), values, label=data.get("label", ""))

    def summary(self) -> dict[str, Any]:
        return {
            "q": self.q,
            "parity": self.parity,
            "primitive": self.primitive,
            "real": self.is_real,
            "gauss": [self.gauss.real, self.gauss.imag],
            "label": self.label,
        }


def _gauss(q: int, values: np.ndarray, n: int = 1) -> complex:
    m = np.arange(q)
    phases = np.exp(2j * np.pi * ((n * m) % q) / q)
    return complex(np.sum(values * phases))


def _induced_from_proper_divisor(q: int, values: np.ndarray) -> bool:
    units = np.array([n for n in range(1, q) if math.gcd(n, q) == 1] or [1])
    for d in divisors(q)[:-1]:
        same_class = units[(units % d) == (1 % d)]
        if np.all(np.abs(values[same_class] - 1) < 1e-9):
            return True
    return False


def _validate(q: int, values: np.ndarray) -> None:
    n = np.arange(q)
    coprime = np.array([math.gcd(int(v), q) == 1 for v in n])
    if q == 1:
        coprime[:] = True
    mags = np.abs(values)
    if np.any(mags[~coprime] > 1e-12):
        raise CharacterError("support: chi(n) must vanish when gcd(n, q) > 1")
    if np.any(np.abs(mags[coprime] - 1) > 1e-9):
        raise CharacterError("support: |chi(n)| must be 1 when gcd(n, q) = 1")
    if abs(values[1 % q] - 1) > 1e-9:
        raise CharacterError("multiplicativity: chi(1) must be 1")
    sample = n if q <= 2000 else n[coprime][:50]
    products = (sample[:, None] * n[None, :]) % q
    if np.any(np.abs(values[products] - values[sample][:, None] * values[None, :]) > 1e-9):
        raise CharacterError("multiplicativity: chi(mn) != chi(m) chi(n)")


def _build(q: int, values: np.ndarray, label: str, check: bool = True) -> DirichletCharacter:
    values = np.array(values, dtype=complex)
    if check:
        _validate(q, values)
    # snap to exact units so powers and conjugates stay on the circle
    unit = np.abs(values) > 0.5
    values[unit] = values[unit] / np.abs(values[unit])
    values[np.abs(values.imag) < 1e-14] = values[np.abs(values.imag) < 1e-14].real
    values.setflags(write=False)
    parity = 0 if q <= 2 or abs(values[q - 1] - 1) < 1e-9 else 1
    gauss = _gauss(q, values)
    primitive = abs(abs(gauss) ** 2 - q) < 1e-6 * q
    if check and q <= INDUCED_SEARCH_LIMIT and q > 1:
        induced = _induced_from_proper_divisor(q, values)
        if induced == primitive:
            raise CharacterError("primitivity: Gauss-sum and induced-character criteria disagree")
    return DirichletCharacter(
        q=q, values=values, parity=parity, primitive=primitive, gauss=gauss, label=label
    )


def character_from_table(q: int, values: Sequence[complex], label: str = "") -> DirichletCharacter:
    """Validate a value table and attach parity, primitivity and G(chi)."""
    if q < 1 or q > MAX_MODULUS:
        raise CharacterError(f"modulus {q} outside [1, {MAX_MODULUS}]")
    if len(values) != q:
        raise CharacterError(f"table length {len(values)} does not match q={q}")
    chi = _build(q, np.asarray(values, dtype=complex), label)
    logger.debug("character q=%d parity=%d primitive=%s", q, chi.parity, chi.primitive)
    return chi


def kronecker_character(D: int) -> DirichletCharacter:
    """The real primitive character n -> (D|n) mod |D|."""
    if abs(D) > MAX_MODULUS or not is_fundamental_discriminant(D):
        raise CharacterError(f"{D} is not a fundamental discriminant with |D| <= {MAX_MODULUS}")
    q = abs(D)
    values = [kronecker_symbol(D, n) for n in range(q)] if q > 1 else [1]
    chi = character_from_table(q, values, label=f"({D}|.)")
    if not chi.primitive:
        raise CharacterError(f"Kronecker character for D={D} failed the primitivity check")
    return chi


def principal_character(q: int) -> DirichletCharacter:
    values = [1 if math.gcd(n, q) == 1 else 0 for n in range(q)] if q > 1 else [1]
    return character_from_table(q, values, label=f"1 mod {q}")


def gauss_sum_twisted(chi: DirichletCharacter, n: int) -> complex:
    """G(n, chi) = sum_m chi(m) e_q(nm) by direct summation."""
    if not chi.primitive:
        raise PreconditionError("gauss_sum_twisted needs a primitive character")
    return _gauss(chi.q, chi.values, n)
