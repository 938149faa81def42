"""Multivariate polynomials over F_p with per-variable exponents below p.

Monomials with exponents in [0, p) form a basis of the space of functions
F_p^n -> F_p, so every polynomial here *is* its function; multiplication
reduces exponents through x^p = x.  Degree of the zero polynomial is -1.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .config import RETRY_CAP, check_budget
from .errors import FormatError, RetryLimitError, ValidationError
from .field import digit_table, validate_dims
from .rng import as_rng

Exponents = tuple[int, ...]


def _reduce_exponent(e: int, p: int) -> int:
    # x^e = x^(((e-1) mod (p-1)) + 1) as functions, for e >= 1
    if e == 0:
        return 0
    return (e - 1) % (p - 1) + 1


@lru_cache(maxsize=None)
def _power_table(p: int) -> np.ndarray:
    out = np.empty((p, p), dtype=np.int64)
    for d in range(p):
        for e in range(p):
            out[d, e] = pow(d, e, p) if (d, e) != (0, 0) else 1
    out.setflags(write=False)
    return out


class Polynomial:
    """Immutable polynomial; ``terms`` maps exponent tuples to coefficients."""

    __slots__ = ("p", "n", "terms", "_hash")

    def __init__(self, p: int, n: int, terms: dict[Exponents, int]):
        p, n = validate_dims(p, n)
        clean: dict[Exponents, int] = {}
        for exps, coeff in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise ValidationError(f"exponent tuple {exps} has wrong arity")
            if any(e < 0 or e >= p for e in exps):
                raise ValidationError(f"exponents must lie in [0, {p}): {exps}")
            c = int(coeff) % p
            if c:
                clean[exps] = c
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *_):
        raise AttributeError("Polynomial is immutable")

    # -- basic structure ----------------------------------------------------

    @property
    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        d = self.degree
        return all(sum(e) == d for e in self.terms)

    def is_constant(self) -> bool:
        return self.degree <= 0

    @classmethod
    def zero(cls, p: int, n: int) -> "Polynomial":
        return cls(p, n, {})

    @classmethod
    def constant(cls, p: int, n: int, c: int) -> "Polynomial":
        return cls(p, n, {(0,) * n: c})

    @classmethod
    def variable(cls, p: int, n: int, i: int) -> "Polynomial":
        """x_{i+1} (zero-based index i)."""
        exps = [0] * n
        exps[i] = 1
        return cls(p, n, {tuple(exps): 1})

    @classmethod
    def from_coefficients(cls, p: int, n: int, monomials, coeffs) -> "Polynomial":
        return cls(p, n, dict(zip(monomials, (int(c) for c in coeffs))))

    # -- arithmetic ----------------------------------------------------------

    def _check_same_space(self, other: "Polynomial"):
        if (self.p, self.n) != (other.p, other.n):
            raise ValidationError("polynomials live on different spaces")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check_same_space(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = (terms.get(e, 0) + c) % self.p
        return Polynomial(self.p, self.n, terms)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.p, self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, c: int) -> "Polynomial":
        return Polynomial(self.p, self.n, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._check_same_space(other)
        p = self.p
        terms: dict[Exponents, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(_reduce_exponent(a + b, p) for a, b in zip(e1, e2))
                terms[e] = (terms.get(e, 0) + c1 * c2) % p
        return Polynomial(p, self.n, terms)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and (self.p, self.n) == (other.p, other.n)
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        h = object.__getattribute__(self, "_hash")
        if h is None:
            h = hash((self.p, self.n, tuple(sorted(self.terms.items()))))
            object.__setattr__(self, "_hash", h)
        return h

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, x) -> int:
        x = tuple(int(v) % self.p for v in x)
        if len(x) != self.n:
            raise ValidationError("point dimension mismatch")
        total = 0
        for exps, c in self.terms.items():
            t = c
            for xi, e in zip(x, exps):
                if e:
                    t = t * pow(xi, e, self.p)
            total += t
        return total % self.p

    def value_table(self, budget: int | None = None) -> np.ndarray:
        """Values on all of F_p^n in enumeration order."""
        pts = digit_table(self.p, self.n, budget)
        pw = _power_table(self.p)
        vals = np.zeros(len(pts), dtype=np.int64)
        for exps, c in self.terms.items():
            t = np.full(len(pts), c, dtype=np.int64)
            for i, e in enumerate(exps):
                if e:
                    t = (t * pw[pts[:, i], e]) % self.p
            vals = (vals + t) % self.p
        return vals

    def values_at(self, points: np.ndarray) -> np.ndarray:
        """Vectorized evaluation on an (m, n) array of points."""
        pts = np.asarray(points, dtype=np.int64) % self.p
        pw = _power_table(self.p)
        vals = np.zeros(len(pts), dtype=np.int64)
        for exps, c in self.terms.items():
            t = np.full(len(pts), c, dtype=np.int64)
            for i, e in enumerate(exps):
                if e:
                    t = (t * pw[pts[:, i], e]) % self.p
            vals = (vals + t) % self.p
        return vals

    # -- derivatives ---------------------------------------------------------

    def additive_derivative(self, y) -> "Polynomial":
        """Δ_y P = P(x + y) − P(x).  Total degree always drops."""
        y = tuple(int(v) % self.p for v in y)
        if len(y) != self.n:
            raise ValidationError("direction dimension mismatch")
        p = self.p
        terms: dict[Exponents, int] = {}
        for exps, c in self.terms.items():
            ranges = [range(e + 1) for e in exps]
            for sub in product(*ranges):
                if sub == exps:
                    continue  # cancels against −P(x)
                coeff = c
                for yi, e, a in zip(y, exps, sub):
                    coeff = coeff * math.comb(e, a) * pow(yi, e - a, p) % p
                if coeff:
                    terms[sub] = (terms.get(sub, 0) + coeff) % p
        return Polynomial(p, self.n, terms)

    def iterated_derivative(self, directions) -> "Polynomial":
        out = self
        for y in directions:
            out = out.additive_derivative(y)
        return out

    # -- rendering -----------------------------------------------------------

    def __repr__(self) -> str:
        return f"Polynomial(p={self.p}, n={self.n}, {self.to_text()!r})"

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps in sorted(self.terms):
            c = self.terms[exps]
            factors = [str(c)]
            for i, e in enumerate(exps):
                if e == 1:
                    factors.append(f"x{i + 1}")
                elif e > 1:
                    factors.append(f"x{i + 1}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    @classmethod
    def from_text(cls, p: int, n: int, text: str) -> "Polynomial":
        terms: dict[Exponents, int] = {}
        text = text.strip()
        if text in ("", "0"):
            return cls(p, n, {})
        for part in text.split("+"):
            part = part.strip()
            exps = [0] * n
            coeff = 1
            saw_coeff = False
            for factor in part.split("*"):
                factor = factor.strip()
                m = re.fullmatch(r"x(\d+)(?:\^(\d+))?", factor)
                if m:
                    i = int(m.group(1)) - 1
                    if not 0 <= i < n:
                        raise FormatError(f"variable x{i + 1} out of range in {part!r}")
                    exps[i] += int(m.group(2) or 1)
                elif re.fullmatch(r"\d+", factor):
                    coeff = coeff * int(factor)
                    saw_coeff = True
                else:
                    raise FormatError(f"cannot parse factor {factor!r}")
            if not saw_coeff and all(e == 0 for e in exps):
                raise FormatError(f"empty term {part!r}")
            key = tuple(exps)
            terms[key] = terms.get(key, 0) + coeff
        return cls(p, n, terms)

    def to_json_dict(self) -> dict:
        return {
            "schema": "fpuniform/v1",
            "kind": "polynomial",
            "p": self.p,
            "n": self.n,
            "terms": [
                {"exps": list(e), "coeff": self.terms[e]} for e in sorted(self.terms)
            ],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Polynomial":
        try:
            p, n = obj["p"], obj["n"]
            raw = obj["terms"]
        except (KeyError, TypeError) as exc:
            raise FormatError(f"polynomial JSON missing field: {exc}") from exc
        terms: dict[Exponents, int] = {}
        for i, t in enumerate(raw):
            try:
                exps = tuple(int(e) for e in t["exps"])
                coeff = int(t["coeff"])
            except (KeyError, TypeError, ValueError) as exc:
                raise FormatError(
                    f"bad term: {exc}", pointer=f"/terms/{i}"
                ) from exc
            terms[exps] = terms.get(exps, 0) + coeff
        try:
            return cls(p, n, terms)
        except ValidationError as exc:
            raise FormatError(str(exc), pointer="/terms") from exc


def monomials_up_to(p: int, n: int, d: int, exactly: bool = False) -> list[Exponents]:
    """Exponent tuples (< p entrywise) of total degree ≤ d, or == d."""
    if d < 0:
        return []
    out: list[Exponents] = []

    def rec(prefix: list[int], remaining: int, budget_left: int):
        if remaining == 0:
            if not exactly or budget_left == 0:
                out.append(tuple(prefix))
            return
        for e in range(min(p - 1, budget_left) + 1):
            prefix.append(e)
            rec(prefix, remaining - 1, budget_left - e)
            prefix.pop()

    rec([], n, d)
    if exactly:
        out = [e for e in out if sum(e) == d]
    return sorted(out)


def family_size(p: int, n: int, d: int) -> int:
    """|Poly_d(F_p^n)| = p^(number of monomials)."""
    return p ** len(monomials_up_to(p, n, d))


def random_polynomial(
    p: int, n: int, d: int, homogeneous: bool = False, seed=0
) -> Polynomial:
    """Uniform polynomial of degree exactly d (classical regime d < p).

    Coefficients are uniform over the monomial basis of total degree ≤ d
    (exactly d when homogeneous), resampled until the degree is exactly d.
    """
    p, n = validate_dims(p, n)
    d = int(d)
    if d < 0:
        raise ValidationError("degree must be nonnegative")
    if d >= p:
        raise ValidationError(
            f"degree {d} >= p = {p}: outside the classical polynomial regime"
        )
    monos = monomials_up_to(p, n, d, exactly=homogeneous)
    rng = as_rng(seed)
    for _ in range(RETRY_CAP):
        coeffs = rng.integers(0, p, size=len(monos))
        poly = Polynomial.from_coefficients(p, n, monos, coeffs)
        if poly.degree == d:
            return poly
    raise RetryLimitError(f"no degree-{d} draw in {RETRY_CAP} attempts")


@dataclass(frozen=True)
class BiasResult:
    value: float
    mode: str
    samples: int | None = None
    stderr: float | None = None
    seed: int | None = None

    def __float__(self) -> float:
        return self.value


def bias(
    P: Polynomial,
    mode: str = "exact",
    samples: int | None = None,
    seed=None,
    budget: int | None = None,
) -> BiasResult:
    """|E_x e_p(P(x))|, exactly or by Monte Carlo.

    The exact path accumulates integer counts per residue class and defers
    floating point to a single magnitude computation.
    """
    p = P.p
    roots = np.exp(2j * np.pi * np.arange(p) / p)
    if mode == "exact":
        check_budget(p**P.n, budget, "exact bias")
        counts = np.bincount(P.value_table(budget), minlength=p)
        value = abs(np.dot(counts, roots)) / p**P.n
        return BiasResult(float(value), "exact")
    if mode == "mc":
        if samples is None or samples < 1:
            raise ValidationError("mc mode needs samples >= 1")
        rng = as_rng(0 if seed is None else seed)
        pts = rng.integers(0, p, size=(samples, P.n))
        z = roots[P.values_at(pts)].mean()
        stderr = math.sqrt(max(0.0, 1.0 - abs(z) ** 2) / samples)
        return BiasResult(abs(z), "mc", samples=samples, stderr=stderr, seed=seed)
    raise ValidationError(f"unknown mode {mode!r}")
