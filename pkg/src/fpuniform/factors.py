"""Polynomial factors: sigma-algebras cut out by level sets of polynomials.

A factor is an ordered list of polynomials P_1..P_C on F_p^n; the atom of a
point x is the value tuple (P_1(x), ..., P_C(x)).  Conditional expectation
averages a function over each atom.  `decompose` runs a desk-scale energy
increment: keep adding the polynomial phase most correlated with the residual
until its Gowers norm drops below the target (or a round cap trips).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iter_product

import numpy as np

from .analysis import gowers_norm, correlation_with_family
from .config import DECOMPOSE_ROUND_CAP, RANK_RMAX_CAP, check_budget
from .errors import FormatError, ValidationError
from .field import place_values, space_size, validate_dims
from .polynomials import Polynomial, monomials_up_to
from .polyrank import polynomial_rank
from .tables import FunctionTable


class PolynomialFactor:
    """The common-level-set partition of F_p^n by an ordered polynomial list."""

    __slots__ = ("p", "n", "defining", "labels")

    def __init__(self, p: int, n: int, defining=()):
        p, n = validate_dims(p, n)
        polys = tuple(defining)
        for q in polys:
            if not isinstance(q, Polynomial):
                raise ValidationError("defining entries must be polynomials")
            if (q.p, q.n) != (p, n):
                raise ValidationError("defining polynomial lives on a different space")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "defining", polys)
        if polys:
            cols = np.stack([q.value_table() for q in polys], axis=1)
            labels = cols @ place_values(p, len(polys))
        else:
            labels = np.zeros(space_size(p, n), dtype=np.int64)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    def __setattr__(self, name, value):
        raise AttributeError("PolynomialFactor is immutable")

    @property
    def complexity(self) -> int:
        return len(self.defining)

    @property
    def degree(self) -> int:
        return max((q.degree for q in self.defining), default=0)

    @property
    def label_space(self) -> int:
        """p^C, the number of possible atom labels (realized or not)."""
        return self.p ** self.complexity

    def atom_count(self) -> int:
        return len(np.unique(self.labels))

    def atoms(self) -> dict[int, np.ndarray]:
        """Label -> point indices, only for nonempty atoms."""
        order = np.argsort(self.labels, kind="stable")
        sorted_labels = self.labels[order]
        cuts = np.flatnonzero(np.diff(sorted_labels)) + 1
        groups = np.split(order, cuts)
        return {int(self.labels[g[0]]): g for g in groups}

    def extend(self, poly: Polynomial) -> "PolynomialFactor":
        return PolynomialFactor(self.p, self.n, self.defining + (poly,))

    def is_measurable(self, f: FunctionTable, tol: float = 1e-12) -> bool:
        if (f.p, f.n) != (self.p, self.n):
            raise ValidationError("table lives on a different space")
        for idx in self.atoms().values():
            vals = f.values[idx]
            if np.abs(vals - vals[0]).max() > tol:
                return False
        return True

    def rank(self, r_max: int = RANK_RMAX_CAP):
        """Rank of the defining set, delegated to the polynomial-rank search."""
        if not self.defining:
            raise ValidationError("the empty factor has no defining polynomials")
        return polynomial_rank(self.defining, r_max=r_max)

    def __eq__(self, other):
        return (
            isinstance(other, PolynomialFactor)
            and (self.p, self.n) == (other.p, other.n)
            and self.defining == other.defining
        )

    def __hash__(self):
        return hash((self.p, self.n, self.defining))

    def __repr__(self):
        names = ", ".join(q.to_text() for q in self.defining)
        return f"PolynomialFactor(p={self.p}, n={self.n}, [{names}])"

    def to_json_dict(self) -> dict:
        return {
            "schema": "fpuniform/v1",
            "kind": "factor",
            "p": self.p,
            "n": self.n,
            "polynomials": [q.to_json_dict() for q in self.defining],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "PolynomialFactor":
        try:
            p, n = obj["p"], obj["n"]
            raw = obj["polynomials"]
        except (KeyError, TypeError) as exc:
            raise FormatError(f"factor JSON missing field: {exc}") from exc
        polys = []
        for i, entry in enumerate(raw):
            try:
                polys.append(Polynomial.from_json_dict(entry))
            except FormatError as exc:
                raise FormatError(str(exc), pointer=f"/polynomials/{i}") from exc
        try:
            return cls(p, n, polys)
        except ValidationError as exc:
            raise FormatError(str(exc), pointer="/polynomials") from exc


def conditional_expectation(f: FunctionTable, factor: PolynomialFactor) -> FunctionTable:
    """E(f|B): replace every value by the mean over its atom."""
    if (f.p, f.n) != (factor.p, factor.n):
        raise ValidationError("table and factor live on different spaces")
    size = factor.label_space
    counts = np.bincount(factor.labels, minlength=size)
    re = np.bincount(factor.labels, weights=f.values.real, minlength=size)
    im = np.bincount(factor.labels, weights=f.values.imag, minlength=size)
    means = (re + 1j * im) / np.maximum(counts, 1)
    vals = means[factor.labels]
    if f.codomain == "real":
        return FunctionTable(f.p, f.n, vals.real, codomain="real")
    return FunctionTable(f.p, f.n, vals)


def factor_fourier(f: FunctionTable, factor: PolynomialFactor, tol: float = 1e-12) -> np.ndarray:
    """Fourier coefficients of the atom-value map over the label group F_p^C.

    A B-measurable f is Gamma(P_1(x), ..., P_C(x)) for some Gamma on F_p^C;
    this returns Gamma-hat in enumeration order of gamma, with empty atoms
    reading as value 0.
    """
    if not factor.is_measurable(f, tol=tol):
        raise ValidationError("function is not constant on the atoms")
    gamma_table = np.zeros(factor.label_space, dtype=np.complex128)
    for label, idx in factor.atoms().items():
        gamma_table[label] = f.values[idx[0]]
    C = factor.complexity
    cube = gamma_table.reshape((factor.p,) * C) if C else gamma_table.reshape(())
    return np.fft.fftn(cube).reshape(-1) / factor.label_space


def reconstruct_from_factor_fourier(
    factor: PolynomialFactor, coefficients: np.ndarray
) -> FunctionTable:
    """Sum of coefficient * e_p(gamma . (P_1..P_C)) — inverts factor_fourier."""
    C = factor.complexity
    size = factor.label_space
    coeffs = np.asarray(coefficients, dtype=np.complex128).reshape(-1)
    if len(coeffs) != size:
        raise ValidationError(f"expected {size} coefficients, got {len(coeffs)}")
    cube = coeffs.reshape((factor.p,) * C) if C else coeffs.reshape(())
    gamma_table = np.fft.ifftn(cube).reshape(-1) * size
    return FunctionTable(factor.p, factor.n, gamma_table[factor.labels])


@dataclass
class DecompositionReport:
    factor: PolynomialFactor
    projection: FunctionTable  # h = E(f|B)
    residual: FunctionTable  # h' = f - h
    rounds: int
    achieved_norm: float
    target: float
    degree: int
    flagged: bool  # True when the round cap hit before reaching the target
    history: list = field(default_factory=list)  # norm after each round
    rank_floor: int | None = None
    rank_meets_floor: bool | None = None

    @property
    def complexity(self) -> int:
        return self.factor.complexity

    def to_json_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "achieved_norm": self.achieved_norm,
            "complexity": self.complexity,
            "flagged": self.flagged,
            "target": self.target,
            "degree": self.degree,
            "history": [float(v) for v in self.history],
            "polynomials": [q.to_text() for q in self.factor.defining],
            "rank_floor": self.rank_floor,
            "rank_meets_floor": self.rank_meets_floor,
        }


def _homogeneous_family(p: int, n: int, d: int, budget) -> list[Polynomial]:
    """Every nonzero polynomial whose monomials share one total degree <= d."""
    out = []
    N = space_size(p, n)
    for j in range(1, d + 1):
        monos = monomials_up_to(p, n, j, exactly=True)
        count = p ** len(monos)
        check_budget(count * N, budget, "homogeneous phase family")
        for coeffs in iter_product(range(p), repeat=len(monos)):
            if any(coeffs):
                out.append(Polynomial.from_coefficients(p, n, monos, coeffs))
    return out


def decompose(
    f: FunctionTable,
    d: int,
    delta: float,
    rank_floor=None,
    homogeneous_only: bool = False,
    round_cap: int = DECOMPOSE_ROUND_CAP,
    budget: int | None = None,
) -> DecompositionReport:
    """Split f = h + h' with h measurable in a degree-<=d factor, ||h'||_{U^{d+1}} <= delta.

    Each round finds, by exhaustive search, the degree-<=d phase most
    correlated with the current residual and adjoins it to the factor.  If the
    correlation dries up or the round cap hits first, the report comes back
    flagged with the best norm achieved.  `rank_floor` (a map from complexity
    to an integer) is checked against the factor's rank lower bound and
    reported, never enforced.
    """
    p, n = f.p, f.n
    if d < 1:
        raise ValidationError("decomposition degree must be >= 1")
    if d > n * (p - 1):
        raise ValidationError(f"no degree-{d} monomials exist on F_{p}^{n}")
    if delta < 0:
        raise ValidationError("tolerance must be nonnegative")
    factor = PolynomialFactor(p, n, ())
    family = _homogeneous_family(p, n, d, budget) if homogeneous_only else None
    history = []
    rounds = 0
    flagged = False
    while True:
        h = conditional_expectation(f, factor)
        residual = f - h
        norm = float(gowers_norm(residual, d + 1, budget=budget))
        history.append(norm)
        if norm <= delta:
            break
        if rounds >= round_cap:
            flagged = True
            break
        if family is not None:
            rep = correlation_with_family(residual, polys=family, budget=budget)
        else:
            rep = correlation_with_family(residual, degree=d, budget=budget)
        if float(rep) < 1e-12 or rep.best in factor.defining:
            # no phase left to make progress with
            flagged = True
            break
        refined = factor.extend(rep.best)
        if refined.atom_count() == factor.atom_count():
            flagged = True
            break
        factor = refined
        rounds += 1
    floor = None
    meets = None
    if rank_floor is not None and factor.complexity:
        floor = int(rank_floor(factor.complexity))
        if floor <= 0:
            meets = True
        else:
            try:
                meets = factor.rank(r_max=floor - 1).rank_exceeds(floor - 1)
            except ValidationError:
                meets = None  # rank search exhausted before deciding
    return DecompositionReport(
        factor=factor,
        projection=h,
        residual=residual,
        rounds=rounds,
        achieved_norm=norm,
        target=delta,
        degree=d,
        flagged=flagged,
        history=history,
        rank_floor=floor,
        rank_meets_floor=meets,
    )


def hybrid_substitute(
    g: FunctionTable,
    factor: PolynomialFactor,
    other: PolynomialFactor,
    tol: float = 1e-12,
) -> FunctionTable:
    """Rewrite g = Gamma(P_1..P_C) as Gamma(Q_1..Q_C) over the second factor.

    The two factors must have equal complexity and matching per-index degrees;
    g must be constant on the first factor's atoms.  Labels of the second
    factor that the first never realizes read as 0.
    """
    if (g.p, g.n) != (factor.p, factor.n):
        raise ValidationError("table and factor live on different spaces")
    if factor.p != other.p:
        raise ValidationError("factors live over different fields")
    if factor.complexity != other.complexity:
        raise ValidationError("factors have different complexity")
    for i, (a, b) in enumerate(zip(factor.defining, other.defining)):
        if a.degree != b.degree:
            raise ValidationError(
                f"degree mismatch at position {i}: {a.degree} vs {b.degree}"
            )
    if not factor.is_measurable(g, tol=tol):
        raise ValidationError("function is not constant on the atoms")
    gamma_table = np.zeros(factor.label_space, dtype=np.complex128)
    for label, idx in factor.atoms().items():
        gamma_table[label] = g.values[idx[0]]
    vals = gamma_table[other.labels]
    if g.codomain == "real":
        return FunctionTable(other.p, other.n, vals.real, codomain="real")
    return FunctionTable(other.p, other.n, vals)
