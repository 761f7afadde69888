"""Non-existence criteria for rotational invariant curves of twist maps.

Along an orbit x_{n-1}, x_n, x_{n+1} the curve-conditioned quantities are

    a(x_n)      = h22(x_{n-1}, x_n) + h11(x_n, x_{n+1})
    b(x_n)      = -h12(x_{n-1}, x_n)
    b(phi(x_n)) = -h12(x_n, x_{n+1})

A curve through the sampled points needs a > 0 everywhere (simple test) and
the sharper a >= b(phi(x)) D- + b(x) / D+ (refined test). Both are
necessary conditions, so a violation anywhere on an orbit rules out every
invariant curve through that orbit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .profile import ProfileNorms, check_main_condition
from .tennis import DomainError, OrbitSegment


@dataclass(frozen=True)
class ABRecord:
    x: float
    a: float
    b: float
    b_next: float


@dataclass(frozen=True)
class DBounds:
    B_plus: float
    B_minus: float
    C_plus: float
    C_minus: float
    D_plus: float | None
    D_minus: float | None
    discriminant_plus: float
    discriminant_minus: float

    @property
    def defined(self) -> bool:
        return self.D_plus is not None and self.D_minus is not None


@dataclass(frozen=True)
class CriterionReport:
    criterion: str
    conclusive: bool
    witness: float
    margin: float
    constants: DBounds | None = None
    note: str = ""


# -- a, b along orbits ------------------------------------------------------------

def ab_along_orbit(system, triple: Sequence[float]) -> ABRecord:
    x_prev, x0, x_next = triple
    if not (system.guard(x_prev, x0) and system.guard(x0, x_next)):
        raise DomainError(f"orbit triple {tuple(triple)} leaves the generating-function domain")
    back = system.gen(x_prev, x0)
    fwd = system.gen(x0, x_next)
    return ABRecord(x0, back.h22 + fwd.h11, -back.h12, -fwd.h12)


def records_from_positions(system, xs: Sequence[float]) -> list[ABRecord]:
    """ABRecords at every interior point of a sequence of lifted positions."""
    return [ab_along_orbit(system, (xs[i - 1], xs[i], xs[i + 1])) for i in range(1, len(xs) - 1)]


def records_from_orbit(system, segment: OrbitSegment) -> list[ABRecord]:
    return records_from_positions(system, segment.t)


# -- constants ------------------------------------------------------------------

def _inflate(x: float, factor: float) -> float:
    return x + (factor - 1.0) * abs(x)


def estimate_bc(records: Iterable[ABRecord], safety_B: float = 1.01,
                safety_C: float = 0.99) -> tuple[float, float, float, float]:
    """Sample estimates (B+, B-, C+, C-); pass 1.0 factors for exact reproductions."""
    recs = list(records)
    if not recs:
        raise ValueError("need at least one ABRecord")
    if any(r.b <= 0 or r.b_next <= 0 for r in recs):
        raise ValueError("twist violated: b must be positive")
    a = np.array([r.a for r in recs])
    b = np.array([r.b for r in recs])
    bn = np.array([r.b_next for r in recs])
    B_plus = _inflate(float(np.max(a / bn)), safety_B)
    B_minus = _inflate(float(np.max(a / b)), safety_B)
    C_plus = float(np.min(b / bn)) * safety_C
    C_minus = float(np.min(bn / b)) * safety_C
    return B_plus, B_minus, C_plus, C_minus


def d_bounds(B_plus: float, B_minus: float, C_plus: float, C_minus: float) -> DBounds:
    """Bounds D- <= phi' <= D+ from the roots of d^2 - B d + C = 0.

    D+ is the larger root for (B+, C+); D- is the reciprocal of the larger root
    for (B-, C-). Undefined (None) unless B, C > 0 and the discriminant is
    positive.
    """
    disc_p = B_plus * B_plus - 4.0 * C_plus
    disc_m = B_minus * B_minus - 4.0 * C_minus
    D_plus = D_minus = None
    if B_plus > 0 and C_plus > 0 and disc_p > 0:
        D_plus = 0.5 * (B_plus + math.sqrt(disc_p))
    if B_minus > 0 and C_minus > 0 and disc_m > 0:
        # (B - sqrt(disc)) / (2C), written without cancellation
        D_minus = 2.0 / (B_minus + math.sqrt(disc_m))
    return DBounds(B_plus, B_minus, C_plus, C_minus, D_plus, D_minus, disc_p, disc_m)


# -- criteria ---------------------------------------------------------------------

def simple_criterion(records: Sequence[ABRecord], tol: float = 1e-12) -> CriterionReport:
    if not records:
        raise ValueError("need at least one ABRecord")
    i = int(np.argmin([r.a for r in records]))
    margin = records[i].a
    return CriterionReport("simple", margin < -tol, records[i].x, margin)


def refined_margins(records: Sequence[ABRecord], db: DBounds) -> np.ndarray:
    return np.array([r.a - r.b_next * db.D_minus - r.b / db.D_plus for r in records])


def refined_criterion(records: Sequence[ABRecord], db: DBounds, tol: float = 1e-12) -> CriterionReport:
    if not db.defined:
        return CriterionReport("refined", False, math.nan, math.nan, db,
                               note="D bounds undefined (non-positive discriminant)")
    if not records:
        raise ValueError("need at least one ABRecord")
    margins = refined_margins(records, db)
    i = int(np.argmin(margins))
    return CriterionReport("refined", bool(margins[i] < -tol), records[i].x, float(margins[i]), db)


# -- second variation -------------------------------------------------------------

def sturm_count(diag: np.ndarray, off: np.ndarray, x: float) -> int:
    """Number of eigenvalues of the symmetric tridiagonal matrix below x."""
    count = 0
    q = 1.0
    # zero pivots are nudged by a rounding-level amount, as in LAPACK's bisection
    pivmin = np.finfo(float).eps * (abs(x) + np.max(np.abs(diag), initial=0.0)
                                    + np.max(np.abs(off), initial=0.0) + 1.0)
    for i in range(len(diag)):
        e2 = off[i - 1] ** 2 if i > 0 else 0.0
        q = diag[i] - x - (e2 / q if i > 0 else 0.0)
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


def min_eigenvalue(diag: Sequence[float], off: Sequence[float], tol: float = 1e-13) -> float:
    """Smallest eigenvalue by bisection on the Sturm sequence count."""
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    if len(diag) == 0:
        raise ValueError("empty matrix")
    radius = np.zeros(len(diag))
    radius[:-1] += np.abs(off)
    radius[1:] += np.abs(off)
    lo = float(np.min(diag - radius))
    hi = float(np.max(diag + radius))
    scale = max(1.0, abs(lo), abs(hi))
    while hi - lo > tol * scale:
        mid = 0.5 * (lo + hi)
        if sturm_count(diag, off, mid) >= 1:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def action_hessian(system, xs: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Tridiagonal Hessian of the action with both endpoints held fixed."""
    xs = list(xs)
    if len(xs) < 3:
        raise ValueError("segment needs at least one interior point")
    for x0, x1 in zip(xs[:-1], xs[1:]):
        if not system.guard(x0, x1):
            raise DomainError(f"pair ({x0}, {x1}) outside the generating-function domain")
    evals = [system.gen(x0, x1) for x0, x1 in zip(xs[:-1], xs[1:])]
    diag = np.array([evals[n - 1].h22 + evals[n].h11 for n in range(1, len(xs) - 1)])
    off = np.array([evals[n].h12 for n in range(1, len(xs) - 2)])
    return diag, off


def second_variation_test(system, segment, tol: float = 1e-10) -> CriterionReport:
    """Negative second variation: the segment is not action minimising, hence
    not part of any invariant curve."""
    xs = segment.t if isinstance(segment, OrbitSegment) else segment
    diag, off = action_hessian(system, xs)
    lam = min_eigenvalue(diag, off)
    witness = float(xs[1 + int(np.argmin(diag))])
    return CriterionReport("second_variation", lam < -tol, witness, lam)


# -- tennis asymptotics -----------------------------------------------------------

@dataclass(frozen=True)
class ABEnclosure:
    a: tuple[float, float]
    b: tuple[float, float]
    b_next: tuple[float, float]

    def contains(self, rec: ABRecord) -> bool:
        return (self.a[0] <= rec.a <= self.a[1] and self.b[0] <= rec.b <= self.b[1]
                and self.b_next[0] <= rec.b_next <= self.b_next[1])


def remainder_bounds(nrm: ProfileNorms, g: float, e: float) -> tuple[float, float, float]:
    """Bounds on the relative remainders of a, b and b(phi) at energy e."""
    s = math.sqrt(2.0 * e)
    r_a = 16.0 * (g + 3.0 * nrm.sup_ddf) * nrm.sup_df / s
    r_b = (7.0 * g + 2.0 * nrm.sup_ddf) * nrm.sup_df / s
    r_bt = (5.0 * g + 2.0 * nrm.sup_ddf) * nrm.sup_df / s
    return r_a, r_b, r_bt


def tennis_ab_asymptotic(nrm: ProfileNorms, g: float, e: float, ddf_at_t: float) -> ABEnclosure:
    s = math.sqrt(2.0 * e)
    r_a, r_b, r_bt = remainder_bounds(nrm, g, e)
    ca = g + 2.0 * ddf_at_t
    return ABEnclosure(
        a=(s * (ca - r_a), s * (ca + r_a)),
        b=(s * (0.5 * g - r_b), s * (0.5 * g + r_b)),
        b_next=(s * (0.5 * g - r_bt), s * (0.5 * g + r_bt)),
    )


@dataclass(frozen=True)
class ThresholdReport:
    e_star_simple: float | None
    e_star_refined: float | None
    sup_df: float
    sup_ddf: float
    m: float
    M: float
    g: float
    v_star: float
    simple_summands: tuple[float, ...] = ()
    refined_root: float | None = None
    surrogate_note: str = ""
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def e_star_lower(self) -> float:
        return 0.5 * self.v_star ** 2


SURROGATE_NOTE = ("T* replaced by (4/g)*sup|f'| (flight-time deviation bound of the map itself); "
                  "the extension-map constants are not computable")


def _curve_buffer(nrm: ProfileNorms, g: float) -> float:
    t_star = 4.0 * nrm.sup_df / g
    return 2.0 * nrm.sup_df + g + 0.5 * g * max(4.0 * nrm.sup_df / g, t_star)


def refined_holds_at(nrm: ProfileNorms, g: float, s: float) -> bool:
    """Refined inequality at the argmin of f'' with all remainders evaluated at
    sqrt(2e) = s, valid for every curve lying above that energy."""
    e = 0.5 * s * s
    r_a, r_b, r_bt = remainder_bounds(nrm, g, e)
    b_lo, bt_lo = 0.5 * g - r_b, 0.5 * g - r_bt
    if b_lo <= 0 or bt_lo <= 0:
        return False
    a_hi_max = g + 2.0 * nrm.M + r_a
    B_plus = a_hi_max / bt_lo
    B_minus = a_hi_max / b_lo
    C_plus = b_lo / (0.5 * g + r_bt)
    C_minus = bt_lo / (0.5 * g + r_b)
    db = d_bounds(B_plus, B_minus, C_plus, C_minus)
    if not db.defined:
        return False
    lhs = g + 2.0 * nrm.m + r_a
    rhs = bt_lo * db.D_minus + b_lo / db.D_plus
    return lhs < rhs


def _smallest_true(pred, lo: float, rel_tol: float = 1e-13) -> float | None:
    hi = max(2.0 * lo, 1.0)
    for _ in range(200):
        if pred(hi):
            break
        lo, hi = hi, 2.0 * hi
    else:
        return None
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def tennis_thresholds(nrm: ProfileNorms, g: float, v_star: float) -> ThresholdReport:
    """Energies above which no rotational invariant curve exists.

    Simple threshold (needs m < -g/2): closed formula. Refined threshold
    (needs the main condition): smallest sqrt(2e) at which the explicit
    remainder bounds make the refined inequality strict, floored at v_star,
    plus the same curve-oscillation buffer.
    """
    buffer = _curve_buffer(nrm, g)
    notes = []
    simple = None
    summands: tuple[float, ...] = ()
    if g + 2.0 * nrm.m < 0:
        summands = (v_star,
                    nrm.sup_df * 16.0 * (g + 3.0 * nrm.sup_ddf) / (-(g + 2.0 * nrm.m)),
                    2.0 * nrm.sup_df,
                    g,
                    0.5 * g * max(4.0 * nrm.sup_df / g, 4.0 * nrm.sup_df / g))
        simple = 0.5 * math.fsum(summands) ** 2
    else:
        notes.append("simple threshold inapplicable: min f'' >= -g/2")

    refined = None
    root = None
    cond = check_main_condition(nrm, g)
    if cond.applicable and cond.holds:
        floor = (7.0 * g + 2.0 * nrm.sup_ddf) * nrm.sup_df / (0.5 * g)
        root = _smallest_true(lambda s: refined_holds_at(nrm, g, s), max(floor, 1e-12))
        if root is None:
            notes.append("refined inequality never became strict")
        else:
            refined = 0.5 * (max(root, math.nextafter(v_star, math.inf)) + buffer) ** 2
    else:
        notes.append("refined threshold inapplicable: main condition fails")
    return ThresholdReport(simple, refined, nrm.sup_df, nrm.sup_ddf, nrm.m, nrm.M, g, v_star,
                           summands, root, SURROGATE_NOTE, tuple(notes))
