"""Self-contained LP/MIP kernel.

A dense bounded-variable primal simplex (two phases, explicit basis
inverse, Bland safeguard) plus a deterministic best-bound branch-and-bound
driver with a lazy-cut callback.  Everything downstream of the instance
model solves through this module; an external solver could be slotted in
behind the same two entry points, but the embedded simplex is the default
and the one the test suite exercises.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

INF = math.inf

# shared tolerances
TOL_FEAS = 1e-7
TOL_INT = 1e-6
TOL_GAP = 1e-6  # relative optimality gap

_RC_TOL = 1e-9  # reduced-cost optimality threshold
_PIVOT_TOL = 1e-10
_REFACTOR_EVERY = 150

LE, EQ, GE = "<=", "==", ">="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
BREAKDOWN = "breakdown"
TIME_LIMIT = "time_limit"
STOPPED = "stopped"  # halted early at the caller's incumbent threshold


class CutSoundnessError(RuntimeError):
    """A lazy-cut callback returned a cut the candidate does not violate."""


class NumericalBreakdownError(RuntimeError):
    pass


class SolveTimeLimit(RuntimeError):
    """A pricing-level solve ran out of its time budget."""


@dataclass
class Constraint:
    coeffs: dict[int, float]
    sense: str
    rhs: float
    name: str = ""


class LinearModel:
    """Sparse maximization model with bounded continuous/integer variables."""

    def __init__(self, name: str = ""):
        self.name = name
        self.lb: list[float] = []
        self.ub: list[float] = []
        self.obj: list[float] = []
        self.is_int: list[bool] = []
        self.var_names: list[str] = []
        self.rows: list[Constraint] = []
        self._version = 0

    # -- construction ---------------------------------------------------------

    def add_var(
        self,
        lb: float = 0.0,
        ub: float = INF,
        obj: float = 0.0,
        integer: bool = False,
        name: str = "",
    ) -> int:
        if not lb <= ub:
            raise ValueError(f"variable {name or len(self.lb)}: lb {lb} > ub {ub}")
        if not math.isfinite(obj):
            raise ValueError("objective coefficient must be finite")
        self.lb.append(float(lb))
        self.ub.append(float(ub))
        self.obj.append(float(obj))
        self.is_int.append(bool(integer))
        self.var_names.append(name or f"x{len(self.lb) - 1}")
        self._version += 1
        return len(self.lb) - 1

    def add_constr(self, coeffs: dict[int, float], sense: str, rhs: float, name: str = "") -> int:
        if sense not in (LE, EQ, GE):
            raise ValueError(f"unknown sense {sense!r}")
        if not math.isfinite(rhs):
            raise ValueError("rhs must be finite")
        clean = {}
        for j, c in coeffs.items():
            if not 0 <= j < len(self.lb):
                raise ValueError(f"row {name!r} references unknown variable {j}")
            if not math.isfinite(c):
                raise ValueError(f"row {name!r} has non-finite coefficient")
            if c != 0.0:
                clean[int(j)] = float(c)
        self.rows.append(Constraint(clean, sense, float(rhs), name or f"c{len(self.rows)}"))
        self._version += 1
        return len(self.rows) - 1

    def set_objective_coeff(self, j: int, value: float) -> None:
        self.obj[j] = float(value)
        self._version += 1

    def set_bounds(self, j: int, lb: float, ub: float) -> None:
        if not lb <= ub:
            raise ValueError(f"variable {j}: lb {lb} > ub {ub}")
        self.lb[j] = float(lb)
        self.ub[j] = float(ub)
        self._version += 1

    # -- inspection -----------------------------------------------------------

    @property
    def num_vars(self) -> int:
        return len(self.lb)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    @property
    def num_nonzeros(self) -> int:
        return sum(len(r.coeffs) for r in self.rows)

    def size_triple(self) -> tuple[int, int, int]:
        return (self.num_rows, self.num_vars, self.num_nonzeros)

    def to_lp_text(self) -> str:
        """Debug dump in LP text format for external verification."""

        def term(j: int, c: float) -> str:
            return f"{'+' if c >= 0 else '-'} {abs(c):.12g} {self.var_names[j]}"

        lines = [f"\\ model {self.name or 'unnamed'}", "Maximize"]
        objterms = " ".join(term(j, c) for j, c in enumerate(self.obj) if c != 0.0) or "0 x0"
        lines.append(f" obj: {objterms}")
        lines.append("Subject To")
        for r in self.rows:
            body = " ".join(term(j, r.coeffs[j]) for j in sorted(r.coeffs))
            op = {LE: "<=", EQ: "=", GE: ">="}[r.sense]
            lines.append(f" {r.name}: {body or '0 x0'} {op} {r.rhs:.12g}")
        lines.append("Bounds")
        for j in range(self.num_vars):
            lo = "-inf" if self.lb[j] == -INF else f"{self.lb[j]:.12g}"
            hi = "+inf" if self.ub[j] == INF else f"{self.ub[j]:.12g}"
            lines.append(f" {lo} <= {self.var_names[j]} <= {hi}")
        ints = [self.var_names[j] for j in range(self.num_vars) if self.is_int[j]]
        if ints:
            lines.append("Generals")
            lines.append(" " + " ".join(ints))
        lines.append("End")
        return "\n".join(lines) + "\n"


@dataclass
class LpSolution:
    status: str
    x: np.ndarray | None = None
    duals: np.ndarray | None = None
    objective: float = -INF
    iterations: int = 0

    def value(self, j: int) -> float:
        return float(self.x[j])


@dataclass
class MipSolution:
    status: str
    x: np.ndarray | None = None
    objective: float = -INF
    bound: float = INF
    nodes: int = 0
    cuts_added: int = 0


# -- simplex kernel -------------------------------------------------------------

_BASIC = 0
_AT_LOWER = 1
_AT_UPPER = 2
_FREE = 3


class _Simplex:
    def __init__(
        self,
        model: LinearModel,
        extra_rows: Sequence[Constraint],
        overrides: dict[int, tuple[float, float]] | None,
        deadline: float | None = None,
    ):
        self.deadline = deadline
        rows = list(model.rows) + list(extra_rows)
        n = model.num_vars
        m = len(rows)
        self.n_struct = n
        self.m = m

        cache = getattr(model, "_dense_cache", None)
        if cache is not None and cache[0] == model._version:
            A_base = cache[1]
        else:
            A_base = np.zeros((model.num_rows, n))
            for i, r in enumerate(model.rows):
                for j, c in r.coeffs.items():
                    A_base[i, j] = c
            model._dense_cache = (model._version, A_base)
        if extra_rows:
            A_extra = np.zeros((len(extra_rows), n))
            for i, r in enumerate(extra_rows):
                for j, c in r.coeffs.items():
                    A_extra[i, j] = c
            A_struct = np.vstack([A_base, A_extra]) if model.num_rows else A_extra
        else:
            A_struct = A_base

        b = np.array([r.rhs for r in rows], dtype=float)
        lb = np.array(model.lb, dtype=float)
        ub = np.array(model.ub, dtype=float)
        if overrides:
            for j, (lo, hi) in overrides.items():
                lb[j], ub[j] = lo, hi
        self.trivially_infeasible = bool(np.any(lb > ub))

        # one logical (slack) column per row
        slack_lb = np.empty(m)
        slack_ub = np.empty(m)
        for i, r in enumerate(rows):
            if r.sense == LE:
                slack_lb[i], slack_ub[i] = 0.0, INF
            elif r.sense == GE:
                slack_lb[i], slack_ub[i] = -INF, 0.0
            else:
                slack_lb[i], slack_ub[i] = 0.0, 0.0

        self.A = np.hstack([A_struct, np.eye(m)]) if m else A_struct.reshape(0, n)
        self.b = b
        self.lb = np.concatenate([lb, slack_lb])
        self.ub = np.concatenate([ub, slack_ub])
        self.c_real = np.concatenate([np.array(model.obj, dtype=float), np.zeros(m)])
        self.n_total = n + m
        self.iterations = 0
        self.bland = False
        self._degen_run = 0
        self._since_refactor = 0
        self._refactor_every = _REFACTOR_EVERY

    # setup of the initial point / basis (with artificials where needed)
    def _initialize(self) -> None:
        N = self.n_total
        self.state = np.full(N, _AT_LOWER, dtype=np.int8)
        self.x = np.zeros(N)
        for j in range(self.n_struct):
            if self.lb[j] > -INF:
                self.state[j] = _AT_LOWER
                self.x[j] = self.lb[j]
            elif self.ub[j] < INF:
                self.state[j] = _AT_UPPER
                self.x[j] = self.ub[j]
            else:
                self.state[j] = _FREE
                self.x[j] = 0.0

        m = self.m
        resid = self.b - self.A[:, : self.n_struct] @ self.x[: self.n_struct]
        basis = []
        art_cols = []
        art_signs = []
        for i in range(m):
            s = self.n_struct + i
            lo, hi = self.lb[s], self.ub[s]
            if lo - 1e-11 <= resid[i] <= hi + 1e-11:
                self.state[s] = _BASIC
                self.x[s] = min(max(resid[i], lo), hi)
                basis.append(s)
            else:
                # clamp slack to its nearest bound, cover the rest artificially
                val = lo if resid[i] < lo else hi
                self.state[s] = _AT_LOWER if val == lo else _AT_UPPER
                self.x[s] = val
                gap = resid[i] - val
                art_cols.append(i)
                art_signs.append(1.0 if gap > 0 else -1.0)
                basis.append(self.n_total + len(art_cols) - 1)

        self.n_art = len(art_cols)
        if self.n_art:
            art = np.zeros((m, self.n_art))
            for k, (i, sgn) in enumerate(zip(art_cols, art_signs)):
                art[i, k] = sgn
            self.A = np.hstack([self.A, art])
            self.lb = np.concatenate([self.lb, np.zeros(self.n_art)])
            self.ub = np.concatenate([self.ub, np.full(self.n_art, INF)])
            self.c_real = np.concatenate([self.c_real, np.zeros(self.n_art)])
            self.state = np.concatenate([self.state, np.zeros(self.n_art, dtype=np.int8)])
            art_vals = np.zeros(self.n_art)
            for k, (i, sgn) in enumerate(zip(art_cols, art_signs)):
                s = self.n_struct + i
                art_vals[k] = (resid[i] - self.x[s]) * sgn
            self.x = np.concatenate([self.x, art_vals])
            self.n_total += self.n_art

        self.basis = np.array(basis, dtype=np.int64)
        # initial basis is diagonal +-1 (slacks and signed artificials)
        diag = np.ones(m)
        for k, (i, sgn) in enumerate(zip(art_cols, art_signs)):
            diag[i] = sgn
        self.Binv = np.diag(diag) if m else np.zeros((0, 0))

    def _refactor(self) -> bool:
        if self.m == 0:
            return True
        B = self.A[:, self.basis]
        try:
            self.Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError:
            return False
        xn = self.x.copy()
        xn[self.basis] = 0.0
        resid = self.b - self.A @ xn
        self.x[self.basis] = self.Binv @ resid
        self._since_refactor = 0
        return True

    def _optimize(self, c: np.ndarray, max_iters: int, allow_unbounded: bool) -> str:
        m = self.m
        if m == 0:
            return OPTIMAL
        basic_mask = np.zeros(self.n_total, dtype=bool)
        basic_mask[self.basis] = True
        while True:
            if self.iterations >= max_iters:
                return BREAKDOWN
            if (
                self.deadline is not None
                and self.iterations % 128 == 0
                and time.monotonic() > self.deadline
            ):
                return TIME_LIMIT
            self.iterations += 1

            y = c[self.basis] @ self.Binv
            d = c - y @ self.A
            basic_mask[:] = False
            basic_mask[self.basis] = True

            up = (~basic_mask) & ((self.state == _AT_LOWER) | (self.state == _FREE)) & (d > _RC_TOL)
            dn = (~basic_mask) & ((self.state == _AT_UPPER) | (self.state == _FREE)) & (d < -_RC_TOL)
            eligible = np.flatnonzero(up | dn)
            if eligible.size == 0:
                return OPTIMAL
            if self.bland:
                e = int(eligible[0])
            else:
                e = int(eligible[np.argmax(np.abs(d[eligible]))])
            delta = 1.0 if (up[e]) else -1.0

            w = self.Binv @ self.A[:, e]

            # two-pass (Harris style) ratio test: basic values move by
            # -delta * t * w; a small feasibility slack lets us pick the
            # largest pivot among the rows that block within tolerance,
            # which keeps the updated inverse well conditioned
            span = self.ub[e] - self.lb[e]
            leave_pos = -1
            leave_to_upper = False
            xB = self.x[self.basis]
            lbB = self.lb[self.basis]
            ubB = self.ub[self.basis]
            coef = delta * w
            with np.errstate(divide="ignore", invalid="ignore"):
                dec = coef > _PIVOT_TOL
                inc = coef < -_PIVOT_TOL
                blocking = dec | inc
                room = np.full(m, INF)
                room[dec] = xB[dec] - lbB[dec]
                room[inc] = ubB[inc] - xB[inc]
                room = np.maximum(room, 0.0)
                acoef = np.abs(coef)
                plain = np.full(m, INF)
                relaxed = np.full(m, INF)
                plain[blocking] = room[blocking] / acoef[blocking]
                # slack small enough that accumulated bound drift stays
                # below the feasibility tolerance over a whole solve
                relaxed[blocking] = (room[blocking] + 1e-11) / acoef[blocking]
            t_lim = float(relaxed.min()) if m else INF

            if span <= t_lim:
                t_best = span  # entering variable flips to its other bound
            else:
                cand = np.flatnonzero(blocking & (plain <= t_lim))
                if cand.size == 0:
                    t_best = span
                else:
                    if self.bland:
                        leave_pos = int(cand[np.argmin(self.basis[cand])])
                    else:
                        leave_pos = int(cand[np.argmax(acoef[cand])])
                    leave_to_upper = bool(inc[leave_pos])
                    t_best = float(max(plain[leave_pos], 0.0))

            if t_best == INF:
                return UNBOUNDED if allow_unbounded else BREAKDOWN

            # a suspiciously small pivot may be drift in the updated inverse:
            # refactorize and re-derive the step before committing anything
            if (
                leave_pos >= 0
                and abs(w[leave_pos]) < 1e-6
                and self._since_refactor > 0
            ):
                if not self._refactor():
                    return BREAKDOWN
                continue

            if t_best <= 1e-12:
                self._degen_run += 1
                if self._degen_run > 3 * (self.m + self.n_total):
                    self.bland = True
            else:
                self._degen_run = 0

            self.x[self.basis] = xB - delta * t_best * w
            if leave_pos < 0:
                # bound flip, no basis change
                self.x[e] = self.ub[e] if delta > 0 else self.lb[e]
                self.state[e] = _AT_UPPER if delta > 0 else _AT_LOWER
                continue

            leaving = int(self.basis[leave_pos])
            self.state[leaving] = _AT_UPPER if leave_to_upper else _AT_LOWER
            self.x[leaving] = self.ub[leaving] if leave_to_upper else self.lb[leaving]
            entering_from = self.x[e]
            self.x[e] = entering_from + delta * t_best
            self.state[e] = _BASIC
            self.basis[leave_pos] = e

            piv = w[leave_pos]
            if abs(piv) < _PIVOT_TOL:
                if not self._refactor():
                    return BREAKDOWN
                continue
            row = self.Binv[leave_pos] / piv
            self.Binv -= np.outer(w, row)
            self.Binv[leave_pos] = row

            self._since_refactor += 1
            if self._since_refactor >= self._refactor_every:
                if not self._refactor():
                    return BREAKDOWN

    def solve(self) -> LpSolution:
        if self.trivially_infeasible:
            return LpSolution(INFEASIBLE)
        if self.m == 0:
            # pure box problem
            x = np.zeros(self.n_struct)
            for j in range(self.n_struct):
                cj = self.c_real[j]
                if cj > 0:
                    if self.ub[j] == INF:
                        return LpSolution(UNBOUNDED)
                    x[j] = self.ub[j]
                elif cj < 0:
                    if self.lb[j] == -INF:
                        return LpSolution(UNBOUNDED)
                    x[j] = self.lb[j]
                else:
                    x[j] = self.lb[j] if self.lb[j] > -INF else min(0.0, self.ub[j])
            obj = float(self.c_real[: self.n_struct] @ x)
            return LpSolution(OPTIMAL, x, np.zeros(0), obj)

        # a heavily degenerate run can stall for thousands of pivots and
        # corrupt the updated inverse; the retry breaks ties with a tiny
        # deterministic cost perturbation and cleans up exactly afterwards
        result = self._solve_once(refactor_every=_REFACTOR_EVERY)
        if result.status == BREAKDOWN:
            result = self._solve_once(refactor_every=50, perturb=True)
        return result

    def _perturbed_costs(self) -> np.ndarray:
        c = self.c_real.copy()
        state = 0x9E3779B97F4A7C15
        for j in range(self.n_struct):
            state = (state * 6364136223846793005 + 1442695040888963407) % (1 << 64)
            u = (state >> 11) / float(1 << 53)
            c[j] += 1e-9 * (1.0 + abs(c[j])) * u
        return c

    def _solve_once(self, refactor_every: int, perturb: bool = False) -> LpSolution:
        n_struct_cols = self.n_struct + self.m
        if self.n_total != n_struct_cols:
            # drop artificial columns from a previous attempt
            self.A = self.A[:, :n_struct_cols]
            self.lb = self.lb[:n_struct_cols]
            self.ub = self.ub[:n_struct_cols]
            self.c_real = self.c_real[:n_struct_cols]
            self.n_total = n_struct_cols
        self._initialize()
        self.iterations = 0
        self.bland = False
        self._degen_run = 0
        self._since_refactor = 0
        self._refactor_every = refactor_every
        max_iters = 20000 + 40 * (self.m + self.n_total)

        if self.n_art:
            c1 = np.zeros(self.n_total)
            c1[self.n_total - self.n_art :] = -1.0
            status = self._optimize(c1, max_iters, allow_unbounded=False)
            if status != OPTIMAL:
                return LpSolution(status, iterations=self.iterations)
            infeas = float(self.x[self.n_total - self.n_art :].sum())
            scale = 1.0 + float(np.abs(self.b).max(initial=0.0))
            if infeas > TOL_FEAS * scale:
                return LpSolution(INFEASIBLE, iterations=self.iterations)
            # pin artificials at zero for phase 2
            self.ub[self.n_total - self.n_art :] = 0.0
            self.bland = False
            self._degen_run = 0

        if perturb:
            status = self._optimize(self._perturbed_costs(), max_iters, allow_unbounded=True)
            if status == BREAKDOWN:
                return LpSolution(status, iterations=self.iterations)
            # an unbounded ray under perturbed costs may cost exactly zero
            # under the real ones, so the exact pass below has the last word
            self.bland = False
            self._degen_run = 0
        # exact objective; after a perturbed run this is a short cleanup
        status = self._optimize(self.c_real, max_iters, allow_unbounded=True)
        if status != OPTIMAL:
            return LpSolution(status, iterations=self.iterations)

        y = self.c_real[self.basis] @ self.Binv if self.m else np.zeros(0)
        x = self.x[: self.n_struct].copy()
        x = np.minimum(np.maximum(x, self.lb[: self.n_struct]), self.ub[: self.n_struct])
        obj = float(self.c_real[: self.n_struct] @ x)
        return LpSolution(OPTIMAL, x, np.asarray(y, dtype=float), obj, self.iterations)


def solve_lp(
    model: LinearModel,
    extra_rows: Sequence[Constraint] = (),
    bound_overrides: dict[int, tuple[float, float]] | None = None,
    deadline: float | None = None,
) -> LpSolution:
    """Solve the LP relaxation; duals come back aligned with the rows
    (extra rows appended after the model's own)."""
    return _Simplex(model, extra_rows, bound_overrides, deadline).solve()


# -- branch and bound -----------------------------------------------------------

CandidateCallback = Callable[[np.ndarray], list[Constraint]]


def _violation(cut: Constraint, x: np.ndarray) -> float:
    lhs = sum(c * x[j] for j, c in cut.coeffs.items())
    if cut.sense == LE:
        return lhs - cut.rhs
    if cut.sense == GE:
        return cut.rhs - lhs
    return abs(lhs - cut.rhs)


def solve_mip(
    model: LinearModel,
    on_candidate: CandidateCallback | None = None,
    time_limit: float | None = None,
    collected_cuts: list[Constraint] | None = None,
    stop_above: float | None = None,
) -> MipSolution:
    """Deterministic best-bound branch and bound.

    on_candidate is invoked on every integer-feasible node solution; if it
    returns cuts they are added globally, the node is re-solved, and the
    incumbent is only accepted once the callback returns none.  Returned
    cuts must be violated by the candidate that produced them.

    stop_above halts the search as soon as an accepted incumbent exceeds
    the threshold (status "stopped"); useful when any sufficiently good
    solution serves, as in intermediate pricing rounds.
    """
    t0 = time.monotonic()
    deadline = t0 + time_limit if time_limit is not None else None
    int_vars = [j for j in range(model.num_vars) if model.is_int[j]]
    cuts: list[Constraint] = collected_cuts if collected_cuts is not None else []
    cuts_added = 0

    best_x: np.ndarray | None = None
    best_obj = -INF

    # heap entries: (-parent bound, insertion index, overrides)
    counter = 0
    heap: list[tuple[float, int, dict[int, tuple[float, float]]]] = [(-INF, 0, {})]
    nodes = 0
    timed_out = False
    stopped = False
    abandoned_bound = -INF  # bound of a node dropped mid-solve on timeout

    while heap and not stopped and not timed_out:
        neg_bound, _, overrides = heapq.heappop(heap)
        if -neg_bound <= best_obj + TOL_GAP * (1 + abs(best_obj)):
            continue
        if time_limit is not None and time.monotonic() - t0 > time_limit:
            timed_out = True
            abandoned_bound = -neg_bound
            break
        nodes += 1

        while True:
            sol = solve_lp(model, cuts, overrides, deadline)
            if sol.status == TIME_LIMIT:
                timed_out = True
                abandoned_bound = -neg_bound
                break
            if sol.status == BREAKDOWN:
                raise NumericalBreakdownError("simplex breakdown inside branch and bound")
            if sol.status == UNBOUNDED:
                raise NumericalBreakdownError("unbounded relaxation inside branch and bound")
            if sol.status == INFEASIBLE:
                break
            if sol.objective <= best_obj + TOL_GAP * (1 + abs(best_obj)):
                break

            frac = np.array([sol.x[j] - math.floor(sol.x[j] + 0.5) for j in int_vars])
            if int_vars and np.any(np.abs(frac) > TOL_INT):
                # branch on most fractional, ties by lowest index
                f = np.array([sol.x[j] - math.floor(sol.x[j]) for j in int_vars])
                dist = np.abs(f - 0.5)
                dist[np.abs(frac) <= TOL_INT] = INF
                k = int(np.argmin(dist))
                j = int_vars[k]
                lo, hi = overrides.get(j, (model.lb[j], model.ub[j]))
                down = dict(overrides)
                down[j] = (lo, math.floor(sol.x[j]))
                up = dict(overrides)
                up[j] = (math.ceil(sol.x[j]), hi)
                counter += 1
                heapq.heappush(heap, (-sol.objective, counter, down))
                counter += 1
                heapq.heappush(heap, (-sol.objective, counter, up))
                break

            if on_candidate is not None:
                new_cuts = on_candidate(sol.x)
                if new_cuts:
                    for cut in new_cuts:
                        v = _violation(cut, sol.x)
                        if v <= TOL_FEAS:
                            raise CutSoundnessError(
                                f"cut {cut.name!r} not violated by candidate (violation {v:.3g})"
                            )
                    cuts.extend(new_cuts)
                    cuts_added += len(new_cuts)
                    continue  # re-solve this node with the new cuts
            if sol.objective > best_obj:
                best_obj = sol.objective
                best_x = sol.x.copy()
                if stop_above is not None and best_obj > stop_above:
                    stopped = True
            break

    if timed_out or stopped:
        open_bounds = [-nb for nb, _, _ in heap]
        bound = max(open_bounds + [best_obj, abandoned_bound])
        status = STOPPED if stopped else TIME_LIMIT
        return MipSolution(status, best_x, best_obj, bound, nodes, cuts_added)
    if best_x is None:
        return MipSolution(INFEASIBLE, None, -INF, -INF, nodes, cuts_added)
    return MipSolution(OPTIMAL, best_x, best_obj, best_obj, nodes, cuts_added)
