"""Normalized power iteration with Collatz-Wielandt stopping and certificates.

All iterations run on the product sphere.  At every iterate ``x`` the
bracket ``(lower, upper)`` is formed from the coordinate ratios
``F_ij(x) / x_ij``::

    lower = prod_i (min_j ratio_ij) ** w_i,    upper = prod_i (max_j ratio_ij) ** w_i

with log-weights ``w_i = (gamma - 1) b_i`` for the tensor map.  The bracket
always contains the spectral radius when the homogeneity matrix has
spectral radius at most one, and it tightens monotonically along the
iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cone import (
    REGIME_TOL,
    Regime,
    WeightVector,
    classify_regime,
    equality_weight_vector,
    find_weight_vector,
    is_primitive_matrix,
    spectral_radius_nonneg,
)
from .exceptions import (
    DegenerateMapError,
    ExpansiveRegimeError,
    InvalidProblemError,
    NoWeightVectorError,
    ResidualError,
)
from .irreducibility import DiagnosticsReport, diagnose, uniqueness_certificate
from .maps import (
    check_block_vector,
    eval_R,
    homogeneity_matrix,
    normalize,
    psi,
)
from .metrics import hilbert_metric
from .tensor import contract_mode

UNDERFLOW_FLOOR = 1e-300
MONOTONE_SLACK = 1e-12
CERTIFICATE_MAX_DIM = 200


def _default_schedule():
    return tuple(10.0 ** -l for l in range(1, 9))


@dataclass
class SolveOptions:
    """Solver settings.

    Parameters
    ----------
    tol_cw_gap : float
        Stop once ``upper - lower`` drops below this value.
    max_iters : int
        Iteration budget (per rung for the shift ladder).
    start : "uniform" or list of arrays
        Positive starting block vector; it is normalized first.
    delta_schedule : sequence of float
        Strictly decreasing positive shifts for the ladder.
    regime_override : Regime, optional
        Skip the regime classification.
    allow_ladder : bool
        Let :func:`solve` delegate to :func:`delta_ladder` when the plain
        iteration has no convergence guarantee.
    diagnostics : bool
        Attach a :class:`DiagnosticsReport` to the result.
    record_iterates : bool
        Keep every iterate in ``SolveReport.iterates``.
    """

    tol_cw_gap: float = 1e-10
    max_iters: int = 10000
    start: object = "uniform"
    delta_schedule: tuple = field(default_factory=_default_schedule)
    regime_override: Regime | None = None
    allow_ladder: bool = True
    diagnostics: bool = True
    record_iterates: bool = False

    def __post_init__(self):
        if not self.tol_cw_gap > 0:
            raise InvalidProblemError("tol_cw_gap must be positive")
        if int(self.max_iters) < 0:
            raise InvalidProblemError("max_iters must be nonnegative")
        sched = tuple(float(v) for v in self.delta_schedule)
        if any(v <= 0 for v in sched) or any(a <= b for a, b in zip(sched, sched[1:])):
            raise InvalidProblemError("delta schedule must be positive and strictly decreasing")
        self.delta_schedule = sched
        self.max_iters = int(self.max_iters)


@dataclass(frozen=True)
class RateCertificate:
    """A-priori bound ``mu_b(x^k, u) <= r^k / (1 - r) * mu_b(x^1, x^0)``."""

    r: float
    mu0: float

    def bound(self, k):
        return self.r**k / (1.0 - self.r) * self.mu0

    def bounds(self, n):
        return [self.bound(k) for k in range(n)]


@dataclass
class SolveReport:
    eigenvalue: float
    eigenvector: list
    regime: Regime
    rho_A: float
    weights: WeightVector
    iters: int
    cw_history: list
    converged: bool
    method: str = "power"
    rate_certificate: RateCertificate | None = None
    diagnostics: DiagnosticsReport | None = None
    ladder: list | None = None
    warnings: list = field(default_factory=list)
    problem: dict | None = None
    iterates: list | None = None

    @property
    def lower(self):
        return self.cw_history[-1][0]

    @property
    def upper(self):
        return self.cw_history[-1][1]

    @property
    def gap(self):
        return self.upper - self.lower

    def to_dict(self):
        out = {
            "problem": self.problem,
            "regime": self.regime.value,
            "rho_A": float(self.rho_A),
            "weights": {"b": [float(v) for v in self.weights.b], "r": float(self.weights.r)},
            "method": self.method,
            "eigenvalue": float(self.eigenvalue),
            "eigenvector": [[float(v) for v in blk] for blk in self.eigenvector],
            "cw_history": [[float(lo), float(hi)] for lo, hi in self.cw_history],
            "iters": int(self.iters),
            "converged": bool(self.converged),
            "rate_certificate": None
            if self.rate_certificate is None
            else {"r": float(self.rate_certificate.r), "mu0": float(self.rate_certificate.mu0)},
            "diagnostics": None if self.diagnostics is None else self.diagnostics.to_dict(),
            "warnings": list(self.warnings),
        }
        if self.ladder is not None:
            out["ladder"] = [dict(rung) for rung in self.ladder]
        return out

    @classmethod
    def from_dict(cls, data):
        cert = data.get("rate_certificate")
        diag = data.get("diagnostics")
        return cls(
            eigenvalue=data["eigenvalue"],
            eigenvector=[np.asarray(blk, dtype=float) for blk in data["eigenvector"]],
            regime=Regime(data["regime"]),
            rho_A=data["rho_A"],
            weights=WeightVector(np.asarray(data["weights"]["b"], dtype=float), data["weights"]["r"]),
            iters=data["iters"],
            cw_history=[tuple(h) for h in data["cw_history"]],
            converged=data["converged"],
            method=data.get("method", "power"),
            rate_certificate=None if cert is None else RateCertificate(cert["r"], cert["mu0"]),
            diagnostics=None if diag is None else DiagnosticsReport.from_dict(diag),
            ladder=data.get("ladder"),
            warnings=list(data.get("warnings", [])),
            problem=data.get("problem"),
        )


def gamma_exponent(spec, b):
    """``sum b_i p_i' / (sum b_i p_i' - 1)`` for weights summing to one."""
    b = np.asarray(b, dtype=float)
    b = b / b.sum()
    s = float(np.dot(b, spec.conjugates))
    return s / (s - 1.0)


def _log_weights(spec, b):
    b = np.asarray(b, dtype=float)
    b = b / b.sum()
    return (gamma_exponent(spec, b) - 1.0) * b


def _bracket(Fx, x, w, shift=0.0):
    log_lo = log_hi = 0.0
    for fi, xi, wi in zip(Fx, x, w):
        with np.errstate(divide="ignore"):
            lr = np.log(fi + shift) - np.log(xi)
        log_lo += wi * np.min(lr)
        log_hi += wi * np.max(lr)
    return float(np.exp(log_lo)), float(np.exp(log_hi))


def cw_bounds(spec, b, x):
    """Collatz-Wielandt bracket of the spectral radius at a positive ``x``.

    Examples
    --------
    >>> import numpy as np
    >>> from mhpf.tensor import NonnegTensor
    >>> from mhpf.maps import ProblemSpec
    >>> spec = ProblemSpec(NonnegTensor.from_dense(np.ones((3, 3))), (2,), (2.0,))
    >>> lo, hi = cw_bounds(spec, [1.0], spec.uniform())
    >>> round(lo, 12), round(hi, 12)
    (3.0, 3.0)
    """
    x = check_block_vector(spec, x)
    if not all(np.all(xi > 0) for xi in x):
        raise ValueError("Collatz-Wielandt bounds need a strictly positive vector")
    return _bracket(eval_R(spec, x), x, _log_weights(spec, b))


def eval_shifted(spec, delta, x):
    """``R(x) + delta * (||x_1||, ..., ||x_d||)^A`` added to every coordinate of each block."""
    x = check_block_vector(spec, x)
    log_norms = np.log([np.linalg.norm(xi, ord=q) for xi, q in zip(x, spec.p)])
    scale = np.exp(homogeneity_matrix(spec) @ log_norms)
    return [ri + delta * c for ri, c in zip(eval_R(spec, x), scale)]


def power_step(spec, x):
    """One normalized application of the map."""
    return normalize(eval_R(spec, x), spec.p)


def _floor(x, warnings, k):
    out = []
    for i, xi in enumerate(x):
        if np.any(xi == 0):
            xi = np.where(xi == 0, UNDERFLOW_FLOOR, xi)
            warnings.append(f"iteration {k}: block {i} underflowed; coordinates floored at 1e-300")
        out.append(xi)
    return out


def _check_monotone(hist, warnings):
    (lo0, hi0), (lo1, hi1) = hist[-2], hist[-1]
    k = len(hist) - 1
    if lo1 < lo0 * (1 - MONOTONE_SLACK) or hi1 > hi0 * (1 + MONOTONE_SLACK):
        warnings.append(f"iteration {k}: Collatz-Wielandt bracket not monotone")


def _run(apply, norms, w, x, tol, max_iters, warnings, shift=0.0, averaged=False, record=None):
    """Iterate ``x <- normalize(F(x) + shift)`` (optionally geometrically averaged)."""
    hist = []
    converged = False
    k = 0
    while True:
        Fx = apply(x)
        hist.append(_bracket(Fx, x, w, shift))
        if len(hist) > 1:
            _check_monotone(hist, warnings)
        if record is not None:
            record.append([xi.copy() for xi in x])
        lo, hi = hist[-1]
        if hi - lo < tol:
            converged = True
            break
        if k >= max_iters:
            break
        y = [fi + shift for fi in Fx]
        if averaged:
            y = [np.sqrt(xi * yi) for xi, yi in zip(x, y)]
        x = _floor(normalize(y, norms), warnings, k + 1)
        k += 1
    return x, hist, k, converged, Fx


def _start(spec, options):
    if isinstance(options.start, str):
        if options.start != "uniform":
            raise InvalidProblemError(f"unknown start {options.start!r}")
        return spec.uniform()
    x = check_block_vector(spec, options.start)
    if not all(np.all(xi > 0) for xi in x):
        raise InvalidProblemError("start vector must be strictly positive")
    return normalize(x, spec.p)


def _problem_dict(spec):
    return {
        "m": spec.m,
        "dims": list(spec.tensor.dims),
        "nu": list(spec.nu),
        "p": [float(v) for v in spec.p],
    }


class _Composed:
    """``x -> psi_{p'}(M psi_{q'}(M^T x))`` for an order-2 tensor with two blocks."""

    def __init__(self, spec):
        self.spec = spec
        p1, p2 = spec.conjugates
        self.exponent = (p1 - 1.0) * p2
        self.norms = (spec.p[0],)
        self.w = np.array([1.0 / self.exponent])

    def second_block(self, x1):
        return psi(self.spec.conjugates[1], contract_mode(self.spec.tensor, 1, [x1, None]))

    def __call__(self, x):
        v = self.second_block(x[0])
        return [psi(self.spec.conjugates[0], contract_mode(self.spec.tensor, 0, [None, v]))]

    def primitive(self):
        t = self.spec.tensor
        P = np.zeros(t.dims, dtype=np.int64)
        P[tuple(t.indices.T)] = 1
        return is_primitive_matrix((P @ P.T) > 0)

    def lift(self, x):
        return [x[0], normalize([self.second_block(x[0])], (self.spec.p[1],))[0]]


def _check_map_positive(spec):
    R1 = eval_R(spec, spec.ones())
    for i, ri in enumerate(R1):
        if np.any(ri <= 0):
            j = int(np.flatnonzero(ri <= 0)[0])
            raise DegenerateMapError(f"R(1) vanishes at coordinate ({i}, {j})")


def _finish(spec, report, options):
    if report.converged and sum(spec.block_dims) <= CERTIFICATE_MAX_DIM and report.diagnostics:
        try:
            report.diagnostics.uniqueness_kernel_dim = uniqueness_certificate(
                spec, report.eigenvector, report.eigenvalue
            )
        except ResidualError as exc:
            report.diagnostics.notes.append(f"uniqueness certificate skipped: {exc}")
    return report


def _analyze(spec, options):
    A = homogeneity_matrix(spec)
    est = spectral_radius_nonneg(A)
    regime = options.regime_override or classify_regime(est.rho, REGIME_TOL)
    return A, est, regime


def solve(spec, options=None, **kwargs):
    """Compute the maximal positive eigenpair of the tensor map.

    Parameters
    ----------
    spec : ProblemSpec
    options : SolveOptions, optional
        Keyword arguments are forwarded to :class:`SolveOptions` when
        ``options`` is omitted.

    Returns
    -------
    SolveReport
        ``converged`` is false when the budget ran out before the bracket
        closed to ``tol_cw_gap``.

    Raises
    ------
    ExpansiveRegimeError
        If the homogeneity matrix has spectral radius above one.
    DegenerateMapError
        If ``R(1)`` has a zero coordinate.
    """
    options = options or SolveOptions(**kwargs)
    A, est, regime = _analyze(spec, options)
    if regime is Regime.EXPANSIVE:
        raise ExpansiveRegimeError(est.rho)
    _check_map_positive(spec)
    diagnostics = diagnose(spec) if options.diagnostics else None
    warnings = []

    if regime is Regime.CONTRACTIVE:
        weights = find_weight_vector(A)
    else:
        weights = equality_weight_vector(A)

    if regime is Regime.NONEXPANSIVE and spec.m == 2 and spec.d == 2:
        op = _Composed(spec)
        if not op.primitive():
            if options.allow_ladder:
                return _finish(spec, _ladder(spec, options, A, est, weights, diagnostics), options)
            warnings.append("composed map is not primitive; convergence is not guaranteed")
        record = [] if options.record_iterates else None
        x, hist, k, conv, _ = _run(
            op, op.norms, op.w, [_start(spec, options)[0]], options.tol_cw_gap,
            options.max_iters, warnings, record=record,
        )
        u = op.lift(x)
        report = SolveReport(
            eigenvalue=0.5 * (hist[-1][0] + hist[-1][1]),
            eigenvector=u,
            regime=regime,
            rho_A=est.rho,
            weights=weights,
            iters=k,
            cw_history=hist,
            converged=conv,
            method="composed",
            diagnostics=diagnostics,
            warnings=warnings,
            problem=_problem_dict(spec),
            iterates=record,
        )
        return _finish(spec, report, options)

    if regime is Regime.NONEXPANSIVE:
        primitive = diagnostics.weakly_primitive if diagnostics else None
        if primitive is None:
            from .irreducibility import weak_primitivity

            primitive = weak_primitivity(spec)
        if not primitive:
            if options.allow_ladder:
                return _finish(spec, _ladder(spec, options, A, est, weights, diagnostics), options)
            warnings.append("map is not weakly primitive; convergence is not guaranteed")

    record = [] if options.record_iterates else None
    x0 = _start(spec, options)
    x, hist, k, conv, _ = _run(
        lambda z: eval_R(spec, z), spec.p, _log_weights(spec, weights.b), x0,
        options.tol_cw_gap, options.max_iters, warnings, record=record,
    )
    cert = None
    if regime is Regime.CONTRACTIVE:
        x1 = power_step(spec, x0)
        cert = RateCertificate(weights.r, hilbert_metric(weights.b, x1, x0))
    report = SolveReport(
        eigenvalue=0.5 * (hist[-1][0] + hist[-1][1]),
        eigenvector=x,
        regime=regime,
        rho_A=est.rho,
        weights=weights,
        iters=k,
        cw_history=hist,
        converged=conv,
        rate_certificate=cert,
        diagnostics=diagnostics,
        warnings=warnings,
        problem=_problem_dict(spec),
        iterates=record,
    )
    return _finish(spec, report, options)


def _ladder(spec, options, A, est, weights, diagnostics):
    if not options.delta_schedule:
        raise InvalidProblemError("delta schedule is empty")
    warnings = []
    if spec.m == 2 and spec.d == 2:
        op = _Composed(spec)
        apply, norms, w, lift = op, op.norms, op.w, op.lift
        x = [_start(spec, options)[0]]
        method = "composed-ladder"
    else:
        apply = lambda z: eval_R(spec, z)  # noqa: E731
        norms, w, lift = spec.p, _log_weights(spec, weights.b), lambda z: z
        x = _start(spec, options)
        method = "ladder"
    rungs = []
    hist = []
    total = 0
    all_conv = True
    for delta in options.delta_schedule:
        x, hist, k, conv, Fx = _run(
            apply, norms, w, x, options.tol_cw_gap, options.max_iters, warnings,
            shift=delta, averaged=True,
        )
        total += k
        all_conv &= conv
        r = float(np.exp(sum(wi * (np.log(fi[0] + delta) - np.log(xi[0])) for fi, xi, wi in zip(Fx, x, w))))
        rungs.append({
            "delta": delta, "r": r, "lower": hist[-1][0], "upper": hist[-1][1],
            "iters": k, "converged": conv,
        })
        if not conv:
            warnings.append(f"ladder rung delta={delta:g} did not converge")
    for a, b in zip(rungs, rungs[1:]):
        if not b["r"] < a["r"]:
            warnings.append(
                f"ladder values not strictly decreasing at delta={b['delta']:g}"
            )
    report = SolveReport(
        eigenvalue=rungs[-1]["r"],
        eigenvector=lift(x),
        regime=Regime.NONEXPANSIVE,
        rho_A=est.rho,
        weights=weights,
        iters=total,
        cw_history=hist,
        converged=all_conv,
        method=method,
        diagnostics=diagnostics,
        ladder=rungs,
        warnings=warnings,
        problem=_problem_dict(spec),
    )
    return report


def delta_ladder(spec, options=None, **kwargs):
    """Solve uniformly shifted problems for a decreasing sequence of shifts.

    Each rung solves ``x = normalize(R(x) + delta)`` (with the composed map
    in place of ``R`` when the tensor is a matrix with two blocks), warm
    started from the previous rung, and records::

        r_l = prod_i ((R_i0(x) + delta) / x_i0) ** ((gamma - 1) b_i)

    which decreases strictly to the spectral radius.  Rungs use a
    geometrically averaged step ``x <- normalize(sqrt(x * (R(x) + delta)))``
    that has the same fixed points and avoids the slow oscillation of the
    plain step on periodic patterns.

    Raises
    ------
    InvalidProblemError
        If the problem is not in the nonexpansive regime or the schedule is
        empty.
    """
    options = options or SolveOptions(**kwargs)
    A, est, regime = _analyze(spec, options)
    if regime is not Regime.NONEXPANSIVE:
        raise InvalidProblemError(
            f"the shift ladder needs spectral radius one, got {est.rho:.17g}"
        )
    _check_map_positive(spec)
    weights = equality_weight_vector(A)
    diagnostics = diagnose(spec) if options.diagnostics else None
    return _ladder(spec, options, A, est, weights, diagnostics)


def gelfand_estimate(spec, b=None, y=None, k_max=50):
    """Sequence ``a_k = (prod_i ||R_i^k(y)||^{b_i})^((gamma - 1) / k)``, k = 1..k_max.

    The start ``y`` (default: all ones) is first normalized onto the
    product sphere.  Norms are accumulated in log space: with ``z`` the
    normalized iterate,
    ``log s <- A log s + log ||R(z)||`` tracks the block norms of the
    unnormalized power ``R^k(y)``.

    Raises
    ------
    NoWeightVectorError
        If ``b`` is not a fixed point of ``A^T`` or, when omitted, no such
        weight vector exists.
    """
    A = homogeneity_matrix(spec)
    if b is None:
        b = equality_weight_vector(A).b
    b = np.asarray(b, dtype=float)
    b = b / b.sum()
    if np.max(np.abs(A.T @ b - b)) > 1e-9:
        raise NoWeightVectorError("weights must satisfy A^T b = b")
    z = spec.ones() if y is None else check_block_vector(spec, y)
    if not all(np.all(zi > 0) for zi in z):
        raise InvalidProblemError("start vector must be strictly positive")
    # the start is placed on the product sphere, so log s starts at zero
    z = normalize(z, spec.p)
    log_s = np.zeros(spec.d)
    g1 = gamma_exponent(spec, b) - 1.0
    out = []
    for k in range(1, k_max + 1):
        Rz = eval_R(spec, z)
        norms = np.array([np.linalg.norm(ri, ord=q) for ri, q in zip(Rz, spec.p)])
        log_s = A @ log_s + np.log(norms)
        z = [ri / n for ri, n in zip(Rz, norms)]
        out.append(float(np.exp(g1 / k * np.dot(b, log_s))))
    return np.array(out)
