"""Dynamic communicability on piecewise-constant temporal networks.

The communicability matrix W(t) aggregates time-respecting walks and obeys

    W'(t) = -b (W(t) - I) + W(t) log(E_alpha(gamma A(t))),   W(0) = I,

where b >= 0 exponentially forgets old walks.  At alpha = 0 the generator
is log((I - gamma A)^{-1}) = -log(I - gamma A), which makes the model the
classical resolvent one, and at b = 0 with unit intervals the solution is
the ordered product of resolvents (the discrete Katz product implemented
below as an oracle).  Because A(t) is constant on each piece, propagation
is exact: over a step of length d with generator G and M = b I - G,

    W(t + d) = W(t) exp(-M d) + b * J,   J = integral_0^d exp(-M s) ds,

with exp(-M d) and J read off one block matrix exponential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import MLDomainError, MLOverflowError, ParseError
from .matfun import matrix_exp, matrix_log_principal, ml_matrix_dense
from .mlkernel import MLParams

__all__ = [
    "Piece",
    "TemporalNetwork",
    "CommunicabilityState",
    "TemporalRanking",
    "generator",
    "propagate",
    "run_model",
    "discrete_katz_product",
    "gen_alternating_tree",
    "gen_phone_cascade",
    "parse_schedule",
    "load_schedule",
    "format_schedule",
    "save_schedule",
    "write_trajectory_csv",
    "PHONE_ROLES",
]

_TIME_TOL = 1e-9


@dataclass(frozen=True)
class Piece:
    t_start: float
    t_end: float
    a: np.ndarray
    directed: bool = False

    def __post_init__(self):
        if not (self.t_start < self.t_end):
            raise MLDomainError(
                f"piece must have t_start < t_end, got [{self.t_start}, {self.t_end})"
            )


@dataclass(frozen=True)
class TemporalNetwork:
    """Contiguous, non-overlapping pieces of constant adjacency."""

    n: int
    pieces: tuple[Piece, ...]

    def __post_init__(self):
        if not self.pieces:
            raise MLDomainError("a temporal network needs at least one piece")
        prev_end = None
        for piece in self.pieces:
            a = piece.a
            if a.shape != (self.n, self.n):
                raise MLDomainError(f"piece matrix must be {self.n}x{self.n}")
            if np.any(a < 0.0) or np.any(np.diag(a) != 0.0):
                raise MLDomainError("piece matrices must be nonnegative with zero diagonal")
            if prev_end is not None and abs(piece.t_start - prev_end) > _TIME_TOL:
                raise MLDomainError("pieces must be contiguous and non-overlapping")
            prev_end = piece.t_end

    @property
    def t_start(self) -> float:
        return self.pieces[0].t_start

    @property
    def t_end(self) -> float:
        return self.pieces[-1].t_end


@dataclass(frozen=True)
class CommunicabilityState:
    t: float
    w: np.ndarray


@dataclass(frozen=True)
class TemporalRanking:
    """Broadcast (W 1) and receive (W^T 1) scores at one instant."""

    t: float
    broadcast: np.ndarray
    receive: np.ndarray


def _dense_rho(a: np.ndarray) -> float:
    if not a.any():
        return 0.0
    return float(np.abs(np.linalg.eigvals(a)).max())


def generator(a: np.ndarray, p: MLParams) -> np.ndarray:
    """Piece generator log(E_alpha(gamma A)).

    For alpha = 0 this equals -log(I - gamma A) and requires
    gamma * rho(A) < 1; for alpha > 0 it only requires the function value
    to be representable and off the closed negative real axis.
    """
    a = np.asarray(a, dtype=float)
    if p.alpha == 0.0:
        rho = _dense_rho(a)
        if p.gamma * rho >= 1.0:
            raise MLDomainError(
                f"alpha=0 generator needs gamma*rho < 1, got {p.gamma * rho:.6g}"
            )
    f = ml_matrix_dense(a, p)
    if not np.all(np.isfinite(f)):
        raise MLOverflowError("E_alpha(gamma A) overflowed; gamma too large")
    return matrix_log_principal(f)


def propagate(state: CommunicabilityState, g: np.ndarray, b: float,
              delta: float) -> CommunicabilityState:
    """Advance W exactly over a step where the generator is constant.

    Solves W' = -b (W - I) + W G via the block exponential of
    [[-M, I], [0, 0]] with M = b I - G, whose top row holds exp(-M delta)
    and J = integral_0^delta exp(-M s) ds.
    """
    if delta <= 0.0:
        raise MLDomainError(f"delta must be positive, got {delta}")
    if b < 0.0:
        raise MLDomainError(f"b must be nonnegative, got {b}")
    n = state.w.shape[0]
    m = b * np.eye(n) - g
    block = np.zeros((2 * n, 2 * n))
    block[:n, :n] = -m
    block[:n, n:] = np.eye(n)
    eb = matrix_exp(block * delta)
    w_next = state.w @ eb[:n, :n] + b * eb[:n, n:]
    if not np.all(np.isfinite(w_next)):
        raise MLOverflowError("communicability propagation overflowed")
    return CommunicabilityState(t=state.t + delta, w=w_next)


def run_model(net: TemporalNetwork, p: MLParams, b: float,
              sample_times) -> list[TemporalRanking]:
    """Integrate the model across the schedule, sampling broadcast/receive.

    Pieces are split at the requested sample times; each sub-interval is
    advanced with the exact propagator.  Sample times must lie within the
    schedule span and are emitted in increasing order.
    """
    samples = sorted(float(t) for t in sample_times)
    if not samples:
        return []
    if samples[0] < net.t_start - _TIME_TOL or samples[-1] > net.t_end + _TIME_TOL:
        raise MLDomainError("sample times must lie within the schedule span")
    ones = np.ones(net.n)
    state = CommunicabilityState(t=net.t_start, w=np.eye(net.n))
    out: list[TemporalRanking] = []
    si = 0
    while si < len(samples) and samples[si] <= net.t_start + _TIME_TOL:
        out.append(TemporalRanking(samples[si], state.w @ ones, state.w.T @ ones))
        si += 1
    for piece in net.pieces:
        if si >= len(samples):
            break
        gen = None
        t_cursor = max(state.t, piece.t_start)
        while si < len(samples) and samples[si] <= piece.t_end + _TIME_TOL:
            target = min(samples[si], piece.t_end)
            if target > t_cursor + _TIME_TOL:
                if gen is None:
                    gen = generator(piece.a, p)
                state = propagate(state, gen, b, target - t_cursor)
                t_cursor = target
            out.append(TemporalRanking(samples[si], state.w @ ones, state.w.T @ ones))
            si += 1
        if piece.t_end > t_cursor + _TIME_TOL:
            if gen is None:
                gen = generator(piece.a, p)
            state = propagate(state, gen, b, piece.t_end - t_cursor)
    return out


def final_state(net: TemporalNetwork, p: MLParams, b: float) -> CommunicabilityState:
    """W at the end of the schedule (no sampling)."""
    state = CommunicabilityState(t=net.t_start, w=np.eye(net.n))
    for piece in net.pieces:
        gen = generator(piece.a, p)
        state = propagate(state, gen, b, piece.t_end - piece.t_start)
    return state


def discrete_katz_product(net: TemporalNetwork, gamma: float) -> np.ndarray:
    """Ordered product of resolvents prod_i (I - gamma A(t_i))^{-1}.

    This is the discrete-time limit of the model at alpha = 0, b = 0 and is
    used as an independent oracle for the integrator.  Requires gamma below
    1/rho for every piece.
    """
    if gamma <= 0.0:
        raise MLDomainError(f"gamma must be positive, got {gamma}")
    eye = np.eye(net.n)
    result = eye.copy()
    for piece in net.pieces:
        if gamma * _dense_rho(piece.a) >= 1.0:
            raise MLDomainError(
                "gamma must be below 1/rho(A) for every piece of the schedule"
            )
        try:
            resolvent = np.linalg.solve(eye - gamma * piece.a, eye)
        except np.linalg.LinAlgError as exc:
            raise MLDomainError(f"singular resolvent factor: {exc}") from exc
        result = result @ resolvent
    return result


def _binary_tree_layers(levels: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Split the complete binary tree's parent->child edges by the parity
    of the parent's depth: even depths into A1, odd depths into A2."""
    n = 2**levels - 1
    a1 = np.zeros((n, n))
    a2 = np.zeros((n, n))
    for parent in range(n):
        depth = int(math.floor(math.log2(parent + 1)))
        for child in (2 * parent + 1, 2 * parent + 2):
            if child < n:
                (a1 if depth % 2 == 0 else a2)[parent, child] = 1.0
    return a1, a2, n


def gen_alternating_tree(levels: int = 4, noise_edges: int = 5,
                         horizon: float = 20.0, seed: int = 0) -> TemporalNetwork:
    """Directed binary tree alternating between its even and odd edge
    layers on unit intervals, plus uniformly random directed noise edges.

    On [k, k+1) the adjacency is the even-depth layer when k is even and
    the odd-depth layer otherwise, with noise_edges random ordered pairs
    added (duplicates coalesce).  Deterministic for a fixed seed.
    """
    if levels < 2:
        raise MLDomainError(f"levels must be >= 2, got {levels}")
    if horizon <= 0.0:
        raise MLDomainError(f"horizon must be positive, got {horizon}")
    a1, a2, n = _binary_tree_layers(levels)
    rng = np.random.default_rng(seed)
    pieces = []
    k = 0
    t = 0.0
    while t < horizon - _TIME_TOL:
        t_next = min(t + 1.0, horizon)
        base = (a1 if k % 2 == 0 else a2).copy()
        added = 0
        while added < noise_edges:
            i = int(rng.integers(0, n))
            j = int(rng.integers(0, n))
            if i == j:
                continue
            base[i, j] = 1.0  # duplicates coalesce
            added += 1
        pieces.append(Piece(t_start=t, t_end=t_next, a=base, directed=True))
        t = t_next
        k += 1
    return TemporalNetwork(n=n, pieces=tuple(pieces))


#: Named roles in the phone-cascade scenario.
PHONE_ROLES = {"A": 0, "B": 1, "C": 2, "D": 3}

# per-round matchings (undirected calls; no node appears twice per round):
# A starts the cascade through C at round 1; B repeats the same contacts
# (C then D) starting only at round 4, when the message has already spread
_PHONE_ROUNDS: tuple[tuple[tuple[int, int], ...], ...] = (
    ((0, 2),),                            # round 1: A-C
    ((0, 3), (2, 4)),                     # round 2: A-D, C-E
    ((2, 5), (4, 8), (3, 6)),             # round 3: C-F, E-I, D-G
    ((1, 2), (3, 7), (4, 9), (5, 10)),    # round 4: B-C, D-H, E-J, F-K
    ((1, 3), (5, 11), (6, 12)),           # round 5: B-D, F-L, G-M
    ((6, 13), (7, 14)),                   # round 6: G-N, H-O
    ((7, 15),),                           # round 7: H-P
    (),                                   # round 8: silence
)


def gen_phone_cascade(tau: float = 0.1, rounds: int = 8) -> TemporalNetwork:
    """Rounds of single phone calls cascading down a binary tree.

    Each round i occupies [(i-1)*tau, i*tau) and is active on the first 90%
    of the slot, idle on the rest.  Every active piece is a matching (no
    conference calls), so its spectral radius is 1.  Node A(0) calls C(2)
    in round 1 and triggers the forwarding cascade; node B(1) makes the
    same contacts starting at round 4, triggering none.
    """
    if tau <= 0.0:
        raise MLDomainError(f"tau must be positive, got {tau}")
    if rounds < 1:
        raise MLDomainError(f"rounds must be >= 1, got {rounds}")
    n = 16
    pieces = []
    for i in range(rounds):
        calls = _PHONE_ROUNDS[i] if i < len(_PHONE_ROUNDS) else ()
        a = np.zeros((n, n))
        for u, v in calls:
            a[u, v] = a[v, u] = 1.0
        start = i * tau
        split = start + 0.9 * tau
        end = (i + 1) * tau
        pieces.append(Piece(t_start=start, t_end=split, a=a, directed=False))
        pieces.append(Piece(t_start=split, t_end=end, a=np.zeros((n, n)),
                            directed=False))
    return TemporalNetwork(n=n, pieces=tuple(pieces))


def parse_schedule(source) -> TemporalNetwork:
    """Parse the plain-text schedule format.

    '%'-prefixed lines are comments.  The first data line is 'n <int>'.
    Each piece starts with a line 't_start t_end directed{0,1}' followed by
    its edge lines 'i j' (0-based); the next 3-token line opens the next
    piece.  Undirected pieces are symmetrized.
    """
    if isinstance(source, (str, Path)) and "\n" not in str(source) and Path(str(source)).exists():
        text = Path(str(source)).read_text()
    elif isinstance(source, bytes):
        text = source.decode("utf-8")
    elif hasattr(source, "read"):
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    else:
        text = str(source)
    n = None
    raw_pieces: list[tuple[float, float, bool, list[tuple[int, int]]]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("%"):
            continue
        toks = stripped.split()
        if n is None:
            if len(toks) != 2 or toks[0] != "n":
                raise ParseError(f"line {lineno}: expected header 'n <int>'")
            n = int(toks[1])
            continue
        if len(toks) == 3:
            try:
                t0, t1, directed = float(toks[0]), float(toks[1]), int(toks[2])
            except ValueError as exc:
                raise ParseError(f"line {lineno}: malformed piece line") from exc
            if directed not in (0, 1):
                raise ParseError(f"line {lineno}: directed flag must be 0 or 1")
            raw_pieces.append((t0, t1, bool(directed), []))
        elif len(toks) == 2:
            if not raw_pieces:
                raise ParseError(f"line {lineno}: edge before any piece line")
            try:
                i, j = int(toks[0]), int(toks[1])
            except ValueError as exc:
                raise ParseError(f"line {lineno}: malformed edge line") from exc
            if not (0 <= i < n and 0 <= j < n):
                raise ParseError(f"line {lineno}: node index out of range")
            raw_pieces[-1][3].append((i, j))
        else:
            raise ParseError(f"line {lineno}: unrecognized line {stripped!r}")
    if n is None or not raw_pieces:
        raise ParseError("schedule needs a header and at least one piece")
    pieces = []
    for t0, t1, directed, edge_list in raw_pieces:
        a = np.zeros((n, n))
        for i, j in edge_list:
            if i == j:
                continue
            a[i, j] = 1.0
            if not directed:
                a[j, i] = 1.0
        pieces.append(Piece(t_start=t0, t_end=t1, a=a, directed=directed))
    return TemporalNetwork(n=n, pieces=tuple(pieces))


def load_schedule(path) -> TemporalNetwork:
    return parse_schedule(Path(path))


def format_schedule(net: TemporalNetwork, comment: str | None = None) -> str:
    out = []
    if comment:
        for ln in comment.splitlines():
            out.append(f"% {ln}")
    out.append(f"n {net.n}")
    for piece in net.pieces:
        out.append(f"{piece.t_start!r} {piece.t_end!r} {1 if piece.directed else 0}")
        rows, cols = np.nonzero(piece.a)
        for i, j in zip(rows.tolist(), cols.tolist()):
            if piece.directed or i < j:
                out.append(f"{i} {j}")
    return "\n".join(out) + "\n"


def save_schedule(net: TemporalNetwork, path, comment: str | None = None) -> None:
    Path(path).write_text(format_schedule(net, comment))


def write_trajectory_csv(rankings: list[TemporalRanking], path,
                         params_comment: str = "") -> None:
    """One row per (time, node): t,node,broadcast,receive."""
    lines = [
        "# mlcent temporal trajectory"
        + (f" {params_comment}" if params_comment else ""),
        "t,node,broadcast,receive",
    ]
    for ranking in rankings:
        for node in range(len(ranking.broadcast)):
            lines.append(
                f"{ranking.t!r},{node},{float(ranking.broadcast[node])!r},"
                f"{float(ranking.receive[node])!r}"
            )
    Path(path).write_text("\n".join(lines) + "\n")
