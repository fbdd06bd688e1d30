"""
Switching signals :math:`u: [0, \\infty) \\to \\{0, \\dots, p-1\\}`: piecewise constant, right-continuous,
with finitely many switches on every bounded interval.

A :class:`SwitchingSignal` wraps a generator that yields ``(start_time, index)`` pairs and materializes
the prefix lazily as queries move further out in time. Generators are registered by kind, the same way
new kinds can be plugged in by applications:

    >>> @register_generator(kind="my_kind")
    ... class MyGenerator(BaseGenerator):
    ...     def segments(self):
    ...         ...
"""
import bisect
import itertools
import logging
import math
import numbers
import threading
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple, Type

import numpy as np

from switched_limits.config import DEFAULT_TOLERANCES, Tolerances
from switched_limits.exceptions import InvalidArgumentError, InvalidParamError, OutOfRangeError

logger = logging.getLogger(__name__)

GENERATORS: Dict[str, Type["BaseGenerator"]] = {}

#: shortest dwell an average-dwell generator emits, as a fraction of ``tau_a``
MIN_DWELL_FRACTION = 1e-3

#: ``(start, end, index)``; ``end`` is ``inf`` for a final segment that never switches
Segment = Tuple[float, float, int]


def register_generator(cls=None, *, kind=None):
    """
    Registers a generator class under ``kind`` so that signal files can refer to it by name.

    :param cls: the generator class, when used as a bare decorator
    :param kind: name used in the ``"type"`` field of signal files; defaults to ``cls.kind``
    """

    def decorator(clazz):
        name = kind or getattr(clazz, "kind", None)
        if not name:
            raise InvalidArgumentError(f"{clazz.__name__} needs a kind to be registered.")
        clazz.kind = name
        GENERATORS[name] = clazz
        return clazz

    if cls is not None:
        return decorator(cls)
    return decorator


class BaseGenerator:
    """
    Base class of signal generators.

    Subclasses implement :meth:`segments`, yielding ``(start_time, index)`` pairs with strictly increasing
    start times beginning at 0. Stopping the iterator means the last index holds forever; yielding
    ``(t, None)`` means the signal is only defined on ``[0, t)``.

    Subclasses also describe what is known by construction, which lets
    :func:`classify` return definite verdicts instead of prefix heuristics.
    """

    kind: str = ""
    #: size of the index alphabet when known by construction
    p: Optional[int] = None
    #: end of the time domain, ``None`` for signals defined on the whole half-line
    end: Optional[float] = None

    def check_params(self) -> None:
        """
        :raises: :attr:`InvalidParamError <switched_limits.exceptions.InvalidParamError>`
        """

    def segments(self) -> Iterator[Tuple[float, Optional[int]]]:
        raise NotImplementedError()

    def is_chaotic(self) -> Optional[bool]:
        """``True``/``False`` when known by construction, ``None`` otherwise."""
        return None

    def recurrent_dwells(self) -> Optional[Dict[int, float]]:
        """
        Indices that are switched to infinitely often with dwell at least ``delta``, mapped to ``delta``.
        ``None`` when nothing is known by construction.
        """
        return None

    def persistent_indices(self) -> Optional[FrozenSet[int]]:
        """Indices of infinite total occupancy, when known by construction."""
        return None

    def to_json(self) -> dict:
        raise NotImplementedError()


def _check_positive(value, name: str) -> None:
    if not isinstance(value, numbers.Real) or isinstance(value, bool) or not math.isfinite(value) or value <= 0:
        raise InvalidParamError(f"{name} must be a positive finite number, got {value!r}.")


def _check_index(value, name: str = "index") -> None:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 0:
        raise InvalidParamError(f"{name} must be a non-negative integer, got {value!r}.")


def _check_seed(value) -> None:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 0:
        raise InvalidParamError(f"seed must be a non-negative integer, got {value!r}.")


def _other_index(rng: np.random.Generator, current: int, p: int) -> int:
    choice = int(rng.integers(p - 1))
    return choice + 1 if choice >= current else choice


@register_generator(kind="explicit")
class ExplicitGenerator(BaseGenerator):
    """
    A finite list of switching times and indices.

    :param times: ``a_0 = 0 < a_1 < ... < a_n``
    :param values: ``u_0, ..., u_n``
    :param horizon: end of the prefix; ``None`` keeps ``u_n`` forever.
    """

    def __init__(self, times: Sequence[float], values: Sequence[int], horizon: Optional[float] = None):
        self.times = tuple(float(t) for t in times)
        self.values = tuple(values)
        self.horizon = None if horizon is None else float(horizon)
        self.end = self.horizon
        self.check_params()
        self.values = tuple(int(v) for v in self.values)

    def check_params(self) -> None:
        if not self.times or len(self.times) != len(self.values):
            raise InvalidParamError("times and values must be non-empty and of equal length.")
        if self.times[0] != 0:
            raise InvalidParamError(f"The first switching time must be 0, got {self.times[0]}.")
        if not all(math.isfinite(t) for t in self.times):
            raise InvalidParamError("Switching times must be finite.")
        if any(later <= earlier for earlier, later in zip(self.times, self.times[1:])):
            raise InvalidParamError("Switching times must be strictly increasing.")
        for value in self.values:
            _check_index(value)
        if self.horizon is not None:
            if not math.isfinite(self.horizon) or self.horizon <= self.times[-1]:
                raise InvalidParamError(
                    f"horizon must be finite and after the last switching time {self.times[-1]}."
                )

    def segments(self):
        yield from zip(self.times, self.values)
        if self.horizon is not None:
            yield self.horizon, None

    def _tail(self) -> Optional[int]:
        return self.values[-1] if self.horizon is None else None

    def is_chaotic(self):
        return False if self._tail() is not None else None

    def recurrent_dwells(self):
        tail = self._tail()
        return None if tail is None else {tail: math.inf}

    def persistent_indices(self):
        tail = self._tail()
        return None if tail is None else frozenset({tail})

    def to_json(self):
        return {"type": self.kind, "times": list(self.times), "values": list(self.values), "horizon": self.horizon}


@register_generator(kind="periodic")
class PeriodicGenerator(BaseGenerator):
    """
    Repeats ``pattern`` forever. Consecutive entries, the last and the first included, must differ.

    :param pattern: sequence of ``(index, duration)`` pairs.
    """

    def __init__(self, pattern: Sequence[Tuple[int, float]]):
        self.pattern = tuple((index, duration) for index, duration in pattern)
        self.check_params()
        self.pattern = tuple((int(index), float(duration)) for index, duration in self.pattern)
        self.offsets = tuple(itertools.accumulate([0.0] + [duration for _, duration in self.pattern[:-1]]))
        self.period = math.fsum(duration for _, duration in self.pattern)

    def check_params(self) -> None:
        if len(self.pattern) < 2:
            raise InvalidParamError(
                "A periodic pattern needs at least two entries; use constant_signal for a single index."
            )
        for index, duration in self.pattern:
            _check_index(index)
            _check_positive(duration, "duration")
        for position, (index, _) in enumerate(self.pattern):
            following = self.pattern[(position + 1) % len(self.pattern)][0]
            if index == following:
                raise InvalidParamError(
                    f"Entries {position} and {(position + 1) % len(self.pattern)} of the pattern repeat index {index}."
                )

    @property
    def p(self) -> int:
        return max(index for index, _ in self.pattern) + 1

    def segments(self):
        for cycle in itertools.count():
            base = cycle * self.period
            for offset, (index, _) in zip(self.offsets, self.pattern):
                yield base + offset, index

    def is_chaotic(self):
        return False

    def recurrent_dwells(self):
        dwells: Dict[int, float] = {}
        for index, duration in self.pattern:
            dwells[index] = min(duration, dwells.get(index, math.inf))
        return dwells

    def persistent_indices(self):
        return frozenset(index for index, _ in self.pattern)

    def to_json(self):
        return {
            "type": self.kind,
            "pattern": [{"index": index, "duration": duration} for index, duration in self.pattern],
        }


@register_generator(kind="dwell_random")
class DwellRandomGenerator(BaseGenerator):
    """
    Dwell times uniform on ``[min_dwell, max_dwell]``; the next index is drawn with probabilities
    proportional to ``weights`` among the indices other than the current one.
    """

    def __init__(self, min_dwell: float, max_dwell: float, weights: Sequence[float], seed: int = 0):
        self.min_dwell = min_dwell
        self.max_dwell = max_dwell
        self.weights = tuple(weights)
        self.seed = seed
        self.check_params()

    def check_params(self) -> None:
        _check_positive(self.min_dwell, "min_dwell")
        _check_positive(self.max_dwell, "max_dwell")
        if self.max_dwell < self.min_dwell:
            raise InvalidParamError("max_dwell must not be smaller than min_dwell.")
        if not self.weights or any(not math.isfinite(w) or w < 0 for w in self.weights):
            raise InvalidParamError("weights must be non-negative finite numbers.")
        if sum(1 for w in self.weights if w > 0) < 2:
            raise InvalidParamError("At least two indices need a positive weight to switch between.")
        _check_seed(self.seed)

    @property
    def p(self) -> int:
        return len(self.weights)

    def segments(self):
        rng = np.random.default_rng(self.seed)
        weights = np.asarray(self.weights, dtype=float)
        index = int(rng.choice(self.p, p=weights / weights.sum()))
        t = 0.0
        while True:
            yield t, index
            t += float(rng.uniform(self.min_dwell, self.max_dwell))
            others = weights.copy()
            others[index] = 0.0
            index = int(rng.choice(self.p, p=others / others.sum()))

    def is_chaotic(self):
        return False

    def recurrent_dwells(self):
        return {i: float(self.min_dwell) for i, w in enumerate(self.weights) if w > 0}

    def persistent_indices(self):
        return frozenset(i for i, w in enumerate(self.weights) if w > 0)

    def to_json(self):
        return {
            "type": self.kind,
            "min_dwell": self.min_dwell,
            "max_dwell": self.max_dwell,
            "weights": list(self.weights),
            "seed": self.seed,
        }


@register_generator(kind="average_dwell")
class AverageDwellGenerator(BaseGenerator):
    """
    Signals with average dwell time ``tau_a`` and chatter bound ``n0``: every window ``[T, T + t]`` holds
    at most ``n0 + t / tau_a`` switches.

    Switches spend tokens from a bucket of capacity ``n0`` that starts empty and refills at rate
    ``1 / tau_a``. Desired dwells are exponential with mean ``tau_a``; a switch waits for a full token.
    """

    def __init__(self, n0: int, tau_a: float, p: int, seed: int = 0):
        self.n0 = n0
        self.tau_a = tau_a
        self.p = p
        self.seed = seed
        self.check_params()

    def check_params(self) -> None:
        if not isinstance(self.n0, (int, np.integer)) or isinstance(self.n0, bool) or self.n0 < 1:
            raise InvalidParamError(f"n0 must be an integer >= 1, got {self.n0!r}.")
        _check_positive(self.tau_a, "tau_a")
        if not isinstance(self.p, (int, np.integer)) or isinstance(self.p, bool) or self.p < 2:
            raise InvalidParamError(f"p must be an integer >= 2, got {self.p!r}.")
        _check_seed(self.seed)

    @property
    def min_dwell(self) -> float:
        return MIN_DWELL_FRACTION * self.tau_a

    def segments(self):
        rng = np.random.default_rng(self.seed)
        index = int(rng.integers(self.p))
        tokens = 0.0
        t = 0.0
        while True:
            yield t, index
            desired = max(self.tau_a * float(rng.exponential()), self.min_dwell)
            dwell = max(desired, (1.0 - tokens) * self.tau_a)
            tokens = min(float(self.n0), tokens + dwell / self.tau_a) - 1.0
            t += dwell
            index = _other_index(rng, index, self.p)

    def is_chaotic(self):
        return False

    def recurrent_dwells(self):
        return {i: self.min_dwell for i in range(self.p)}

    def persistent_indices(self):
        return frozenset(range(self.p))

    def to_json(self):
        return {"type": self.kind, "n0": self.n0, "tau_a": self.tau_a, "p": self.p, "seed": self.seed}


@register_generator(kind="chaotic")
class ChaoticGenerator(BaseGenerator):
    """
    A deliberately chaotic signal: window ``k`` starts at :meth:`window` ``(k)[0]``, lasts ``tau`` and is cut
    into ``k + 2`` dwells of length ``tau / (k + 2)``, so dwell lengths inside such windows go to zero.

    Windows are separated by ``k + 1`` unit dwells. Indices follow a seed-dependent cyclic order, so
    consecutive indices always differ.
    """

    def __init__(self, tau: float, p: int, seed: int = 0):
        self.tau = tau
        self.p = p
        self.seed = seed
        self.check_params()
        self.order = tuple(int(i) for i in np.random.default_rng(seed).permutation(p))

    def check_params(self) -> None:
        _check_positive(self.tau, "tau")
        if not isinstance(self.p, (int, np.integer)) or isinstance(self.p, bool) or self.p < 2:
            raise InvalidParamError(f"p must be an integer >= 2, got {self.p!r}.")
        _check_seed(self.seed)

    def window(self, k: int) -> Tuple[float, float]:
        """
        :return: ``(t_k, eps_k)``; every dwell inside ``[t_k, t_k + tau]`` has length ``eps_k``.
        """
        start = k * (k + 1) / 2 + k * self.tau + (k + 1)
        return start, self.tau / (k + 2)

    def segments(self):
        counter = itertools.count()
        t = 0.0
        for k in itertools.count():
            for _ in range(k + 1):
                yield t, self.order[next(counter) % self.p]
                t += 1.0
            start, eps = t, self.tau / (k + 2)
            for j in range(k + 2):
                yield start + j * eps, self.order[next(counter) % self.p]
            t = start + self.tau

    def is_chaotic(self):
        return True

    def recurrent_dwells(self):
        # stretch k holds k + 1 unit dwells in cyclic order, so every index recurs with dwell 1
        return {i: 1.0 for i in range(self.p)}

    def persistent_indices(self):
        return frozenset(range(self.p))

    def to_json(self):
        return {"type": self.kind, "tau": self.tau, "p": self.p, "seed": self.seed}


class SwitchingSignal:
    """
    A switching signal backed by a generator. The prefix of switching times is extended lazily and
    the extension is serialized by a lock, so a signal can be shared between threads.

    Consecutive segments with the same index are merged; stored switching times are therefore genuine
    switches.
    """

    def __init__(self, generator: BaseGenerator):
        self.generator = generator
        self._source = iter(generator.segments())
        self._starts: List[float] = []
        self._values: List[int] = []
        self._exhausted = False
        self._end: Optional[float] = None
        self._lock = threading.RLock()
        self._pull()
        if not self._values or self._starts[0] != 0:
            raise InvalidArgumentError("A switching signal must start at t = 0.")

    def __repr__(self) -> str:
        return f"SwitchingSignal({self.generator.kind}, known_switches={len(self._starts) - 1})"

    @property
    def p(self) -> Optional[int]:
        """Alphabet size declared by the generator, if any."""
        return self.generator.p

    @property
    def is_infinite(self) -> bool:
        return self.generator.end is None

    @property
    def end(self) -> float:
        """End of the domain of the signal; ``inf`` for signals defined on the whole half-line."""
        return math.inf if self.generator.end is None else float(self.generator.end)

    def _pull(self) -> bool:
        if self._exhausted:
            return False
        try:
            start, index = next(self._source)
        except StopIteration:
            self._exhausted = True
            return False
        start = float(start)
        if self._starts and start <= self._starts[-1]:
            raise InvalidArgumentError(f"Generator produced non-increasing switching time {start}.")
        if index is None:
            self._exhausted = True
            self._end = start
            return False
        index = int(index)
        if index < 0:
            raise InvalidArgumentError(f"Generator produced negative index {index}.")
        if self._values and self._values[-1] == index:
            return True
        self._starts.append(start)
        self._values.append(index)
        return True

    def extend_to(self, t: float) -> None:
        """Materializes the prefix until it covers ``t`` (or the generator ends)."""
        with self._lock:
            while self._starts[-1] <= t and self._pull():
                pass

    def ensure_switches(self, n: int) -> None:
        """Materializes switching times ``a_0, ..., a_n``; raises when the signal has fewer."""
        with self._lock:
            while len(self._starts) <= n and self._pull():
                pass
            if len(self._starts) <= n:
                raise OutOfRangeError(math.inf, self.end)

    def _check_time(self, t: float, closed: bool = False) -> float:
        t = float(t)
        if not math.isfinite(t) or t < 0:
            raise InvalidArgumentError(f"Time must be finite and non-negative, got {t}.")
        self.extend_to(t)
        if self._end is not None and (t > self._end or (t == self._end and not closed)):
            raise OutOfRangeError(t, self._end)
        return t

    def segment_index(self, t: float) -> int:
        """``n`` such that :math:`a_n \\leq t < a_{n+1}`."""
        t = self._check_time(t)
        with self._lock:
            return bisect.bisect_right(self._starts, t) - 1

    def signal_at(self, t: float) -> int:
        """:math:`u(t)`, right-continuous at switching times."""
        n = self.segment_index(t)
        with self._lock:
            return self._values[n]

    __call__ = signal_at

    def switch(self, n: int) -> Tuple[float, int]:
        """:math:`(a_n, u_n)`."""
        self.ensure_switches(n)
        with self._lock:
            return self._starts[n], self._values[n]

    def segment_end(self, n: int) -> float:
        """:math:`a_{n+1}`, or the end of the signal for its last segment."""
        with self._lock:
            self.ensure_switches(n)
            while len(self._starts) <= n + 1 and self._pull():
                pass
            if len(self._starts) > n + 1:
                return self._starts[n + 1]
            return math.inf if self._end is None else self._end

    def segments_until(self, horizon: float) -> List[Segment]:
        """
        Segments covering ``[0, horizon]``, the last one truncated at ``horizon``.
        """
        horizon = self._check_time(horizon, closed=True)
        with self._lock:
            last = bisect.bisect_right(self._starts, horizon) - 1
            segments = []
            for n in range(last + 1):
                end = self._starts[n + 1] if n + 1 < len(self._starts) else horizon
                segments.append((self._starts[n], min(end, horizon), self._values[n]))
            return segments

    def switch_times(self, horizon: float) -> List[float]:
        """Switching times :math:`a_n \\leq` ``horizon`` with ``n >= 1``."""
        return [start for start, _, _ in self.segments_until(horizon)[1:]]

    def dwells(self, horizon: float) -> List[Tuple[int, float]]:
        """``(index, dwell)`` of every segment completed before ``horizon``."""
        complete = self.segments_until(horizon)
        if complete and complete[-1][1] >= horizon:
            complete = complete[:-1]
        return [(index, end - start) for start, end, index in complete]

    def max_index(self, horizon: float) -> int:
        return max(index for _, _, index in self.segments_until(horizon))

    def check_alphabet(self, p: int, horizon: float) -> None:
        """
        :raises: :attr:`InvalidArgumentError <switched_limits.exceptions.InvalidArgumentError>` if an index
                 at or above ``p`` occurs up to ``horizon``.
        """
        declared = self.p
        if declared is not None and declared > p:
            raise InvalidArgumentError(f"Signal draws from {declared} indices but the system has {p} matrices.")
        top = self.max_index(horizon)
        if top >= p:
            raise InvalidArgumentError(f"Signal uses index {top} but the system has {p} matrices.")


def signal_from_spec(kind: str, **params) -> SwitchingSignal:
    """
    Builds a signal from a registered generator kind.

    :raises: :attr:`InvalidParamError <switched_limits.exceptions.InvalidParamError>` for unknown kinds or
             invalid parameters.
    """
    try:
        generator_class = GENERATORS[kind]
    except KeyError:
        raise InvalidParamError(f"Unknown signal kind {kind!r}; expected one of {sorted(GENERATORS)}.")
    try:
        return SwitchingSignal(generator_class(**params))
    except TypeError as exc:
        raise InvalidParamError(f"Invalid parameters for {kind!r} signals: {exc}")


def explicit_signal(times: Sequence[float], values: Sequence[int], horizon: Optional[float] = None) -> SwitchingSignal:
    return SwitchingSignal(ExplicitGenerator(times, values, horizon))


def constant_signal(index: int) -> SwitchingSignal:
    return explicit_signal([0.0], [index])


def generate_periodic(pattern: Sequence[Tuple[int, float]], p: Optional[int] = None) -> SwitchingSignal:
    """
    A periodic signal. A single-entry pattern is accepted only for ``p == 1``, where it is the constant signal.
    """
    pattern = list(pattern)
    if len(pattern) == 1 and p == 1:
        index, duration = pattern[0]
        _check_positive(duration, "duration")
        return constant_signal(index)
    return SwitchingSignal(PeriodicGenerator(pattern))


def generate_dwell_random(min_dwell: float, max_dwell: float, weights: Sequence[float], seed: int = 0) -> SwitchingSignal:
    return SwitchingSignal(DwellRandomGenerator(min_dwell, max_dwell, weights, seed))


def generate_average_dwell(n0: int, tau_a: float, p: int, seed: int = 0) -> SwitchingSignal:
    return SwitchingSignal(AverageDwellGenerator(n0, tau_a, p, seed))


def generate_chaotic(tau: float, p: int, seed: int = 0) -> SwitchingSignal:
    return SwitchingSignal(ChaoticGenerator(tau, p, seed))


def occupancy(signal: SwitchingSignal, horizon: float, p: int) -> np.ndarray:
    """
    :return: ``m_i(T)``, the Lebesgue measure of :math:`\\{t \\leq T: u(t) = i\\}` for ``i < p``.
    """
    totals = np.zeros(p)
    for start, end, index in signal.segments_until(horizon):
        if index >= p:
            raise InvalidArgumentError(f"Signal uses index {index} but p is {p}.")
        totals[index] += end - start
    return totals


def switch_count(signal: SwitchingSignal, start: float, end: float) -> int:
    """Number of switching times in ``[start, end]``."""
    if end < start:
        raise InvalidArgumentError("end must not precede start.")
    times = signal.switch_times(end)
    return bisect.bisect_right(times, end) - bisect.bisect_left(times, start)


class Chaoticity(str, Enum):
    CHAOTIC = "chaotic"
    NON_CHAOTIC = "non-chaotic"
    UNDECIDABLE = "undecidable-from-prefix"


class Regularity(str, Enum):
    REGULAR = "regular"
    NOT_REGULAR = "not-regular"
    UNDECIDABLE = "undecidable-from-prefix"


@dataclass(frozen=True)
class IndexEvidence:
    index: int
    #: ``True`` when the index is switched to infinitely often with dwell bounded below
    recurrent: bool
    #: the dwell lower bound ``delta_i``; 0 without evidence
    delta: float
    occupancy: float
    #: ``"generator"`` when known by construction, ``"prefix"`` when read off the materialized prefix
    source: str

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "H": "yes" if self.recurrent else "no-evidence",
            "delta": self.delta,
            "occupancy": self.occupancy,
            "source": self.source,
        }


@dataclass(frozen=True)
class SignalClassification:
    horizon: float
    p: int
    per_index: Tuple[IndexEvidence, ...]
    chaotic_verdict: Chaoticity
    regular_verdict: Regularity
    #: estimate of the indices with infinite occupancy
    j_u_estimate: FrozenSet[int]
    #: number of long dwells a prefix must show before an index counts as recurrent
    evidence_threshold: int
    #: longest constant run per window of the prefix, reported when chaoticity is undecidable
    chaos_scan: Optional[Tuple[float, ...]] = None

    def to_json(self) -> dict:
        return {
            "horizon": self.horizon,
            "p": self.p,
            "per_index": [evidence.to_json() for evidence in self.per_index],
            "chaotic_verdict": self.chaotic_verdict.value,
            "regular_verdict": self.regular_verdict.value,
            "J_u_estimate": sorted(self.j_u_estimate),
            "evidence_threshold": self.evidence_threshold,
            "chaos_scan": None if self.chaos_scan is None else list(self.chaos_scan),
        }


#: number of windows the prefix is cut into by the chaos scan
CHAOS_SCAN_WINDOWS = 20


def _chaos_scan(segments: List[Segment], horizon: float) -> Tuple[float, ...]:
    width = horizon / CHAOS_SCAN_WINDOWS
    longest = []
    for w in range(CHAOS_SCAN_WINDOWS):
        lo, hi = w * width, (w + 1) * width
        runs = [min(end, hi) - max(start, lo) for start, end, _ in segments if start < hi and end > lo]
        longest.append(max(runs, default=0.0))
    return tuple(longest)


def classify(signal: SwitchingSignal, horizon: float, p: Optional[int] = None,
             tolerances: Tolerances = DEFAULT_TOLERANCES) -> SignalClassification:
    """
    Classifies a signal as chaotic or not, decides recurrence of each index and estimates the set of
    indices with infinite occupancy.

    Verdicts are definite only when the generator knows them by construction. For bare prefixes an index
    counts as recurrent when at least ``ceil(max(10, horizon / 20))`` of its completed dwells are positive,
    the shortest of those giving ``delta``; chaoticity is never decided from a prefix.

    :param horizon: length of the prefix inspected.
    :param p: alphabet size; defaults to the generator's, then to the largest index seen plus one.
    :raises: :attr:`OutOfRangeError <switched_limits.exceptions.OutOfRangeError>` when the signal ends before
             ``horizon``.
    """
    if not math.isfinite(horizon) or horizon <= 0:
        raise InvalidArgumentError(f"horizon must be positive and finite, got {horizon}.")
    segments = signal.segments_until(horizon)
    if p is None:
        p = signal.p if signal.p is not None else signal.max_index(horizon) + 1
    signal.check_alphabet(p, horizon)
    totals = occupancy(signal, horizon, p)
    threshold = math.ceil(max(10.0, horizon / 20))
    generator = signal.generator

    known_dwells = generator.recurrent_dwells()
    per_index = []
    if known_dwells is not None:
        for i in range(p):
            delta = known_dwells.get(i, 0.0)
            per_index.append(IndexEvidence(i, i in known_dwells, delta, float(totals[i]), "generator"))
    else:
        dwells: Dict[int, List[float]] = {i: [] for i in range(p)}
        for index, dwell in signal.dwells(horizon):
            dwells[index].append(dwell)
        for i in range(p):
            longest = sorted(dwells[i], reverse=True)
            recurrent = len(longest) >= threshold
            delta = longest[threshold - 1] if recurrent else 0.0
            per_index.append(IndexEvidence(i, recurrent, delta, float(totals[i]), "prefix"))

    chaotic = generator.is_chaotic()
    chaos_scan = None
    if chaotic is None:
        chaoticity = Chaoticity.UNDECIDABLE
        chaos_scan = _chaos_scan(segments, horizon)
    else:
        chaoticity = Chaoticity.CHAOTIC if chaotic else Chaoticity.NON_CHAOTIC

    persistent = generator.persistent_indices()
    if persistent is None:
        half = occupancy(signal, horizon / 2, p)
        slopes = (totals - half) / (horizon / 2)
        persistent = frozenset(i for i in range(p) if slopes[i] >= tolerances.occupancy_slope)

    if chaoticity is Chaoticity.CHAOTIC:
        regularity = Regularity.NOT_REGULAR
    elif chaoticity is Chaoticity.NON_CHAOTIC and all(evidence.recurrent for evidence in per_index):
        regularity = Regularity.REGULAR
    elif chaoticity is Chaoticity.NON_CHAOTIC and known_dwells is not None:
        regularity = Regularity.NOT_REGULAR
    else:
        regularity = Regularity.UNDECIDABLE

    logger.debug("Classified %r up to %s: %s, %s", signal, horizon, chaoticity.value, regularity.value)
    return SignalClassification(
        horizon=float(horizon),
        p=p,
        per_index=tuple(per_index),
        chaotic_verdict=chaoticity,
        regular_verdict=regularity,
        j_u_estimate=frozenset(persistent),
        evidence_threshold=threshold,
        chaos_scan=chaos_scan,
    )
