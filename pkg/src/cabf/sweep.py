"""Exhaustive and sampled sweeps over the 2**32 five-variable rules.

Work is split into fixed-size chunks.  Each chunk is counted independently
into a (48 x columns) integer table and tables are summed in chunk order,
so the result does not depend on the number of workers.  A checkpoint
(versioned JSON, replaced atomically) records the completed prefix.
"""

from __future__ import annotations

import json
import logging
import multiprocessing
import os
import signal
import tempfile
import threading
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import _kernels as K
from .affine import ORBIT_LIMIT, default_registry, orbit_enumerate
from .boolfn import TruthTable, WrongArity, to_hex
from .caext import extend_5_to_9
from .props import PropertyProfile, property_profile

log = logging.getLogger(__name__)

RULE_SPACE = 1 << 32
CHUNK_SIZE = 1 << 20
FORMAT_VERSION = 1
COLUMNS = K.COLUMNS


class SweepError(RuntimeError):
    pass


class CheckpointCorrupt(SweepError):
    pass


class Interrupted(SweepError):
    def __init__(self, message, counters=None, next_rule_index=None):
        super().__init__(message)
        self.counters = counters
        self.next_rule_index = next_rule_index


# ---------------------------------------------------------------- single rules


@dataclass(frozen=True)
class Preserved:
    balanced: bool
    ci1: bool
    sac: bool
    pc2: bool
    pc3: bool
    pc4: bool
    pc5: bool
    nonlinear: bool
    degree_ge: bool


@dataclass(frozen=True)
class PreservationRecord:
    rule_hex: str
    class_id: str
    five_var_profile: PropertyProfile
    nine_var_profile: PropertyProfile
    preserved: Preserved
    extended_hex: str = field(repr=False, default="")


def preservation_record(rule: TruthTable) -> PreservationRecord:
    """Profiles of a rule and of its extension, and which properties survive."""
    if rule.arity != 5:
        raise WrongArity("preservation is defined for 5-variable rules")
    g = extend_5_to_9(rule)
    p5 = property_profile(rule)
    p9 = property_profile(g)
    pc = min(p5.pc_order, p9.pc_order)
    preserved = Preserved(
        balanced=p5.balanced and p9.balanced,
        ci1=p5.ci1 and p9.ci1,
        sac=p5.sac and p9.sac,
        pc2=pc >= 2,
        pc3=pc >= 3,
        pc4=pc >= 4,
        pc5=pc >= 5,
        nonlinear=p5.nonlinear and p9.nonlinear,
        degree_ge=p9.degree >= p5.degree,
    )
    return PreservationRecord(
        to_hex(rule), default_registry().classify(rule), p5, p9, preserved, to_hex(g)
    )


# ---------------------------------------------------------------- counters


class ClassCounters:
    """Per-class counters; rows follow registry order, columns :data:`COLUMNS`."""

    def __init__(self, table: np.ndarray | None = None):
        n = len(default_registry())
        if table is None:
            table = np.zeros((n, K.NCOLS), dtype=np.int64)
        table = np.asarray(table, dtype=np.int64)
        if table.shape != (n, K.NCOLS):
            raise ValueError(f"counter table must have shape {(n, K.NCOLS)}, got {table.shape}")
        self.table = table

    def __add__(self, other: "ClassCounters") -> "ClassCounters":
        return ClassCounters(self.table + other.table)

    def __eq__(self, other):
        return isinstance(other, ClassCounters) and np.array_equal(self.table, other.table)

    def __repr__(self):
        return f"ClassCounters(rules={self.n_rules})"

    @property
    def n_rules(self) -> int:
        return int(self.table[:, K.TOTAL].sum())

    def row(self, class_id: str) -> dict[str, int]:
        i = default_registry()[class_id].index
        return dict(zip(COLUMNS, (int(v) for v in self.table[i])))

    def totals(self) -> dict[str, int]:
        return dict(zip(COLUMNS, (int(v) for v in self.table.sum(axis=0))))

    def to_json(self) -> dict:
        ids = default_registry().ids
        return {cid: [int(v) for v in row] for cid, row in zip(ids, self.table)}

    @classmethod
    def from_json(cls, data: dict) -> "ClassCounters":
        ids = default_registry().ids
        if set(data) != set(ids):
            raise ValueError("counter rows do not match the class registry")
        return cls(np.array([data[cid] for cid in ids], dtype=np.int64))


def merge(a: ClassCounters, b: ClassCounters) -> ClassCounters:
    return a + b


def count_rules(rules) -> ClassCounters:
    """Counters over an explicit collection of packed 5-variable rules."""
    rules = np.ascontiguousarray(rules, dtype=np.int64)
    if rules.size and (rules.min() < 0 or rules.max() >= RULE_SPACE):
        raise ValueError("rules must be 32-bit truth tables")
    keys, order, sigs = default_registry().kernel_tables
    table = np.zeros((len(sigs), K.NCOLS), dtype=np.int64)
    bad = K.sweep_batch(rules, keys, order, sigs, table)
    if bad >= 0:
        from .affine import UnknownSignature

        raise UnknownSignature(f"rule {int(rules[bad]):08x} matches no class signature")
    return ClassCounters(table)


def run_class_sweep(class_id: str, limit: int = ORBIT_LIMIT) -> ClassCounters:
    """Counters restricted to the full orbit of one class."""
    entry = default_registry()[class_id]
    members = orbit_enumerate(entry.rep, limit)
    counters = count_rules(members)
    stray = counters.n_rules - counters.table[entry.index, K.TOTAL]
    if stray:
        raise SweepError(f"{stray} orbit members of {class_id} were classified elsewhere")
    return counters


# ---------------------------------------------------------------- chunked jobs


@dataclass(frozen=True)
class SweepJob:
    """A range ``[start, end)`` of rule indices, or ``samples`` seeded random rules."""

    start: int = 0
    end: int = 0
    samples: int | None = None
    seed: int | None = None
    chunk_size: int = CHUNK_SIZE

    def __post_init__(self):
        if self.chunk_size < 1:
            raise ValueError("chunk size must be positive")
        if self.samples is None:
            if not 0 <= self.start <= self.end <= RULE_SPACE:
                raise ValueError(f"range must satisfy 0 <= start <= end <= 2**32, got [{self.start}, {self.end})")
        elif self.samples < 0 or self.seed is None:
            raise ValueError("sampled sweeps need a non-negative size and a seed")

    @property
    def sampled(self) -> bool:
        return self.samples is not None

    @property
    def size(self) -> int:
        return self.samples if self.sampled else self.end - self.start

    @property
    def n_chunks(self) -> int:
        return -(-self.size // self.chunk_size)

    def chunk_rules(self, i: int) -> np.ndarray:
        lo = i * self.chunk_size
        hi = min(self.size, lo + self.chunk_size)
        if self.sampled:
            rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(i,)))
            return rng.integers(0, RULE_SPACE, size=hi - lo, dtype=np.int64)
        return np.arange(self.start + lo, self.start + hi, dtype=np.int64)

    @property
    def offset(self) -> int:
        """Rule index that ``next_rule_index`` counts from."""
        return 0 if self.sampled else self.start

    def describe(self) -> dict:
        return asdict(self)


def _count_chunk(job: SweepJob, i: int) -> np.ndarray:
    return count_rules(job.chunk_rules(i)).table


def _worker_init():
    # The parent handles interrupts; workers must not die mid-chunk on Ctrl-C.
    signal.signal(signal.SIGINT, signal.SIG_IGN)
    threading.Thread(target=_exit_with_parent, args=(os.getppid(),), daemon=True).start()


def _exit_with_parent(parent: int) -> None:
    # A SIGKILLed parent cannot shut the pool down; do not linger as orphans.
    while os.getppid() == parent:
        time.sleep(0.5)
    os._exit(1)


def save_checkpoint(path, job: SweepJob, counters: ClassCounters, done: int) -> None:
    """Atomically write progress; ``done`` rules of the job are in ``counters``."""
    path = Path(path)
    doc = {
        "format": "cabf-sweep",
        "format_version": FORMAT_VERSION,
        "job": job.describe(),
        "next_rule_index": job.offset + done,
        "complete": done >= job.size,
        "columns": list(COLUMNS),
        "counters": counters.to_json(),
    }
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_checkpoint(path) -> tuple[SweepJob, ClassCounters, int]:
    """Returns (job, counters, rules done); validates version and consistency."""
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointCorrupt(f"cannot read checkpoint {path}: {exc}") from exc
    try:
        if doc.get("format") != "cabf-sweep" or doc.get("format_version") != FORMAT_VERSION:
            raise CheckpointCorrupt(f"unsupported checkpoint format in {path}")
        if doc["columns"] != list(COLUMNS):
            raise CheckpointCorrupt("checkpoint column layout differs from this version")
        job = SweepJob(**doc["job"])
        counters = ClassCounters.from_json(doc["counters"])
        next_index = int(doc["next_rule_index"])
    except CheckpointCorrupt:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CheckpointCorrupt(f"malformed checkpoint {path}: {exc}") from exc
    done = next_index - job.offset
    if not 0 <= done <= job.size or counters.n_rules != done:
        raise CheckpointCorrupt("checkpoint counters disagree with its recorded progress")
    if done % job.chunk_size and done != job.size:
        raise CheckpointCorrupt("checkpoint progress is not on a chunk boundary")
    return job, counters, done


def run_job(
    job: SweepJob,
    workers: int = 1,
    checkpoint_path=None,
    progress: Callable[[int, int], None] | None = None,
) -> ClassCounters:
    """Run (or resume) a chunked sweep.

    ``progress(done, total)`` is called after each chunk is merged and
    checkpointed; a KeyboardInterrupt raised anywhere during the run
    surfaces as :class:`Interrupted` with the completed prefix saved.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    counters = ClassCounters()
    done_chunks = 0
    if checkpoint_path is not None and Path(checkpoint_path).exists():
        saved_job, counters, done = load_checkpoint(checkpoint_path)
        if saved_job != job:
            raise CheckpointCorrupt("checkpoint belongs to a different sweep")
        done_chunks = -(-done // job.chunk_size)
        log.info("resuming at chunk %d of %d", done_chunks, job.n_chunks)

    # Build lookup tables and compile before forking.
    count_rules(np.zeros(1, dtype=np.int64))
    pending = range(done_chunks, job.n_chunks)

    done = min(job.size, done_chunks * job.chunk_size)

    def record(i, table):
        nonlocal counters, done
        counters = counters + ClassCounters(table)
        done = min(job.size, (i + 1) * job.chunk_size)
        if checkpoint_path is not None:
            save_checkpoint(checkpoint_path, job, counters, done)
        if progress is not None:
            progress(done, job.size)

    try:
        if workers == 1:
            for i in pending:
                record(i, _count_chunk(job, i))
        else:
            ctx = multiprocessing.get_context("fork")
            with ProcessPoolExecutor(workers, mp_context=ctx, initializer=_worker_init) as pool:
                try:
                    for i, table in zip(pending, pool.map(_count_chunk, [job] * len(pending), pending)):
                        record(i, table)
                except BaseException:
                    pool.shutdown(wait=True, cancel_futures=True)
                    raise
    except KeyboardInterrupt:
        raise Interrupted(f"sweep interrupted after {done} rules", counters, job.offset + done) from None
    if checkpoint_path is not None and not job.size:
        save_checkpoint(checkpoint_path, job, counters, 0)
    return counters


def run_sweep(start: int, end: int, workers: int = 1, checkpoint_path=None,
              chunk_size: int = CHUNK_SIZE, progress=None) -> ClassCounters:
    return run_job(SweepJob(start, end, chunk_size=chunk_size), workers, checkpoint_path, progress)


def run_sample(samples: int, seed: int, workers: int = 1, checkpoint_path=None,
               chunk_size: int = CHUNK_SIZE, progress=None) -> ClassCounters:
    job = SweepJob(samples=samples, seed=seed, chunk_size=chunk_size)
    return run_job(job, workers, checkpoint_path, progress)
