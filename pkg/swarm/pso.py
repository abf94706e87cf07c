"""
관성 가중 PSO (입자 군집 최적화)

v ← w·v + c1·r1∘(pbest − x) + c2·r2∘(gbest − x),  |v| ≤ v_max
x ← clip(x + v, lower, upper)  (경계에 걸린 좌표는 속도 0)
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Literal, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, model_validator

from utils import get_logger
from utils.errors import FitnessEvaluationError, NumericError

logger = get_logger(__name__)

FitnessFn = Callable[[np.ndarray], float]


class SwarmConfig(BaseModel):
    m: int = Field(20, ge=1, description="입자 수")
    n: int = Field(30, ge=1, description="입자당 반복 수")
    w: float = Field(0.729, ge=0, description="관성 가중치")
    c1: float = Field(1.49445, ge=0, description="인지 계수")
    c2: float = Field(1.49445, ge=0, description="사회 계수")
    v_max: float = Field(0.5, gt=0, description="좌표별 속도 상한")
    lower: float = Field(-1.0, description="위치 하한")
    upper: float = Field(1.0, description="위치 상한")
    seed: int = Field(0, description="RNG 시드")
    fitness_epochs: int = Field(5, ge=0, description="적합도 평가 전 Adam 에폭 수")
    loop: Literal["sync", "paper"] = Field("sync", description="sync: 반복마다 전체 입자 / paper: 입자마다 n회 연속")
    validation_fraction: float = Field(0.1, gt=0, lt=1, description="적합도 검증용 윈도우 비율")

    @model_validator(mode="after")
    def _check_bounds(self):
        if not self.lower < self.upper:
            raise ValueError(f"position bounds must satisfy lower < upper ({self.lower}, {self.upper})")
        return self


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    pbest_position: np.ndarray
    pbest_fitness: float = float("inf")

    def observe(self, fitness: float) -> bool:
        """현재 위치의 적합도를 반영하고 pbest 갱신 여부 반환"""
        if fitness < self.pbest_fitness:
            self.pbest_fitness = float(fitness)
            self.pbest_position = self.position.copy()
            return True
        return False


@dataclass
class SwarmResult:
    best_position: np.ndarray
    best_fitness: float
    history: List[float] = field(default_factory=list)  # 평가마다 gbest 적합도
    trace: List[Dict[str, float]] = field(default_factory=list)

    def trace_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.trace, columns=["iteration", "particle", "fitness", "gbest_fitness"])


def _evaluate(fitness: FitnessFn, position: np.ndarray, index: int) -> float:
    try:
        value = float(fitness(position))
    except FitnessEvaluationError:
        raise
    except Exception as e:
        raise FitnessEvaluationError(index, e) from e
    if not np.isfinite(value):
        raise FitnessEvaluationError(index, NumericError(f"non-finite fitness {value}"))
    return value


def init_swarm(
    cfg: SwarmConfig,
    dim: int,
    fitness: Optional[FitnessFn] = None,
    rng: Optional[np.random.Generator] = None,
    x0: Optional[np.ndarray] = None,
) -> List[Particle]:
    """
    위치는 [lower, upper], 속도는 [−v_max, v_max] 균등분포. fitness가 주어지면 pbest 평가까지 수행

    x0가 주어지면 0번 입자를 그 위치(경계로 클리핑)에서 시작한다. 나머지 입자의 난수열은 그대로다.
    """
    if dim < 1:
        raise ValueError("swarm dimension must be ≥ 1")
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    particles: List[Particle] = []
    for _ in range(cfg.m):
        position = rng.uniform(cfg.lower, cfg.upper, size=dim)
        velocity = rng.uniform(-cfg.v_max, cfg.v_max, size=dim)
        particles.append(Particle(position, velocity, position.copy()))
    if x0 is not None:
        start = np.asarray(x0, dtype=np.float64)
        if start.shape != (dim,):
            raise ValueError(f"x0 shape {start.shape} != ({dim},)")
        start = np.clip(start, cfg.lower, cfg.upper)
        particles[0] = Particle(start, particles[0].velocity, start.copy())
    if fitness is not None:
        for i, p in enumerate(particles):
            p.observe(_evaluate(fitness, p.position, i))
    return particles


def update_particle(
    p: Particle,
    gbest: np.ndarray,
    cfg: SwarmConfig,
    rng: np.random.Generator,
    r1: Optional[np.ndarray] = None,
    r2: Optional[np.ndarray] = None,
) -> Particle:
    """속도·위치 갱신 (pbest는 건드리지 않음)"""
    dim = p.position.size
    r1 = rng.uniform(size=dim) if r1 is None else np.broadcast_to(r1, (dim,))
    r2 = rng.uniform(size=dim) if r2 is None else np.broadcast_to(r2, (dim,))
    velocity = (
        cfg.w * p.velocity
        + cfg.c1 * r1 * (p.pbest_position - p.position)
        + cfg.c2 * r2 * (gbest - p.position)
    )
    velocity = np.clip(velocity, -cfg.v_max, cfg.v_max)
    moved = p.position + velocity
    position = np.clip(moved, cfg.lower, cfg.upper)
    velocity = np.where(position != moved, 0.0, velocity)
    return Particle(position, velocity, p.pbest_position, p.pbest_fitness)


class _Tracker:
    """gbest와 평가 이력 누적"""

    def __init__(self):
        self.best_position: Optional[np.ndarray] = None
        self.best_fitness = float("inf")
        self.history: List[float] = []
        self.trace: List[Dict[str, float]] = []

    def record(self, iteration: int, index: int, particle: Particle, value: float) -> None:
        if value < self.best_fitness:
            self.best_fitness = value
            self.best_position = particle.position.copy()
        self.history.append(self.best_fitness)
        self.trace.append(
            {"iteration": iteration, "particle": index, "fitness": value, "gbest_fitness": self.best_fitness}
        )


def optimize(
    fitness: FitnessFn,
    dim: int,
    cfg: SwarmConfig,
    workers: int = 1,
    x0: Optional[np.ndarray] = None,
) -> SwarmResult:
    """
    적합도 최소화 (x0: 0번 입자의 시작 위치)

    loop="sync": 반복마다 모든 입자를 갱신·평가한다. workers == 1이면 평가 직후 gbest를 갱신하고,
    workers > 1이면 한 반복의 입자를 병렬 평가한 뒤 입자 순서대로 gbest에 반영한다.
    loop="paper": 입자마다 n회 연속 갱신·평가한다 (입자 바깥, 반복 안쪽 중첩).
    """
    rng = np.random.default_rng(cfg.seed)
    particles = init_swarm(cfg, dim, rng=rng, x0=x0)
    tracker = _Tracker()
    for i, p in enumerate(particles):
        value = _evaluate(fitness, p.position, i)
        p.observe(value)
        tracker.record(0, i, p, value)

    if cfg.loop == "paper":
        for i in range(cfg.m):
            for iteration in range(1, cfg.n + 1):
                particles[i] = update_particle(particles[i], tracker.best_position, cfg, rng)
                value = _evaluate(fitness, particles[i].position, i)
                particles[i].observe(value)
                tracker.record(iteration, i, particles[i], value)
    elif workers > 1:
        with ThreadPoolExecutor(max_workers=min(workers, cfg.m)) as ex:
            for iteration in range(1, cfg.n + 1):
                gbest = tracker.best_position
                particles = [update_particle(p, gbest, cfg, rng) for p in particles]
                futures = [ex.submit(_evaluate, fitness, p.position, i) for i, p in enumerate(particles)]
                for i, (p, fut) in enumerate(zip(particles, futures)):
                    value = fut.result()
                    p.observe(value)
                    tracker.record(iteration, i, p, value)
    else:
        for iteration in range(1, cfg.n + 1):
            for i in range(cfg.m):
                particles[i] = update_particle(particles[i], tracker.best_position, cfg, rng)
                value = _evaluate(fitness, particles[i].position, i)
                particles[i].observe(value)
                tracker.record(iteration, i, particles[i], value)

    logger.info(f"🐝 PSO 완료 — gbest={tracker.best_fitness:.6f} (평가 {len(tracker.history)}회, dim={dim})")
    return SwarmResult(
        best_position=tracker.best_position,
        best_fitness=tracker.best_fitness,
        history=tracker.history,
        trace=tracker.trace,
    )
