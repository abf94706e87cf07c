# swarm 패키지: PSO와 신경망 초기 가중치 적합도
from .fitness import FitnessSpec, swarm_target_names
from .pso import Particle, SwarmConfig, SwarmResult, init_swarm, optimize, update_particle
