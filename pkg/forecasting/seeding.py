# 마스터 시드 → 성분/용도별 시드
import numpy as np

STREAM_INIT = 0
STREAM_TRAIN = 1
STREAM_SWARM = 2


def derive_seed(master_seed: int, component_id: int, stream: int) -> int:
    """
    (마스터 시드, 성분 번호, 용도) 에만 의존하는 64비트 시드.
    성분이 늘어나도 앞 성분의 시드는 바뀌지 않는다.
    """
    seq = np.random.SeedSequence(entropy=int(master_seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=(component_id, stream))
    return int(seq.generate_state(1, dtype=np.uint64)[0])
