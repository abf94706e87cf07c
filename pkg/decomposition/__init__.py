# decomposition 패키지: EMD 및 MIXn 재조합
from .emd import (
    FrequencyParts,
    ImfSet,
    MixScheme,
    SiftConfig,
    SiftOutcome,
    decompose,
    extract_imf,
    recombine,
    sift_once,
    sift_to_imf,
)
from .envelope import (
    BoundaryPolicy,
    ExtremaSet,
    count_zero_crossings,
    find_extrema,
    imf_condition_holds,
    spline_envelope,
)
