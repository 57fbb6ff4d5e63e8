from suprec.signal.model import (
    assemble_signal,
    draw_matrix,
    draw_support,
    measure,
    measure_mmv,
    power_ratio,
    satisfies_power_constraint,
)
from suprec.signal.types import (
    MeasurementMatrix,
    MeasurementVector,
    SignalValues,
    SparseSignal,
    SupportIndices,
)
