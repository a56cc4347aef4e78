from .exceptions import (
    ZeroReference,
    IOFailure,
)
from .recovery import (
    RecoveredFields,
    recover_phase_fields,
)
from .averages import (
    TABLE_COMPONENTS,
    PhaseAverages,
    phase_averages,
    error_norm,
    table_components,
    from_table_components,
    derived_fields,
)
from .tractions import (
    PushForward,
    InterfaceSample,
    nanson_ratio,
    interface_tractions,
)
from .export import (
    TRACTION_COLUMNS,
    CELL_COLUMNS,
    BENCH_COLUMNS,
    traction_table,
    cell_table,
    store_table,
    load_table,
    field_slice,
    store_slice,
    load_slice,
    store_field,
    load_field,
    store_result_bundle,
    load_result_bundle,
    BenchRow,
    compare_rows,
    bench_table,
    store_bench_table,
)


__all__ = (
    "ZeroReference",
    "IOFailure",

    "RecoveredFields",
    "recover_phase_fields",

    "TABLE_COMPONENTS",
    "PhaseAverages",
    "phase_averages",
    "error_norm",
    "table_components",
    "from_table_components",
    "derived_fields",

    "PushForward",
    "InterfaceSample",
    "nanson_ratio",
    "interface_tractions",

    "TRACTION_COLUMNS",
    "CELL_COLUMNS",
    "BENCH_COLUMNS",
    "traction_table",
    "cell_table",
    "store_table",
    "load_table",
    "field_slice",
    "store_slice",
    "load_slice",
    "store_field",
    "load_field",
    "store_result_bundle",
    "load_result_bundle",
    "BenchRow",
    "compare_rows",
    "bench_table",
    "store_bench_table",
)
