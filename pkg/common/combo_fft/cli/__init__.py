from .exceptions import (
    ArgValueError,
    ConfigInvalid,
    UpstreamArtifactMissing,
    SolverFailed,
)
from .config import (
    NormalSettings,
    LoadingSettings,
    SliceSpec,
    PostSettings,
    BenchSettings,
    RunConfig,
    parse_override,
    apply_overrides,
    load_run_config,
    store_run_config,
)
from .console import (
    echo,
    echo_table,
)
from .commands import (
    cmd_generate,
    cmd_coarsen,
    cmd_normals,
    cmd_solve,
    cmd_post,
)
from .bench import (
    BENCH_SUITES,
    cmd_bench,
)
from .main import (
    build_parser,
    main,
)


__all__ = (
    "ArgValueError",
    "ConfigInvalid",
    "UpstreamArtifactMissing",
    "SolverFailed",

    "NormalSettings",
    "LoadingSettings",
    "SliceSpec",
    "PostSettings",
    "BenchSettings",
    "RunConfig",
    "parse_override",
    "apply_overrides",
    "load_run_config",
    "store_run_config",

    "echo",
    "echo_table",

    "cmd_generate",
    "cmd_coarsen",
    "cmd_normals",
    "cmd_solve",
    "cmd_post",

    "BENCH_SUITES",
    "cmd_bench",

    "build_parser",
    "main",
)
