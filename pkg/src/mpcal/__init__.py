"""mpcal: multiport VNA calibration for switched-antenna imaging arrays.

Calibrates reflection and transmission measurements of an N-port antenna
array from one-port electronic-standard data at a single reference port,
phantom-based calibration transfer to the remaining ports, and reciprocity
("unknown thru") transmission solves for every measured port pair.  Ships a
synthetic campaign simulator for end-to-end validation, Touchstone v1 I/O,
calibration-set persistence, and the ``mpcal`` command line tool.
"""

from .errors import (
    ChecksumMismatch,
    ConfigInvalid,
    CountMismatch,
    DegenerateStandards,
    FormatVersionMismatch,
    GridMismatch,
    IncompleteDataset,
    InsufficientSignal,
    MissingPair,
    ModelPole,
    MpcalError,
    NonMonotonicFrequency,
    PhaseTrackingAmbiguous,
    ReferenceImpedanceMismatch,
    SingularReduction,
    SingularT,
    StandardSeparationWarning,
    TouchstoneSyntaxError,
    UnsupportedParameter,
    ZeroTracking,
    ZeroTransmission,
)
from .errormodel import (
    ErrorBox3,
    PairTracking,
    box_to_two_port,
    correct_reflection,
    correct_two_port,
    embed_reflection,
    identity_box,
    shift_reference_plane,
    solve_three_standards,
)
from .calibration import (
    DEFAULT_SIGNAL_FLOOR_DB,
    PHASE_AMBIG_DEG,
    SEPARATION_ERROR,
    SEPARATION_WARN,
    CalibrationSet,
    ECalCharacterization,
    PhantomMeasurementSet,
    ThruPhaseEstimate,
    apply_calibration,
    build_calibration,
    calibrate_reference_port,
    load_calibration,
    min_pairwise_separation,
    save_calibration,
    solve_unknown_thru,
    transfer_calibration,
)
from .dataset import (
    DatasetBundle,
    read_dataset,
    read_truth,
    simulate_measurements,
    write_dataset,
)
from .kernels import active_backend, set_backend
from .simulator import (
    AdapterBounds,
    AntennaModel,
    Campaign,
    GroundTruth,
    PermittivityModel,
    SystemConfig,
    phantom_gamma,
    synth_campaign,
    synth_ecal,
    synth_error_adapters,
    synth_true_network,
)
from .touchstone import (
    TouchstoneOptions,
    parse_touchstone,
    ports_from_path,
    read_touchstone_file,
    write_touchstone,
    write_touchstone_file,
)
from .net import (
    FrequencyGrid,
    NPortNetwork,
    TwoPortT,
    cascade,
    flip_two_port,
    identity_t,
    input_reflection,
    make_two_port,
    reciprocity_deviation,
    reduce_ports,
    s_to_t,
    t_to_s,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "active_backend",
    "set_backend",
    "FrequencyGrid",
    "NPortNetwork",
    "TwoPortT",
    "cascade",
    "flip_two_port",
    "identity_t",
    "input_reflection",
    "make_two_port",
    "reciprocity_deviation",
    "reduce_ports",
    "s_to_t",
    "t_to_s",
    "ErrorBox3",
    "PairTracking",
    "box_to_two_port",
    "correct_reflection",
    "correct_two_port",
    "embed_reflection",
    "identity_box",
    "shift_reference_plane",
    "solve_three_standards",
    "TouchstoneOptions",
    "parse_touchstone",
    "ports_from_path",
    "read_touchstone_file",
    "write_touchstone",
    "write_touchstone_file",
    "DEFAULT_SIGNAL_FLOOR_DB",
    "PHASE_AMBIG_DEG",
    "SEPARATION_ERROR",
    "SEPARATION_WARN",
    "CalibrationSet",
    "ECalCharacterization",
    "PhantomMeasurementSet",
    "ThruPhaseEstimate",
    "apply_calibration",
    "build_calibration",
    "calibrate_reference_port",
    "load_calibration",
    "min_pairwise_separation",
    "save_calibration",
    "solve_unknown_thru",
    "transfer_calibration",
    "AdapterBounds",
    "AntennaModel",
    "Campaign",
    "GroundTruth",
    "PermittivityModel",
    "SystemConfig",
    "phantom_gamma",
    "synth_campaign",
    "synth_ecal",
    "synth_error_adapters",
    "synth_true_network",
    "DatasetBundle",
    "read_dataset",
    "read_truth",
    "simulate_measurements",
    "write_dataset",
    "MpcalError",
    "GridMismatch",
    "ReferenceImpedanceMismatch",
    "ZeroTransmission",
    "SingularT",
    "SingularReduction",
    "TouchstoneSyntaxError",
    "UnsupportedParameter",
    "NonMonotonicFrequency",
    "CountMismatch",
    "ModelPole",
    "DegenerateStandards",
    "ZeroTracking",
    "InsufficientSignal",
    "PhaseTrackingAmbiguous",
    "MissingPair",
    "IncompleteDataset",
    "FormatVersionMismatch",
    "ChecksumMismatch",
    "ConfigInvalid",
    "StandardSeparationWarning",
]
