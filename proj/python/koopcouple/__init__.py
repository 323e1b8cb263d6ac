"""Koopman matrices for coupled polynomial systems: subsystem-equation seeds,
online and batch EDMD, spectral prediction."""

from ._core import (
    BatchEdmdResult,
    DefectiveDecomposition,
    Dictionary,
    ExperimentConfig,
    GeneratorMatrix,
    KoopmanModel,
    OnlineEdmd,
    PolynomialVectorField,
    Predictor,
    SpectralDecomposition,
    assemble_global,
    batch_edmd,
    build_generator,
    decompose,
    derive_seed,
    generate_dataset,
    load_config,
    local_koopman,
    parse_config,
    predict_n,
    predict_n_power,
    predict_one,
    relative_l2,
    simulate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
