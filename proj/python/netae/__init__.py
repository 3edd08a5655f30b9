"""LSTM-autoencoder anomaly detection for NSL-KDD traffic.

Thin wrapper over the compiled extension; the heavy lifting is C++.
"""

from netae._core import (  # noqa: F401
    AttackClassMap,
    DataError,
    EncodedSample,
    ErrorRecord,
    FeatureSchema,
    ModelParams,
    ModelShape,
    NaiveBayesModel,
    NumericError,
    RawRecord,
    TrafficClass,
    TrainConfig,
    andrews_samples,
    andrews_value,
    auc,
    build_schema,
    class_key,
    classify,
    default_grid,
    detection_rates,
    encode,
    encode_all,
    evaluate,
    forward,
    init_params,
    is_attack,
    load_model,
    load_schema,
    nb_predict,
    nb_train,
    parse_nslkdd,
    reconstruction_error,
    roc_curve,
    save_model,
    save_schema,
    schema_checksum,
    score_all,
    select_threshold,
    train,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
