"""RFME customer segmentation: sessionization, RFME features, k-means and segment labels."""

from ._rfme import (
    KMeansModel,
    RfmeError,
    RfmeVector,
    Session,
    UserEvent,
    adjusted_rand_index,
    build_feature_matrix,
    cluster_purity,
    compute_monetary,
    elbow_curve,
    generate,
    kmeans_fit,
    kmeans_predict,
    label_clusters,
    load_event_log,
    parse_event_line,
    run_score,
    run_train,
    sessionize,
    write_event_log,
)

__all__ = [
    "KMeansModel",
    "RfmeError",
    "RfmeVector",
    "Session",
    "UserEvent",
    "adjusted_rand_index",
    "build_feature_matrix",
    "cluster_purity",
    "compute_monetary",
    "elbow_curve",
    "generate",
    "kmeans_fit",
    "kmeans_predict",
    "label_clusters",
    "load_event_log",
    "parse_event_line",
    "run_score",
    "run_train",
    "sessionize",
    "write_event_log",
]
