"""segshape: topological shape analysis of residential segregation data.

Pipeline: city bundles -> rasters -> level-set or cubical filtrations ->
persistence diagrams -> persistence images -> K-medoids clusters ->
segregation statistics and clustering agreement scores.
"""

from .geo import (RACES, CityDemographics, Raster, Tract, load_city_bundle,
                  rasterize_majority_mask, rasterize_percentage)
from .levelset import (NEVER, FilteredSimplicialComplex, FrontConfig,
                       InclusionTimeField, godunov_gradient_magnitude,
                       propagate_front, triangulate)
from .cubical import FilteredCubicalComplex, build_cubical_filtration
from .homology import (INFINITY, Barcode, PersistenceDiagram, cap_infinite,
                       compute_persistence, to_barcode)
from .pimage import (GROUPS, FeatureVector, PIConfig, PersistenceImage,
                     birth_persistence_transform, concatenate_features,
                     persistence_image)
from .cluster import Clustering, distortion_curve, kmedoids, medoid_images
from .segstats import (adjusted_rand_index, cluster_mean_stats,
                       dissimilarity_index, exposure_index, rand_index,
                       zscore_table)
from .pipeline import PipelineConfig, compare_clusterings, run_pipeline
from .render import render_svg

__version__ = "0.1.0"

__all__ = [
    "RACES", "CityDemographics", "Raster", "Tract", "load_city_bundle",
    "rasterize_majority_mask", "rasterize_percentage",
    "NEVER", "FilteredSimplicialComplex", "FrontConfig", "InclusionTimeField",
    "godunov_gradient_magnitude", "propagate_front", "triangulate",
    "FilteredCubicalComplex", "build_cubical_filtration",
    "INFINITY", "Barcode", "PersistenceDiagram", "cap_infinite",
    "compute_persistence", "to_barcode",
    "GROUPS", "FeatureVector", "PIConfig", "PersistenceImage",
    "birth_persistence_transform", "concatenate_features", "persistence_image",
    "Clustering", "distortion_curve", "kmedoids", "medoid_images",
    "adjusted_rand_index", "cluster_mean_stats", "dissimilarity_index",
    "exposure_index", "rand_index", "zscore_table",
    "PipelineConfig", "compare_clusterings", "run_pipeline",
    "render_svg",
]
