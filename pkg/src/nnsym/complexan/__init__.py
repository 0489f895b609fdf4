from .poles import (LineSpec, PointCloud, SingleLayerPoles, poles_in_window, single_layer_pole_check,
                    single_layer_terms)
from .cluster import ClusterDepth, cluster_depth_eps, cluster_level, default_schedule, depth_at
from .density import arithmetic_points, density_along, density_trend, rational_ratio
from .partition import AlignmentPartition, alignment_partition
from .scan import DepthScan, ScanConfig, empirical_cluster_vs_depth, scan_singularities
