"""Impact-echo defect detection with adaptive frequency thresholding."""

__version__ = "0.1.0"

from .adaptive import (FrequencyHistogram, FrequencyRange, RangePair, ThresholdConfig,
                       adaptive_threshold, bin_count, build_histogram, classify_ranges,
                       identify_ranges)
from .detect import BinaryMask, ClusterModel, binary_mask, cluster_map, kmeans_1d
from .dsp import Spectrum, dominant_frequency, normalize, spectrum
from .errors import ConfigError, DataError, IEError, MethodError
from .evaluate import (ConfusionCounts, MetricsReport, RocCurve, confusion, evaluate_slab,
                       metrics, roc_auc)
from .groundtruth import (DefectRect, DefectSpec, GroundTruthMask, align_masks, parse_defect_spec,
                          rasterize_gtm)
from .mapping import FrequencyGrid, global_frequency_grid, low_band_frequency_grid
from .slabdata import GridShape, SlabRecording, TimeSeries, load_slab, validate, write_slab
from .synth import CellRect, SynthConfig, generate_slab, snap_to_bin
