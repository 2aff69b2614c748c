"""Interactive PCA partitioning workbench for expression data.

Core pipeline: load an expression matrix, iteratively split working subsets
with divider lines drawn in PCA projections, and read each partition back as
an explicit feature-importance rule with cluster heatmaps and survival curves.
"""

from .data import (
    ClinicalRecord,
    ClinicalTable,
    DatasetSummary,
    ExpressionMatrix,
    load_clinical,
    load_expression,
    parse_clinical,
    parse_expression,
    summarize,
    write_expression,
    zscore_normalize,
)
from .partition import (
    DividerLine,
    ImportantFeatureReport,
    PartitionNode,
    PartitionTree,
    SplitRule,
    create_root,
    export_model,
    important_features,
    import_model,
    tree_to_document,
)
from .pca import Loadings, PcaBasis, Projection2D, fit_pca, loadings, project
from .survival import BASELINE, SurvivalCurve, curves_for_clusters, kaplan_meier
from .viewmodel import (
    BinnedHeatmap,
    HeatmapLayout,
    HierarchyLayout,
    binned_heatmap,
    compare_labelings,
    heatmap_overview,
    hierarchy_layout,
    overlay_labels,
    point_colors,
)

__version__ = "0.1.0"
