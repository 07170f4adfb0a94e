//! Perceptual grouping: attribute clustering, conflict resolution,
//! proximity pairing and continuity corrections.

mod build;
mod cluster;
mod config;
mod conflict;
mod correct;
mod dbscan;
mod pairing;

use image::RgbaImage;

pub use build::{build_hierarchy, group_blocks, group_level, parent_map};
pub use cluster::{
    cluster_nontext, cluster_text, median, split_sparse, widget_map, Attribute, Cluster, ClusterSet, WidgetMap,
};
pub use config::GroupingConfig;
pub use conflict::{conflict_score, resolve_conflicts, ConflictScore, PositionalGroup};
pub use correct::{correct_misclassified, correct_missed};
pub use dbscan::{dbscan_1d, Dbscan};
pub use pairing::{pair_groups, pair_subgroups, Block};

use crate::detect::DetectorConfig;
use crate::geometry::{Widget, WidgetId};
use crate::hierarchy::Hierarchy;

/// Everything the grouping stage produced for one GUI.
#[derive(Clone, Debug)]
pub struct GroupingOutcome {
    pub hierarchy: Hierarchy,
    pub widgets: Vec<Widget>,
    pub blocks: Vec<Block>,
    pub recovered: Vec<WidgetId>,
    pub reclassified: Vec<WidgetId>,
}

/// Groups widgets into a hierarchy. With an image, missed widgets are
/// re-detected first; misclassified widgets are always corrected. Each
/// correction runs once; if either changed anything the widgets are
/// grouped again so the blocks reflect the corrected set.
pub fn perceptual_grouping(
    mut widgets: Vec<Widget>,
    image: Option<&RgbaImage>,
    size: (u32, u32),
    det_cfg: &DetectorConfig,
    grp_cfg: &GroupingConfig,
) -> GroupingOutcome {
    let mut blocks = group_blocks(&widgets, grp_cfg, size.0);
    let recovered = match image {
        Some(img) => correct_missed(&mut blocks, &mut widgets, img, det_cfg, grp_cfg),
        None => Vec::new(),
    };
    let reclassified = correct_misclassified(&blocks, &mut widgets);
    if !recovered.is_empty() || !reclassified.is_empty() {
        blocks = group_blocks(&widgets, grp_cfg, size.0);
    }
    let hierarchy = build_hierarchy(&blocks, &widgets, Some(size.0), Some(size.1));
    GroupingOutcome {
        hierarchy,
        widgets,
        blocks,
        recovered,
        reclassified,
    }
}
