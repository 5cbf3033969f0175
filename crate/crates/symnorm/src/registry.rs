//! The 57 object categories, their two induction splits and shape groups.

use crate::error::{Error, Result};

/// First induction split (28 categories).
pub const SPLIT_A: [&str; 28] = [
    "airplane",
    "bathtub",
    "bed",
    "bicycle",
    "bookshelf",
    "bottle",
    "bowl",
    "bus",
    "can",
    "clock",
    "computer keyboard",
    "dishwasher",
    "file",
    "loudspeaker",
    "mailbox",
    "microphone",
    "microwave",
    "mug",
    "piano",
    "pillow",
    "pistol",
    "pot",
    "printer",
    "skateboard",
    "stove",
    "table",
    "telephone",
    "train",
];

/// Second induction split (29 categories).
pub const SPLIT_B: [&str; 29] = [
    "ashcan",
    "bag",
    "basket",
    "bench",
    "birdhouse",
    "boat",
    "cabinet",
    "camera",
    "cap",
    "car",
    "cellular telephone",
    "chair",
    "display",
    "earphone",
    "faucet",
    "guitar",
    "helmet",
    "jar",
    "knife",
    "lamp",
    "laptop",
    "motorcycle",
    "remote control",
    "rifle",
    "rocket",
    "sofa",
    "tower",
    "vessel",
    "washer",
];

/// Coarse shape of a category's typical bounding convex set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShapeGroup {
    /// Round or cylindrical.
    Circular,
    /// Long and thin.
    Elongated,
    /// Flat.
    Planar,
    /// Box-like.
    Cuboidal,
    /// Everything else.
    Misc,
}

impl ShapeGroup {
    /// Lowercase name.
    pub fn name(self) -> &'static str {
        match self {
            ShapeGroup::Circular => "circular",
            ShapeGroup::Elongated => "elongated",
            ShapeGroup::Planar => "planar",
            ShapeGroup::Cuboidal => "cuboidal",
            ShapeGroup::Misc => "misc",
        }
    }
}

const GROUPS: [(ShapeGroup, &[&str]); 5] = [
    (
        ShapeGroup::Circular,
        &[
            "ashcan", "basket", "bottle", "bowl", "can", "cap", "clock", "helmet", "jar", "lamp", "microphone", "mug",
            "pot", "rocket", "tower", "washer",
        ],
    ),
    (ShapeGroup::Elongated, &["computer keyboard", "knife", "piano", "rifle", "skateboard", "train"]),
    (
        ShapeGroup::Planar,
        &[
            "airplane",
            "bag",
            "bench",
            "bicycle",
            "bookshelf",
            "cellular telephone",
            "display",
            "file",
            "laptop",
            "motorcycle",
            "pistol",
            "remote control",
        ],
    ),
    (
        ShapeGroup::Cuboidal,
        &[
            "bathtub",
            "bed",
            "bus",
            "cabinet",
            "camera",
            "car",
            "chair",
            "dishwasher",
            "loudspeaker",
            "mailbox",
            "microwave",
            "pillow",
            "printer",
            "sofa",
            "stove",
            "table",
        ],
    ),
    (ShapeGroup::Misc, &["birdhouse", "boat", "earphone", "faucet", "guitar", "telephone", "vessel"]),
];

/// Which split's model evaluates a category in the induction setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InductionView {
    /// The category is in split B; use the model trained on split A.
    TrainOnA,
    /// The category is in split A; use the model trained on split B.
    TrainOnB,
}

/// Category names with their split and group memberships.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryRegistry {
    categories: Vec<String>,
    split_a: Vec<String>,
    split_b: Vec<String>,
    groups: Vec<(String, ShapeGroup)>,
}

impl Default for CategoryRegistry {
    fn default() -> Self {
        let split_a: Vec<String> = SPLIT_A.iter().map(|s| s.to_string()).collect();
        let split_b: Vec<String> = SPLIT_B.iter().map(|s| s.to_string()).collect();
        let mut categories: Vec<String> = split_a.iter().chain(&split_b).cloned().collect();
        categories.sort();
        let mut groups: Vec<(String, ShapeGroup)> = GROUPS
            .iter()
            .flat_map(|(g, names)| names.iter().map(move |n| (n.to_string(), *g)))
            .collect();
        groups.sort();
        CategoryRegistry { categories, split_a, split_b, groups }
    }
}

impl CategoryRegistry {
    /// All categories, sorted.
    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    /// Split A members.
    pub fn split_a(&self) -> &[String] {
        &self.split_a
    }

    /// Split B members.
    pub fn split_b(&self) -> &[String] {
        &self.split_b
    }

    /// Whether `category` is registered.
    pub fn contains(&self, category: &str) -> bool {
        self.categories.binary_search_by(|c| c.as_str().cmp(category)).is_ok()
    }

    /// Shape group of a category.
    pub fn group(&self, category: &str) -> Option<ShapeGroup> {
        self.groups.iter().find(|(c, _)| c == category).map(|(_, g)| *g)
    }

    /// The split not containing `category`.
    pub fn induction_view(&self, category: &str) -> Result<InductionView> {
        if self.split_a.iter().any(|c| c == category) {
            Ok(InductionView::TrainOnB)
        } else if self.split_b.iter().any(|c| c == category) {
            Ok(InductionView::TrainOnA)
        } else {
            Err(Error::Input(format!("unknown category `{category}`")))
        }
    }
}
