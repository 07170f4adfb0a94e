//! Perceptual hierarchy: blocks of subgroups, containers and loose widgets.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detect::class_from_name;
use crate::error::FormatError;
use crate::geometry::{BBox, Widget, WidgetClass, WidgetId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Vertical,
    Horizontal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockSource {
    Container,
    PairedClusters,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Leaf(Widget),
    /// A container frame with its contents, or a block of subgroups.
    Block {
        container: Option<Widget>,
        orientation: Option<Orientation>,
        children: Vec<Node>,
    },
    /// One repeated item of a block.
    Group(Vec<Node>),
}

impl Node {
    pub fn block(orientation: Option<Orientation>, children: Vec<Node>) -> Node {
        Node::Block {
            container: None,
            orientation,
            children,
        }
    }

    pub fn container(frame: Widget, children: Vec<Node>) -> Node {
        Node::Block {
            container: Some(frame),
            orientation: None,
            children,
        }
    }

    pub fn source(&self) -> Option<BlockSource> {
        match self {
            Node::Block { container: Some(_), .. } => Some(BlockSource::Container),
            Node::Block { .. } => Some(BlockSource::PairedClusters),
            _ => None,
        }
    }

    pub fn bbox(&self) -> Option<BBox> {
        match self {
            Node::Leaf(w) => Some(w.bbox),
            Node::Block {
                container: Some(w), ..
            } => Some(w.bbox),
            Node::Block { children, .. } | Node::Group(children) => {
                let boxes: Vec<BBox> = children.iter().filter_map(Node::bbox).collect();
                BBox::hull(&boxes)
            }
        }
    }

    pub fn children(&self) -> &[Node] {
        match self {
            Node::Leaf(_) => &[],
            Node::Block { children, .. } | Node::Group(children) => children,
        }
    }

    /// Leaf widgets and container frames, depth-first.
    pub fn widgets(&self) -> Vec<&Widget> {
        let mut out = Vec::new();
        self.collect_widgets(&mut out);
        out
    }

    fn collect_widgets<'a>(&'a self, out: &mut Vec<&'a Widget>) {
        match self {
            Node::Leaf(w) => out.push(w),
            Node::Block { container, children, .. } => {
                out.extend(container.iter());
                children.iter().for_each(|c| c.collect_widgets(out));
            }
            Node::Group(children) => children.iter().for_each(|c| c.collect_widgets(out)),
        }
    }

    fn sort(&mut self) {
        if let Node::Block { children, .. } | Node::Group(children) = self {
            children.iter_mut().for_each(Node::sort);
            sort_nodes(children);
        }
    }

    /// Rebuilds container flags and child lists from the tree shape.
    fn sync_containers(&mut self) {
        match self {
            Node::Leaf(w) => {
                w.is_container = false;
                w.children.clear();
            }
            Node::Block {
                container, children, ..
            } => {
                children.iter_mut().for_each(Node::sync_containers);
                if let Some(frame) = container {
                    let mut ids = Vec::new();
                    children.iter().for_each(|c| c.immediate_ids(&mut ids));
                    frame.is_container = true;
                    frame.children = ids;
                }
            }
            Node::Group(children) => children.iter_mut().for_each(Node::sync_containers),
        }
    }

    /// Ids of widgets whose nearest enclosing container is outside `self`.
    fn immediate_ids(&self, out: &mut Vec<WidgetId>) {
        match self {
            Node::Leaf(w) => out.push(w.id),
            Node::Block {
                container: Some(w), ..
            } => out.push(w.id),
            Node::Block { children, .. } | Node::Group(children) => children.iter().for_each(|c| c.immediate_ids(out)),
        }
    }
}

/// Reading order: boxes are cut into rows (a box joins the current row when
/// it overlaps the row's first box vertically by at least half the shorter
/// height), rows run top-to-bottom and boxes in a row left-to-right.
pub fn reading_order(boxes: &[BBox]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..boxes.len()).collect();
    idx.sort_by_key(|&i| (boxes[i].top(), boxes[i].left(), i));
    let mut rows: Vec<Vec<usize>> = Vec::new();
    for i in idx {
        let joins = rows.last().is_some_and(|row| {
            let (a, b) = (&boxes[row[0]], &boxes[i]);
            let overlap = a.bottom().min(b.bottom()).saturating_sub(a.top().max(b.top()));
            2 * overlap >= a.height().min(b.height())
        });
        if joins {
            rows.last_mut().expect("joins implies a row").push(i);
        } else {
            rows.push(vec![i]);
        }
    }
    rows.into_iter()
        .flat_map(|mut row| {
            row.sort_by_key(|&i| (boxes[i].left(), boxes[i].top(), i));
            row
        })
        .collect()
}

fn sort_nodes(nodes: &mut Vec<Node>) {
    let boxes: Vec<BBox> = nodes
        .iter()
        .map(|n| n.bbox().unwrap_or_else(|| BBox::new(0, 0, 1, 1).expect("unit box")))
        .collect();
    let order = reading_order(&boxes);
    let mut taken: Vec<Option<Node>> = std::mem::take(nodes).into_iter().map(Some).collect();
    *nodes = order.into_iter().map(|i| taken[i].take().expect("permutation")).collect();
}

/// A perceptual hierarchy for one GUI.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Hierarchy {
    pub width: Option<u32>,
    pub height: Option<u32>,
    pub children: Vec<Node>,
}

impl Hierarchy {
    /// Sorts siblings into reading order and makes container widgets agree
    /// with the tree. Empty groups and blocks are removed.
    pub fn new(width: Option<u32>, height: Option<u32>, children: Vec<Node>) -> Self {
        let mut h = Hierarchy {
            width,
            height,
            children: prune(children),
        };
        h.normalize();
        h
    }

    fn normalize(&mut self) {
        self.children.iter_mut().for_each(|n| {
            n.sort();
            n.sync_containers();
        });
        sort_nodes(&mut self.children);
    }

    pub fn widgets(&self) -> Vec<&Widget> {
        self.children.iter().flat_map(Node::widgets).collect()
    }

    /// Every block node, containers included, depth-first.
    pub fn blocks(&self) -> Vec<&Node> {
        fn walk<'a>(n: &'a Node, out: &mut Vec<&'a Node>) {
            if matches!(n, Node::Block { .. }) {
                out.push(n);
            }
            n.children().iter().for_each(|c| walk(c, out));
        }
        let mut out = Vec::new();
        self.children.iter().for_each(|n| walk(n, &mut out));
        out
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&HierarchyDoc::from(self)).expect("hierarchy serializes")
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self, FormatError> {
        let doc: HierarchyDoc = serde_json::from_str(text).map_err(|source| FormatError::Json {
            path: path.to_owned(),
            source,
        })?;
        doc.into_hierarchy()
    }

    pub fn load(path: &Path) -> Result<Self, FormatError> {
        let text = std::fs::read_to_string(path).map_err(|source| FormatError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text, path)
    }
}

fn prune(nodes: Vec<Node>) -> Vec<Node> {
    nodes
        .into_iter()
        .filter_map(|n| match n {
            Node::Leaf(_) => Some(n),
            Node::Group(children) => {
                let children = prune(children);
                (!children.is_empty()).then_some(Node::Group(children))
            }
            Node::Block {
                container,
                orientation,
                children,
            } => {
                let children = prune(children);
                match container {
                    Some(frame) if children.is_empty() => Some(Node::Leaf(frame)),
                    None if children.is_empty() => None,
                    container => Some(Node::Block {
                        container,
                        orientation,
                        children,
                    }),
                }
            }
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HierarchyDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    width: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    height: Option<u32>,
    children: Vec<NodeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bbox: Option<BBox>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    container: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    orientation: Option<Orientation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<WidgetId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    content: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    children: Vec<NodeDoc>,
}

impl From<&Hierarchy> for HierarchyDoc {
    fn from(h: &Hierarchy) -> Self {
        HierarchyDoc {
            width: h.width,
            height: h.height,
            children: h.children.iter().map(NodeDoc::from).collect(),
        }
    }
}

impl From<&Node> for NodeDoc {
    fn from(n: &Node) -> Self {
        let base = |kind: &str| NodeDoc {
            kind: kind.into(),
            bbox: n.bbox(),
            container: false,
            orientation: None,
            id: None,
            content: None,
            children: n.children().iter().map(NodeDoc::from).collect(),
        };
        match n {
            Node::Leaf(w) => NodeDoc {
                id: Some(w.id),
                content: w.text_content().filter(|s| !s.is_empty()).map(str::to_owned),
                ..base(if w.is_text() { "text" } else { "nontext" })
            },
            Node::Block {
                container,
                orientation,
                ..
            } => NodeDoc {
                container: container.is_some(),
                id: container.as_ref().map(|w| w.id),
                orientation: *orientation,
                ..base("block")
            },
            Node::Group(_) => base("group"),
        }
    }
}

impl HierarchyDoc {
    fn into_hierarchy(self) -> Result<Hierarchy, FormatError> {
        let mut ids = IdAllocator::new(&self.children);
        let children = self
            .children
            .into_iter()
            .map(|n| n.into_node(&mut ids))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Hierarchy::new(self.width, self.height, children))
    }
}

/// Hands out ids to records without one, skipping ids used in the file.
struct IdAllocator {
    used: HashSet<WidgetId>,
    next: u32,
}

impl IdAllocator {
    fn new(roots: &[NodeDoc]) -> Self {
        fn walk(n: &NodeDoc, used: &mut HashSet<WidgetId>) {
            used.extend(n.id);
            n.children.iter().for_each(|c| walk(c, used));
        }
        let mut used = HashSet::new();
        roots.iter().for_each(|n| walk(n, &mut used));
        IdAllocator { used, next: 0 }
    }

    fn take(&mut self, given: Option<WidgetId>) -> WidgetId {
        if let Some(id) = given {
            return id;
        }
        while self.used.contains(&WidgetId(self.next)) {
            self.next += 1;
        }
        self.used.insert(WidgetId(self.next));
        WidgetId(self.next)
    }
}

impl NodeDoc {
    fn into_node(self, ids: &mut IdAllocator) -> Result<Node, FormatError> {
        let need_bbox = |b: Option<BBox>, what: &str| {
            b.ok_or_else(|| FormatError::Hierarchy(format!("{what} node without bbox")))
        };
        let children = |docs: Vec<NodeDoc>, ids: &mut IdAllocator| {
            docs.into_iter().map(|c| c.into_node(ids)).collect::<Result<Vec<_>, _>>()
        };
        match self.kind.as_str() {
            "block" => {
                let container = if self.container {
                    let frame = Widget::non_text(ids.take(self.id), need_bbox(self.bbox, "container")?);
                    Some(frame)
                } else {
                    None
                };
                Ok(Node::Block {
                    container,
                    orientation: self.orientation,
                    children: children(self.children, ids)?,
                })
            }
            "group" => Ok(Node::Group(children(self.children, ids)?)),
            other => {
                if !self.children.is_empty() {
                    return Err(FormatError::Hierarchy(format!("leaf '{other}' has children")));
                }
                let bbox = need_bbox(self.bbox, other)?;
                let id = ids.take(self.id);
                Ok(Node::Leaf(match class_from_name(other) {
                    WidgetClass::Text => Widget::text(id, bbox, self.content.unwrap_or_default()),
                    WidgetClass::NonText => Widget::non_text(id, bbox),
                }))
            }
        }
    }
}
