//! Bisecting k-medoids over one-dimensional productivity values.
//!
//! Starting from the whole dataset, each cluster of the current level is split
//! in two by 2-medoids. The split is kept when the larger child variance is
//! below `improvement_ratio` times the parent variance and both children are
//! at least `min_leaf` rows; otherwise the cluster becomes a leaf. Leaves are
//! the productivity labels, named and ordered by their medoid value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterConfig {
    /// Smallest permitted child size. Clusters with fewer than
    /// `2 * min_leaf` members are never split.
    pub min_leaf: usize,
    /// Split accepted iff `max(child variance) < improvement_ratio * parent variance`.
    pub improvement_ratio: f64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            min_leaf: 2,
            improvement_ratio: 1.0,
        }
    }
}

impl ClusterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_leaf == 0 {
            return Err(Error::Config("cluster.min_leaf must be at least 1".into()));
        }
        if !(self.improvement_ratio > 0.0 && self.improvement_ratio.is_finite()) {
            return Err(Error::Config(
                "cluster.improvement_ratio must be positive and finite".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    /// Row indices into the clustered value slice, ascending.
    pub members: Vec<usize>,
    pub medoid: usize,
    pub variance: f64,
}

impl Cluster {
    fn from_members(values: &[f64], mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        let medoid = medoid_of(values, &members)?;
        let member_values: Vec<f64> = members.iter().map(|&i| values[i]).collect();
        let variance = cluster_variance(&member_values, values[medoid])?;
        Ok(Self {
            members,
            medoid,
            variance,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterNode {
    pub cluster: Cluster,
    /// Node indices of the two children, if this cluster was split.
    pub children: Option<[usize; 2]>,
}

/// Binary tree of clusters stored as an arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterTree {
    pub nodes: Vec<ClusterNode>,
    /// Node indices of the final clusters, in the order they were finalized.
    pub leaves: Vec<usize>,
}

impl ClusterTree {
    pub fn root(&self) -> &Cluster {
        &self.nodes[0].cluster
    }

    pub fn leaf_clusters(&self) -> impl Iterator<Item = &Cluster> {
        self.leaves.iter().map(|&i| &self.nodes[i].cluster)
    }

    /// Retained splits as `(parent, first child, second child)`.
    pub fn splits(&self) -> impl Iterator<Item = (&Cluster, &Cluster, &Cluster)> {
        self.nodes.iter().filter_map(|n| {
            n.children
                .map(|[a, b]| (&n.cluster, &self.nodes[a].cluster, &self.nodes[b].cluster))
        })
    }
}

/// Mean squared distance of the members to the medoid value.
pub fn cluster_variance(values: &[f64], medoid: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty("cluster"));
    }
    let sum: f64 = values.iter().map(|v| (v - medoid) * (v - medoid)).sum();
    Ok(sum / values.len() as f64)
}

fn total_distance(values: &[f64], members: &[usize], center: f64) -> f64 {
    members.iter().map(|&j| (values[j] - center).abs()).sum()
}

/// Member minimizing the summed absolute distance to all members; ties go to
/// the lowest row index.
pub fn medoid_of(values: &[f64], members: &[usize]) -> Result<usize> {
    let mut best: Option<(f64, usize)> = None;
    for &candidate in members {
        let cost = total_distance(values, members, values[candidate]);
        best = match best {
            Some((c, i)) if c < cost || (c == cost && i < candidate) => Some((c, i)),
            _ => Some((cost, candidate)),
        };
    }
    best.map(|(_, i)| i).ok_or(Error::Empty("cluster"))
}

/// Split `members` (row indices into `values`) into two clusters with the
/// smallest total distance to their medoids.
///
/// In one dimension an optimal 2-medoid partition is a cut of the sorted
/// values, so every cut is scored with prefix sums. Members are ordered by
/// value then row index, and among equally good cuts the leftmost wins.
pub fn kmedoids_split(values: &[f64], members: &[usize]) -> Result<(Cluster, Cluster)> {
    if members.len() < 2 {
        return Err(Error::TooFew {
            what: "members to split a cluster",
            needed: 2,
            got: members.len(),
        });
    }
    if let Some(&j) = members.iter().find(|&&j| j >= values.len()) {
        return Err(Error::invalid(format!("member index {j} out of range")));
    }
    let mut order = members.to_vec();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&j| values[j]).collect();
    let mut prefix = vec![0.0; sorted.len() + 1];
    for (i, v) in sorted.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v;
    }
    // Summed distance of sorted[lo..hi] to its lower median.
    let segment_cost = |lo: usize, hi: usize| {
        let mid = lo + (hi - lo - 1) / 2;
        let m = sorted[mid];
        let below = m * (mid - lo) as f64 - (prefix[mid] - prefix[lo]);
        let above = (prefix[hi] - prefix[mid + 1]) - m * (hi - mid - 1) as f64;
        below + above
    };

    let mut best_cut = 1;
    let mut best_cost = f64::INFINITY;
    for cut in 1..sorted.len() {
        let cost = segment_cost(0, cut) + segment_cost(cut, sorted.len());
        if cost < best_cost {
            best_cost = cost;
            best_cut = cut;
        }
    }
    Ok((
        Cluster::from_members(values, order[..best_cut].to_vec())?,
        Cluster::from_members(values, order[best_cut..].to_vec())?,
    ))
}

/// Build the cluster tree over all rows of `values`, level by level.
pub fn bisect(values: &[f64], config: &ClusterConfig) -> Result<ClusterTree> {
    config.validate()?;
    if values.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("clustered values must be finite"));
    }
    let root = Cluster::from_members(values, (0..values.len()).collect())?;
    let mut tree = ClusterTree {
        nodes: vec![ClusterNode {
            cluster: root,
            children: None,
        }],
        leaves: Vec::new(),
    };
    let split_threshold = (2 * config.min_leaf).max(2);

    let mut level = vec![0usize];
    while !level.is_empty() {
        let mut next = Vec::new();
        for node in level {
            let parent = &tree.nodes[node].cluster;
            let mut accepted = None;
            if parent.len() >= split_threshold {
                let (a, b) = kmedoids_split(values, &parent.members)?;
                let sizes_ok = a.len() >= config.min_leaf && b.len() >= config.min_leaf;
                let homogeneous =
                    a.variance.max(b.variance) < config.improvement_ratio * parent.variance;
                if sizes_ok && homogeneous {
                    accepted = Some((a, b));
                }
            }
            match accepted {
                Some((a, b)) => {
                    let ia = tree.nodes.len();
                    tree.nodes.push(ClusterNode {
                        cluster: a,
                        children: None,
                    });
                    tree.nodes.push(ClusterNode {
                        cluster: b,
                        children: None,
                    });
                    tree.nodes[node].children = Some([ia, ia + 1]);
                    next.push(ia);
                    next.push(ia + 1);
                }
                None => tree.leaves.push(node),
            }
        }
        level = next;
    }
    Ok(tree)
}

/// A discovered productivity class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductivityLabel {
    pub id: usize,
    pub name: String,
    pub medoid_productivity: f64,
    /// Position of the source cluster in `ClusterTree::leaves`.
    pub leaf: usize,
}

const VOCABULARY: [&str; 5] = ["very high", "high", "fair", "low", "very low"];

/// Linguistic name for rank `rank` among `count` labels ordered by ascending
/// hours per UCP. A lone label is "fair"; windows grow outward from "fair"
/// until they start at "very high", after which extra ranks become
/// `extra-low-1`, `extra-low-2`, ...
pub fn label_name(rank: usize, count: usize) -> String {
    let start = 2usize.saturating_sub(count.saturating_sub(1) / 2);
    let pos = start + rank;
    match VOCABULARY.get(pos) {
        Some(name) => (*name).to_string(),
        None => format!("extra-low-{}", pos + 1 - VOCABULARY.len()),
    }
}

/// One label per leaf, ids contiguous from 0 in ascending medoid order.
pub fn make_labels(tree: &ClusterTree, values: &[f64]) -> Vec<ProductivityLabel> {
    let mut leaves: Vec<(usize, f64)> = tree
        .leaf_clusters()
        .enumerate()
        .map(|(pos, c)| (pos, values[c.medoid]))
        .collect();
    leaves.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let count = leaves.len();
    leaves
        .into_iter()
        .enumerate()
        .map(|(id, (leaf, medoid))| ProductivityLabel {
            id,
            name: label_name(id, count),
            medoid_productivity: medoid,
            leaf,
        })
        .collect()
}

/// Label id of every row of the clustered dataset.
pub fn row_labels(tree: &ClusterTree, labels: &[ProductivityLabel]) -> Vec<usize> {
    let n = tree.root().len();
    let mut out = vec![usize::MAX; n];
    for label in labels {
        let leaf = &tree.nodes[tree.leaves[label.leaf]].cluster;
        for &row in &leaf.members {
            out[row] = label.id;
        }
    }
    out
}
