use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::dataset::{Cell, Dataset, Kind, Role};
use crate::error::{Error, Result};
use crate::stats::entropy;

/// Tolerance for gain and gain-ratio comparisons; differences below it are ties.
pub const GAIN_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub min_leaf: usize,
    /// Pessimistic pruning confidence in (0, 0.5]; `None` disables pruning.
    pub prune_confidence: Option<f64>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { min_leaf: 2, prune_confidence: Some(0.25) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        distribution: Vec<usize>,
        /// Argmax of the distribution, or the parent's class for an empty leaf.
        class: usize,
    },
    Numeric {
        attribute: usize,
        threshold: f64,
        distribution: Vec<usize>,
        majority_child: usize,
        /// `[<= threshold, > threshold]`
        children: Vec<Node>,
    },
    Categorical {
        attribute: usize,
        levels: Vec<String>,
        distribution: Vec<usize>,
        majority_child: usize,
        children: Vec<Node>,
    },
}

/// Lowest index among the maxima.
pub fn argmax(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

impl Node {
    pub fn distribution(&self) -> &[usize] {
        match self {
            Node::Leaf { distribution, .. }
            | Node::Numeric { distribution, .. }
            | Node::Categorical { distribution, .. } => distribution,
        }
    }

    pub fn class(&self) -> usize {
        match self {
            Node::Leaf { class, .. } => *class,
            n => argmax(n.distribution()),
        }
    }

    pub fn children(&self) -> &[Node] {
        match self {
            Node::Leaf { .. } => &[],
            Node::Numeric { children, .. } | Node::Categorical { children, .. } => children,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf { .. })
    }

    pub fn depth(&self) -> usize {
        self.children().iter().map(|c| c.depth() + 1).max().unwrap_or(0)
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Node::Leaf { .. } => 1,
            n => n.children().iter().map(Node::leaf_count).sum(),
        }
    }

    /// Split attribute of an internal node.
    pub fn attribute(&self) -> Option<usize> {
        match self {
            Node::Leaf { .. } => None,
            Node::Numeric { attribute, .. } | Node::Categorical { attribute, .. } => {
                Some(*attribute)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: Node,
    /// Attribute names of the training schema, in column order.
    pub schema: Vec<String>,
    pub class_count: usize,
    pub params: TreeParams,
    pub training_records: usize,
}

/// Columns the tree may split on: predictive features that are numeric,
/// dates, or categorical.
pub fn feature_columns(ds: &Dataset) -> Vec<usize> {
    ds.attributes
        .iter()
        .enumerate()
        .filter(|(_, a)| a.role == Role::Feature && a.kind != Kind::Text)
        .map(|(i, _)| i)
        .collect()
}

enum Column {
    Numeric(Vec<Option<f64>>),
    /// Level index per record; levels listed separately.
    Categorical(Vec<Option<usize>>, Vec<String>),
}

struct Grower<'a> {
    classes: &'a [usize],
    class_count: usize,
    min_leaf: usize,
    columns: Vec<(usize, Column)>,
}

#[derive(Clone, Debug)]
struct Candidate {
    slot: usize,
    gain: f64,
    ratio: f64,
    threshold: f64,
}

fn split_info(parts: &[usize], total: usize) -> f64 {
    let n = total as f64;
    parts
        .iter()
        .filter(|&&p| p > 0)
        .map(|&p| {
            let q = p as f64 / n;
            -q * q.log2()
        })
        .sum()
}

impl Grower<'_> {
    fn distribution(&self, rows: &[usize]) -> Vec<usize> {
        let mut d = vec![0; self.class_count];
        for &r in rows {
            d[self.classes[r]] += 1;
        }
        d
    }

    /// Information gain scaled by the known fraction, checking the
    /// entropy bookkeeping on the known subset.
    fn gain(&self, known: &[usize], branches: &[Vec<usize>], total: usize) -> Result<f64> {
        let nk = known.iter().sum::<usize>();
        let parent = entropy(known);
        let children: f64 = branches
            .iter()
            .map(|b| b.iter().sum::<usize>() as f64 / nk as f64 * entropy(b))
            .sum();
        let g = parent - children;
        if g < -1e-9 {
            return Err(Error::Invariant(format!(
                "negative information gain {g} (parent entropy {parent}, weighted children {children})"
            )));
        }
        Ok(nk as f64 / total as f64 * g.max(0.0))
    }

    fn best_numeric(
        &self,
        slot: usize,
        values: &[Option<f64>],
        rows: &[usize],
    ) -> Result<Option<Candidate>> {
        let mut known: Vec<(f64, usize)> = rows
            .iter()
            .filter_map(|&r| values[r].map(|v| (v, self.classes[r])))
            .collect();
        if known.len() < 2 * self.min_leaf.max(1) {
            return Ok(None);
        }
        known.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total = rows.len();
        let nk = known.len();
        let mut all = vec![0; self.class_count];
        for &(_, c) in &known {
            all[c] += 1;
        }
        let mut left = vec![0; self.class_count];
        let mut best: Option<(f64, usize)> = None;
        for i in 0..nk - 1 {
            left[known[i].1] += 1;
            if known[i].0 == known[i + 1].0 {
                continue;
            }
            let l = i + 1;
            if l < self.min_leaf || nk - l < self.min_leaf {
                continue;
            }
            let right: Vec<usize> = all.iter().zip(&left).map(|(a, b)| a - b).collect();
            let g = self.gain(&all, &[left.clone(), right], total)?;
            if best.is_none_or(|(bg, _)| g > bg + GAIN_EPS) {
                best = Some((g, i));
            }
        }
        let Some((gain, i)) = best else { return Ok(None) };
        let l = i + 1;
        let threshold = known[i].0 + (known[i + 1].0 - known[i].0) / 2.0;
        let info = split_info(&[l, nk - l, total - nk], total);
        Ok(Some(Candidate { slot, gain, ratio: gain / info, threshold }))
    }

    fn best_categorical(
        &self,
        slot: usize,
        values: &[Option<usize>],
        level_count: usize,
        rows: &[usize],
    ) -> Result<Option<Candidate>> {
        let mut branches = vec![vec![0; self.class_count]; level_count];
        let mut known = vec![0; self.class_count];
        let mut nk = 0;
        for &r in rows {
            if let Some(l) = values[r] {
                branches[l][self.classes[r]] += 1;
                known[self.classes[r]] += 1;
                nk += 1;
            }
        }
        let sizes: Vec<usize> = branches.iter().map(|b| b.iter().sum()).collect();
        let big = sizes.iter().filter(|&&s| s >= self.min_leaf.max(1)).count();
        if big < 2 {
            return Ok(None);
        }
        let total = rows.len();
        let gain = self.gain(&known, &branches, total)?;
        let mut parts = sizes;
        parts.push(total - nk);
        let info = split_info(&parts, total);
        Ok(Some(Candidate { slot, gain, ratio: gain / info, threshold: f64::NAN }))
    }

    fn grow(&self, rows: &[usize], used: &mut Vec<bool>, parent_class: usize) -> Result<Node> {
        let distribution = self.distribution(rows);
        if rows.is_empty() {
            return Ok(Node::Leaf { distribution, class: parent_class });
        }
        let class = argmax(&distribution);
        let pure = distribution.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || rows.len() < self.min_leaf {
            return Ok(Node::Leaf { distribution, class });
        }

        let mut candidates = Vec::new();
        for (slot, (_, col)) in self.columns.iter().enumerate() {
            let c = match col {
                Column::Numeric(v) => self.best_numeric(slot, v, rows)?,
                Column::Categorical(v, levels) if !used[slot] => {
                    self.best_categorical(slot, v, levels.len(), rows)?
                }
                Column::Categorical(..) => None,
            };
            if let Some(c) = c.filter(|c| c.gain > GAIN_EPS) {
                candidates.push(c);
            }
        }
        let Some(chosen) = choose(&candidates) else {
            return Ok(Node::Leaf { distribution, class });
        };

        let (attribute, col) = &self.columns[chosen.slot];
        let (mut parts, node_kind): (Vec<Vec<usize>>, _) = match col {
            Column::Numeric(v) => {
                let mut p = vec![Vec::new(), Vec::new()];
                let mut missing = Vec::new();
                for &r in rows {
                    match v[r] {
                        Some(x) if x <= chosen.threshold => p[0].push(r),
                        Some(_) => p[1].push(r),
                        None => missing.push(r),
                    }
                }
                (p, (None, missing))
            }
            Column::Categorical(v, levels) => {
                let mut p = vec![Vec::new(); levels.len()];
                let mut missing = Vec::new();
                for &r in rows {
                    match v[r] {
                        Some(l) => p[l].push(r),
                        None => missing.push(r),
                    }
                }
                (p, (Some(levels.clone()), missing))
            }
        };
        let (levels, missing) = node_kind;
        let majority_child = {
            let sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
            argmax(&sizes)
        };
        parts[majority_child].extend(missing);
        parts[majority_child].sort_unstable();

        let was_used = used[chosen.slot];
        if levels.is_some() {
            used[chosen.slot] = true;
        }
        let mut children = Vec::with_capacity(parts.len());
        for p in &parts {
            children.push(self.grow(p, used, class)?);
        }
        used[chosen.slot] = was_used;

        Ok(match levels {
            None => Node::Numeric {
                attribute: *attribute,
                threshold: chosen.threshold,
                distribution,
                majority_child,
                children,
            },
            Some(levels) => Node::Categorical {
                attribute: *attribute,
                levels,
                distribution,
                majority_child,
                children,
            },
        })
    }
}

/// Gain-ratio choice restricted to candidates with at least average gain.
fn choose(candidates: &[Candidate]) -> Option<&Candidate> {
    if candidates.is_empty() {
        return None;
    }
    let mean = candidates.iter().map(|c| c.gain).sum::<f64>() / candidates.len() as f64;
    let mut best: Option<&Candidate> = None;
    for c in candidates.iter().filter(|c| c.gain >= mean - GAIN_EPS) {
        if best.is_none_or(|b| c.ratio > b.ratio + GAIN_EPS) {
            best = Some(c);
        }
    }
    best
}

/// Expected extra errors at confidence `cf` for `e` errors among `n`
/// records (upper confidence limit of the binomial, normal approximation).
pub fn added_errors(n: f64, e: f64, cf: f64) -> f64 {
    if n <= 0.0 {
        return 0.0;
    }
    if e < 1.0 {
        let base = n * (1.0 - cf.powf(1.0 / n));
        if e == 0.0 {
            return base;
        }
        return base + e * (added_errors(n, 1.0, cf) - base);
    }
    if e + 0.5 >= n {
        return (n - e).max(0.0);
    }
    let z = Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(1.0 - cf);
    let f = (e + 0.5) / n;
    let r = (f + z * z / (2.0 * n) + z * (f / n - f * f / n + z * z / (4.0 * n * n)).sqrt())
        / (1.0 + z * z / n);
    r * n - e
}

fn leaf_estimate(dist: &[usize], cf: f64) -> f64 {
    let n: usize = dist.iter().sum();
    let e = (n - dist[argmax(dist)]) as f64;
    e + added_errors(n as f64, e, cf)
}

/// Bottom-up subtree replacement; returns the estimated errors of `node`.
fn prune(node: &mut Node, cf: f64) -> f64 {
    if node.is_leaf() {
        return leaf_estimate(node.distribution(), cf);
    }
    let subtree: f64 = match node {
        Node::Numeric { children, .. } | Node::Categorical { children, .. } => {
            children.iter_mut().map(|c| prune(c, cf)).sum()
        }
        Node::Leaf { .. } => unreachable!(),
    };
    let as_leaf = leaf_estimate(node.distribution(), cf);
    if as_leaf <= subtree + 0.1 {
        let distribution = node.distribution().to_vec();
        let class = argmax(&distribution);
        *node = Node::Leaf { distribution, class };
        as_leaf
    } else {
        subtree
    }
}

/// Grow (and optionally prune) a tree on every record of `ds`.
pub fn build_tree(ds: &Dataset, target_classes: &[usize], params: &TreeParams) -> Result<DecisionTree> {
    let class_count = target_classes.iter().max().map_or(1, |m| m + 1);
    let rows: Vec<usize> = (0..ds.len()).collect();
    build_tree_on(ds, target_classes, class_count, &rows, params)
}

/// Grow a tree on the subset `rows` of `ds`. `target_classes` is indexed by
/// record of `ds`; entries outside `rows` are ignored.
pub fn build_tree_on(
    ds: &Dataset,
    target_classes: &[usize],
    class_count: usize,
    rows: &[usize],
    params: &TreeParams,
) -> Result<DecisionTree> {
    if target_classes.len() != ds.len() {
        return Err(Error::Usage(format!(
            "{} class labels for {} records",
            target_classes.len(),
            ds.len()
        )));
    }
    if let Some(&bad) = rows.iter().map(|&r| &target_classes[r]).find(|&&c| c >= class_count) {
        return Err(Error::Usage(format!("class index {bad} out of range 0..{class_count}")));
    }
    if let Some(cf) = params.prune_confidence {
        if !(cf > 0.0 && cf <= 0.5) {
            return Err(Error::Config(format!("prune confidence must be in (0, 0.5], got {cf}")));
        }
    }

    let mut columns = Vec::new();
    for idx in feature_columns(ds) {
        let spec = &ds.attributes[idx];
        let col = match spec.kind {
            Kind::Categorical => {
                let levels: Vec<String> = match &spec.levels {
                    Some(l) => l.clone(),
                    None => {
                        let set: std::collections::BTreeSet<&str> = rows
                            .iter()
                            .filter_map(|&r| ds.records[r][idx].as_text())
                            .collect();
                        set.into_iter().map(String::from).collect()
                    }
                };
                let values = ds
                    .records
                    .iter()
                    .map(|rec| rec[idx].as_text().and_then(|t| levels.iter().position(|l| l == t)))
                    .collect();
                Column::Categorical(values, levels)
            }
            _ => Column::Numeric(ds.records.iter().map(|rec| rec[idx].as_ordinal()).collect()),
        };
        columns.push((idx, col));
    }

    let grower = Grower {
        classes: target_classes,
        class_count,
        min_leaf: params.min_leaf.max(1),
        columns,
    };
    let mut used = vec![false; grower.columns.len()];
    let mut root = grower.grow(rows, &mut used, 0)?;
    if let Some(cf) = params.prune_confidence {
        prune(&mut root, cf);
    }
    Ok(DecisionTree {
        root,
        schema: ds.attributes.iter().map(|a| a.name.clone()).collect(),
        class_count,
        params: params.clone(),
        training_records: rows.len(),
    })
}

impl DecisionTree {
    /// Leaf reached by `record`.
    pub fn leaf_for<'t>(&'t self, record: &[Cell]) -> Result<&'t Node> {
        if record.len() != self.schema.len() {
            return Err(Error::Usage(format!(
                "record has {} cells, tree was trained on {} attributes",
                record.len(),
                self.schema.len()
            )));
        }
        let mut node = &self.root;
        loop {
            node = match node {
                Node::Leaf { .. } => return Ok(node),
                Node::Numeric { attribute, threshold, majority_child, children, .. } => {
                    match record[*attribute].as_ordinal() {
                        Some(v) if v <= *threshold => &children[0],
                        Some(_) => &children[1],
                        None => &children[*majority_child],
                    }
                }
                Node::Categorical { attribute, levels, majority_child, children, .. } => {
                    let branch = record[*attribute]
                        .as_text()
                        .and_then(|t| levels.iter().position(|l| l == t))
                        .unwrap_or(*majority_child);
                    &children[branch]
                }
            };
        }
    }

    pub fn classify(&self, record: &[Cell]) -> Result<usize> {
        Ok(self.leaf_for(record)?.class())
    }

    /// Check that `ds` has the training schema.
    pub fn check_schema(&self, ds: &Dataset) -> Result<()> {
        let names: Vec<&str> = ds.attributes.iter().map(|a| a.name.as_str()).collect();
        if names != self.schema.iter().map(String::as_str).collect::<Vec<_>>() {
            return Err(Error::Usage("dataset schema differs from the training schema".into()));
        }
        Ok(())
    }

    /// Indented text form: one test per line, leaves as `-> class c [counts]`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_node(&self.root, 0, &mut out);
        out
    }

    fn render_node(&self, node: &Node, depth: usize, out: &mut String) {
        let pad = "|   ".repeat(depth);
        match node {
            Node::Leaf { distribution, class } => {
                let counts: Vec<String> = distribution.iter().map(usize::to_string).collect();
                let _ = writeln!(out, "{pad}-> class {class} [{}]", counts.join(" "));
            }
            Node::Numeric { attribute, threshold, children, .. } => {
                let name = &self.schema[*attribute];
                let _ = writeln!(out, "{pad}{name} <= {threshold}");
                self.render_node(&children[0], depth + 1, out);
                let _ = writeln!(out, "{pad}{name} > {threshold}");
                self.render_node(&children[1], depth + 1, out);
            }
            Node::Categorical { attribute, levels, children, .. } => {
                let name = &self.schema[*attribute];
                for (level, child) in levels.iter().zip(children) {
                    let _ = writeln!(out, "{pad}{name} = {level}");
                    self.render_node(child, depth + 1, out);
                }
            }
        }
    }
}
