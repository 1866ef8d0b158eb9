//! d-interval families with exact rational endpoints.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{input, Error, Result};
use crate::graph::{ColoredGraph, Graph};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Openness {
    Closed,
    Open,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub left: Rational,
    pub right: Rational,
}

impl Interval {
    pub fn new(left: Rational, right: Rational) -> Result<Self> {
        if left >= right {
            return input(format!("degenerate interval [{left}, {right}]"));
        }
        Ok(Self { left, right })
    }

    pub fn unit(left: Rational) -> Self {
        let right = &left + Rational::one();
        Self { left, right }
    }

    pub fn ints(left: i64, right: i64) -> Result<Self> {
        Self::new(int(left), int(right))
    }

    pub fn len(&self) -> Rational {
        &self.right - &self.left
    }

    pub fn intersects(&self, other: &Interval, openness: Openness) -> bool {
        let lo = (&self.left).max(&other.left);
        let hi = (&self.right).min(&other.right);
        match openness {
            Openness::Closed => lo <= hi,
            Openness::Open => lo < hi,
        }
    }

    /// True when `self` lies inside `other`.
    pub fn within(&self, other: &Interval) -> bool {
        other.left <= self.left && self.right <= other.right
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.left, self.right)
    }
}

/// Each vertex owns between one and `d` intervals; `d` is the largest count
/// a vertex may use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DIntervalFamily {
    pub d: usize,
    pub openness: Openness,
    entries: Vec<(String, Vec<Interval>)>,
    index: HashMap<String, usize>,
}

impl DIntervalFamily {
    pub fn new(d: usize, openness: Openness) -> Self {
        Self {
            d,
            openness,
            entries: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn insert(&mut self, label: impl Into<String>, mut intervals: Vec<Interval>) -> Result<()> {
        let label = label.into();
        if intervals.is_empty() || intervals.len() > self.d {
            return input(format!(
                "vertex {label:?} has {} intervals, expected 1..={}",
                intervals.len(),
                self.d
            ));
        }
        if self.index.contains_key(&label) {
            return input(format!("vertex {label:?} listed twice"));
        }
        if let Some(bad) = intervals.iter().find(|i| i.left >= i.right) {
            return input(format!("degenerate interval {bad:?} on {label:?}"));
        }
        intervals.sort_by(|a, b| a.left.cmp(&b.left).then_with(|| a.right.cmp(&b.right)));
        self.index.insert(label.clone(), self.entries.len());
        self.entries.push((label, intervals));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(l, _)| l.as_str())
    }

    pub fn entries(&self) -> &[(String, Vec<Interval>)] {
        &self.entries
    }

    pub fn get(&self, label: &str) -> Option<&[Interval]> {
        self.index.get(label).map(|&i| self.entries[i].1.as_slice())
    }

    pub fn all_intervals(&self) -> impl Iterator<Item = (&str, &Interval)> {
        self.entries
            .iter()
            .flat_map(|(l, is)| is.iter().map(move |i| (l.as_str(), i)))
    }

    fn vertices_meet(&self, a: &[Interval], b: &[Interval]) -> bool {
        a.iter().any(|x| b.iter().any(|y| x.intersects(y, self.openness)))
    }

    /// Intersection graph; vertex order follows the family's insertion order.
    pub fn intersection_graph(&self) -> Graph {
        let mut g = Graph::new();
        for (l, _) in &self.entries {
            g.add_vertex(l.clone()).expect("labels are unique");
        }
        for i in 0..self.entries.len() {
            for j in i + 1..self.entries.len() {
                if self.vertices_meet(&self.entries[i].1, &self.entries[j].1) {
                    g.add_edge(i, j).expect("fresh edge");
                }
            }
        }
        g
    }

    /// Largest number of intervals sharing a point.
    pub fn depth(&self) -> Result<usize> {
        let mut events: Vec<(&Rational, u8)> = Vec::new();
        // At equal coordinates the lower tag is processed first.
        let (open_tag, close_tag) = match self.openness {
            Openness::Closed => (0, 1),
            Openness::Open => (1, 0),
        };
        for (_, iv) in self.all_intervals() {
            events.push((&iv.left, open_tag));
            events.push((&iv.right, close_tag));
        }
        if events.is_empty() {
            return input("depth of an empty family");
        }
        events.sort();
        let (mut cur, mut best) = (0usize, 0usize);
        for (_, tag) in events {
            if tag == open_tag {
                cur += 1;
                best = best.max(cur);
            } else {
                cur -= 1;
            }
        }
        Ok(best)
    }

    /// Pairs of intervals of one vertex that fail to be disjoint.
    pub fn self_overlaps(&self) -> Vec<(String, usize, usize)> {
        let mut out = Vec::new();
        for (l, is) in &self.entries {
            for i in 0..is.len() {
                for j in i + 1..is.len() {
                    if is[i].intersects(&is[j], self.openness) {
                        out.push((l.clone(), i, j));
                    }
                }
            }
        }
        out
    }

    pub fn classify(&self) -> Result<ClassReport> {
        let one = Rational::one();
        let is_unit = self.all_intervals().all(|(_, i)| i.len() == one);
        let is_balanced = self
            .entries
            .iter()
            .all(|(_, is)| is.iter().all(|i| i.len() == is[0].len()));
        let integer_x = self.integer_length();
        Ok(ClassReport {
            is_unit,
            is_balanced,
            integer_x,
            depth: self.depth()?,
        })
    }

    fn integer_length(&self) -> Option<u64> {
        if self.openness != Openness::Open {
            return None;
        }
        let mut x: Option<Rational> = None;
        for (_, i) in self.all_intervals() {
            if !i.left.is_integer() || !i.right.is_integer() {
                return None;
            }
            let len = i.len();
            match &x {
                None => x = Some(len),
                Some(x0) if *x0 != len => return None,
                _ => {}
            }
        }
        x.and_then(|x| x.to_integer().to_u64())
    }

    /// Multiplies every endpoint by a positive rational.
    pub fn scaled(&self, factor: &Rational) -> Result<Self> {
        if !factor.is_positive() {
            return input("scale factor must be positive");
        }
        self.map_intervals(|i| Interval {
            left: &i.left * factor,
            right: &i.right * factor,
        })
    }

    pub fn shifted(&self, offset: &Rational) -> Result<Self> {
        self.map_intervals(|i| Interval {
            left: &i.left + offset,
            right: &i.right + offset,
        })
    }

    pub(crate) fn map_intervals(&self, f: impl Fn(&Interval) -> Interval) -> Result<Self> {
        let mut out = Self::new(self.d, self.openness);
        for (l, is) in &self.entries {
            out.insert(l.clone(), is.iter().map(&f).collect())?;
        }
        Ok(out)
    }

    /// Smallest left endpoint and largest right endpoint.
    pub fn span(&self) -> Option<(Rational, Rational)> {
        let lo = self.all_intervals().map(|(_, i)| &i.left).min()?.clone();
        let hi = self.all_intervals().map(|(_, i)| &i.right).max()?.clone();
        Some((lo, hi))
    }

    pub fn counts(&self) -> BTreeMap<String, usize> {
        self.entries.iter().map(|(l, is)| (l.clone(), is.len())).collect()
    }

    pub fn to_json(&self) -> Value {
        let intervals: serde_json::Map<String, Value> = self
            .entries
            .iter()
            .map(|(l, is)| {
                let list: Vec<Value> = is
                    .iter()
                    .map(|i| {
                        Value::Array(vec![
                            big_to_json(i.left.numer()),
                            big_to_json(i.left.denom()),
                            big_to_json(i.right.numer()),
                            big_to_json(i.right.denom()),
                        ])
                    })
                    .collect();
                (l.clone(), Value::Array(list))
            })
            .collect();
        json!({ "d": self.d, "openness": self.openness, "intervals": intervals })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let d = v
            .get("d")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Input("representation needs a positive \"d\"".into()))?;
        if d == 0 {
            return input("d must be positive");
        }
        let openness: Openness = serde_json::from_value(
            v.get("openness")
                .cloned()
                .ok_or_else(|| Error::Input("representation needs \"openness\"".into()))?,
        )?;
        let map = v
            .get("intervals")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Input("representation needs an \"intervals\" object".into()))?;
        let mut fam = Self::new(d as usize, openness);
        for (label, list) in map {
            let list = list
                .as_array()
                .ok_or_else(|| Error::Input(format!("intervals of {label:?} must be a list")))?;
            let mut is = Vec::new();
            for quad in list {
                let q = quad.as_array().filter(|q| q.len() == 4).ok_or_else(|| {
                    Error::Input(format!("interval of {label:?} must be [numL, denL, numR, denR]"))
                })?;
                let parts = q.iter().map(json_to_big).collect::<Result<Vec<_>>>()?;
                if parts[1].is_zero() || parts[3].is_zero() {
                    return input(format!("zero denominator on {label:?}"));
                }
                let left = Rational::new(parts[0].clone(), parts[1].clone());
                let right = Rational::new(parts[2].clone(), parts[3].clone());
                is.push(Interval::new(left, right)?);
            }
            fam.insert(label.clone(), is)?;
        }
        Ok(fam)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(text)?)
    }
}

fn big_to_json(b: &BigInt) -> Value {
    match b.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(b.to_string()),
    }
}

fn json_to_big(v: &Value) -> Result<BigInt> {
    if let Some(i) = v.as_i64() {
        return Ok(BigInt::from(i));
    }
    if let Some(s) = v.as_str() {
        return s
            .parse()
            .map_err(|_| Error::Input(format!("not an integer: {s:?}")));
    }
    input(format!("endpoint component must be an integer, got {v}"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub is_unit: bool,
    pub is_balanced: bool,
    pub integer_x: Option<u64>,
    pub depth: usize,
}

/// Class requirements checked by [`validate_representation`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassConstraints {
    pub unit: bool,
    pub balanced: bool,
    /// Open intervals with integer endpoints, all of this length.
    pub integer_x: Option<u64>,
    pub depth_max: Option<usize>,
    /// Exact interval count per vertex.
    pub counts: Option<BTreeMap<String, usize>>,
}

impl ClassConstraints {
    pub fn unit() -> Self {
        Self {
            unit: true,
            ..Self::default()
        }
    }

    /// Unit intervals, two per white vertex and one per black vertex.
    pub fn colored_unit(cg: &ColoredGraph) -> Self {
        Self {
            unit: true,
            counts: Some(cg.profile()),
            ..Self::default()
        }
    }

    pub fn with_counts(mut self, counts: BTreeMap<String, usize>) -> Self {
        self.counts = Some(counts);
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub missing_edges: Vec<[String; 2]>,
    pub excess_edges: Vec<[String; 2]>,
    pub disjointness: Vec<String>,
    pub class_violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.missing_edges.is_empty()
            && self.excess_edges.is_empty()
            && self.disjointness.is_empty()
            && self.class_violations.is_empty()
    }

    pub fn violation_count(&self) -> usize {
        self.missing_edges.len()
            + self.excess_edges.len()
            + self.disjointness.len()
            + self.class_violations.len()
    }
}

/// Checks that `fam` represents `g` and lies in the required class.
pub fn validate_representation(
    g: &Graph,
    fam: &DIntervalFamily,
    required: &ClassConstraints,
) -> Result<ValidationReport> {
    if fam.len() != g.n() || g.labels().iter().any(|l| fam.get(l).is_none()) {
        return input("family and graph have different vertex sets");
    }
    let mut report = ValidationReport::default();
    let per: Vec<&[Interval]> = g.labels().iter().map(|l| fam.get(l).unwrap()).collect();
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            let meet = fam.vertices_meet(per[u], per[v]);
            let pair = [g.label(u).to_string(), g.label(v).to_string()];
            match (g.has_edge(u, v), meet) {
                (true, false) => report.missing_edges.push(pair),
                (false, true) => report.excess_edges.push(pair),
                _ => {}
            }
        }
    }
    for (l, i, j) in fam.self_overlaps() {
        report
            .disjointness
            .push(format!("intervals {i} and {j} of {l:?} are not disjoint"));
    }
    let class = &mut report.class_violations;
    if required.unit || required.balanced {
        let one = Rational::one();
        for (l, is) in fam.entries() {
            for iv in is {
                if required.unit && iv.len() != one {
                    class.push(format!("interval {iv:?} of {l:?} has length {}", iv.len()));
                }
                if required.balanced && iv.len() != is[0].len() {
                    class.push(format!("{l:?} is not balanced"));
                }
            }
        }
    }
    if let Some(x) = required.integer_x {
        if fam.openness != Openness::Open {
            class.push("integer families must use open intervals".into());
        }
        let x = int(x as i64);
        for (l, iv) in fam.all_intervals() {
            if !iv.left.is_integer() || !iv.right.is_integer() || iv.len() != x {
                class.push(format!("interval {iv:?} of {l:?} is not an integer interval of length {x}"));
            }
        }
    }
    if let Some(r) = required.depth_max {
        let depth = fam.depth()?;
        if depth > r {
            class.push(format!("depth {depth} exceeds {r}"));
        }
    }
    if let Some(counts) = &required.counts {
        for (l, is) in fam.entries() {
            let want = counts.get(l).copied();
            if want != Some(is.len()) {
                class.push(format!(
                    "{l:?} has {} intervals, required {}",
                    is.len(),
                    want.map_or("none".to_string(), |w| w.to_string())
                ));
            }
        }
    }
    Ok(report)
}
