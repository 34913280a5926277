//! Instance and solution files.

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{NormSpec, Point, UnitBall};
use crate::mst::NodeRef;
use crate::solver::{ProblemSpec, Provenance, Solution, Tolerances};
use crate::topology::{evaluate_cost, CostFunction};

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn ser_f64<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round12(*x))
}

fn ser_f64s<S: Serializer>(xs: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|&x| round12(x)))
}

fn ser_points<S: Serializer>(ps: &[[f64; 2]], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(ps.iter().map(|p| [round12(p[0]), round12(p[1])]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub terminals: Vec<[f64; 2]>,
    pub norm: NormSpec,
    pub k: usize,
    pub cost: CostFunction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub box_inflation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_direction: Option<[f64; 2]>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<InstanceFile> {
        let inst: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Malformed {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn to_spec(&self) -> Result<ProblemSpec> {
        let ball = UnitBall::from_spec(&self.norm)?;
        let mut spec = ProblemSpec::new(self.terminals.iter().map(|&p| Point::from(p)).collect(), ball, self.k, self.cost);
        if let Some(t) = self.tolerance {
            spec.tolerances = Tolerances {
                fixed_topology: t,
                ..Tolerances::default()
            };
        }
        if let Some(b) = self.box_inflation {
            spec.box_inflation = b;
        }
        spec.seed_direction = self.seed_direction.map(Point::from);
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionStats {
    pub regions: usize,
    pub distinct_labels: usize,
    pub topologies_evaluated: usize,
    pub wall_ms: f64,
    pub warnings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    #[serde(serialize_with = "ser_points")]
    pub terminals: Vec<[f64; 2]>,
    #[serde(serialize_with = "ser_points")]
    pub steiner_points: Vec<[f64; 2]>,
    pub edges: Vec<[NodeRef; 2]>,
    #[serde(serialize_with = "ser_f64s")]
    pub lengths: Vec<f64>,
    #[serde(serialize_with = "ser_f64")]
    pub cost: f64,
    pub cost_function: CostFunction,
    pub norm: NormSpec,
    pub provenance: Provenance,
    pub stats: SolutionStats,
}

impl SolutionFile {
    pub fn from_solution(sol: &Solution, ball: &UnitBall) -> SolutionFile {
        SolutionFile {
            terminals: sol.terminals.iter().map(|p| [p.x, p.y]).collect(),
            steiner_points: sol.steiner.iter().map(|p| [p.x, p.y]).collect(),
            edges: sol.edges.iter().map(|&(a, b)| [a, b]).collect(),
            lengths: sol.lengths.clone(),
            cost: sol.cost,
            cost_function: sol.cf,
            norm: ball.to_spec(),
            provenance: sol.provenance.clone(),
            stats: SolutionStats {
                regions: sol.stats.regions,
                distinct_labels: sol.stats.labels,
                topologies_evaluated: sol.stats.forests_evaluated,
                wall_ms: sol.stats.elapsed_ms,
                warnings: sol.stats.warnings,
            },
        }
    }

    pub fn parse(text: &str) -> Result<SolutionFile> {
        serde_json::from_str(text).map_err(|e| Error::Malformed {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serializes")
    }

    fn node(&self, r: NodeRef) -> Result<Point> {
        let p = match r {
            NodeRef::Terminal(i) => self.terminals.get(i),
            NodeRef::Steiner(j) => self.steiner_points.get(j),
        };
        p.map(|&p| Point::from(p)).ok_or_else(|| Error::InvalidTopology(format!("dangling node {r:?}")))
    }

    /// Cost recomputed from the coordinates, after checking the edges form a spanning tree.
    pub fn recompute_cost(&self) -> Result<f64> {
        let nt = self.terminals.len();
        let total = nt + self.steiner_points.len();
        if self.edges.len() + 1 != total.max(1) {
            return Err(Error::InvalidTopology("edge count does not match a spanning tree".into()));
        }
        let index = |r: NodeRef| match r {
            NodeRef::Terminal(i) => i,
            NodeRef::Steiner(j) => nt + j,
        };
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let ball = UnitBall::from_spec(&self.norm)?;
        let mut lengths = Vec::with_capacity(self.edges.len());
        for &[a, b] in &self.edges {
            let (pa, pb) = (self.node(a)?, self.node(b)?);
            let (ra, rb) = (find(&mut parent, index(a)), find(&mut parent, index(b)));
            if ra == rb {
                return Err(Error::InvalidTopology("edges contain a cycle".into()));
            }
            parent[ra] = rb;
            lengths.push(ball.distance(pa, pb));
        }
        evaluate_cost(self.cost_function, &lengths)
    }
}
