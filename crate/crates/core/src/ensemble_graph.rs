//! Finite Tanner graphs sampled from a GLDPC ensemble.
//!
//! Graphs come from the socket model: the `nJ` variable sockets are matched
//! uniformly at random to the `mK` constraint sockets. The order of the
//! variables listed at a constraint is its socket order, so at a GC node the
//! variable in slot `i` sits at subcode position `i`.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::par;
use crate::subcodes::{EnsembleSpec, LinearSubcode};

/// Default swap budget of [`clean_graph`].
pub const DEFAULT_MAX_SWAPS: usize = 1_000_000;

/// Constraint-node type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CheckType {
    Spc,
    Gc,
}

/// One constraint node and its variables in socket order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub kind: CheckType,
    pub vars: Vec<usize>,
}

/// Bipartite graph of variables and typed constraints.
#[derive(Clone, Debug)]
pub struct TannerGraph {
    n: usize,
    checks: Vec<Check>,
    subcode: Option<Arc<LinearSubcode>>,
    gc_fraction: f64,
}

impl PartialEq for TannerGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.checks == other.checks
            && self.gc_fraction == other.gc_fraction
            && self.subcode.as_ref().map(|c| c.codewords()) == other.subcode.as_ref().map(|c| c.codewords())
    }
}

impl TannerGraph {
    /// Builds a graph after checking variable indices, GC degrees and that a
    /// subcode is present whenever a GC node is.
    pub fn new(n: usize, checks: Vec<Check>, subcode: Option<Arc<LinearSubcode>>, gc_fraction: f64) -> Result<Self> {
        for (c, check) in checks.iter().enumerate() {
            if let Some(&v) = check.vars.iter().find(|&&v| v >= n) {
                return Err(invalid(format!("constraint {c} references variable {v} >= n = {n}")));
            }
            if check.vars.is_empty() {
                return Err(invalid(format!("constraint {c} has no variables")));
            }
            if check.kind == CheckType::Gc {
                let code = subcode
                    .as_ref()
                    .ok_or_else(|| invalid("GC constraints present but no subcode given"))?;
                if check.vars.len() != code.len() {
                    return Err(invalid(format!(
                        "GC constraint {c} has degree {}, subcode length is {}",
                        check.vars.len(),
                        code.len()
                    )));
                }
            }
        }
        Ok(Self {
            n,
            checks,
            subcode,
            gc_fraction,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_checks(&self) -> usize {
        self.checks.len()
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn subcode(&self) -> Option<&Arc<LinearSubcode>> {
        self.subcode.as_ref()
    }

    /// Nominal GC fraction the graph was sampled with.
    pub fn gc_fraction(&self) -> f64 {
        self.gc_fraction
    }

    pub fn num_edges(&self) -> usize {
        self.checks.iter().map(|c| c.vars.len()).sum()
    }

    pub fn num_gc(&self) -> usize {
        self.checks.iter().filter(|c| c.kind == CheckType::Gc).count()
    }

    /// Degree of every variable node.
    pub fn var_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for check in &self.checks {
            for &v in &check.vars {
                deg[v] += 1;
            }
        }
        deg
    }

    /// Degree of every constraint node.
    pub fn check_degrees(&self) -> Vec<usize> {
        self.checks.iter().map(|c| c.vars.len()).collect()
    }

    /// Common variable degree, if the graph is variable-regular.
    pub fn var_degree(&self) -> Option<usize> {
        common(&self.var_degrees())
    }

    /// Common constraint degree, if the graph is constraint-regular.
    pub fn check_degree(&self) -> Option<usize> {
        common(&self.check_degrees())
    }

    /// Rows of the full binary parity-check matrix, as variable lists. GC
    /// nodes contribute one row per subcode parity check.
    pub fn parity_rows(&self) -> Vec<Vec<usize>> {
        let mut rows = Vec::new();
        for check in &self.checks {
            match check.kind {
                CheckType::Spc => rows.push(check.vars.clone()),
                CheckType::Gc => {
                    let code = self.subcode.as_ref().expect("validated at construction");
                    for &row in code.parity_check().rows() {
                        rows.push(
                            check
                                .vars
                                .iter()
                                .enumerate()
                                .filter(|(j, _)| row >> j & 1 == 1)
                                .map(|(_, &v)| v)
                                .collect(),
                        );
                    }
                }
            }
        }
        rows
    }

    /// `1 - (parity rows) / n`.
    pub fn design_rate(&self) -> f64 {
        let rows: usize = self
            .checks
            .iter()
            .map(|c| match c.kind {
                CheckType::Spc => 1,
                CheckType::Gc => self.subcode.as_ref().map_or(1, |s| s.check_rows()),
            })
            .sum();
        1.0 - rows as f64 / self.n as f64
    }

    /// Writes the adjacency format: a header line
    /// `n=<n> m=<m> J=<J> K=<K> t=<t> subcode=<name>` (degrees are `irregular`
    /// when not constant, the name `none` when there is no subcode), then one
    /// line per constraint with its type letter (`S` or `G`) and variables in
    /// socket order.
    pub fn write_adjacency<W: Write>(&self, mut w: W) -> Result<()> {
        let deg = |d: Option<usize>| d.map_or_else(|| "irregular".to_string(), |d| d.to_string());
        writeln!(
            w,
            "n={} m={} J={} K={} t={} subcode={}",
            self.n,
            self.checks.len(),
            deg(self.var_degree()),
            deg(self.check_degree()),
            self.gc_fraction,
            self.subcode.as_ref().map_or("none", |c| c.name())
        )?;
        let mut line = String::new();
        for check in &self.checks {
            line.clear();
            line.push(match check.kind {
                CheckType::Spc => 'S',
                CheckType::Gc => 'G',
            });
            for v in &check.vars {
                write!(line, " {v}").expect("writing to a String");
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_adjacency(file)
    }

    /// Parses the adjacency format. The subcode named in the header is
    /// resolved as a built-in name or matrix path unless `subcode` is given.
    pub fn read_adjacency<R: BufRead>(r: R, subcode: Option<Arc<LinearSubcode>>) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| invalid("empty graph file"))??;
        let mut n = None;
        let mut m = None;
        let mut t = None;
        let mut name = None;
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| invalid(format!("bad header field `{field}`")))?;
            let bad = || invalid(format!("bad header value `{field}`"));
            match key {
                "n" => n = Some(value.parse::<usize>().map_err(|_| bad())?),
                "m" => m = Some(value.parse::<usize>().map_err(|_| bad())?),
                "t" => t = Some(value.parse::<f64>().map_err(|_| bad())?),
                "subcode" => name = Some(value.to_string()),
                "J" | "K" => {}
                _ => return Err(bad()),
            }
        }
        let (n, m, t) = match (n, m, t) {
            (Some(n), Some(m), Some(t)) => (n, m, t),
            _ => return Err(invalid("graph header needs n, m and t")),
        };
        let mut checks = Vec::with_capacity(m);
        for line in lines {
            let line = line?;
            let mut fields = line.split_whitespace();
            let kind = match fields.next() {
                None => continue,
                Some("S") => CheckType::Spc,
                Some("G") => CheckType::Gc,
                Some(other) => return Err(invalid(format!("unknown constraint type `{other}`"))),
            };
            let vars = fields
                .map(|f| f.parse::<usize>().map_err(|_| invalid(format!("bad variable index `{f}`"))))
                .collect::<Result<Vec<_>>>()?;
            checks.push(Check { kind, vars });
        }
        if checks.len() != m {
            return Err(invalid(format!("header announces {m} constraints, found {}", checks.len())));
        }
        let subcode = match (subcode, name.as_deref()) {
            (Some(code), _) => Some(code),
            (None, None | Some("none")) => None,
            (None, Some(name)) => Some(Arc::new(LinearSubcode::resolve(name)?)),
        };
        Self::new(n, checks, subcode, t)
    }

    pub fn load(path: &Path, subcode: Option<Arc<LinearSubcode>>) -> Result<Self> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_adjacency(file, subcode)
    }
}

fn common(values: &[usize]) -> Option<usize> {
    let first = *values.first()?;
    values.iter().all(|&v| v == first).then_some(first)
}

/// Draws a graph from the socket model. The first `round(t m)` constraints
/// are tagged GC before the constraint order is shuffled.
pub fn sample_graph(spec: &EnsembleSpec, seed: u64) -> Result<TannerGraph> {
    spec.validate()?;
    let num_gc = spec.num_gc()?;
    let (n, j, k) = (spec.block_length, spec.var_degree, spec.check_degree());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sockets: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, j)).collect();
    sockets.shuffle(&mut rng);
    let mut checks: Vec<Check> = sockets
        .chunks_exact(k)
        .enumerate()
        .map(|(c, vars)| Check {
            kind: if c < num_gc { CheckType::Gc } else { CheckType::Spc },
            vars: vars.to_vec(),
        })
        .collect();
    checks.shuffle(&mut rng);
    TannerGraph::new(n, checks, Some(spec.subcode.clone()), spec.gc_fraction)
}

/// A parallel edge or a 4-cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum GirthWitness {
    /// Variable `var` is attached to constraint `check` more than once.
    ParallelEdge { check: usize, var: usize },
    /// Constraints `checks` both contain variables `vars`.
    FourCycle { checks: [usize; 2], vars: [usize; 2] },
}

/// Outcome of [`girth_check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum GirthReport {
    /// No parallel edges and no 4-cycles.
    Clean,
    Violation(GirthWitness),
}

impl GirthReport {
    pub fn is_clean(&self) -> bool {
        matches!(self, GirthReport::Clean)
    }
}

/// Reports the first parallel edge or 4-cycle found by scanning constraints in
/// order and exploring their two-hop neighbourhoods.
pub fn girth_check(graph: &TannerGraph) -> GirthReport {
    let adj = var_adjacency(graph);
    for (c, check) in graph.checks.iter().enumerate() {
        if let Some(var) = first_duplicate(&check.vars) {
            return GirthReport::Violation(GirthWitness::ParallelEdge { check: c, var });
        }
    }
    let mut first_shared: Vec<Option<usize>> = vec![None; graph.checks.len()];
    let mut touched = Vec::new();
    for (c, check) in graph.checks.iter().enumerate() {
        for &v in &check.vars {
            for &d in &adj[v] {
                if d == c {
                    continue;
                }
                match first_shared[d] {
                    None => {
                        first_shared[d] = Some(v);
                        touched.push(d);
                    }
                    Some(u) if u != v => {
                        let (a, b) = if c < d { (c, d) } else { (d, c) };
                        return GirthReport::Violation(GirthWitness::FourCycle {
                            checks: [a, b],
                            vars: [u.min(v), u.max(v)],
                        });
                    }
                    Some(_) => {}
                }
            }
        }
        for d in touched.drain(..) {
            first_shared[d] = None;
        }
    }
    GirthReport::Clean
}

fn first_duplicate(vars: &[usize]) -> Option<usize> {
    vars.iter()
        .enumerate()
        .find(|(i, v)| vars[..*i].contains(v))
        .map(|(_, &v)| v)
}

fn var_adjacency(graph: &TannerGraph) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); graph.n];
    for (c, check) in graph.checks.iter().enumerate() {
        for &v in &check.vars {
            adj[v].push(c);
        }
    }
    adj
}

/// Bookkeeping for swap-based rewiring.
struct Rewirer {
    checks: Vec<Check>,
    adj: Vec<Vec<usize>>,
    offsets: Vec<usize>,
}

impl Rewirer {
    fn new(graph: &TannerGraph) -> Self {
        let mut offsets = Vec::with_capacity(graph.checks.len() + 1);
        offsets.push(0);
        for c in &graph.checks {
            offsets.push(offsets.last().unwrap() + c.vars.len());
        }
        Self {
            checks: graph.checks.clone(),
            adj: var_adjacency(graph),
            offsets,
        }
    }

    /// Number of distinct variables shared between `c` and every other
    /// constraint that shares at least one.
    fn shared_counts(&self, c: usize) -> Vec<(usize, usize)> {
        let vars = &self.checks[c].vars;
        let mut counts: Vec<(usize, usize)> = Vec::new();
        for (i, &v) in vars.iter().enumerate() {
            if vars[..i].contains(&v) {
                continue;
            }
            let neighbours = &self.adj[v];
            for (p, &d) in neighbours.iter().enumerate() {
                if d == c || neighbours[..p].contains(&d) {
                    continue;
                }
                match counts.iter_mut().find(|(e, _)| *e == d) {
                    Some((_, k)) => *k += 1,
                    None => counts.push((d, 1)),
                }
            }
        }
        counts
    }

    fn duplicate_pairs(&self, c: usize) -> usize {
        let vars = &self.checks[c].vars;
        (0..vars.len())
            .map(|i| vars[..i].iter().filter(|&&u| u == vars[i]).count())
            .sum()
    }

    /// Violations involving `c`: duplicated variable pairs plus, for every
    /// other constraint, the number of pairs of shared variables.
    fn score(&self, c: usize) -> usize {
        self.duplicate_pairs(c) + self.shared_counts(c).iter().map(|&(_, s)| pairs(s)).sum::<usize>()
    }

    fn shared_with(&self, c: usize, d: usize) -> usize {
        self.shared_counts(c).iter().find(|(e, _)| *e == d).map_or(0, |&(_, s)| s)
    }

    /// Violations involving `c` or `d`, each counted once.
    fn local_score(&self, c: usize, d: usize) -> usize {
        self.score(c) + self.score(d) - pairs(self.shared_with(c, d))
    }

    fn total(&self) -> usize {
        let per_check: usize = (0..self.checks.len()).map(|c| self.score(c)).sum();
        let dups: usize = (0..self.checks.len()).map(|c| self.duplicate_pairs(c)).sum();
        // Shared-pair terms are counted from both ends.
        dups + (per_check - dups) / 2
    }

    /// Socket positions of `c` that take part in a violation.
    fn offending_positions(&self, c: usize) -> Vec<usize> {
        let vars = &self.checks[c].vars;
        let shared = self.shared_counts(c);
        let bad_neighbours: Vec<usize> = shared.iter().filter(|&&(_, s)| s >= 2).map(|&(d, _)| d).collect();
        (0..vars.len())
            .filter(|&i| {
                let v = vars[i];
                vars.iter().filter(|&&u| u == v).count() > 1
                    || self.adj[v].iter().any(|d| bad_neighbours.contains(d))
            })
            .collect()
    }

    fn swap(&mut self, (c, i): (usize, usize), (d, j): (usize, usize)) {
        let x = self.checks[c].vars[i];
        let y = self.checks[d].vars[j];
        self.checks[c].vars[i] = y;
        self.checks[d].vars[j] = x;
        replace_one(&mut self.adj[x], c, d);
        replace_one(&mut self.adj[y], d, c);
    }

    fn random_socket<R: Rng>(&self, rng: &mut R) -> (usize, usize) {
        let e = rng.random_range(0..*self.offsets.last().unwrap());
        let c = self.offsets.partition_point(|&o| o <= e) - 1;
        (c, e - self.offsets[c])
    }
}

fn pairs(s: usize) -> usize {
    s * s.saturating_sub(1) / 2
}

fn replace_one(list: &mut [usize], from: usize, to: usize) {
    if let Some(slot) = list.iter_mut().find(|x| **x == from) {
        *slot = to;
    }
}

/// Removes parallel edges and 4-cycles by swapping the variables attached to
/// two constraint sockets.
///
/// Each step picks a constraint involved in a violation, one of its
/// offending sockets and a uniformly random socket elsewhere; the swap is kept
/// unless it increases the number of violations involving the two
/// constraints. Variable and constraint degrees, constraint types and the
/// socket order of every GC node are preserved.
pub fn clean_graph(graph: &TannerGraph, seed: u64, max_swaps: usize) -> Result<TannerGraph> {
    let mut rw = Rewirer::new(graph);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pending: Vec<usize> = (0..rw.checks.len()).filter(|&c| rw.score(c) > 0).collect();
    let mut swaps = 0;
    while !pending.is_empty() {
        let slot = rng.random_range(0..pending.len());
        let c = pending[slot];
        let positions = rw.offending_positions(c);
        if positions.is_empty() {
            pending.swap_remove(slot);
            continue;
        }
        if swaps >= max_swaps {
            return Err(Error::CleaningExhausted {
                attempts: swaps,
                remaining: rw.total(),
            });
        }
        swaps += 1;
        let i = positions[rng.random_range(0..positions.len())];
        let (d, j) = rw.random_socket(&mut rng);
        if d == c {
            continue;
        }
        let before = rw.local_score(c, d);
        rw.swap((c, i), (d, j));
        if rw.local_score(c, d) > before {
            rw.swap((c, i), (d, j));
        } else if rw.score(d) > 0 {
            pending.push(d);
        }
    }
    log::debug!("graph cleaned with {swaps} swaps");
    TannerGraph::new(graph.n, rw.checks, graph.subcode.clone(), graph.gc_fraction)
}

/// Number of independent cycles among variables of degree 2 whose two
/// constraints are both SPC nodes.
///
/// Every such cycle through `w` variables supports a codeword of weight `w`,
/// so a positive rank means low-weight codewords that set an error floor.
pub fn spc_cycle_rank(graph: &TannerGraph) -> usize {
    let mut spc_neighbours = vec![Vec::with_capacity(2); graph.n];
    let mut degree = vec![0usize; graph.n];
    for (c, check) in graph.checks.iter().enumerate() {
        for &v in &check.vars {
            degree[v] += 1;
            if check.kind == CheckType::Spc {
                spc_neighbours[v].push(c);
            }
        }
    }
    let mut parent: Vec<usize> = (0..graph.checks.len()).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut rank = 0;
    for (v, nb) in spc_neighbours.iter().enumerate() {
        if degree[v] != 2 || nb.len() != 2 {
            continue;
        }
        let (a, b) = (root(&mut parent, nb[0]), root(&mut parent, nb[1]));
        if a == b {
            rank += 1;
        } else {
            parent[a] = b;
        }
    }
    rank
}

/// Attempts made by [`expurgate`] before giving up.
pub const DEFAULT_EXPURGATION_ATTEMPTS: usize = 1000;

/// Calls `build` with seeds `stream_seed(seed, 0)`, `stream_seed(seed, 1)`,
/// ... and returns the first graph whose [`spc_cycle_rank`] is zero,
/// together with the number of attempts used.
///
/// Rejection keeps the result uniform over the graphs `build` can return
/// that have no SPC-only cycles.
pub fn expurgate<F>(seed: u64, max_attempts: usize, mut build: F) -> Result<(TannerGraph, usize)>
where
    F: FnMut(u64) -> Result<TannerGraph>,
{
    for attempt in 0..max_attempts {
        let graph = build(par::stream_seed(seed, attempt as u64))?;
        if spc_cycle_rank(&graph) == 0 {
            return Ok((graph, attempt + 1));
        }
    }
    Err(Error::ExpurgationExhausted { attempts: max_attempts })
}

/// Rate-matched LDPC comparison graph: every GC node is replaced by one SPC
/// node per row of the subcode parity-check matrix, applied to the attached
/// variables, and the result is cleaned with [`clean_graph`].
pub fn derive_comparison_ldpc(graph: &TannerGraph, seed: u64, max_swaps: usize) -> Result<TannerGraph> {
    let checks = graph
        .parity_rows()
        .into_iter()
        .map(|vars| Check {
            kind: CheckType::Spc,
            vars,
        })
        .collect();
    let expanded = TannerGraph::new(graph.n, checks, None, 0.0)?;
    clean_graph(&expanded, seed, max_swaps)
}
