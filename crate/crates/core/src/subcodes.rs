//! Component block codes placed at GC nodes, and the ensemble they define.
//!
//! Words of length `K <= 24` are packed into a `u32`: bit `j` holds position
//! `j + 1` of the code (positions are 1-based in the literature, 0-based here).

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};

/// Largest code length accepted anywhere in the crate.
pub const MAX_LENGTH: usize = 24;
/// Largest code dimension for which codewords are enumerated.
pub const MAX_DIMENSION: usize = 24;
/// Largest length for the exhaustive automorphism search.
pub const MAX_AUTOMORPHISM_SEARCH: usize = 8;

/// Binary parity-check matrix with rows packed as bit masks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityCheck {
    len: usize,
    rows: Vec<u32>,
}

impl ParityCheck {
    /// Builds a matrix from 0/1 rows. All rows must have the same length.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let len = rows
            .first()
            .map(|r| r.as_ref().len())
            .ok_or_else(|| Error::MalformedMatrix("no rows".into()))?;
        if len == 0 || len > MAX_LENGTH {
            return Err(Error::MalformedMatrix(format!(
                "row length {len} outside 1..={MAX_LENGTH}"
            )));
        }
        let mut packed = Vec::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != len {
                return Err(Error::MalformedMatrix(format!(
                    "row {} has {} entries, expected {len}",
                    r + 1,
                    row.len()
                )));
            }
            let mut mask = 0u32;
            for (j, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => mask |= 1 << j,
                    other => {
                        return Err(Error::MalformedMatrix(format!(
                            "entry {other} at row {}, column {} is not 0/1",
                            r + 1,
                            j + 1
                        )))
                    }
                }
            }
            packed.push(mask);
        }
        Ok(Self { len, rows: packed })
    }

    /// Parses the plain-text matrix format: a header line `m K` followed by
    /// `m` rows of `K` space-separated 0/1 entries.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::MalformedMatrix("empty input".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|s| s.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::MalformedMatrix(format!("bad header `{header}`: {e}")))?;
        let [m, k] = dims[..] else {
            return Err(Error::MalformedMatrix(format!(
                "header `{header}` must be `rows columns`"
            )));
        };
        let mut rows = Vec::with_capacity(m);
        for line in lines.by_ref().take(m) {
            let row: Vec<u8> = line
                .split_whitespace()
                .map(|s| s.parse::<u8>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::MalformedMatrix(format!("bad row `{line}`: {e}")))?;
            if row.len() != k {
                return Err(Error::MalformedMatrix(format!(
                    "row `{line}` has {} entries, header says {k}",
                    row.len()
                )));
            }
            rows.push(row);
        }
        if rows.len() != m {
            return Err(Error::MalformedMatrix(format!(
                "header announces {m} rows, found {}",
                rows.len()
            )));
        }
        if lines.next().is_some() {
            return Err(Error::MalformedMatrix("trailing rows after matrix".into()));
        }
        Self::from_rows(&rows)
    }

    /// Number of columns (code length `K`).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of rows (`m'`), counting dependent rows.
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Packed rows.
    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    /// Row `r` as a 0/1 vector.
    pub fn row_bits(&self, r: usize) -> Vec<u8> {
        unpack(self.rows[r], self.len)
    }

    /// True iff `word` has zero syndrome.
    pub fn is_codeword(&self, word: u32) -> bool {
        self.rows.iter().all(|&r| (r & word).count_ones() % 2 == 0)
    }

    /// GF(2) rank of the matrix.
    pub fn rank(&self) -> usize {
        row_reduce(&self.rows, self.len).0.len()
    }

    /// Renders the matrix in the same text format accepted by [`parse`](Self::parse).
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows.len(), self.len);
        for r in 0..self.rows.len() {
            let row: Vec<String> = self.row_bits(r).iter().map(u8::to_string).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

/// Reduced row echelon form over GF(2); returns the nonzero rows and their
/// pivot columns.
fn row_reduce(rows: &[u32], len: usize) -> (Vec<u32>, Vec<usize>) {
    let mut rows = rows.to_vec();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..len {
        let bit = 1u32 << col;
        let Some(p) = (rank..rows.len()).find(|&r| rows[r] & bit != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot_row = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row & bit != 0 {
                *row ^= pivot_row;
            }
        }
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    (rows, pivots)
}

/// Sort key that orders packed words lexicographically by position 1, 2, ...
pub fn lex_key(word: u32, len: usize) -> u32 {
    if len == 0 {
        0
    } else {
        word.reverse_bits() >> (32 - len)
    }
}

/// Unpacks a word into a 0/1 vector of length `len`.
pub fn unpack(word: u32, len: usize) -> Vec<u8> {
    (0..len).map(|j| ((word >> j) & 1) as u8).collect()
}

/// Packs a 0/1 slice into a word.
pub fn pack(bits: &[u8]) -> u32 {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (j, &b)| acc | (u32::from(b & 1) << j))
}

/// All vectors in the GF(2) null space of `h`, in lexicographic order.
///
/// The null space is spanned from a basis obtained by Gaussian elimination,
/// so the cost is `2^(K - rank)` regardless of `K`.
pub fn enumerate_codewords(h: &ParityCheck) -> Result<Vec<u32>> {
    let len = h.len();
    let (reduced, pivots) = row_reduce(h.rows(), len);
    let free: Vec<usize> = (0..len).filter(|c| !pivots.contains(c)).collect();
    if free.len() > MAX_DIMENSION {
        return Err(Error::DimensionOverflow {
            dimension: free.len(),
            limit: MAX_DIMENSION,
        });
    }
    // One basis vector per free column: set the free bit, then solve each
    // pivot bit from its reduced row.
    let basis: Vec<u32> = free
        .iter()
        .map(|&f| {
            let mut v = 1u32 << f;
            for (row, &p) in reduced.iter().zip(&pivots) {
                if row & (1 << f) != 0 {
                    v |= 1 << p;
                }
            }
            v
        })
        .collect();
    let mut words: Vec<u32> = (0u64..(1u64 << basis.len()))
        .map(|sel| {
            basis
                .iter()
                .enumerate()
                .filter(|(b, _)| sel >> b & 1 == 1)
                .fold(0u32, |acc, (_, &v)| acc ^ v)
        })
        .collect();
    words.sort_unstable_by_key(|&w| lex_key(w, len));
    Ok(words)
}

/// Coordinate permutations `pi_1 .. pi_K` with `pi_i(1) = i`.
///
/// `perms[i][j] = k` means `pi_{i+1}` sends position `j + 1` to position
/// `k + 1`. The APP message to position `i` is the position-1 message map
/// evaluated on the inputs `x_j = L_{pi_i(j)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationTable {
    perms: Vec<Vec<usize>>,
}

impl PermutationTable {
    /// Builds a table from 1-based rows as printed in the literature.
    pub fn from_one_based(rows: &[&[usize]]) -> Result<Self> {
        let perms = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&p| {
                        p.checked_sub(1)
                            .ok_or_else(|| Error::InvalidPermutations("position 0".into()))
                    })
                    .collect()
            })
            .collect::<Result<Vec<Vec<usize>>>>()?;
        Self::new(perms)
    }

    /// Builds a table from 0-based rows, checking the structural invariants.
    pub fn new(perms: Vec<Vec<usize>>) -> Result<Self> {
        let k = perms.len();
        for (i, p) in perms.iter().enumerate() {
            if p.len() != k {
                return Err(Error::InvalidPermutations(format!(
                    "pi_{} has {} entries, expected {k}",
                    i + 1,
                    p.len()
                )));
            }
            let mut seen = vec![false; k];
            for &x in p {
                if x >= k || std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidPermutations(format!(
                        "pi_{} is not a permutation of 1..={k}",
                        i + 1
                    )));
                }
            }
            if p[0] != i {
                return Err(Error::InvalidPermutations(format!(
                    "pi_{} maps position 1 to {}",
                    i + 1,
                    p[0] + 1
                )));
            }
        }
        Ok(Self { perms })
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    /// `pi_{i+1}` as a 0-based image vector.
    pub fn get(&self, i: usize) -> &[usize] {
        &self.perms[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.perms.iter().map(Vec::as_slice)
    }
}

/// Applies a coordinate permutation to a packed word: bit `j` moves to
/// position `perm[j]`.
pub fn permute_word(word: u32, perm: &[usize]) -> u32 {
    perm.iter()
        .enumerate()
        .fold(0u32, |acc, (j, &to)| acc | (((word >> j) & 1) << to))
}

/// A binary linear block code used at GC nodes.
#[derive(Clone, Debug)]
pub struct LinearSubcode {
    name: String,
    parity: ParityCheck,
    codewords: Vec<u32>,
    permutations: Option<PermutationTable>,
}

impl LinearSubcode {
    /// Builds a subcode from its parity-check matrix and enumerates codewords.
    pub fn new(name: impl Into<String>, parity: ParityCheck) -> Result<Self> {
        let codewords = enumerate_codewords(&parity)?;
        Ok(Self {
            name: name.into(),
            parity,
            codewords,
            permutations: None,
        })
    }

    /// Attaches a permutation table after checking every permutation is a
    /// coordinate automorphism of the code.
    pub fn with_permutations(mut self, table: PermutationTable) -> Result<Self> {
        if table.len() != self.len() {
            return Err(Error::InvalidPermutations(format!(
                "table has {} permutations, code length is {}",
                table.len(),
                self.len()
            )));
        }
        for (i, p) in table.iter().enumerate() {
            if !self.is_automorphism(p) {
                return Err(Error::InvalidPermutations(format!(
                    "pi_{} does not preserve the codeword set of {}",
                    i + 1,
                    self.name
                )));
            }
        }
        self.permutations = Some(table);
        Ok(self)
    }

    /// Runs the automorphism search and attaches the result, if any.
    pub fn with_searched_permutations(self) -> Result<Self> {
        match verify_message_invariance(&self)? {
            Invariance::Transitive(table) => self.with_permutations(table),
            Invariance::NotInvariant { .. } => Ok(self),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Code length `K`.
    pub fn len(&self) -> usize {
        self.parity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parity.is_empty()
    }

    /// Row count `m'` of the parity-check matrix (used for design rates).
    pub fn check_rows(&self) -> usize {
        self.parity.num_rows()
    }

    pub fn parity_check(&self) -> &ParityCheck {
        &self.parity
    }

    /// Codewords in lexicographic order; the all-zero word comes first.
    pub fn codewords(&self) -> &[u32] {
        &self.codewords
    }

    pub fn permutations(&self) -> Option<&PermutationTable> {
        self.permutations.as_ref()
    }

    pub fn contains(&self, word: u32) -> bool {
        self.parity.is_codeword(word)
    }

    /// True iff `perm` maps the codeword set onto itself.
    pub fn is_automorphism(&self, perm: &[usize]) -> bool {
        perm.len() == self.len()
            && self
                .codewords
                .iter()
                .all(|&c| self.contains(permute_word(c, perm)))
    }

    /// Smallest nonzero codeword weight, or `None` for the zero code.
    pub fn min_distance(&self) -> Option<u32> {
        self.codewords
            .iter()
            .filter(|&&c| c != 0)
            .map(|c| c.count_ones())
            .min()
    }

    /// The `(K, K-1)` single-parity-check code.
    pub fn single_parity_check(len: usize) -> Result<Self> {
        let row = vec![1u8; len];
        let code = Self::new(format!("SPC{len}"), ParityCheck::from_rows(&[row])?)?;
        let perms = (0..len)
            .map(|i| {
                let mut p: Vec<usize> = (0..len).collect();
                p.swap(0, i);
                p
            })
            .collect();
        code.with_permutations(PermutationTable::new(perms)?)
    }

    /// Loads a subcode from a plain-text matrix file and searches for its
    /// automorphisms when the length allows it.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let parity = ParityCheck::parse(&text)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "custom".into());
        let code = Self::new(name, parity)?;
        if code.len() <= MAX_AUTOMORPHISM_SEARCH {
            code.with_searched_permutations()
        } else {
            Ok(code)
        }
    }

    /// Resolves a built-in name (`C1`, `C2`, case-insensitive).
    pub fn builtin(name: &str) -> Result<Self> {
        match name.to_ascii_uppercase().as_str() {
            "C1" => Ok(builtin_c1()),
            "C2" => Ok(builtin_c2()),
            _ => Err(Error::UnknownSubcode(name.into())),
        }
    }

    /// Resolves either a built-in name or a path to a matrix file.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        match Self::builtin(name_or_path) {
            Err(Error::UnknownSubcode(_)) if Path::new(name_or_path).exists() => {
                Self::load(Path::new(name_or_path))
            }
            other => other,
        }
    }
}

impl fmt::Display for LinearSubcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (K={}, m'={}, {} codewords)",
            self.name,
            self.len(),
            self.check_rows(),
            self.codewords.len()
        )
    }
}

/// The (6,3) shortened Hamming code with its message-map permutations.
pub fn builtin_c1() -> LinearSubcode {
    let h = ParityCheck::from_rows(&[
        [1u8, 0, 0, 1, 1, 0],
        [0, 1, 0, 1, 0, 1],
        [0, 0, 1, 0, 1, 1],
    ])
    .expect("valid C1 matrix");
    let table = PermutationTable::from_one_based(&[
        &[1, 2, 3, 4, 5, 6],
        &[2, 3, 1, 6, 4, 5],
        &[3, 1, 2, 5, 6, 4],
        &[4, 2, 6, 1, 5, 3],
        &[5, 1, 4, 3, 6, 2],
        &[6, 3, 5, 2, 4, 1],
    ])
    .expect("valid C1 table");
    LinearSubcode::new("C1", h)
        .and_then(|c| c.with_permutations(table))
        .expect("C1 table preserves codewords")
}

/// The (7,4) Hamming code with its message-map permutations.
pub fn builtin_c2() -> LinearSubcode {
    let h = ParityCheck::from_rows(&[
        [0u8, 1, 1, 1, 1, 0, 0],
        [1, 0, 1, 1, 0, 1, 0],
        [1, 1, 0, 1, 0, 0, 1],
    ])
    .expect("valid C2 matrix");
    let table = PermutationTable::from_one_based(&[
        &[1, 2, 3, 4, 5, 6, 7],
        &[2, 3, 1, 4, 6, 7, 5],
        &[3, 1, 2, 4, 7, 5, 6],
        &[4, 7, 3, 1, 5, 6, 2],
        &[5, 2, 7, 4, 1, 6, 3],
        &[6, 2, 4, 3, 5, 1, 7],
        &[7, 4, 3, 2, 5, 6, 1],
    ])
    .expect("valid C2 table");
    LinearSubcode::new("C2", h)
        .and_then(|c| c.with_permutations(table))
        .expect("C2 table preserves codewords")
}

/// Outcome of the automorphism search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Invariance {
    /// One automorphism per position; the code is message-invariant.
    Transitive(PermutationTable),
    /// No automorphism sends position 1 to this (1-based) position.
    NotInvariant { position: usize },
}

/// Searches the coordinate automorphisms of `code` for a permutation
/// `pi_i` with `pi_i(1) = i` for every position `i`.
///
/// For each position the lexicographically first valid permutation is
/// returned, so `pi_1` is always the identity.
pub fn verify_message_invariance(code: &LinearSubcode) -> Result<Invariance> {
    let k = code.len();
    if k > MAX_AUTOMORPHISM_SEARCH {
        return Err(Error::AutomorphismSearchTooLarge(k));
    }
    let mut perms = Vec::with_capacity(k);
    for target in 0..k {
        let mut perm = vec![0usize; k];
        perm[0] = target;
        let mut used = vec![false; k];
        used[target] = true;
        if search_automorphism(code, &mut perm, &mut used, 1) {
            perms.push(perm);
        } else {
            return Ok(Invariance::NotInvariant {
                position: target + 1,
            });
        }
    }
    Ok(Invariance::Transitive(PermutationTable::new(perms)?))
}

fn search_automorphism(
    code: &LinearSubcode,
    perm: &mut [usize],
    used: &mut [bool],
    depth: usize,
) -> bool {
    let k = perm.len();
    if depth == k {
        return code.is_automorphism(perm);
    }
    for cand in 0..k {
        if used[cand] {
            continue;
        }
        used[cand] = true;
        perm[depth] = cand;
        if search_automorphism(code, perm, used, depth + 1) {
            return true;
        }
        used[cand] = false;
    }
    false
}

/// Design rate `R = 1 - J/K - t (J/K) (m' - 1)` of the `(C, J, K, t)` ensemble.
///
/// Negative rates are returned as computed; a warning is logged when `R <= 0`.
pub fn design_rate(j: usize, k: usize, m_prime: usize, t: f64) -> f64 {
    let ratio = j as f64 / k as f64;
    let rate = 1.0 - ratio - t * ratio * (m_prime as f64 - 1.0);
    if rate <= 0.0 {
        log::warn!("design rate {rate:.4} <= 0 for J={j}, K={k}, m'={m_prime}, t={t}");
    }
    rate
}

/// Parameters of a `(C, J, K, t)` GLDPC ensemble with block length `n`.
#[derive(Clone, Debug)]
pub struct EnsembleSpec {
    pub subcode: Arc<LinearSubcode>,
    /// Variable-node degree `J`.
    pub var_degree: usize,
    /// Fraction `t` of constraint nodes that are GC nodes.
    pub gc_fraction: f64,
    /// Number of variable nodes `n` (only used by finite-graph sampling).
    pub block_length: usize,
}

impl EnsembleSpec {
    pub fn new(
        subcode: LinearSubcode,
        var_degree: usize,
        gc_fraction: f64,
        block_length: usize,
    ) -> Result<Self> {
        let spec = Self {
            subcode: Arc::new(subcode),
            var_degree,
            gc_fraction,
            block_length,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Constraint-node degree `K` (the subcode length).
    pub fn check_degree(&self) -> usize {
        self.subcode.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.check_degree();
        if self.var_degree == 0 {
            return Err(invalid("variable degree must be positive"));
        }
        if k < 2 {
            return Err(invalid("constraint degree must be at least 2"));
        }
        if !(0.0..=1.0).contains(&self.gc_fraction) {
            return Err(invalid(format!(
                "GC fraction {} outside [0, 1]",
                self.gc_fraction
            )));
        }
        Ok(())
    }

    /// Number of constraint nodes `m = nJ/K`; errors unless integral.
    pub fn num_checks(&self) -> Result<usize> {
        let edges = self.block_length * self.var_degree;
        if self.block_length == 0 || edges % self.check_degree() != 0 {
            return Err(invalid(format!(
                "nJ = {edges} is not a positive multiple of K = {}",
                self.check_degree()
            )));
        }
        Ok(edges / self.check_degree())
    }

    /// Number of GC nodes in a finite graph: `round(t m)`.
    pub fn num_gc(&self) -> Result<usize> {
        Ok((self.gc_fraction * self.num_checks()? as f64).round() as usize)
    }

    pub fn design_rate(&self) -> f64 {
        design_rate(
            self.var_degree,
            self.check_degree(),
            self.subcode.check_rows(),
            self.gc_fraction,
        )
    }

    /// Edge-perspective constraint profile used by density evolution.
    pub fn edge_profile(&self) -> EdgeProfile {
        let k = self.check_degree();
        let mut checks = Vec::new();
        if self.gc_fraction > 0.0 {
            checks.push((CheckKind::Gc(self.subcode.clone()), self.gc_fraction));
        }
        if self.gc_fraction < 1.0 {
            checks.push((CheckKind::Spc { degree: k }, 1.0 - self.gc_fraction));
        }
        EdgeProfile {
            var_degree: self.var_degree,
            checks,
        }
    }
}

/// Type of a constraint node seen from an edge.
#[derive(Clone, Debug)]
pub enum CheckKind {
    Spc { degree: usize },
    Gc(Arc<LinearSubcode>),
}

impl CheckKind {
    pub fn degree(&self) -> usize {
        match self {
            CheckKind::Spc { degree } => *degree,
            CheckKind::Gc(code) => code.len(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            CheckKind::Spc { degree } => format!("SPC{degree}"),
            CheckKind::Gc(code) => code.name().to_string(),
        }
    }
}

/// Regular variable degree plus an edge-perspective mixture of constraint
/// node types. Covers both GLDPC ensembles (GC + SPC of one degree) and LDPC
/// ensembles with several check degrees.
#[derive(Clone, Debug)]
pub struct EdgeProfile {
    pub var_degree: usize,
    /// `(kind, fraction of edges)`; fractions sum to one.
    pub checks: Vec<(CheckKind, f64)>,
}

impl EdgeProfile {
    /// LDPC ensemble with variable degree `var_degree` and check-degree
    /// distribution `(degree, edge fraction)`. Zero-weight entries are dropped.
    pub fn ldpc(var_degree: usize, check_degrees: &[(usize, f64)]) -> Result<Self> {
        let checks: Vec<(CheckKind, f64)> = check_degrees
            .iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|&(degree, w)| (CheckKind::Spc { degree }, w))
            .collect();
        let profile = Self { var_degree, checks };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        if self.var_degree < 2 {
            return Err(invalid("variable degree must be at least 2 for iterative decoding"));
        }
        if self.checks.is_empty() {
            return Err(invalid("empty constraint profile"));
        }
        let total: f64 = self.checks.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-9 || self.checks.iter().any(|(_, w)| *w < 0.0) {
            return Err(invalid(format!("edge fractions must be nonnegative and sum to 1 (got {total})")));
        }
        for (kind, _) in &self.checks {
            if kind.degree() < 2 {
                return Err(invalid("constraint degree must be at least 2"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_null_space(h: &ParityCheck) -> Vec<u32> {
        let k = h.len();
        let mut words: Vec<u32> = (0u32..(1 << k)).filter(|&w| h.is_codeword(w)).collect();
        words.sort_by_key(|&w| lex_key(w, k));
        words
    }

    fn word(s: &str) -> u32 {
        pack(&s.bytes().map(|b| b - b'0').collect::<Vec<_>>())
    }

    #[test]
    fn c1_enumeration_matches_brute_force() {
        let c1 = builtin_c1();
        assert_eq!(c1.len(), 6);
        assert_eq!(c1.check_rows(), 3);
        assert_eq!(c1.codewords().len(), 8);
        assert_eq!(c1.codewords(), brute_force_null_space(c1.parity_check()));
        assert!(c1.codewords().contains(&word("000000")));
        assert!(c1.codewords().contains(&word("110011")));
        assert!(!c1.codewords().contains(&word("011011")));
    }

    #[test]
    fn c2_enumeration_and_min_distance() {
        let c2 = builtin_c2();
        assert_eq!(c2.codewords().len(), 16);
        assert_eq!(c2.codewords(), brute_force_null_space(c2.parity_check()));
        assert_eq!(c2.min_distance(), Some(3));
    }

    #[test]
    fn trivial_matrix_has_only_zero_word() {
        let h = ParityCheck::from_rows(&[[1u8]]).unwrap();
        assert_eq!(enumerate_codewords(&h).unwrap(), vec![0]);
    }

    #[test]
    fn rank_deficient_matrix_uses_true_rank() {
        let h = ParityCheck::from_rows(&[[1u8, 1, 0, 0], [0, 1, 1, 0], [1, 0, 1, 0]]).unwrap();
        assert_eq!(h.rank(), 2);
        let code = LinearSubcode::new("dep", h).unwrap();
        assert_eq!(code.codewords().len(), 4);
        assert_eq!(code.check_rows(), 3);
    }

    #[test]
    fn codewords_are_lexicographic() {
        let c2 = builtin_c2();
        let strings: Vec<String> = c2
            .codewords()
            .iter()
            .map(|&w| unpack(w, 7).iter().map(|b| char::from(b'0' + b)).collect())
            .collect();
        let mut sorted = strings.clone();
        sorted.sort();
        assert_eq!(strings, sorted);
        assert_eq!(c2.codewords()[0], 0);
    }

    #[test]
    fn dimension_overflow_is_rejected() {
        let h = ParityCheck::from_rows(&[{
            let mut r = vec![0u8; 24];
            r[0] = 1;
            r
        }])
        .unwrap();
        // 24 columns, rank 1 -> dimension 23 is fine.
        assert_eq!(enumerate_codewords(&h).unwrap().len(), 1 << 23);
        let h = ParityCheck {
            len: 26,
            rows: vec![1],
        };
        assert!(matches!(
            enumerate_codewords(&h),
            Err(Error::DimensionOverflow { dimension: 25, .. })
        ));
    }

    #[test]
    fn table_entries_match_printed_rows() {
        let c1 = builtin_c1();
        let t = c1.permutations().unwrap();
        assert_eq!(t.get(0), &[0, 1, 2, 3, 4, 5]);
        assert_eq!(t.get(3), &[3, 1, 5, 0, 4, 2]);
        let c2 = builtin_c2();
        assert_eq!(c2.permutations().unwrap().get(1), &[1, 2, 0, 3, 5, 6, 4]);
    }

    #[test]
    fn printed_tables_are_automorphisms() {
        for code in [builtin_c1(), builtin_c2()] {
            let set: std::collections::BTreeSet<u32> = code.codewords().iter().copied().collect();
            for p in code.permutations().unwrap().iter() {
                let image: std::collections::BTreeSet<u32> =
                    code.codewords().iter().map(|&c| permute_word(c, p)).collect();
                assert_eq!(image, set);
            }
        }
    }

    #[test]
    fn bad_tables_are_rejected() {
        let c1 = builtin_c1();
        let swapped = PermutationTable::new(
            (0..6)
                .map(|i| {
                    let mut p: Vec<usize> = (0..6).collect();
                    p.swap(0, i);
                    p
                })
                .collect(),
        )
        .unwrap();
        assert!(c1.with_permutations(swapped).is_err());
        assert!(PermutationTable::new(vec![vec![1, 0], vec![1, 0]]).is_err());
    }

    #[test]
    fn builtins_are_transitive() {
        for code in [builtin_c1(), builtin_c2()] {
            let Invariance::Transitive(table) = verify_message_invariance(&code).unwrap() else {
                panic!("{} should be transitive", code.name());
            };
            assert_eq!(table.get(0), (0..code.len()).collect::<Vec<_>>().as_slice());
            for (i, p) in table.iter().enumerate() {
                assert_eq!(p[0], i);
                assert!(code.is_automorphism(p));
            }
        }
    }

    #[test]
    fn repetition_code_is_transitive() {
        let h = ParityCheck::from_rows(&[[1u8, 1, 0], [0, 1, 1]]).unwrap();
        let code = LinearSubcode::new("rep3", h).unwrap();
        assert_eq!(code.codewords(), &[0, 0b111]);
        assert!(matches!(
            verify_message_invariance(&code).unwrap(),
            Invariance::Transitive(_)
        ));
    }

    #[test]
    fn non_transitive_code_reports_first_position() {
        // Position 3 is forced to zero, positions 1 and 2 are free.
        let h = ParityCheck::from_rows(&[[0u8, 0, 1]]).unwrap();
        let code = LinearSubcode::new("skew", h).unwrap();
        assert_eq!(
            verify_message_invariance(&code).unwrap(),
            Invariance::NotInvariant { position: 3 }
        );
    }

    #[test]
    fn automorphism_search_limit() {
        let code = LinearSubcode::single_parity_check(9).unwrap();
        assert!(matches!(
            verify_message_invariance(&code),
            Err(Error::AutomorphismSearchTooLarge(9))
        ));
    }

    #[test]
    fn design_rate_examples() {
        approx::assert_abs_diff_eq!(design_rate(2, 6, 3, 0.0), 2.0 / 3.0, epsilon = 1e-15);
        approx::assert_abs_diff_eq!(design_rate(2, 6, 3, 0.8), 2.0 / 15.0, epsilon = 1e-15);
        approx::assert_abs_diff_eq!(design_rate(2, 7, 3, 1.0), 1.0 / 7.0, epsilon = 1e-15);
    }

    #[test]
    fn matrix_text_round_trip() {
        let h = builtin_c2().parity_check().clone();
        assert_eq!(ParityCheck::parse(&h.to_text()).unwrap(), h);
        assert!(ParityCheck::parse("2 3\n1 0 1\n").is_err());
        assert!(ParityCheck::parse("1 3\n1 0 2\n").is_err());
        assert!(ParityCheck::parse("1 3\n1 0\n").is_err());
    }

    #[test]
    fn builtin_lookup() {
        assert_eq!(LinearSubcode::builtin("c1").unwrap().name(), "C1");
        assert!(matches!(
            LinearSubcode::builtin("C9"),
            Err(Error::UnknownSubcode(_))
        ));
    }

    #[test]
    fn ensemble_counts() {
        let spec = EnsembleSpec::new(builtin_c1(), 2, 0.8, 3000).unwrap();
        assert_eq!(spec.num_checks().unwrap(), 1000);
        assert_eq!(spec.num_gc().unwrap(), 800);
        let spec = EnsembleSpec::new(builtin_c2(), 2, 0.85, 3500).unwrap();
        assert_eq!(spec.num_checks().unwrap(), 1000);
        assert_eq!(spec.num_gc().unwrap(), 850);
        let bad = EnsembleSpec::new(builtin_c1(), 2, 0.5, 1001).unwrap();
        assert!(bad.num_checks().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn design_rate_decomposition(j in 1usize..8, extra in 1usize..12, m in 1usize..12, t in 0.0f64..=1.0) {
                let k = j + extra;
                let r0 = 1.0 - j as f64 / k as f64;
                let alt = r0 - t * (1.0 - r0) * (m as f64 - 1.0);
                prop_assert!((design_rate(j, k, m, t) - alt).abs() < 1e-12);
            }

            #[test]
            fn null_space_is_a_subgroup(rows in proptest::collection::vec(proptest::collection::vec(0u8..2, 9), 1..6)) {
                let h = ParityCheck::from_rows(&rows).unwrap();
                let words = enumerate_codewords(&h).unwrap();
                prop_assert_eq!(words.len(), 1usize << (9 - h.rank()));
                prop_assert_eq!(words[0], 0);
                let set: std::collections::HashSet<u32> = words.iter().copied().collect();
                for &a in &words {
                    prop_assert!(h.is_codeword(a));
                    for &b in &words {
                        prop_assert!(set.contains(&(a ^ b)));
                    }
                }
            }
        }
    }
}
