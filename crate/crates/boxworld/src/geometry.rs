//! Exact-rational polytope machinery: H- and V-representations of the
//! no-signaling and classical-process polytopes, affine hulls, double
//! description vertex enumeration, exact LP vertices, and the duality
//! checks tying behaviors to classical processes.

use crate::bitcore::{all_product_ops, bits_of, local_det_behavior};
use crate::linalg::{
    idot, in_span, integerize, isign, rank, reduce_int, rref, same_span, solve_affine, Rref,
};
use crate::process::{enumerate_det, fmt_rat, parse_rat, DetProcess, ProcessVector};
use crate::simplex::{solve, LpSolution, StandardLp};
use crate::{rat, Error, Int, Rat};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt::Write as _;

/// Half-space representation: `coeff . x = rhs` and `coeff . x >= rhs`
/// rows over an ambient dimension of one coordinate per `(a, x)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HPolytope {
    pub dim: usize,
    pub equalities: Vec<(Vec<Rat>, Rat)>,
    pub inequalities: Vec<(Vec<Rat>, Rat)>,
}

/// Vertex representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VPolytope {
    pub dim: usize,
    pub vertices: Vec<Vec<Rat>>,
}

impl HPolytope {
    /// Coordinatewise nonnegativity rows for dimension `dim`.
    fn nonneg_rows(dim: usize) -> Vec<(Vec<Rat>, Rat)> {
        (0..dim)
            .map(|i| {
                let mut c = vec![Rat::zero(); dim];
                c[i] = Rat::one();
                (c, Rat::zero())
            })
            .collect()
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.equalities.iter().all(|(c, r)| dot(c, x) == *r)
            && self.inequalities.iter().all(|(c, r)| dot(c, x) >= *r)
    }

    /// Exact vertex test: the point is feasible and its tight rows have
    /// full rank (the algebraic form of the LP basic-solution test).
    pub fn is_vertex(&self, x: &[Rat]) -> bool {
        if !self.contains(x) {
            return false;
        }
        let mut tight: Vec<Vec<Rat>> = self.equalities.iter().map(|(c, _)| c.clone()).collect();
        for (c, r) in &self.inequalities {
            if dot(c, x) == *r {
                tight.push(c.clone());
            }
        }
        rank(&tight) == self.dim
    }

    /// Text form: header `H <dim>`, then `E`/`I` rows of exact rationals
    /// with the right-hand side last.
    pub fn to_text(&self) -> String {
        let mut out = format!("H {}\n", self.dim);
        for (kind, rows) in [("E", &self.equalities), ("I", &self.inequalities)] {
            for (c, r) in rows.iter() {
                let _ = write!(out, "{kind}");
                for v in c {
                    let _ = write!(out, " {}", fmt_rat(v));
                }
                let _ = writeln!(out, " {}", fmt_rat(r));
            }
        }
        out
    }

    pub fn from_text(s: &str) -> Result<Self, Error> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Precondition("empty H-rep".into()))?;
        let dim: usize = header
            .strip_prefix("H ")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Precondition("bad H-rep header".into()))?;
        let mut h = HPolytope { dim, equalities: vec![], inequalities: vec![] };
        for line in lines {
            let mut toks = line.split_whitespace();
            let kind = toks.next().unwrap_or("");
            let vals: Result<Vec<Rat>, _> = toks.map(parse_rat).collect();
            let mut vals = vals?;
            if vals.len() != dim + 1 {
                return Err(Error::DimensionMismatch(format!("row width {}", vals.len())));
            }
            let rhs = vals.pop().expect("nonempty");
            match kind {
                "E" => h.equalities.push((vals, rhs)),
                "I" => h.inequalities.push((vals, rhs)),
                _ => return Err(Error::Precondition(format!("bad row kind {kind:?}"))),
            }
        }
        Ok(h)
    }
}

impl VPolytope {
    pub fn to_text(&self) -> String {
        let mut out = format!("V {}\n", self.dim);
        for v in &self.vertices {
            let mut first = true;
            for x in v {
                if !first {
                    out.push(' ');
                }
                let _ = write!(out, "{}", fmt_rat(x));
                first = false;
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(s: &str) -> Result<Self, Error> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Precondition("empty V-rep".into()))?;
        let dim: usize = header
            .strip_prefix("V ")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Precondition("bad V-rep header".into()))?;
        let mut vertices = Vec::new();
        for line in lines {
            let row: Result<Vec<Rat>, _> = line.split_whitespace().map(parse_rat).collect();
            let row = row?;
            if row.len() != dim {
                return Err(Error::DimensionMismatch(format!("vertex width {}", row.len())));
            }
            vertices.push(row);
        }
        Ok(VPolytope { dim, vertices })
    }
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// H-representation of the no-signaling behavior polytope: per-setting
/// normalization, marginal equalities, and nonnegativity.
pub fn ns_hrep(n: usize) -> HPolytope {
    let m = 1usize << n;
    let dim = m * m;
    let mut equalities = Vec::new();
    for x in 0..m {
        let mut c = vec![Rat::zero(); dim];
        for a in 0..m {
            c[a * m + x] = Rat::one();
        }
        equalities.push((c, Rat::one()));
    }
    // party i's marginal over a_i agrees between x_i = 0 and x_i = 1
    for i in 0..n {
        let hi = 1usize << (n - 1 - i);
        for a in 0..m {
            if a & hi != 0 {
                continue;
            }
            for x in 0..m {
                if x & hi != 0 {
                    continue;
                }
                let mut c = vec![Rat::zero(); dim];
                for ai in [a, a | hi] {
                    c[ai * m + x] += Rat::one();
                    c[ai * m + (x | hi)] -= Rat::one();
                }
                equalities.push((c, Rat::zero()));
            }
        }
    }
    HPolytope { dim, equalities, inequalities: HPolytope::nonneg_rows(dim) }
}

/// H-representation of the classical-process polytope: one normalization
/// equality per product operation plus nonnegativity.
pub fn cp_hrep(n: usize) -> HPolytope {
    let m = 1usize << n;
    let dim = m * m;
    let equalities = all_product_ops(n)
        .iter()
        .map(|op| {
            let mut c = vec![Rat::zero(); dim];
            for x in 0..m {
                c[op.apply(x) * m + x] = Rat::one();
            }
            (c, Rat::one())
        })
        .collect();
    HPolytope { dim, equalities, inequalities: HPolytope::nonneg_rows(dim) }
}

/// Reduced row-echelon basis of an equality system's span; inconsistent
/// systems are reported distinctly.
pub fn affine_hull(eqs: &[(Vec<Rat>, Rat)]) -> Result<Rref, Error> {
    let ncols = eqs.first().map_or(0, |(c, _)| c.len());
    let aug: Vec<Vec<Rat>> = eqs
        .iter()
        .map(|(c, r)| {
            let mut v = c.clone();
            v.push(r.clone());
            v
        })
        .collect();
    let red = rref(&aug);
    if red.pivots.contains(&ncols) {
        return Err(Error::InconsistentSystem);
    }
    Ok(red)
}

// ---------------------------------------------------------------------------
// double description
// ---------------------------------------------------------------------------

/// Bitset over up to 256 constraint rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct RowSet([u64; 4]);

impl RowSet {
    const EMPTY: RowSet = RowSet([0; 4]);
    fn set(&mut self, i: usize) {
        self.0[i >> 6] |= 1 << (i & 63);
    }
    fn and(&self, o: &RowSet) -> RowSet {
        RowSet([
            self.0[0] & o.0[0],
            self.0[1] & o.0[1],
            self.0[2] & o.0[2],
            self.0[3] & o.0[3],
        ])
    }
    fn contains_all(&self, o: &RowSet) -> bool {
        (o.0[0] & !self.0[0]) == 0
            && (o.0[1] & !self.0[1]) == 0
            && (o.0[2] & !self.0[2]) == 0
            && (o.0[3] & !self.0[3]) == 0
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|l| l.count_ones()).sum()
    }
}

struct Ray {
    v: Vec<Int>,
    zeros: RowSet,
}

fn ray_zeros(v: &[Int], rows: &[Vec<Int>]) -> RowSet {
    let mut z = RowSet::EMPTY;
    for (i, row) in rows.iter().enumerate() {
        if idot(row, v).is_zero() {
            z.set(i);
        }
    }
    z
}

/// Extreme rays of the pointed cone `{ y : rows . y >= 0 }` by incremental
/// double description. Rows are inserted in the given order after a
/// greedily chosen independent initial subset; rays are primitive integer
/// vectors. Single-threaded by design.
fn dual_description(rows: &[Vec<Int>], max_rays: usize) -> Result<Vec<Vec<Int>>, Error> {
    let k = rows.first().map_or(0, Vec::len);
    if rows.len() > 256 {
        return Err(Error::Guard(format!("{} cone rows exceed the 256-row bitset", rows.len())));
    }
    // greedy independent subset in row order
    let rat_rows: Vec<Vec<Rat>> =
        rows.iter().map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect();
    let mut chosen: Vec<usize> = Vec::new();
    let mut span: Vec<Vec<Rat>> = Vec::new();
    for (i, r) in rat_rows.iter().enumerate() {
        span.push(r.clone());
        if rank(&span) == span.len() {
            chosen.push(i);
            if chosen.len() == k {
                break;
            }
        } else {
            span.pop();
        }
    }
    if chosen.len() < k {
        return Err(Error::Guard("cone is not pointed (rows do not have full rank)".into()));
    }
    // initial rays: columns of the inverse of the chosen row matrix
    let mut init: Vec<Vec<Int>> = Vec::with_capacity(k);
    for j in 0..k {
        let cols: Vec<Vec<Rat>> = chosen.iter().map(|&i| rat_rows[i].clone()).collect();
        let rhs: Vec<Rat> = (0..k).map(|i| if i == j { Rat::one() } else { Rat::zero() }).collect();
        let sol = solve_affine(&cols, &rhs)?;
        init.push(integerize(&sol.particular));
    }
    let mut processed = RowSet::EMPTY;
    for &i in &chosen {
        processed.set(i);
    }
    let mut rays: Vec<Ray> =
        init.into_iter().map(|v| Ray { zeros: ray_zeros(&v, rows), v }).collect();

    for j in 0..rows.len() {
        if chosen.contains(&j) {
            continue;
        }
        let row = &rows[j];
        let dots: Vec<Int> = rays.iter().map(|r| idot(row, &r.v)).collect();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (i, d) in dots.iter().enumerate() {
            match isign(d) {
                1 => pos.push(i),
                -1 => neg.push(i),
                _ => {}
            }
        }
        let mut fresh: Vec<Ray> = Vec::new();
        if !neg.is_empty() {
            let need = (k as u32).saturating_sub(2);
            for &ip in &pos {
                for &im in &neg {
                    let common = rays[ip].zeros.and(&rays[im].zeros).and(&processed);
                    if common.count() < need {
                        continue;
                    }
                    // adjacency: no third ray's zero set contains the common set
                    let adjacent = rays.iter().enumerate().all(|(i3, r3)| {
                        i3 == ip || i3 == im || !r3.zeros.contains_all(&common)
                    });
                    if !adjacent {
                        continue;
                    }
                    let dp = &dots[ip];
                    let dn = &dots[im];
                    let mut v: Vec<Int> = (0..k)
                        .map(|t| dp * &rays[im].v[t] - dn * &rays[ip].v[t])
                        .collect();
                    reduce_int(&mut v);
                    fresh.push(Ray { zeros: ray_zeros(&v, rows), v });
                }
            }
        }
        let neg_set: BTreeSet<usize> = neg.into_iter().collect();
        let mut kept: Vec<Ray> = Vec::with_capacity(rays.len());
        for (i, r) in rays.into_iter().enumerate() {
            if !neg_set.contains(&i) {
                kept.push(r);
            }
        }
        kept.extend(fresh);
        rays = kept;
        processed.set(j);
        if rays.len() > max_rays {
            return Err(Error::VertexBudget { rays: rays.len(), inserted: j + 1, total: rows.len() });
        }
    }
    Ok(rays.into_iter().map(|r| r.v).collect())
}

/// Complete vertex list of a bounded polytope via double description over
/// the affine hull. Fails loudly when the reduced dimension exceeds 64 or
/// the ray budget is exhausted; results are sorted and deduplicated.
pub fn vertex_enum(h: &HPolytope) -> Result<VPolytope, Error> {
    vertex_enum_budgeted(h, 4_000_000)
}

pub fn vertex_enum_budgeted(h: &HPolytope, max_rays: usize) -> Result<VPolytope, Error> {
    let eq_rows: Vec<Vec<Rat>> = h.equalities.iter().map(|(c, _)| c.clone()).collect();
    let eq_rhs: Vec<Rat> = h.equalities.iter().map(|(_, r)| r.clone()).collect();
    let sol = solve_affine(&eq_rows, &eq_rhs)?;
    let k = sol.null_basis.len();
    if k > 64 {
        return Err(Error::Guard(format!(
            "reduced dimension {k} exceeds the 64-dimension enumeration guard"
        )));
    }
    // cone rows over (t_1..t_k, s): for g.x >= r, row = [g.N | g.x0 - r]
    let mut cone: Vec<Vec<Int>> = Vec::with_capacity(h.inequalities.len() + 1);
    for (g, r) in &h.inequalities {
        let mut row: Vec<Rat> = Vec::with_capacity(k + 1);
        for basis_vec in &sol.null_basis {
            let s: Rat = g
                .iter()
                .zip(basis_vec)
                .filter(|(gi, _)| !gi.is_zero())
                .map(|(gi, bi)| gi * Rat::from_integer(bi.clone()))
                .sum();
            row.push(s);
        }
        row.push(dot(g, &sol.particular) - r.clone());
        cone.push(integerize(&row));
    }
    let mut s_row = vec![Int::zero(); k + 1];
    s_row[k] = Int::one();
    cone.push(s_row);

    let rays = dual_description(&cone, max_rays)?;
    let mut verts: BTreeSet<Vec<Rat>> = BTreeSet::new();
    for ray in rays {
        let s = &ray[k];
        if s.is_zero() {
            return Err(Error::Guard("unbounded direction found in a polytope".into()));
        }
        let srat = Rat::from_integer(s.clone());
        let mut x = sol.particular.clone();
        for (t, basis_vec) in ray[..k].iter().zip(&sol.null_basis) {
            if t.is_zero() {
                continue;
            }
            let f = Rat::from_integer(t.clone()) / &srat;
            for (xi, bi) in x.iter_mut().zip(basis_vec) {
                if !bi.is_zero() {
                    *xi += &f * Rat::from_integer(bi.clone());
                }
            }
        }
        verts.insert(x);
    }
    Ok(VPolytope { dim: h.dim, vertices: verts.into_iter().collect() })
}

/// Exact LP over the polytope: returns a basic optimal solution (always a
/// vertex), with fractional coordinates as exact rationals.
///
/// Requires every coordinate to carry an explicit nonnegativity row, which
/// holds for every polytope built in this module; remaining inequalities
/// get slack variables.
pub fn lp_vertex(h: &HPolytope, objective: &[Rat]) -> Result<Vec<Rat>, Error> {
    let (lp, nvars) = to_standard_form(h, objective)?;
    let sol: LpSolution<Rat> = solve(&lp)?;
    Ok(sol.x[..nvars].to_vec())
}

fn to_standard_form(h: &HPolytope, objective: &[Rat]) -> Result<(StandardLp<Rat>, usize), Error> {
    if objective.len() != h.dim {
        return Err(Error::DimensionMismatch(format!(
            "objective len {} vs dim {}",
            objective.len(),
            h.dim
        )));
    }
    let mut covered = vec![false; h.dim];
    let mut general: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for (c, r) in &h.inequalities {
        let nz: Vec<usize> = (0..h.dim).filter(|&i| !c[i].is_zero()).collect();
        if nz.len() == 1 && c[nz[0]].is_one() && r.is_zero() {
            covered[nz[0]] = true;
        } else {
            general.push((c.clone(), r.clone()));
        }
    }
    if covered.iter().any(|&b| !b) {
        return Err(Error::Guard(
            "lp_vertex requires explicit nonnegativity rows for all coordinates".into(),
        ));
    }
    let nslack = general.len();
    let ncols = h.dim + nslack;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (c, r) in &h.equalities {
        let mut row = c.clone();
        row.resize(ncols, Rat::zero());
        rows.push(row);
        rhs.push(r.clone());
    }
    for (i, (c, r)) in general.iter().enumerate() {
        let mut row = c.clone();
        row.resize(ncols, Rat::zero());
        row[h.dim + i] = -Rat::one();
        rows.push(row);
        rhs.push(r.clone());
    }
    let mut obj = objective.to_vec();
    obj.resize(ncols, Rat::zero());
    Ok((StandardLp { rows, rhs, objective: obj }, h.dim))
}

// ---------------------------------------------------------------------------
// the M^{D(n-1)} family and the no-signaling derivation
// ---------------------------------------------------------------------------

/// One member of the `M^{D(n-1)}` family: every party except
/// `future_party` receives the constant `constants[i]`; the future party
/// receives the OR of the others' outputs after per-wire identity/flip
/// channels selected by `channel_flips`.
pub fn build_md_family(
    n: usize,
    future_party: usize,
    constants: &[u8],
    channel_flips: &[u8],
) -> Result<DetProcess, Error> {
    if future_party == 0 || future_party > n {
        return Err(Error::Precondition(format!("future_party {future_party} not in 1..={n}")));
    }
    if constants.len() != n - 1 || channel_flips.len() != n - 1 {
        return Err(Error::DimensionMismatch("constants/flips must have n-1 entries".into()));
    }
    let j = future_party - 1;
    Ok(DetProcess::from_coords(n, |a| {
        let others: Vec<u8> = (0..n).filter(|&i| i != j).map(|i| a[i]).collect();
        let fed: Vec<u8> =
            others.iter().zip(channel_flips).map(|(&b, &c)| b ^ c).collect();
        let xj = u8::from(fed.iter().any(|&b| b == 1));
        let mut x = Vec::with_capacity(n);
        let mut it = constants.iter();
        for i in 0..n {
            if i == j {
                x.push(xj);
            } else {
                x.push(*it.next().expect("n-1 constants"));
            }
        }
        x
    }))
}

/// All `n * 2^{2(n-1)}` members of the family.
pub fn md_family(n: usize) -> Vec<DetProcess> {
    let mut out = Vec::new();
    for j in 1..=n {
        for xc in 0..1usize << (n - 1) {
            for cc in 0..1usize << (n - 1) {
                let xs = bits_of(xc, n - 1);
                let cs = bits_of(cc, n - 1);
                out.push(build_md_family(n, j, &xs, &cs).expect("valid family parameters"));
            }
        }
    }
    out
}

/// The `2^n` all-constant processes `M^{D(n)}`.
pub fn constant_processes(n: usize) -> Vec<DetProcess> {
    (0..1usize << n)
        .map(|x| DetProcess::new(n, vec![x as u16; 1 << n]).expect("valid constant"))
        .collect()
}

fn aug_row(m: &ProcessVector) -> Vec<Rat> {
    let mut v = m.entries.clone();
    v.push(Rat::one());
    v
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeriveReport {
    pub n: usize,
    pub rank_ns_equalities: usize,
    pub rank_family: usize,
    pub joint_rank: usize,
    pub spans_match: bool,
    pub redundancy_rank_with_full_catalog: usize,
    pub redundancy_ok: bool,
    /// Directions present in one span but not the other (row indices into
    /// the RREF bases); empty on success.
    pub missing_directions: Vec<usize>,
    pub extra_directions: Vec<usize>,
}

/// Derive the no-signaling equalities from classical processes: the
/// constant processes give normalization, the `M^{D(n-1)}` family gives
/// (after eliminating the shared rows) exactly the marginal equalities.
pub fn derive_ns_from_cp(n: usize) -> Result<DeriveReport, Error> {
    if !(2..=3).contains(&n) {
        return Err(Error::Precondition("derive_ns_from_cp supports n in {2,3}".into()));
    }
    let ns = ns_hrep(n);
    let ns_aug: Vec<Vec<Rat>> = ns
        .equalities
        .iter()
        .map(|(c, r)| {
            let mut v = c.clone();
            v.push(r.clone());
            v
        })
        .collect();
    let mut fam_aug: Vec<Vec<Rat>> = Vec::new();
    for f in constant_processes(n).iter().chain(md_family(n).iter()) {
        fam_aug.push(aug_row(&f.to_matrix()));
    }
    let ns_basis = rref(&ns_aug);
    let fam_basis = rref(&fam_aug);
    let joint = rank(&[ns_aug.clone(), fam_aug.clone()].concat());

    let missing: Vec<usize> = ns_basis
        .rows
        .iter()
        .enumerate()
        .filter(|(_, row)| !in_span(&fam_basis, row))
        .map(|(i, _)| i)
        .collect();
    let extra: Vec<usize> = fam_basis
        .rows
        .iter()
        .enumerate()
        .filter(|(_, row)| !in_span(&ns_basis, row))
        .map(|(i, _)| i)
        .collect();
    let spans_match = missing.is_empty() && extra.is_empty();

    // every remaining deterministic vertex row is redundant
    let mut all_aug = fam_aug.clone();
    for f in enumerate_det(n)? {
        all_aug.push(aug_row(&f.to_matrix()));
    }
    let full_rank = rank(&all_aug);

    Ok(DeriveReport {
        n,
        rank_ns_equalities: ns_basis.rank(),
        rank_family: fam_basis.rank(),
        joint_rank: joint,
        spans_match,
        redundancy_rank_with_full_catalog: full_rank,
        redundancy_ok: full_rank == fam_basis.rank(),
        missing_directions: missing,
        extra_directions: extra,
    })
}

// ---------------------------------------------------------------------------
// duality
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualityReport {
    pub n: usize,
    pub direction_a: String,
    pub direction_b: String,
    pub ranks: DualityRanks,
    pub ns_vertex_count: usize,
    pub catalog_size: usize,
    /// How direction (a)'s vertex-set equality was established.
    pub direction_a_vertex_evidence: String,
    pub negative_control_ok: bool,
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualityRanks {
    pub ns_equalities: usize,
    pub catalog_equalities: usize,
    pub cp_equalities: usize,
    pub local_state_equalities: usize,
}

/// Theorem-1/Theorem-2 operational duality check.
///
/// Direction (a): the behaviors normalized by every deterministic
/// classical process form exactly the no-signaling polytope. Direction
/// (b): the vectors normalized by every local deterministic state form
/// exactly the classical-process polytope (the local-state vectors and
/// the product-operation matrices are the same 0/1 vectors).
pub fn check_duality(n: usize) -> Result<DualityReport, Error> {
    if !(2..=3).contains(&n) {
        return Err(Error::Precondition("check_duality supports n in {2,3}".into()));
    }
    let catalog = enumerate_det(n)?;
    let ns = ns_hrep(n);

    // direction (a): affine hulls agree
    let ns_aug: Vec<Vec<Rat>> = ns
        .equalities
        .iter()
        .map(|(c, r)| {
            let mut v = c.clone();
            v.push(r.clone());
            v
        })
        .collect();
    let cat_aug: Vec<Vec<Rat>> = catalog.iter().map(|f| aug_row(&f.to_matrix())).collect();
    let hulls_equal = same_span(&ns_aug, &cat_aug);

    let ns_vertices = vertex_enum(&ns)?;
    let mut counterexample = None;

    let direction_a_vertex_evidence;
    let mut dir_a = hulls_equal;
    if n == 2 {
        // independently enumerate the catalog-defined polytope and compare
        let cat_h = HPolytope {
            dim: ns.dim,
            equalities: catalog.iter().map(|f| (f.to_matrix().entries, rat(1))).collect(),
            inequalities: HPolytope::nonneg_rows(ns.dim),
        };
        let cat_vertices = vertex_enum(&cat_h)?;
        let equal_sets = cat_vertices.vertices == ns_vertices.vertices;
        if !equal_sets {
            dir_a = false;
            counterexample = Some(format!(
                "vertex sets differ: ns has {}, catalog polytope has {}",
                ns_vertices.vertices.len(),
                cat_vertices.vertices.len()
            ));
        }
        direction_a_vertex_evidence = "independent enumeration of both H-representations".into();
    } else {
        // hulls agree and the inequality rows coincide, so the two
        // H-representations carve the same set; additionally check that
        // every enumerated vertex is normalized by every catalog process.
        'outer: for v in &ns_vertices.vertices {
            for f in &catalog {
                let m = 1usize << n;
                let s: Rat =
                    (0..m).map(|a| v[a * m + f.x_of_a[a] as usize].clone()).sum();
                if s != rat(1) {
                    dir_a = false;
                    counterexample =
                        Some(format!("vertex not normalized by process {:?}", f.x_of_a));
                    break 'outer;
                }
            }
        }
        direction_a_vertex_evidence =
            "equal affine hulls with identical nonnegativity rows; every enumerated vertex normalized by the full catalog".into();
    }
    if !hulls_equal && counterexample.is_none() {
        counterexample = Some("affine hulls differ".into());
    }

    // direction (b): Eq.-(12) identity between local deterministic states
    // and product-operation matrices, vector by vector
    let ops = all_product_ops(n);
    let cp = cp_hrep(n);
    let mut dir_b = true;
    for op in &ops {
        let q = local_det_behavior(op);
        let m = 1usize << n;
        let mut d_vec = vec![Rat::zero(); m * m];
        for x in 0..m {
            d_vec[op.apply(x) * m + x] = rat(1);
        }
        if q.p != d_vec {
            dir_b = false;
            counterexample = Some(format!("local state differs from op matrix for {:?}", op.tags));
        }
    }
    let local_aug: Vec<Vec<Rat>> =
        ops.iter().map(|op| aug_row(&ProcessVector { n, entries: local_det_behavior(op).p })).collect();
    let cp_aug: Vec<Vec<Rat>> = cp
        .equalities
        .iter()
        .map(|(c, r)| {
            let mut v = c.clone();
            v.push(r.clone());
            v
        })
        .collect();
    if !same_span(&local_aug, &cp_aug) {
        dir_b = false;
        counterexample = Some("local-state span differs from cp span".into());
    }

    // negative control: drop one member of a basis subset of the
    // local-state equalities; the solution set must strictly grow.
    // (Dropping from the full 4^n set never grows it: every row is
    // redundant there, which is asserted in tests.)
    let local_rank = rank(&local_aug);
    let mut basis_rows: Vec<Vec<Rat>> = Vec::new();
    for row in &local_aug {
        basis_rows.push(row.clone());
        if rank(&basis_rows) < basis_rows.len() {
            basis_rows.pop();
        }
        if basis_rows.len() == local_rank {
            break;
        }
    }
    let dropped = basis_rows.pop().expect("nonempty basis");
    let negative_control_ok = !in_span(&rref(&basis_rows), &dropped);

    Ok(DualityReport {
        n,
        direction_a: if dir_a { "pass" } else { "fail" }.into(),
        direction_b: if dir_b { "pass" } else { "fail" }.into(),
        ranks: DualityRanks {
            ns_equalities: rank(&ns_aug),
            catalog_equalities: rank(&cat_aug),
            cp_equalities: rank(&cp_aug),
            local_state_equalities: local_rank,
        },
        ns_vertex_count: ns_vertices.vertices.len(),
        catalog_size: catalog.len(),
        direction_a_vertex_evidence,
        negative_control_ok,
        counterexample,
    })
}

/// Deterministic integer objective for seeded vertex sampling.
pub fn random_objective(dim: usize, rng: &mut impl rand::Rng) -> Vec<Rat> {
    (0..dim).map(|_| rat(rng.gen_range(-9..=9))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::index_of;
    use rand::SeedableRng;

    #[test]
    fn ns_ranks_and_membership() {
        let h2 = ns_hrep(2);
        let hull = affine_hull(&h2.equalities).unwrap();
        assert_eq!(hull.rank(), 8); // affine dimension 16 - 8 = 8 = 3^2 - 1
        let h3 = ns_hrep(3);
        assert_eq!(affine_hull(&h3.equalities).unwrap().rank(), 38); // dim 26
        for op in all_product_ops(2) {
            assert!(h2.contains(&local_det_behavior(&op).p));
        }
        // normalization rows alone have rank 2^n
        let norm_only: Vec<_> = h2.equalities.iter().take(4).cloned().collect();
        assert_eq!(affine_hull(&norm_only).unwrap().rank(), 4);
    }

    #[test]
    fn cp_ranks_and_membership() {
        let h = cp_hrep(2);
        assert_eq!(affine_hull(&h.equalities).unwrap().rank(), 9); // 3^n
        for f in enumerate_det(2).unwrap() {
            assert!(h.contains(&f.to_matrix().entries));
        }
        let uniform = vec![crate::ratio(1, 4); 16];
        assert!(h.contains(&uniform));
        assert_eq!(affine_hull(&cp_hrep(3).equalities).unwrap().rank(), 27);
    }

    #[test]
    fn affine_hull_inconsistent() {
        let eqs = vec![
            (vec![rat(1), rat(1)], rat(1)),
            (vec![rat(1), rat(1)], rat(2)),
        ];
        assert!(matches!(affine_hull(&eqs), Err(Error::InconsistentSystem)));
    }

    #[test]
    fn simplex_vertices_of_probability_simplex() {
        let h = HPolytope {
            dim: 4,
            equalities: vec![(vec![rat(1); 4], rat(1))],
            inequalities: HPolytope::nonneg_rows(4),
        };
        let v = vertex_enum(&h).unwrap();
        assert_eq!(v.vertices.len(), 4);
        for vert in &v.vertices {
            assert_eq!(vert.iter().filter(|x| !x.is_zero()).count(), 1);
            assert!(h.is_vertex(vert));
        }
    }

    #[test]
    fn ns2_has_24_vertices() {
        let v = vertex_enum(&ns_hrep(2)).unwrap();
        assert_eq!(v.vertices.len(), 24);
        let h = ns_hrep(2);
        let dets: usize = v
            .vertices
            .iter()
            .filter(|x| x.iter().all(|q| q.is_zero() || q.is_one()))
            .count();
        assert_eq!(dets, 16); // 16 local deterministic + 8 extremal boxes
        for x in &v.vertices {
            assert!(h.is_vertex(x));
        }
    }

    #[test]
    fn cp2_vertices_equal_the_deterministic_catalog() {
        let v = vertex_enum(&cp_hrep(2)).unwrap();
        let catalog: BTreeSet<Vec<Rat>> =
            enumerate_det(2).unwrap().iter().map(|f| f.to_matrix().entries).collect();
        let found: BTreeSet<Vec<Rat>> = v.vertices.iter().cloned().collect();
        assert_eq!(found.len(), 12);
        assert_eq!(found, catalog); // no fractional vertices in the bipartite case
    }

    #[test]
    fn lp_vertex_examples() {
        let h = cp_hrep(2);
        // indicator of (a=0, x=0): optimum 1 at a deterministic vertex with f(0)=0
        let mut obj = vec![Rat::zero(); 16];
        obj[0] = rat(1);
        let v = lp_vertex(&h, &obj).unwrap();
        assert_eq!(v[0], rat(1));
        let pv = ProcessVector { n: 2, entries: v };
        assert!(pv.validate());
        // zero objective: any vertex; must be a valid process
        let v0 = lp_vertex(&h, &vec![Rat::zero(); 16]).unwrap();
        assert!(ProcessVector { n: 2, entries: v0 }.validate());
    }

    #[test]
    fn md_family_examples() {
        // n=2, future=2, X=0, c=1: x1 = 0, x2 = NOT a1
        let f = build_md_family(2, 2, &[0], &[1]).unwrap();
        assert_eq!(
            f.x_of_a,
            vec![
                index_of(&[0, 1]) as u16,
                index_of(&[0, 1]) as u16,
                index_of(&[0, 0]) as u16,
                index_of(&[0, 0]) as u16
            ]
        );
        for n in 2..=3 {
            let fam = md_family(n);
            assert_eq!(fam.len(), n * (1 << (2 * (n - 1))));
            assert!(fam.iter().all(DetProcess::is_consistent));
        }
    }

    #[test]
    fn derive_ns_n2() {
        let rep = derive_ns_from_cp(2).unwrap();
        assert_eq!(rep.rank_ns_equalities, 8);
        assert_eq!(rep.rank_family, 8);
        assert_eq!(rep.joint_rank, 8);
        assert!(rep.spans_match);
        assert!(rep.redundancy_ok);
    }

    #[test]
    fn duality_n2() {
        let rep = check_duality(2).unwrap();
        assert_eq!(rep.direction_a, "pass");
        assert_eq!(rep.direction_b, "pass");
        assert_eq!(rep.ns_vertex_count, 24);
        assert_eq!(rep.catalog_size, 12);
        assert!(rep.negative_control_ok);
    }

    #[test]
    fn full_local_state_set_is_row_redundant() {
        // dropping any single local-state equality never changes the span
        let ops = all_product_ops(2);
        let rows: Vec<Vec<Rat>> = ops
            .iter()
            .map(|op| {
                let mut v = local_det_behavior(op).p;
                v.push(rat(1));
                v
            })
            .collect();
        let full = rank(&rows);
        assert_eq!(full, 9);
        for i in 0..rows.len() {
            let sub: Vec<Vec<Rat>> = rows
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, r)| r.clone())
                .collect();
            assert_eq!(rank(&sub), full);
        }
    }

    #[test]
    fn seeded_sampling_hits_fractional_vertex_on_cp3() {
        let h = cp_hrep(3);
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(7);
        let mut found_fractional = false;
        for _ in 0..400 {
            let obj = random_objective(h.dim, &mut rng);
            let v = lp_vertex(&h, &obj).unwrap();
            assert!(h.is_vertex(&v));
            if v.iter().any(|q| !q.is_zero() && !q.is_one()) {
                assert!(ProcessVector { n: 3, entries: v }.validate());
                found_fractional = true;
                break;
            }
        }
        assert!(found_fractional, "no fractional vertex in 400 seeded trials");
    }

    #[test]
    fn hrep_vrep_text_roundtrip() {
        let h = ns_hrep(2);
        let h2 = HPolytope::from_text(&h.to_text()).unwrap();
        assert_eq!(h, h2);
        let v = vertex_enum(&h).unwrap();
        let v2 = VPolytope::from_text(&v.to_text()).unwrap();
        assert_eq!(v, v2);
    }
}
