//! Brute-force ground truth on a small truncated Fock space.
//!
//! States are dense amplitude vectors over every occupation tuple allowed by
//! a [`Cutoff`]. Operators are second-quantized quadratic generators applied
//! through a scaled Taylor series, so nothing here shares code with the
//! combinatorial kernels it checks.

mod suite;

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::FRAC_PI_4;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::fock::ModePair;
use crate::splitter::{JointSplitState, ThreeWaySplitOutcome};
use crate::state::TwoModeState;
pub use suite::{
    amplifier_suite, conditional_suite, splitter_suite, standard_suites, three_way_suite, OracleConfig,
    SuiteReport, ORACLE_BOUND,
};

/// Largest population tolerated on the cutoff boundary after evolution.
pub const LEAKAGE_BOUND: f64 = 1e-6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Occupation limits of a [`FockSpace`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cutoff {
    /// Every mode holds at most this many photons.
    PerMode(u32),
    /// All modes together hold at most this many photons. Closed under
    /// passive (number-conserving) operations.
    Total(u32),
}

/// Enumerated basis of occupation tuples.
#[derive(Debug)]
pub struct FockSpace {
    modes: usize,
    cutoff: Cutoff,
    states: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl FockSpace {
    pub fn new(modes: usize, cutoff: Cutoff) -> Arc<FockSpace> {
        let mut states = Vec::new();
        let mut current = vec![0u32; modes];
        enumerate(&mut current, 0, 0, cutoff, &mut states);
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Arc::new(FockSpace {
            modes,
            cutoff,
            states,
            index,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn occupation(&self, i: usize) -> &[u32] {
        &self.states[i]
    }

    pub fn index_of(&self, occupation: &[u32]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    fn on_boundary(&self, occ: &[u32]) -> bool {
        match self.cutoff {
            Cutoff::PerMode(c) => occ.iter().any(|&n| n >= c),
            Cutoff::Total(c) => occ.iter().sum::<u32>() >= c,
        }
    }
}

fn enumerate(current: &mut Vec<u32>, mode: usize, used: u32, cutoff: Cutoff, out: &mut Vec<Vec<u32>>) {
    if mode == current.len() {
        out.push(current.clone());
        return;
    }
    let max = match cutoff {
        Cutoff::PerMode(c) => c,
        Cutoff::Total(c) => c - used,
    };
    for n in 0..=max {
        current[mode] = n;
        enumerate(current, mode + 1, used + n, cutoff, out);
    }
    current[mode] = 0;
}

/// Column-oriented sparse operator: `cols[j]` lists `(i, G_ij)`.
struct Generator {
    cols: Vec<Vec<(usize, Complex64)>>,
}

impl Generator {
    fn one_norm(&self) -> f64 {
        self.cols
            .iter()
            .map(|c| c.iter().map(|(_, z)| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|z| *z = ZERO);
        for (j, col) in self.cols.iter().enumerate() {
            let x = v[j];
            if x == ZERO {
                continue;
            }
            for &(i, g) in col {
                out[i] += g * x;
            }
        }
    }

    /// `exp(G) v` by splitting into unit-norm steps, each a Taylor series
    /// run to machine precision.
    fn exp_action(&self, mut v: Vec<Complex64>) -> Vec<Complex64> {
        let steps = self.one_norm().ceil().max(1.0) as usize;
        let h = 1.0 / steps as f64;
        let mut term = vec![ZERO; v.len()];
        let mut next = vec![ZERO; v.len()];
        for _ in 0..steps {
            term.copy_from_slice(&v);
            for k in 1..200 {
                self.apply(&term, &mut next);
                let scale = h / k as f64;
                let mut size = 0.0;
                for (t, n) in term.iter_mut().zip(&next) {
                    *t = n * scale;
                    size += t.norm_sqr();
                }
                for (x, t) in v.iter_mut().zip(&term) {
                    *x += t;
                }
                if size < 1e-36 {
                    break;
                }
            }
        }
        v
    }
}

/// Amplitude vector over a [`FockSpace`], with the probability that fell
/// outside it while being built.
#[derive(Clone, Debug)]
pub struct DenseState {
    space: Arc<FockSpace>,
    amps: Vec<Complex64>,
    leakage: f64,
}

impl DenseState {
    pub fn vacuum(space: &Arc<FockSpace>) -> DenseState {
        let mut amps = vec![ZERO; space.dim()];
        amps[space.index_of(&vec![0; space.modes]).expect("vacuum is always present")] = Complex64::new(1.0, 0.0);
        DenseState {
            space: space.clone(),
            amps,
            leakage: 0.0,
        }
    }

    pub fn from_amplitudes(
        space: &Arc<FockSpace>,
        amps: impl IntoIterator<Item = (Vec<u32>, Complex64)>,
    ) -> Result<DenseState> {
        let mut v = vec![ZERO; space.dim()];
        for (occ, z) in amps {
            let i = space
                .index_of(&occ)
                .ok_or_else(|| Error::Structural(format!("occupation {occ:?} outside the space")))?;
            v[i] += z;
        }
        Ok(DenseState {
            space: space.clone(),
            amps: v,
            leakage: 0.0,
        })
    }

    pub fn space(&self) -> &Arc<FockSpace> {
        &self.space
    }

    pub fn amplitude(&self, occupation: &[u32]) -> Complex64 {
        self.space.index_of(occupation).map_or(ZERO, |i| self.amps[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Probability lost to the cutoff so far.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    /// Population sitting on the cutoff boundary.
    pub fn boundary_population(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| self.space.on_boundary(self.space.occupation(*i)))
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }

    pub fn probabilities(&self) -> ProbabilityTable {
        let mut t = ProbabilityTable::new(self.space.modes);
        for (i, z) in self.amps.iter().enumerate() {
            let p = z.norm_sqr();
            if p > 0.0 {
                t.entries.insert(self.space.occupation(i).to_vec(), p);
            }
        }
        t
    }

    /// Copies the state into `target`, padding extra modes with vacuum.
    /// Occupations `target` cannot hold are added to the leakage.
    pub fn embed(&self, target: &Arc<FockSpace>) -> Result<DenseState> {
        if target.modes < self.space.modes {
            return Err(Error::Structural(format!(
                "cannot embed {} modes into {}",
                self.space.modes, target.modes
            )));
        }
        let mut amps = vec![ZERO; target.dim()];
        let mut leakage = self.leakage;
        let mut occ = vec![0u32; target.modes];
        for (i, &z) in self.amps.iter().enumerate() {
            occ[..self.space.modes].copy_from_slice(self.space.occupation(i));
            match target.index_of(&occ) {
                Some(j) => amps[j] = z,
                None => leakage += z.norm_sqr(),
            }
        }
        Ok(DenseState {
            space: target.clone(),
            amps,
            leakage,
        })
    }

    fn check_modes(&self, modes: &[usize]) -> Result<()> {
        for (k, &m) in modes.iter().enumerate() {
            if m >= self.space.modes || modes[..k].contains(&m) {
                return domain(format!("invalid mode list {modes:?} for {} modes", self.space.modes));
            }
        }
        Ok(())
    }

    /// Multiplies every amplitude by `exp(i phi n_mode)`.
    pub fn apply_phase(&self, mode: usize, phi: f64) -> Result<DenseState> {
        self.check_modes(&[mode])?;
        let mut out = self.clone();
        for (i, z) in out.amps.iter_mut().enumerate() {
            let n = self.space.occupation(i)[mode] as f64;
            *z *= Complex64::from_polar(1.0, phi * n);
        }
        Ok(out)
    }

    /// `exp(sum_rc l[r][c] a_(m_r)^dag a_(m_c))` with `m = [p, q]`. For a
    /// single photon this is the 2x2 matrix `exp(l)`, columns indexed by
    /// input mode.
    pub fn apply_mixer(&self, p: usize, q: usize, l: [[Complex64; 2]; 2]) -> Result<DenseState> {
        self.check_modes(&[p, q])?;
        if let Cutoff::PerMode(_) = self.space.cutoff {
            return Err(Error::Structural(
                "passive operations need a total-photon cutoff".into(),
            ));
        }
        let modes = [p, q];
        let space = &self.space;
        let mut cols = Vec::with_capacity(space.dim());
        let mut occ = vec![0u32; space.modes];
        for j in 0..space.dim() {
            let mut col = Vec::new();
            for (c, &mc) in modes.iter().enumerate() {
                let n_c = space.occupation(j)[mc];
                if n_c == 0 {
                    continue;
                }
                for (r, &mr) in modes.iter().enumerate() {
                    if l[r][c] == ZERO {
                        continue;
                    }
                    occ.copy_from_slice(space.occupation(j));
                    occ[mc] -= 1;
                    occ[mr] += 1;
                    let amp = (n_c as f64 * occ[mr] as f64).sqrt();
                    let i = space.index_of(&occ).expect("passive moves stay in a total cutoff");
                    col.push((i, l[r][c] * amp));
                }
            }
            cols.push(col);
        }
        let amps = Generator { cols }.exp_action(self.amps.clone());
        Ok(DenseState {
            space: space.clone(),
            amps,
            leakage: self.leakage,
        })
    }

    /// Beam splitter sending a photon in `p` to `sqrt(tau) p + i sqrt(1-tau) q`.
    pub fn apply_bs_unitary(&self, p: usize, q: usize, tau: f64) -> Result<DenseState> {
        if !(0.0..=1.0).contains(&tau) {
            return domain(format!("transmittivity {tau} outside [0, 1]"));
        }
        let theta = tau.sqrt().acos();
        let x = Complex64::new(0.0, theta);
        self.apply_mixer(p, q, [[ZERO, x], [x, ZERO]])
    }

    /// `a_p -> (a_p + a_q)/sqrt 2`, `a_q -> (a_p - a_q)/sqrt 2`, built as a
    /// balanced splitter between two quarter-wave phases.
    pub fn apply_hadamard(&self, p: usize, q: usize) -> Result<DenseState> {
        let x = Complex64::new(0.0, FRAC_PI_4);
        self.apply_phase(q, -std::f64::consts::FRAC_PI_2)?
            .apply_mixer(p, q, [[ZERO, x], [x, ZERO]])?
            .apply_phase(q, -std::f64::consts::FRAC_PI_2)
    }

    /// Re-expresses the `(H, V)` pair `(p, q)` in the equatorial basis
    /// `{pi_beta, pi_beta_perp}`.
    pub fn linear_to_equatorial(&self, p: usize, q: usize, beta: f64) -> Result<DenseState> {
        self.apply_phase(q, -beta)?.apply_hadamard(p, q)
    }

    /// Re-expresses the equatorial pair `(p, q)` from basis `from` to `to`.
    pub fn change_equatorial(&self, p: usize, q: usize, from: f64, to: f64) -> Result<DenseState> {
        self.apply_hadamard(p, q)?.apply_phase(q, from - to)?.apply_hadamard(p, q)
    }
}

/// `|n_H, n_V>` amplified with gain `g`, evolved on a per-mode cutoff.
pub fn evolve_amplifier(injected: ModePair, g: f64, n_cut: u32) -> Result<DenseState> {
    let space = FockSpace::new(2, Cutoff::PerMode(n_cut));
    let input = DenseState::from_amplitudes(&space, [(vec![injected.n_a, injected.n_b], Complex64::new(1.0, 0.0))])?;
    amplify(&input, g)
}

/// Applies `exp(g (a_H^dag a_V^dag - a_H a_V))` to a two-mode `(H, V)` state
/// on a per-mode cutoff.
pub fn amplify(input: &DenseState, g: f64) -> Result<DenseState> {
    if !g.is_finite() || g < 0.0 {
        return domain(format!("gain {g} must be finite and non-negative"));
    }
    let space = &input.space;
    if space.modes != 2 || !matches!(space.cutoff, Cutoff::PerMode(_)) {
        return Err(Error::Structural("the amplifier acts on a two-mode per-mode-cutoff space".into()));
    }
    let mut cols = Vec::with_capacity(space.dim());
    for j in 0..space.dim() {
        let (h, v) = (space.occupation(j)[0], space.occupation(j)[1]);
        let mut col = Vec::new();
        if let Some(i) = space.index_of(&[h + 1, v + 1]) {
            col.push((i, Complex64::new(g * ((h + 1) as f64 * (v + 1) as f64).sqrt(), 0.0)));
        }
        if h > 0 && v > 0 {
            let i = space.index_of(&[h - 1, v - 1]).expect("lowering stays inside");
            col.push((i, Complex64::new(-g * (h as f64 * v as f64).sqrt(), 0.0)));
        }
        cols.push(col);
    }
    let amps = Generator { cols }.exp_action(input.amps.clone());
    let out = DenseState {
        space: space.clone(),
        amps,
        leakage: input.leakage,
    };
    let leakage = out.boundary_population();
    if leakage > LEAKAGE_BOUND {
        return Err(Error::CutoffTooSmall {
            leakage,
            bound: LEAKAGE_BOUND,
        });
    }
    Ok(DenseState {
        leakage: out.leakage + leakage,
        ..out
    })
}

/// Probabilities keyed by occupation tuples of a fixed arity.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProbabilityTable {
    arity: usize,
    entries: BTreeMap<Vec<u32>, f64>,
}

impl ProbabilityTable {
    pub fn new(arity: usize) -> Self {
        ProbabilityTable {
            arity,
            entries: BTreeMap::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds `p` to the entry at `key`.
    pub fn add(&mut self, key: Vec<u32>, p: f64) -> Result<()> {
        if key.len() != self.arity {
            return Err(Error::Structural(format!(
                "key of arity {} in a table of arity {}",
                key.len(),
                self.arity
            )));
        }
        *self.entries.entry(key).or_insert(0.0) += p;
        Ok(())
    }

    pub fn get(&self, key: &[u32]) -> f64 {
        self.entries.get(key).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.entries.iter().map(|(k, &p)| (k.as_slice(), p))
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Entries whose key satisfies `keep`.
    pub fn restricted(&self, mut keep: impl FnMut(&[u32]) -> bool) -> ProbabilityTable {
        ProbabilityTable {
            arity: self.arity,
            entries: self.entries.iter().filter(|(k, _)| keep(k)).map(|(k, &p)| (k.clone(), p)).collect(),
        }
    }

    pub fn normalized(&self) -> Result<ProbabilityTable> {
        let total = self.total();
        if !(total > 0.0) {
            return domain("cannot normalize an empty table");
        }
        Ok(ProbabilityTable {
            arity: self.arity,
            entries: self.entries.iter().map(|(k, &p)| (k.clone(), p / total)).collect(),
        })
    }

    pub fn from_two_mode(state: &TwoModeState) -> Self {
        let mut t = ProbabilityTable::new(2);
        for (pair, w) in state.amplitudes() {
            t.entries.insert(vec![pair.n_a, pair.n_b], w.probability());
        }
        t
    }

    /// Keys `[t_a, t_b, r_a, r_b]`.
    pub fn from_joint(joint: &JointSplitState) -> Self {
        let mut t = ProbabilityTable::new(4);
        for (trans, refl, z) in joint.amplitudes() {
            let p = z.norm_sqr();
            if p > 0.0 {
                t.entries.insert(vec![trans.n_a, trans.n_b, refl.n_a, refl.n_b], p);
            }
        }
        t
    }

    /// Keys `[t_a, t_b, x_a, x_b, y_a, y_b]` for transmitted and branch counts.
    pub fn from_three_way(outcomes: &[ThreeWaySplitOutcome]) -> Self {
        let mut t = ProbabilityTable::new(6);
        for o in outcomes {
            let key = vec![
                o.trans.n_a,
                o.trans.n_b,
                o.branch1.n_a,
                o.branch1.n_b,
                o.branch2.n_a,
                o.branch2.n_b,
            ];
            *t.entries.entry(key).or_insert(0.0) += o.probability;
        }
        t
    }
}

/// Largest absolute difference over the union of keys; a key missing from
/// one table counts as probability zero there.
pub fn max_deviation(closed_form: &ProbabilityTable, dense: &ProbabilityTable) -> Result<f64> {
    if closed_form.arity != dense.arity {
        return Err(Error::Structural(format!(
            "tables of arity {} and {} are not comparable",
            closed_form.arity, dense.arity
        )));
    }
    let mut worst: f64 = 0.0;
    for (k, &p) in &closed_form.entries {
        worst = worst.max((p - dense.get(k)).abs());
    }
    for (k, &p) in &dense.entries {
        if !closed_form.entries.contains_key(k) {
            worst = worst.max(p.abs());
        }
    }
    Ok(worst)
}
