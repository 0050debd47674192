//! Configurations and their evolution under the global map.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::linalg::{DenseMatrix, SolutionSet};
use crate::rulematrix::{Params, RuleMatrix};
use crate::tree::TreeShape;

/// Exhaustive operations refuse to visit more configurations than this.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 20;

/// State vector on `V_n`, indexed by linear vertex index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    shape: TreeShape,
    field: PrimeField,
    values: Vec<u32>,
}

impl Configuration {
    pub fn new(shape: TreeShape, field: PrimeField, values: Vec<u32>) -> Result<Self> {
        if values.len() != shape.total_vertices() {
            return Err(Error::DimensionMismatch {
                expected: shape.total_vertices(),
                found: values.len(),
            });
        }
        if let Some(&bad) = values.iter().find(|&&v| v >= field.modulus()) {
            return Err(Error::InvalidArgument(format!(
                "{bad} is not a residue mod {}",
                field.modulus()
            )));
        }
        Ok(Self {
            shape,
            field,
            values,
        })
    }

    pub fn zeros(shape: &TreeShape, field: PrimeField) -> Self {
        Self {
            values: vec![0; shape.total_vertices()],
            shape: shape.clone(),
            field,
        }
    }

    /// Unit configuration: 1 at `index`, 0 elsewhere.
    pub fn delta(shape: &TreeShape, field: PrimeField, index: usize) -> Result<Self> {
        let mut cfg = Self::zeros(shape, field);
        let slot = cfg.values.get_mut(index).ok_or(Error::DimensionMismatch {
            expected: shape.total_vertices(),
            found: index,
        })?;
        *slot = 1;
        Ok(cfg)
    }

    pub fn random<R: Rng + ?Sized>(shape: &TreeShape, field: PrimeField, rng: &mut R) -> Self {
        let values = (0..shape.total_vertices())
            .map(|_| rng.gen_range(0..field.modulus()))
            .collect();
        Self {
            shape: shape.clone(),
            field,
            values,
        }
    }

    /// Uniformly random configuration from a ChaCha8 stream seeded with `seed`.
    pub fn seeded(shape: &TreeShape, field: PrimeField, seed: u64) -> Self {
        Self::random(shape, field, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn shape(&self) -> &TreeShape {
        &self.shape
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn into_values(self) -> Vec<u32> {
        self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn add(&self, other: &Configuration) -> Result<Configuration> {
        self.check_compatible(&other.shape, other.field)?;
        let f = self.field;
        Ok(self.with_values(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&x, &y)| f.add(x, y))
                .collect(),
        ))
    }

    pub fn scale(&self, k: u32) -> Configuration {
        let f = self.field;
        let k = f.reduce_u64(k as u64);
        self.with_values(self.values.iter().map(|&x| f.mul(x, k)).collect())
    }

    fn with_values(&self, values: Vec<u32>) -> Configuration {
        Configuration {
            shape: self.shape.clone(),
            field: self.field,
            values,
        }
    }

    fn check_compatible(&self, shape: &TreeShape, field: PrimeField) -> Result<()> {
        if self.field != field {
            return Err(Error::InvalidArgument(format!(
                "configuration lives in {} but the rule is over {field}",
                self.field
            )));
        }
        if self.shape != *shape {
            return Err(Error::DimensionMismatch {
                expected: shape.total_vertices(),
                found: self.shape.total_vertices(),
            });
        }
        Ok(())
    }

    /// Applies an arbitrary dense matrix of matching order, e.g. an inverse.
    pub fn apply_dense(&self, m: &DenseMatrix) -> Result<Configuration> {
        if m.field() != self.field {
            return Err(Error::InvalidArgument("field mismatch".into()));
        }
        Ok(self.with_values(m.mul_vec(&self.values)?))
    }
}

impl Serialize for Configuration {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.values.serialize(s)
    }
}

/// One synchronous update by the local rule, without any matrix.
///
/// Works directly on level positions: vertex `j` of level `l >= 2` has
/// parent `j / 2` on level `l - 1`, and children `2j`, `2j + 1` on level
/// `l + 1`. Children beyond level `n` read as 0.
pub fn step_local(cfg: &Configuration, params: &Params) -> Result<Configuration> {
    if cfg.field != params.field {
        return Err(Error::InvalidArgument("field mismatch".into()));
    }
    let shape = &cfg.shape;
    let f = params.field;
    let x = &cfg.values;
    let n = shape.levels() as usize;
    let sizes = shape.level_sizes();
    let offsets = shape.level_offsets();
    let mut out = vec![0u32; x.len()];

    out[0] = [
        (params.a, x[1]),
        (params.b, x[2]),
        (params.c, x[3]),
        (params.d, x[0]),
    ]
    .iter()
    .fold(0, |acc, &(k, v)| f.mul_add(k, v, acc));

    for l in 1..=n {
        for j in 0..sizes[l] {
            let v = offsets[l] + j;
            let parent = if l == 1 { 0 } else { offsets[l - 1] + j / 2 };
            let mut acc = f.mul_add(params.c, x[parent], f.mul(params.d, x[v]));
            if l < n {
                let first = offsets[l + 1] + 2 * j;
                acc = f.mul_add(params.a, x[first], acc);
                acc = f.mul_add(params.b, x[first + 1], acc);
            }
            out[v] = acc;
        }
    }
    Ok(cfg.with_values(out))
}

/// One update as a matrix-vector product.
pub fn step_matrix(cfg: &Configuration, m: &RuleMatrix) -> Result<Configuration> {
    cfg.check_compatible(m.shape(), m.field())?;
    Ok(cfg.with_values(m.apply(&cfg.values)?))
}

/// `states[0]` is the initial configuration, `states[k]` the k-th image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvolutionTrace {
    #[serde(skip)]
    pub params: Params,
    pub states: Vec<Configuration>,
}

impl EvolutionTrace {
    pub fn initial(&self) -> &Configuration {
        &self.states[0]
    }

    pub fn last(&self) -> &Configuration {
        self.states.last().expect("trace is never empty")
    }

    /// JSON array of state vectors.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.states).expect("configurations serialize")
    }
}

pub fn evolve(cfg: &Configuration, params: &Params, steps: usize) -> Result<EvolutionTrace> {
    let mut states = Vec::with_capacity(steps + 1);
    states.push(cfg.clone());
    for _ in 0..steps {
        let next = step_local(states.last().unwrap(), params)?;
        states.push(next);
    }
    Ok(EvolutionTrace {
        params: *params,
        states,
    })
}

/// Eventual periodicity of an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Cycle {
    /// Steps before the orbit first enters the cycle.
    pub preperiod: usize,
    pub period: usize,
}

/// Finds the cycle reached from `cfg` by remembering every visited state.
/// Returns `None` if no repeat occurs within `max_steps`.
pub fn find_cycle(cfg: &Configuration, params: &Params, max_steps: usize) -> Result<Option<Cycle>> {
    let mut seen: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut cur = cfg.clone();
    for t in 0..=max_steps {
        if let Some(&first) = seen.get(&cur.values) {
            return Ok(Some(Cycle {
                preperiod: first,
                period: t - first,
            }));
        }
        seen.insert(cur.values.clone(), t);
        cur = step_local(&cur, params)?;
    }
    Ok(None)
}

pub fn preimages(cfg: &Configuration, m: &RuleMatrix) -> Result<SolutionSet> {
    cfg.check_compatible(m.shape(), m.field())?;
    m.solve(&cfg.values)
}

/// Every preimage of `cfg`, or `EnumerationTooLarge` when there are more
/// than `cap` of them.
pub fn enumerate_preimages(
    cfg: &Configuration,
    m: &RuleMatrix,
    cap: u64,
) -> Result<Vec<Configuration>> {
    Ok(preimages(cfg, m)?
        .enumerate(cap)?
        .into_iter()
        .map(|v| cfg.with_values(v))
        .collect())
}

/// Counts of reachable and unreachable configurations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GardenReport {
    pub p: u32,
    pub order: usize,
    pub rank: usize,
    /// `p^rank`, absent if it overflows `u128`.
    pub image_size: Option<u128>,
    /// `p^order - p^rank`, absent if it overflows `u128`.
    pub garden_count: Option<u128>,
    pub samples: Vec<Configuration>,
}

impl GardenReport {
    pub fn has_garden_of_eden(&self) -> bool {
        self.rank < self.order
    }
}

/// Rank-based Garden-of-Eden count plus up to `samples` witnesses.
///
/// A candidate `y` is in the image iff `w . y = 0` for every `w` in the left
/// kernel. Candidates are unit vectors, then sums of two unit vectors.
pub fn garden_report(m: &RuleMatrix, samples: usize) -> GardenReport {
    let dense = m.to_dense();
    let f = m.field();
    let p = f.modulus();
    let order = m.order();
    let rank = dense.rank();
    let image_size = (p as u128).checked_pow(rank as u32);
    let total = (p as u128).checked_pow(order as u32);
    let garden_count = total.zip(image_size).map(|(t, i)| t - i);

    let mut found = Vec::new();
    if rank < order && samples > 0 {
        let left_kernel = dense.transpose().kernel_basis();
        let outside = |y: &[u32]| {
            left_kernel.iter().any(|w| {
                w.iter()
                    .zip(y)
                    .fold(0, |acc, (&a, &b)| f.mul_add(a, b, acc))
                    != 0
            })
        };
        let singles = (0..order).map(|i| vec![i]);
        let pairs = (0..order).flat_map(|i| (i + 1..order).map(move |j| vec![i, j]));
        for support in singles.chain(pairs) {
            let mut y = vec![0u32; order];
            for &i in &support {
                y[i] = 1;
            }
            if outside(&y) {
                found.push(Configuration {
                    shape: m.shape().clone(),
                    field: f,
                    values: y,
                });
                if found.len() == samples {
                    break;
                }
            }
        }
    }
    GardenReport {
        p,
        order,
        rank,
        image_size,
        garden_count,
        samples: found,
    }
}

/// Result of pushing every configuration through the local rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ImageCensus {
    pub configurations: u64,
    pub distinct_images: u64,
}

impl ImageCensus {
    pub fn is_injective(&self) -> bool {
        self.configurations == self.distinct_images
    }

    pub fn garden_count(&self) -> u64 {
        self.configurations - self.distinct_images
    }
}

/// `p^|V_n|` if it does not exceed `cap`.
pub fn configuration_count(shape: &TreeShape, p: u32, cap: u64) -> Result<u64> {
    (p as u64)
        .checked_pow(shape.total_vertices() as u32)
        .filter(|&c| c <= cap)
        .ok_or_else(|| Error::EnumerationTooLarge {
            requested: format!("{p}^{}", shape.total_vertices()),
            cap,
        })
}

/// Decodes enumeration index `k` into residues, least significant first.
pub(crate) fn decode(mut k: u64, p: u32, out: &mut [u32]) {
    for slot in out.iter_mut() {
        *slot = (k % p as u64) as u32;
        k /= p as u64;
    }
}

fn encode(values: &[u32], p: u32) -> u64 {
    values
        .iter()
        .rev()
        .fold(0u64, |acc, &v| acc * p as u64 + v as u64)
}

/// Applies [`step_local`] to every configuration and counts distinct images.
pub fn image_census(shape: &TreeShape, params: &Params, cap: u64) -> Result<ImageCensus> {
    let p = params.p();
    let total = configuration_count(shape, p, cap)?;
    let order = shape.total_vertices();
    let mut images: Vec<u64> = (0..total)
        .into_par_iter()
        .map_init(
            || Configuration::zeros(shape, params.field),
            |cfg, k| {
                decode(k, p, &mut cfg.values);
                let img = step_local(cfg, params).expect("field matches");
                debug_assert_eq!(img.values.len(), order);
                encode(&img.values, p)
            },
        )
        .collect();
    images.par_sort_unstable();
    images.dedup();
    Ok(ImageCensus {
        configurations: total,
        distinct_images: images.len() as u64,
    })
}

/// True iff the local rule is injective on the whole finite space,
/// decided by exhaustive enumeration.
pub fn bijectivity_oracle(shape: &TreeShape, params: &Params, cap: u64) -> Result<bool> {
    Ok(image_census(shape, params, cap)?.is_injective())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn params(a: u64, b: u64, c: u64, d: u64, p: u64) -> Params {
        Params::new(a, b, c, d, PrimeField::new(p).unwrap()).unwrap()
    }

    fn shape(n: u32) -> TreeShape {
        TreeShape::new(n).unwrap()
    }

    #[test]
    fn zero_is_fixed() {
        let pr = params(2, 3, 4, 5, 7);
        let z = Configuration::zeros(&shape(3), pr.field);
        assert!(step_local(&z, &pr).unwrap().is_zero());
        let m = RuleMatrix::build(&shape(3), pr);
        assert!(step_matrix(&z, &m).unwrap().is_zero());
    }

    #[test]
    fn delta_at_root() {
        let pr = params(1, 1, 1, 1, 3);
        let cfg = Configuration::delta(&shape(2), pr.field, 0).unwrap();
        let next = step_local(&cfg, &pr).unwrap();
        assert_eq!(next.values(), &[1, 1, 1, 1, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn delta_at_leaf() {
        let pr = params(1, 1, 1, 1, 3);
        let s = shape(2);
        let leaf = s.linear_index(&"11".parse().unwrap()).unwrap();
        let cfg = Configuration::delta(&s, pr.field, leaf).unwrap();
        let next = step_local(&cfg, &pr).unwrap();
        let mut expect = vec![0; 10];
        expect[1] = 1;
        expect[leaf] = 1;
        assert_eq!(next.values(), expect.as_slice());
    }

    #[test]
    fn basis_vector_maps_to_column() {
        let pr = params(2, 3, 5, 7, 11);
        let s = shape(3);
        let m = RuleMatrix::build(&s, pr);
        for v in 0..m.order() {
            let e = Configuration::delta(&s, pr.field, v).unwrap();
            let col: Vec<u32> = (0..m.order()).map(|r| m.get(r, v)).collect();
            assert_eq!(step_matrix(&e, &m).unwrap().values(), col.as_slice());
        }
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let pr = params(1, 1, 1, 1, 3);
        let m = RuleMatrix::build(&shape(2), pr);
        let wrong_shape = Configuration::zeros(&shape(3), pr.field);
        assert!(matches!(
            step_matrix(&wrong_shape, &m),
            Err(Error::DimensionMismatch { .. })
        ));
        let wrong_field = Configuration::zeros(&shape(2), PrimeField::new(5).unwrap());
        assert!(step_local(&wrong_field, &pr).is_err());
        assert!(Configuration::new(shape(1), pr.field, vec![0, 1, 2]).is_err());
        assert!(Configuration::new(shape(1), pr.field, vec![0, 1, 2, 3]).is_err());
    }

    #[test]
    fn evolve_zero_steps_and_inverse_round_trip() {
        let pr = params(2, 1, 3, 2, 17);
        let s = shape(2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cfg = Configuration::random(&s, pr.field, &mut rng);
        assert_eq!(evolve(&cfg, &pr, 0).unwrap().states, vec![cfg.clone()]);
        let trace = evolve(&cfg, &pr, 7).unwrap();
        assert_eq!(trace.states.len(), 8);
        let inv = RuleMatrix::build(&s, pr).inverse().unwrap();
        let mut back = trace.last().clone();
        for _ in 0..7 {
            back = back.apply_dense(&inv).unwrap();
        }
        assert_eq!(&back, trace.initial());
    }

    #[test]
    fn trace_json_is_array_of_vectors() {
        let pr = params(1, 1, 1, 1, 2);
        let cfg = Configuration::delta(&shape(1), pr.field, 0).unwrap();
        let trace = evolve(&cfg, &pr, 2).unwrap();
        assert_eq!(trace.to_json(), "[[1,0,0,0],[1,1,1,1],[0,0,0,0]]");
    }

    #[test]
    fn orbits_cycle_in_small_space() {
        let pr = params(1, 1, 1, 1, 2);
        let s = shape(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let cfg = Configuration::random(&s, pr.field, &mut rng);
            let cyc = find_cycle(&cfg, &pr, 1 << 10).unwrap().expect("pigeonhole");
            assert!(cyc.period >= 1 && cyc.preperiod + cyc.period <= 1 << 10);
            let trace = evolve(&cfg, &pr, cyc.preperiod + cyc.period).unwrap();
            assert_eq!(trace.states[cyc.preperiod], *trace.last());
        }
    }

    #[test]
    fn preimage_cases() {
        let s = shape(2);
        let inv = params(1, 1, 1, 1, 3);
        let m = RuleMatrix::build(&s, inv);
        let y = step_local(&Configuration::delta(&s, inv.field, 4).unwrap(), &inv).unwrap();
        let pre = enumerate_preimages(&y, &m, 16).unwrap();
        assert_eq!(pre, vec![Configuration::delta(&s, inv.field, 4).unwrap()]);

        let sing = params(1, 1, 1, 1, 2);
        let ms = RuleMatrix::build(&s, sing);
        let nullity = 10 - ms.rank();
        let y = step_local(&Configuration::delta(&s, sing.field, 7).unwrap(), &sing).unwrap();
        let pre = enumerate_preimages(&y, &ms, 1 << 20).unwrap();
        assert_eq!(pre.len(), 1 << nullity);
        for x in &pre {
            assert_eq!(step_local(x, &sing).unwrap(), y);
        }
        assert!(matches!(
            enumerate_preimages(&y, &ms, 1),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn unreachable_target_is_inconsistent() {
        let s = shape(2);
        let pr = params(1, 1, 1, 1, 2);
        let m = RuleMatrix::build(&s, pr);
        // brute-force image, then pick the first vector outside it
        let mut reachable = vec![false; 1 << 10];
        let mut x = vec![0u32; 10];
        for k in 0..1u64 << 10 {
            decode(k, 2, &mut x);
            let img = step_local(
                &Configuration::new(s.clone(), pr.field, x.clone()).unwrap(),
                &pr,
            )
            .unwrap();
            reachable[encode(img.values(), 2) as usize] = true;
        }
        let k = reachable
            .iter()
            .position(|&r| !r)
            .expect("singular map misses something");
        let mut y = vec![0u32; 10];
        decode(k as u64, 2, &mut y);
        let target = Configuration::new(s, pr.field, y).unwrap();
        assert_eq!(preimages(&target, &m).unwrap(), SolutionSet::Inconsistent);
    }

    #[test]
    fn garden_report_invertible_and_singular() {
        let s = shape(2);
        let rep = garden_report(&RuleMatrix::build(&s, params(1, 1, 1, 1, 3)), 4);
        assert_eq!(rep.garden_count, Some(0));
        assert!(rep.samples.is_empty());

        let m = RuleMatrix::build(&s, params(1, 1, 1, 1, 2));
        let rep = garden_report(&m, 5);
        assert_eq!(rep.garden_count, Some((1 << 10) - (1u128 << rep.rank)));
        assert_eq!(rep.samples.len(), 5);
        for g in &rep.samples {
            assert_eq!(preimages(g, &m).unwrap(), SolutionSet::Inconsistent);
        }
    }

    #[test]
    fn census_over_n1_p3_matches_rank() {
        let f = PrimeField::new(3).unwrap();
        let s = shape(1);
        for a in 1..3 {
            for b in 1..3 {
                for c in 1..3 {
                    for d in 1..3 {
                        let pr = Params::new(a, b, c, d, f).unwrap();
                        let census = image_census(&s, &pr, DEFAULT_ENUMERATION_CAP).unwrap();
                        assert_eq!(census.configurations, 81);
                        let rep = garden_report(&RuleMatrix::build(&s, pr), 0);
                        assert_eq!(Some(census.garden_count() as u128), rep.garden_count);
                    }
                }
            }
        }
    }

    #[test]
    fn oracle_respects_cap() {
        let pr = params(1, 1, 1, 1, 5);
        assert!(matches!(
            bijectivity_oracle(&shape(2), &pr, DEFAULT_ENUMERATION_CAP),
            Err(Error::EnumerationTooLarge { .. })
        ));
        assert!(
            !bijectivity_oracle(&shape(2), &params(1, 1, 1, 1, 2), DEFAULT_ENUMERATION_CAP)
                .unwrap()
        );
        assert!(
            bijectivity_oracle(&shape(2), &params(1, 1, 1, 1, 3), DEFAULT_ENUMERATION_CAP).unwrap()
        );
    }

    #[test]
    fn oracle_independent_of_thread_count() {
        let s = shape(2);
        let pr = params(1, 1, 1, 1, 2);
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let wide = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = serial.install(|| image_census(&s, &pr, DEFAULT_ENUMERATION_CAP).unwrap());
        let b = wide.install(|| image_census(&s, &pr, DEFAULT_ENUMERATION_CAP).unwrap());
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn local_rule_is_linear(n in 1u32..=5, p in prop::sample::select(vec![2u64, 3, 5, 7, 101]), seed in any::<u64>(), k in 0u32..200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = PrimeField::new(p).unwrap();
            let pr = Params::new(rng.gen_range(1..p), rng.gen_range(1..p), rng.gen_range(1..p), rng.gen_range(1..p), f).unwrap();
            let s = shape(n);
            let x = Configuration::random(&s, f, &mut rng);
            let y = Configuration::random(&s, f, &mut rng);
            let lhs = step_local(&x.add(&y).unwrap(), &pr).unwrap();
            let rhs = step_local(&x, &pr).unwrap().add(&step_local(&y, &pr).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(step_local(&x.scale(k), &pr).unwrap(), step_local(&x, &pr).unwrap().scale(k));
            prop_assert_eq!(step_local(&x, &pr).unwrap(), step_matrix(&x, &RuleMatrix::build(&s, pr)).unwrap());
        }
    }
}
