use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Dataset, IngestError, Label};

/// Train/validation/test fractions plus the shuffling seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub val_fraction: f64,
    pub test_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train: f64, val: f64, test: f64, seed: u64) -> Result<Self, IngestError> {
        let spec = Self {
            train_fraction: train,
            val_fraction: val,
            test_fraction: test,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        let f = self.fractions();
        if f.iter().any(|x| !x.is_finite() || *x < 0.0 || *x > 1.0) {
            return Err(IngestError::BadSplit(format!("{f:?} must lie in [0, 1]")));
        }
        let sum: f64 = f.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(IngestError::BadSplit(format!("{f:?} sums to {sum}, not 1")));
        }
        Ok(())
    }

    pub fn fractions(&self) -> [f64; 3] {
        [self.train_fraction, self.val_fraction, self.test_fraction]
    }
}

impl Default for SplitSpec {
    /// 70/15/15, the proportions that give a 963-record test split on a
    /// 6,419-record corpus.
    fn default() -> Self {
        Self {
            train_fraction: 0.70,
            val_fraction: 0.15,
            test_fraction: 0.15,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Dataset,
    pub val: Dataset,
    pub test: Dataset,
}

/// Largest-remainder apportionment of `total` over `fractions`.
/// Ties go to the earlier index.
fn apportion(total: usize, fractions: &[f64; 3]) -> [usize; 3] {
    let quotas = fractions.map(|f| total as f64 * f);
    let mut sizes = quotas.map(|q| q.floor() as usize);
    let assigned: usize = sizes.iter().sum();
    let mut order: Vec<usize> = (0..3).filter(|&j| fractions[j] > 0.0).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (quotas[a] - quotas[a].floor(), quotas[b] - quotas[b].floor());
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &j in order.iter().cycle().take(total.saturating_sub(assigned)) {
        sizes[j] += 1;
    }
    sizes
}

/// Per-class split sizes.
///
/// Split totals are fixed first by largest remainder over the whole
/// dataset; each class then receives the floor of its quota per split and
/// the leftover records go to the (class, split) cells with the largest
/// fractional remainders, subject to the split totals. Every cell ends
/// within one record of its exact quota.
fn allocate(class_sizes: &[usize], fractions: &[f64; 3]) -> Vec<[usize; 3]> {
    let total: usize = class_sizes.iter().sum();
    let targets = apportion(total, fractions);

    let quotas: Vec<[f64; 3]> = class_sizes
        .iter()
        .map(|&n| fractions.map(|f| n as f64 * f))
        .collect();
    let mut alloc: Vec<[usize; 3]> = quotas.iter().map(|q| q.map(|x| x.floor() as usize)).collect();
    let mut leftover: Vec<usize> = class_sizes
        .iter()
        .zip(&alloc)
        .map(|(&n, a)| n - a.iter().sum::<usize>())
        .collect();
    let mut need: [usize; 3] = std::array::from_fn(|j| {
        targets[j] - alloc.iter().map(|a| a[j]).sum::<usize>().min(targets[j])
    });

    let mut cells: Vec<(usize, usize, f64)> = Vec::new();
    for (k, q) in quotas.iter().enumerate() {
        for j in 0..3 {
            if fractions[j] > 0.0 {
                cells.push((k, j, q[j] - q[j].floor()));
            }
        }
    }
    cells.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.1.cmp(&b.1)).then(a.0.cmp(&b.0)));

    for &(k, j, _) in &cells {
        if leftover[k] > 0 && need[j] > 0 {
            alloc[k][j] += 1;
            leftover[k] -= 1;
            need[j] -= 1;
        }
    }
    // The greedy pass can strand a record when capacities interlock; any
    // column that still needs records takes it.
    for k in 0..alloc.len() {
        while leftover[k] > 0 {
            let j = (0..3)
                .find(|&j| need[j] > 0)
                .or_else(|| (0..3).find(|&j| fractions[j] > 0.0))
                .expect("at least one fraction is positive");
            alloc[k][j] += 1;
            leftover[k] -= 1;
            need[j] = need[j].saturating_sub(1);
        }
    }
    alloc
}

/// Deterministic stratified split of a fully labeled dataset.
///
/// Records keep their original relative order inside each split; which
/// records land where is decided by a per-class shuffle seeded from
/// `spec.seed`.
pub fn stratified_split(ds: &Dataset, spec: &SplitSpec) -> Result<Split, IngestError> {
    spec.validate()?;
    let fractions = spec.fractions();

    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); Label::COUNT];
    for (i, r) in ds.records().iter().enumerate() {
        match r.label {
            Some(l) => by_class[l.index()].push(i),
            None => return Err(IngestError::UnlabeledInSplit(r.id.clone())),
        }
    }

    let nonzero = fractions.iter().filter(|&&f| f > 0.0).count();
    for (k, members) in by_class.iter().enumerate() {
        if !members.is_empty() && members.len() < nonzero {
            return Err(IngestError::ClassTooSmall {
                label: Label::from_index(k).unwrap(),
                have: members.len(),
                need: nonzero,
            });
        }
    }

    let sizes: Vec<usize> = by_class.iter().map(Vec::len).collect();
    let alloc = allocate(&sizes, &fractions);

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut assignment = vec![0usize; ds.len()];
    for (k, members) in by_class.iter_mut().enumerate() {
        members.shuffle(&mut rng);
        let mut start = 0;
        for (j, &n) in alloc[k].iter().enumerate() {
            for &i in &members[start..start + n] {
                assignment[i] = j;
            }
            start += n;
        }
    }

    let mut parts: [Vec<_>; 3] = Default::default();
    for (i, r) in ds.records().iter().enumerate() {
        parts[assignment[i]].push(r.clone());
    }
    let [train, val, test] = parts;
    Ok(Split {
        train: Dataset::new(train),
        val: Dataset::new(val),
        test: Dataset::new(test),
    })
}
