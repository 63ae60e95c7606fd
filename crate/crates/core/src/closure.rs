//! Schur–Wielandt closure: the smallest S-ring whose module contains given
//! group-ring elements, by iterated level-set splitting.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::group::Group;
use crate::sring::{classes_from_labels, validate_partition, SRing};

/// Reusable buffers for partition refinement over one group.
pub(crate) struct Refiner<'g> {
    group: &'g Group,
    buf: Vec<u32>,
    slot: Vec<u32>,
    touched: Vec<usize>,
    snapshot: Vec<u32>,
}

impl<'g> Refiner<'g> {
    pub(crate) fn new(group: &'g Group) -> Self {
        let n = group.order();
        Refiner {
            group,
            buf: vec![0; n],
            slot: Vec::new(),
            touched: Vec::new(),
            snapshot: vec![0; n],
        }
    }

    /// Refines `labels` by `key`; returns the new number of classes.
    /// Labels are renumbered by first occurrence, so they stay canonical.
    fn split(&mut self, labels: &mut [u32], count: usize, key: &[u32], key_bound: usize) -> usize {
        let width = key_bound + 1;
        let need = count * width;
        if self.slot.len() < need {
            self.slot.resize(need, u32::MAX);
        }
        let mut next = 0u32;
        for x in 0..labels.len() {
            let s = labels[x] as usize * width + key[x] as usize;
            if self.slot[s] == u32::MAX {
                self.slot[s] = next;
                next += 1;
                self.touched.push(s);
            }
            labels[x] = self.slot[s];
        }
        for &s in &self.touched {
            self.slot[s] = u32::MAX;
        }
        self.touched.clear();
        next as usize
    }

    /// Canonical relabelling by first occurrence; returns the class count.
    pub(crate) fn normalize(&mut self, labels: &mut [u32]) -> usize {
        let zeros = vec![0u32; labels.len()];
        let bound = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
        // treat every label as its own class with a constant key
        let mut tmp: Vec<u32> = labels.to_vec();
        let c = self.split(&mut tmp, bound.max(1), &zeros, 0);
        labels.copy_from_slice(&tmp);
        c
    }

    /// Refines `labels` to the coarsest S-ring partition below it.
    /// Returns the number of classes.
    pub(crate) fn stabilize(&mut self, labels: &mut [u32]) -> usize {
        let n = self.group.order();
        let mut count = self.normalize(labels);
        let is_identity: Vec<u32> = (0..n).map(|x| (x == 0) as u32).collect();
        count = self.split(labels, count, &is_identity, 1);
        loop {
            let before = count;
            self.snapshot.copy_from_slice(labels);
            let inv_key: Vec<u32> = (0..n).map(|x| self.snapshot[self.group.neg(x)]).collect();
            count = self.split(labels, count, &inv_key, before);
            if count == n {
                return count;
            }
            let classes = classes_from_labels(labels);
            for i in 0..classes.len() {
                for j in i..classes.len() {
                    let mut buf = std::mem::take(&mut self.buf);
                    crate::sring::convolve(self.group, &classes[i], &classes[j], &mut buf);
                    let bound = classes[i].len().min(classes[j].len());
                    count = self.split(labels, count, &buf, bound);
                    self.buf = buf;
                }
            }
            if count == before {
                return count;
            }
        }
    }
}

/// The S-ring generated by integer-coefficient vectors over the group.
///
/// Each seed lists one coefficient per element (in index order). Only the
/// level sets of a seed matter, so any ordered coefficient type works,
/// including arbitrary-precision integers.
pub fn wielandt_closure<T: Ord>(group: &Arc<Group>, seeds: &[Vec<T>]) -> SRing {
    let n = group.order();
    let mut labels = vec![0u32; n];
    let mut refiner = Refiner::new(group);
    let mut count = 1;
    for seed in seeds {
        assert_eq!(seed.len(), n, "seed length must equal the group order");
        let mut ids: BTreeMap<&T, u32> = BTreeMap::new();
        for v in seed {
            let next = ids.len() as u32;
            ids.entry(v).or_insert(next);
        }
        let key: Vec<u32> = seed.iter().map(|v| ids[v]).collect();
        count = refiner.split(&mut labels, count, &key, ids.len());
    }
    refiner.stabilize(&mut labels);
    validate_partition(group, classes_from_labels(&labels)).expect("closure yields an S-ring")
}

/// The S-ring generated by the 0/1 vectors of the given sets.
pub fn closure_of_sets(group: &Arc<Group>, sets: &[Vec<usize>]) -> SRing {
    let seeds: Vec<Vec<u8>> = sets
        .iter()
        .map(|s| {
            let mut v = vec![0u8; group.order()];
            for &x in s {
                v[x] = 1;
            }
            v
        })
        .collect();
    wielandt_closure(group, &seeds)
}

/// The S-ring generated by the classes of a partition (its closure).
pub fn closure_of_partition(group: &Arc<Group>, classes: &[Vec<usize>]) -> SRing {
    let mut labels = vec![0u32; group.order()];
    for (i, c) in classes.iter().enumerate() {
        for &x in c {
            labels[x] = i as u32;
        }
    }
    let mut refiner = Refiner::new(group);
    refiner.stabilize(&mut labels);
    validate_partition(group, classes_from_labels(&labels)).expect("closure yields an S-ring")
}
