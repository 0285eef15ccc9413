//! Sorted-`Vec<u32>` multisets of time indices, and the enumeration
//! helpers the correlator recursions need: sub-multiset splittings
//! with binomial weights, and fixed-size / fixed-sum generation.

use num_bigint::BigInt;
use num_traits::One;

use crate::rational::binomial;

/// Canonical (ascending sorted) copy.
pub fn canonical(ks: &[u32]) -> Vec<u32> {
    let mut v = ks.to_vec();
    v.sort_unstable();
    v
}

pub fn sum(ks: &[u32]) -> u64 {
    ks.iter().map(|&k| k as u64).sum()
}

/// Removes one copy of `v` (must be present).
pub fn remove_one(ks: &[u32], v: u32) -> Vec<u32> {
    let pos = ks.iter().position(|&k| k == v).expect("element not in multiset");
    let mut out = ks.to_vec();
    out.remove(pos);
    out
}

/// Inserts one element keeping the sorted order.
pub fn insert_one(ks: &[u32], v: u32) -> Vec<u32> {
    let mut out = ks.to_vec();
    let pos = out.partition_point(|&k| k <= v);
    out.insert(pos, v);
    out
}

/// Merges two sorted multisets.
pub fn union(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out.sort_unstable();
    out
}

/// (value, multiplicity) runs of a sorted multiset.
pub fn runs(ks: &[u32]) -> Vec<(u32, u32)> {
    let mut out: Vec<(u32, u32)> = Vec::new();
    for &k in ks {
        match out.last_mut() {
            Some((v, m)) if *v == k => *m += 1,
            _ => out.push((k, 1)),
        }
    }
    out
}

/// Product of the factorials of the multiplicities (the symmetry
/// factor turning a correlator into a series coefficient).
pub fn multiplicity_factorial(ks: &[u32]) -> BigInt {
    let mut acc = BigInt::one();
    for (_, m) in runs(ks) {
        acc *= crate::rational::factorial(m as u64);
    }
    acc
}

/// All ways to split `ks` into an ordered pair (I, J) of
/// sub-multisets, together with the number of ways to realize the
/// split on labelled slots: prod_v C(mult_ks(v), mult_I(v)).
pub fn splits(ks: &[u32]) -> Vec<(Vec<u32>, Vec<u32>, BigInt)> {
    let rs = runs(ks);
    let mut out = Vec::new();
    let mut choice = vec![0u32; rs.len()];
    loop {
        let mut i_part = Vec::new();
        let mut j_part = Vec::new();
        let mut weight = BigInt::one();
        for (idx, &(v, m)) in rs.iter().enumerate() {
            let c = choice[idx];
            for _ in 0..c {
                i_part.push(v);
            }
            for _ in 0..(m - c) {
                j_part.push(v);
            }
            weight *= binomial(m as u64, c as u64);
        }
        out.push((i_part, j_part, weight));
        // odometer over 0..=m per run
        let mut pos = 0;
        loop {
            if pos == rs.len() {
                return out;
            }
            if choice[pos] < rs[pos].1 {
                choice[pos] += 1;
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// All multisets of a given size with entries in 0..=maxval and the
/// given sum, ascending order.
pub fn multisets_with_sum(size: u32, total: u64, maxval: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    gen_rec(size, total, 0, maxval, &mut cur, &mut out);
    out
}

fn gen_rec(left: u32, total: u64, minval: u32, maxval: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if left == 0 {
        if total == 0 {
            out.push(cur.clone());
        }
        return;
    }
    for v in minval..=maxval {
        let v64 = v as u64;
        if v64 > total {
            break;
        }
        // remaining entries are >= v, so they need at least (left-1)*v
        if total - v64 > (left as u64 - 1) * maxval as u64 {
            continue;
        }
        cur.push(v);
        gen_rec(left - 1, total - v64, v, maxval, cur, out);
        cur.pop();
    }
}

/// All multisets of indices m >= 2 with sum of (m-1) equal to
/// `excess` (the kappa-shift insertion patterns).
pub fn insertion_multisets(excess: u64) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    ins_rec(excess, 2, &mut cur, &mut out);
    out
}

fn ins_rec(excess: u64, minval: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if excess == 0 {
        out.push(cur.clone());
        return;
    }
    let mut m = minval;
    while (m as u64 - 1) <= excess {
        cur.push(m);
        ins_rec(excess - (m as u64 - 1), m, cur, out);
        cur.pop();
        m += 1;
    }
}

/// All sub-multisets j <= k componentwise, for sorted k interpreted
/// as a tuple (k_1,...,k_n): each j_i ranges over 0..=k_i.
/// Returned as (tuple j in the same slot order, no weight).
pub fn boxed_tuples(ks: &[u32]) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; ks.len()];
    loop {
        out.push(cur.clone());
        let mut pos = 0;
        loop {
            if pos == ks.len() {
                return out;
            }
            if cur[pos] < ks[pos] {
                cur[pos] += 1;
                break;
            }
            cur[pos] = 0;
            pos += 1;
        }
    }
}
