//! Inner loops over rows of doubled distances, with an AVX2 build chosen at
//! run time where the CPU has it.

/// `max_j min(cap[j], min_i rows[j][i] + p[i])` over the `k`-wide rows.
/// Returns `i32::MIN` when there are no rows.
pub fn max_min_plus(p: &[i32], rows: &[i32], cap: Option<&[i32]>) -> i32 {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx2") {
            // SAFETY: the feature was just detected.
            return unsafe { max_min_plus_avx2(p, rows, cap) };
        }
    }
    max_min_plus_portable(p, rows, cap)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn max_min_plus_avx2(p: &[i32], rows: &[i32], cap: Option<&[i32]>) -> i32 {
    max_min_plus_portable(p, rows, cap)
}

#[inline(always)]
fn max_min_plus_portable(p: &[i32], rows: &[i32], cap: Option<&[i32]>) -> i32 {
    let k = p.len();
    let mut best = i32::MIN;
    if k == 0 {
        return match cap {
            Some(c) => c.iter().copied().max().unwrap_or(i32::MIN),
            None => best,
        };
    }
    for (j, row) in rows.chunks_exact(k).enumerate() {
        let mut m = i32::MAX;
        for (&a, &b) in row.iter().zip(p) {
            m = m.min(a.saturating_add(b));
        }
        if let Some(c) = cap {
            m = m.min(c[j]);
        }
        best = best.max(m);
    }
    best
}

/// Appends `min_i rows[j][i] + p[i]` for each `k`-wide row `j` to `out`.
pub fn min_plus_into(p: &[i32], rows: &[i32], out: &mut Vec<i32>) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx2") {
            // SAFETY: the feature was just detected.
            return unsafe { min_plus_into_avx2(p, rows, out) };
        }
    }
    min_plus_into_portable(p, rows, out)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn min_plus_into_avx2(p: &[i32], rows: &[i32], out: &mut Vec<i32>) {
    min_plus_into_portable(p, rows, out)
}

#[inline(always)]
fn min_plus_into_portable(p: &[i32], rows: &[i32], out: &mut Vec<i32>) {
    let k = p.len();
    assert!(k > 0, "rows need at least one column");
    out.extend(rows.chunks_exact(k).map(|row| {
        let mut m = i32::MAX;
        for (&a, &b) in row.iter().zip(p) {
            m = m.min(a.saturating_add(b));
        }
        m
    }));
}

/// Multiply-rotate hasher for pattern keys.
#[derive(Default, Clone, Copy)]
pub struct FoldHasher {
    h: u64,
}

const K: u64 = 0x9e37_79b9_7f4a_7c15;

impl std::hash::Hasher for FoldHasher {
    fn write(&mut self, bytes: &[u8]) {
        let mut chunks = bytes.chunks_exact(8);
        for c in &mut chunks {
            let w = u64::from_le_bytes(c.try_into().unwrap());
            self.h = (self.h.rotate_left(23) ^ w).wrapping_mul(K);
        }
        let rest = chunks.remainder();
        if !rest.is_empty() {
            let mut buf = [0u8; 8];
            buf[..rest.len()].copy_from_slice(rest);
            self.h = (self.h.rotate_left(23) ^ u64::from_le_bytes(buf)).wrapping_mul(K);
        }
    }

    fn write_usize(&mut self, i: usize) {
        self.h = (self.h.rotate_left(23) ^ i as u64).wrapping_mul(K);
    }

    fn finish(&self) -> u64 {
        self.h ^ (self.h >> 29)
    }
}

pub type FoldBuild = std::hash::BuildHasherDefault<FoldHasher>;
