//! Small shared helpers: a growable bitset, tuple odometers, and a scoped
//! thread pool for embarrassingly parallel instance loops.

/// Fixed-capacity bitset over `0..len`, packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }
}

/// Calls `f` on every length-`k` tuple over `0..n` in lexicographic order.
/// Returns early with `Some(r)` if `f` does.
pub fn for_each_tuple<R>(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> Option<R>) -> Option<R> {
    let mut tuple = vec![0usize; k];
    if n == 0 && k > 0 {
        return None;
    }
    loop {
        if let Some(r) = f(&tuple) {
            return Some(r);
        }
        // odometer increment, most significant digit first
        let mut pos = k;
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < n {
                break;
            }
            tuple[pos] = 0;
        }
    }
}

/// Row-major index of `tuple` in a table over `0..n` of the given arity.
pub fn tuple_index(n: usize, tuple: &[usize]) -> usize {
    let mut idx = 0;
    for &t in tuple {
        debug_assert!(t < n);
        idx = idx * n + t;
    }
    idx
}

/// Runs `f(0..n)` across `jobs` scoped threads and collects results in
/// index order. `f` must be pure per index; the split is deterministic.
pub fn par_map<R: Send>(jobs: usize, n: usize, f: impl Fn(usize) -> R + Sync) -> Vec<R> {
    let jobs = jobs.max(1).min(n.max(1));
    if jobs == 1 {
        return (0..n).map(f).collect();
    }
    let mut out: Vec<Option<R>> = (0..n).map(|_| None).collect();
    let chunk = n.div_ceil(jobs);
    std::thread::scope(|scope| {
        let handles: Vec<_> = out
            .chunks_mut(chunk)
            .enumerate()
            .map(|(ci, slot)| {
                let f = &f;
                scope.spawn(move || {
                    for (off, s) in slot.iter_mut().enumerate() {
                        *s = Some(f(ci * chunk + off));
                    }
                })
            })
            .collect();
        for h in handles {
            h.join().expect("suite worker panicked");
        }
    });
    out.into_iter().map(|r| r.expect("worker filled slot")).collect()
}
