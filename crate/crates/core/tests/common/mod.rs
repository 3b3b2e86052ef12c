//! Helpers shared by the integration tests.

/// Invariant factors (nonzero diagonal) of an integer matrix.
pub fn invariant_factors(mut a: Vec<Vec<i128>>) -> Vec<i128> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pr, pc)) = (t..rows)
            .flat_map(|r| (t..cols).map(move |c| (r, c)))
            .filter(|&(r, c)| a[r][c] != 0)
            .min_by_key(|&(r, c)| a[r][c].abs())
        else {
            break;
        };
        a.swap(t, pr);
        for row in a.iter_mut() {
            row.swap(t, pc);
        }
        loop {
            let p = a[t][t];
            let mut dirty = false;
            for r in t + 1..rows {
                let q = a[r][t] / p;
                if q != 0 {
                    for c in t..cols {
                        a[r][c] -= q * a[t][c];
                    }
                }
                dirty |= a[r][t] != 0;
            }
            for c in t + 1..cols {
                let q = a[t][c] / p;
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[c] -= q * row[t];
                    }
                }
                dirty |= a[t][c] != 0;
            }
            if !dirty {
                // Make the pivot divide the rest of the block.
                let bad = (t + 1..rows).flat_map(|r| (t + 1..cols).map(move |c| (r, c))).find(|&(r, c)| a[r][c] % p != 0);
                match bad {
                    Some((r, _)) => {
                        for c in t..cols {
                            a[t][c] += a[r][c];
                        }
                        continue;
                    }
                    None => break,
                }
            }
            let (r, c) = (t..rows)
                .flat_map(|r| (t..cols).map(move |c| (r, c)))
                .filter(|&(r, c)| a[r][c] != 0 && (r == t || c == t))
                .min_by_key(|&(r, c)| a[r][c].abs())
                .expect("pivot row or column is nonzero");
            a.swap(t, r);
            for row in a.iter_mut() {
                row.swap(t, c);
            }
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}
