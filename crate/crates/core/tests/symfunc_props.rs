use std::collections::BTreeMap;

use num_bigint::BigInt;
use proptest::prelude::*;

use tetra_core::symfunc::{
    is_symmetric, loop_elementary, schur, schur_at_one, schur_bialternant, schur_jacobi_trudi, schur_pragacz,
    z_vars, BlockSpec, Partition,
};
use tetra_core::{Binding, Monomial, Poly, Var};

// Sum over semistandard tableaux of shape `parts` with entries in 1..=m.
fn ssyt(parts: &[u32], m: u32) -> Poly {
    let cells: Vec<(usize, usize)> =
        parts.iter().enumerate().flat_map(|(r, &len)| (0..len as usize).map(move |c| (r, c))).collect();
    let mut grid: Vec<Vec<u32>> = parts.iter().map(|&len| vec![0; len as usize]).collect();
    let mut out = Poly::zero();
    fill(&cells, 0, m, &mut grid, &mut out);
    out
}

fn fill(cells: &[(usize, usize)], idx: usize, m: u32, grid: &mut Vec<Vec<u32>>, out: &mut Poly) {
    if idx == cells.len() {
        let mut exps: BTreeMap<u32, i32> = BTreeMap::new();
        for row in grid.iter() {
            for &e in row {
                *exps.entry(e).or_default() += 1;
            }
        }
        *out += &Poly::monomial(Monomial::from_pairs(exps.into_iter().map(|(v, e)| (Var::Z(v), e))));
        return;
    }
    let (r, c) = cells[idx];
    let lo_row = if c > 0 { grid[r][c - 1] } else { 1 };
    let lo_col = if r > 0 { grid[r - 1][c] + 1 } else { 1 };
    for v in lo_row.max(lo_col)..=m {
        grid[r][c] = v;
        fill(cells, idx + 1, m, grid, out);
    }
    grid[r][c] = 0;
}

fn partition_strategy(max_len: usize, max_part: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..=max_part, 0..=max_len).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    })
}

fn to_partition(parts: &[u32]) -> Partition {
    Partition::new(&parts.iter().map(|&p| p as i64).collect::<Vec<_>>()).unwrap()
}

fn blocks_of(parts: &[u32]) -> Vec<(u32, usize)> {
    let mut blocks: Vec<(u32, usize)> = Vec::new();
    for &p in parts {
        match blocks.last_mut() {
            Some((q, c)) if *q == p => *c += 1,
            _ => blocks.push((p, 1)),
        }
    }
    blocks
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn schur_routes_match_tableaux(parts in partition_strategy(4, 4), extra in 0usize..=1) {
        let m = parts.len().max(1) + extra;
        let lambda = to_partition(&parts);
        let vars = z_vars(m);
        let want = ssyt(lambda.parts(), m as u32);
        prop_assert_eq!(&schur_jacobi_trudi::<BigInt>(&lambda, &vars), &want);
        prop_assert_eq!(&schur_bialternant::<BigInt>(&lambda, &vars).unwrap(), &want);

        // Pragacz over m variables: pad the parts with zeros, then group equal parts.
        let mut padded = parts.clone();
        padded.resize(m, 0);
        let blocks = BlockSpec::new(&blocks_of(&padded)).unwrap();
        let mut it = vars.iter().copied();
        let grouped: Vec<Vec<Var>> = blocks.sizes().iter().map(|&s| it.by_ref().take(s).collect()).collect();
        prop_assert_eq!(&schur_pragacz::<BigInt>(&blocks, &grouped).unwrap(), &want);
    }

    #[test]
    fn schur_is_symmetric_and_stable(parts in partition_strategy(3, 3)) {
        let m = parts.len().max(1);
        let lambda = to_partition(&parts);
        let s = schur::<BigInt>(&lambda, &z_vars(m));
        prop_assert!(is_symmetric(&s, &z_vars(m)));
        let wider = schur::<BigInt>(&lambda, &z_vars(m + 1));
        let drop: BTreeMap<Var, Binding<BigInt>> = [(Var::Z(m as u32 + 1), Binding::Value(BigInt::from(0)))].into();
        prop_assert_eq!(wider.substitute(&drop).unwrap(), s);
    }

    #[test]
    fn specialization_at_one(parts in partition_strategy(4, 5), extra in 0usize..=2) {
        let m = parts.len().max(1) + extra;
        let lambda = to_partition(&parts);
        let tableaux = ssyt(lambda.parts(), m as u32).eval_at_one();
        prop_assert_eq!(schur_at_one(&lambda, m).unwrap(), tableaux);
    }

    #[test]
    fn loop_elementary_pascal(k in 1usize..=3, extra in 0usize..=3, coeffs in prop::collection::vec(1i64..=4, 40)) {
        let n = k + extra;
        let table = |j: usize, i: usize| {
            Poly::var(Var::site(j as u32, i as u32, 1)).scale(&BigInt::from(coeffs[(j * 5 + i) % coeffs.len()]))
        };
        let whole = loop_elementary(k, table, n);
        let mut split = loop_elementary(k, table, n - 1);
        split += &(&table(n, k) * &loop_elementary(k - 1, table, n - 1));
        prop_assert_eq!(whole, split);
    }
}

#[test]
fn loop_elementary_with_equal_rows_is_elementary() {
    // table(j, i) = z_j for every row gives e_k(z_1..z_n).
    let n = 5;
    for k in 0..=n {
        let got = loop_elementary(k, |j: usize, _| Poly::var(Var::Z(j as u32)), n);
        let want = ssyt(&vec![1; k], n as u32);
        assert_eq!(got, want, "k = {k}");
    }
}
