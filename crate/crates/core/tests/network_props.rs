use std::sync::OnceLock;

use num_bigint::BigInt;
use proptest::prelude::*;

use tetra_core::{LayerEngine, Monomial, PartitionSpec, Poly, Var};

fn engine() -> &'static LayerEngine {
    static ENGINE: OnceLock<LayerEngine> = OnceLock::new();
    ENGINE.get_or_init(|| LayerEngine::resolved().expect("convention"))
}

fn labels(n: u32, max_len: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..=n, 1..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn weakly_increasing_products_are_monomials(n in 2u32..=4, mut l in labels(4, 4)) {
        l.iter_mut().for_each(|x| *x = (*x).min(n));
        l.sort_unstable();
        let got: Poly = engine().vev(&PartitionSpec::scalar(n, &l)).unwrap();
        let want = Monomial::from_pairs(l.iter().enumerate().map(|(t, &i)| (Var::Z(t as u32 + 1), i as i32)));
        prop_assert_eq!(got, Poly::monomial(want));
    }

    #[test]
    fn configurations_sum_to_vev(n in 2u32..=4, l in labels(4, 4)) {
        let l: Vec<u32> = l.into_iter().map(|x| x.min(n)).collect();
        let spec = PartitionSpec::scalar(n, &l);
        let vev: Poly = engine().vev(&spec).unwrap();
        let confs = engine().configurations(&spec).unwrap();
        let mut sum = Poly::zero();
        for c in &confs {
            sum += &Poly::monomial(c.weight.clone());
            let alphas: i32 = c.alphas.iter().map(|&a| a as i32).sum();
            prop_assert_eq!(alphas as i64, c.weight.degree());
        }
        prop_assert_eq!(&sum, &vev);
        prop_assert_eq!(engine().count_configurations(&spec).unwrap(), BigInt::from(confs.len()));
    }

    #[test]
    fn inhomogeneous_layers_collapse(n in 2u32..=3, l in labels(3, 3)) {
        let l: Vec<u32> = l.into_iter().map(|x| x.min(n)).collect();
        let spec = PartitionSpec::inhomogeneous(n, &l);
        let bar: Poly = engine().vev(&spec).unwrap();
        let bindings = spec
            .layers
            .iter()
            .enumerate()
            .flat_map(|(t, layer)| {
                layer.binding.vars().into_iter().map(move |v| (v, tetra_core::Binding::Poly(Poly::var(Var::Z(t as u32 + 1)))))
            })
            .collect();
        let collapsed = bar.substitute(&bindings).unwrap();
        let plain: Poly = engine().vev(&PartitionSpec::scalar(n, &l)).unwrap();
        let shift = Monomial::from_pairs(l.iter().enumerate().map(|(t, &i)| (Var::Z(t as u32 + 1), -(i as i32))));
        prop_assert_eq!(collapsed, plain.mul_monomial(&shift));
    }
}
