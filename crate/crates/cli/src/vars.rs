//! Key-value files binding inhomogeneous site variables.
//!
//! One binding per line, `z{t}_k{k}l{l} = value`, where the value is a
//! rational (`3`, `-1/2`) or a variable name (`z1`, `w2`, `q`). Blank lines
//! and `#` comments are skipped.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context};
use num_rational::BigRational;
use tetra_core::{Binding, Var};

pub type Table = BTreeMap<Var, Binding<BigRational>>;

pub fn parse(text: &str) -> anyhow::Result<Table> {
    let mut out = Table::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let (key, value) = line.split_once('=').ok_or_else(|| anyhow!("line {lineno}: expected `key = value`"))?;
        let key: Var = key.trim().parse().with_context(|| format!("line {lineno}"))?;
        if !matches!(key, Var::ZSite { .. }) {
            bail!("line {lineno}: `{key}` is not a site variable z{{t}}_k{{k}}l{{l}}");
        }
        let value = value.trim();
        let binding = match value.parse::<BigRational>() {
            Ok(r) => Binding::Value(r),
            Err(_) => {
                let v: Var = value.parse().with_context(|| format!("line {lineno}: bad value `{value}`"))?;
                Binding::Poly(v.into())
            }
        };
        if out.insert(key, binding).is_some() {
            bail!("line {lineno}: `{key}` bound twice");
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_and_names() {
        let t = parse("# table\nz1_k1l1 = 2\n\nz1_k1l2=-1/3\nz2_k1l1 = w1 # renamed\n").unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t[&Var::site(1, 1, 2)], Binding::Value(BigRational::new((-1).into(), 3.into())));
        assert_eq!(t[&Var::site(2, 1, 1)], Binding::Poly(Var::W(1).into()));
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(parse("z1 = 2").is_err());
        assert!(parse("z1_k1l1 2").is_err());
        assert!(parse("z1_k1l1 = 1\nz1_k1l1 = 2").is_err());
        assert!(parse("z1_k1l1 = ?").is_err());
    }
}
