//! Closed-form operation counts for hierarchical and flattened analysis.

use std::io::Write;

use serde::Serialize;

/// Node counts of a model with `k` components.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelStats {
    /// Variables plus equations defined by the model itself.
    pub n0: f64,
    /// `(n_i, u_i)`: nodes of each component and of its under part.
    pub components: Vec<(f64, f64)>,
    /// Average number of edges per node.
    pub c: f64,
}

impl ModelStats {
    /// `n` nodes split evenly over the model and `k` components, each
    /// component with an under-constrained share `r`.
    pub fn even_split(n: f64, k: usize, r: f64, c: f64) -> Self {
        let n0 = n / (k as f64 + 1.0);
        let ni = if k == 0 { 0.0 } else { (n - n0) / k as f64 };
        ModelStats {
            n0,
            components: vec![(ni, r * ni); k],
            c,
        }
    }

    fn sum_n(&self) -> f64 {
        self.components.iter().map(|(n, _)| n).sum()
    }

    fn sum_u(&self) -> f64 {
        self.components.iter().map(|(_, u)| u).sum()
    }

    fn dummy_nodes(&self) -> f64 {
        self.n0 + self.sum_u()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostKind {
    /// Hierarchical analysis with every component decomposed.
    Total,
    /// Hierarchical analysis with component decompositions cached.
    Reuse,
    /// Analysis of the flattened model.
    Flattened,
    /// Decomposing the components only.
    Component,
}

/// Bound on decomposing an NLAE component of `n` nodes.
pub fn component_cost(n: f64, c: f64) -> f64 {
    n.powf(2.5) + (2.0 * c + 3.0) * n
}

/// Bound on decomposing a DAE component of `n` nodes, index reduction
/// included.
pub fn dae_component_cost(n: f64, c: f64) -> f64 {
    n.powi(3) + (2.0 * c + 3.0) * n
}

pub fn predict_cost(s: &ModelStats, which: CostKind) -> f64 {
    match which {
        CostKind::Total => {
            let decompose: f64 = s.components.iter().map(|(n, _)| n.powf(2.5)).sum();
            decompose + s.c * s.sum_n() + s.dummy_nodes().powf(2.5)
        }
        CostKind::Reuse => s.dummy_nodes().powf(2.5) + s.c * s.sum_u(),
        CostKind::Flattened => {
            let n = s.n0 + s.sum_n();
            n.powf(2.5) + n
        }
        CostKind::Component => s.components.iter().map(|(n, _)| component_cost(*n, s.c)).sum(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostPoint {
    pub n: f64,
    pub k: usize,
    pub r: f64,
    pub c_total: f64,
    pub c_reuse: f64,
    pub c_flattened: f64,
}

/// Costs over the grid `ns × ks × rs` with even splits.
pub fn cost_curves(ns: &[f64], ks: &[usize], rs: &[f64], c0: f64) -> Vec<CostPoint> {
    let mut out = Vec::with_capacity(ns.len() * ks.len() * rs.len());
    for &n in ns {
        for &k in ks {
            for &r in rs {
                let s = ModelStats::even_split(n, k, r, c0);
                out.push(CostPoint {
                    n,
                    k,
                    r,
                    c_total: predict_cost(&s, CostKind::Total),
                    c_reuse: predict_cost(&s, CostKind::Reuse),
                    c_flattened: predict_cost(&s, CostKind::Flattened),
                });
            }
        }
    }
    out
}

pub fn write_curves_csv<W: Write>(points: &[CostPoint], w: W) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for p in points {
        wr.serialize(p)?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn component_bound_at_one_hundred_nodes() {
        assert_eq!(component_cost(100.0, 6.0), 101_500.0);
        assert_eq!(dae_component_cost(10.0, 6.0), 1150.0);
    }

    #[test]
    fn single_block_flattened_cost() {
        let s = ModelStats {
            n0: 64.0,
            components: Vec::new(),
            c: 6.0,
        };
        assert_eq!(predict_cost(&s, CostKind::Flattened), 64f64.powf(2.5) + 64.0);
    }

    #[test]
    fn total_cost_by_hand() {
        let s = ModelStats {
            n0: 4.0,
            components: vec![(16.0, 4.0), (9.0, 0.0)],
            c: 6.0,
        };
        // 16^2.5 + 9^2.5 + 6 * 25 + 8^2.5
        let want = 1024.0 + 243.0 + 150.0 + 8f64.powf(2.5);
        assert!((predict_cost(&s, CostKind::Total) - want).abs() < 1e-9);
        let reuse = 8f64.powf(2.5) + 24.0;
        assert!((predict_cost(&s, CostKind::Reuse) - reuse).abs() < 1e-9);
        assert_eq!(predict_cost(&s, CostKind::Component), 1024.0 + 15.0 * 16.0 + 243.0 + 15.0 * 9.0);
    }

    #[test]
    fn curves_csv_has_header() {
        let pts = cost_curves(&[100.0], &[2], &[0.1], 6.0);
        let mut buf = Vec::new();
        write_curves_csv(&pts, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,k,r,c_total,c_reuse,c_flattened\n"));
        assert_eq!(text.lines().count(), 2);
    }

    proptest! {
        #[test]
        fn costs_grow_with_n(n in 1.0f64..1e5, dn in 0.0f64..1e4, k in 0usize..60, r in 0.0f64..1.0) {
            for which in [CostKind::Total, CostKind::Reuse, CostKind::Flattened, CostKind::Component] {
                let a = predict_cost(&ModelStats::even_split(n, k, r, 6.0), which);
                let b = predict_cost(&ModelStats::even_split(n + dn, k, r, 6.0), which);
                prop_assert!(a <= b, "{which:?}: {a} > {b}");
            }
            prop_assert!(component_cost(n, 6.0) <= component_cost(n + dn, 6.0));
            prop_assert!(dae_component_cost(n, 6.0) <= dae_component_cost(n + dn, 6.0));
        }
    }
}
