//! The fast-growing family g_0 ≪ g_1 ≪ … with h(k) = g_k(k), in exact
//! big-integer form or a scaled form preserving the two inequalities the
//! correctness arguments consume.

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::{Deserialize, Serialize};

use bushy_core::{GrowthFn, MAX_SHIFT_BITS};

use crate::error::DncError;

/// Family construction mode.
///
/// Exact mode uses the literal recurrence `g_k(i) = g_{k−1}(i) ·
/// 2^(e(k−1)+i+m)` with `e(k−1) = h(k−1)`, whose values are towers beyond
/// k ≈ 2. Scaled mode caps the recurrence exponent at `exponent_cap`; the
/// restricted-draw divisor is the same capped exponent, which keeps both
/// preserved inequalities exact while the values stay polynomial-sized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum FamilyMode {
    Exact,
    Scaled { exponent_cap: u64 },
}

/// The functions g_0, …, g_{k_max} tabulated on depths 0..=i_max, their
/// diagonal h, the recurrence exponents actually used, and the optional
/// inner scale applied to the exponent argument.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GrowthFamily {
    pub m: u64,
    pub mode: FamilyMode,
    pub k_max: u64,
    pub i_max: u64,
    pub h0: Option<GrowthFn>,
    g: Vec<Vec<BigUint>>,
    exponents: Vec<BigUint>,
}

impl GrowthFamily {
    /// Build the family. `k_max` levels, tabulated out to `i_max ≥ k_max`.
    /// With `h0` present the recurrence exponent argument passes through it.
    pub fn build(
        m: u64,
        mode: FamilyMode,
        k_max: u64,
        i_max: u64,
        h0: Option<GrowthFn>,
    ) -> Result<Self, DncError> {
        if i_max < k_max {
            return Err(DncError::BadConfig(format!(
                "i_max {i_max} shorter than k_max {k_max}"
            )));
        }
        let width = (i_max + 1) as usize;
        let mut g: Vec<Vec<BigUint>> = Vec::new();
        let mut exponents: Vec<BigUint> = Vec::new();
        let g0: Vec<BigUint> = (0..width)
            .map(|i| BigUint::one() << (i as u64 + m))
            .collect();
        g.push(g0);
        for k in 1..=k_max {
            let prev_diag = g[(k - 1) as usize][(k - 1) as usize].clone();
            let scaled_arg = match &h0 {
                None => prev_diag,
                Some(h0_fn) => h0_fn.eval_big(&prev_diag)?,
            };
            let exponent = match mode {
                FamilyMode::Exact => scaled_arg,
                FamilyMode::Scaled { exponent_cap } => {
                    scaled_arg.min(BigUint::from(exponent_cap))
                }
            };
            let shift_base =
                u64::try_from(&exponent).map_err(|_| DncError::FamilyTooLarge { k })?;
            if shift_base + i_max + m > MAX_SHIFT_BITS {
                return Err(DncError::FamilyTooLarge { k });
            }
            let row: Vec<BigUint> = (0..width)
                .map(|i| {
                    if (i as u64) < k {
                        BigUint::one()
                    } else {
                        g[(k - 1) as usize][i].clone() << (shift_base + i as u64 + m)
                    }
                })
                .collect();
            exponents.push(exponent);
            g.push(row);
        }
        let family = GrowthFamily {
            m,
            mode,
            k_max,
            i_max,
            h0,
            g,
            exponents,
        };
        family.validate()?;
        Ok(family)
    }

    /// A family from explicit tables (rows g_0..g_k, divisor exponents per
    /// level). Rejected unless the preserved inequalities hold.
    pub fn from_tables(
        m: u64,
        g: Vec<Vec<BigUint>>,
        exponents: Vec<BigUint>,
        mode: FamilyMode,
    ) -> Result<Self, DncError> {
        let k_max = g.len().saturating_sub(1) as u64;
        let i_max = g
            .first()
            .map(|r| r.len().saturating_sub(1) as u64)
            .unwrap_or(0);
        let family = GrowthFamily {
            m,
            mode,
            k_max,
            i_max,
            h0: None,
            g,
            exponents,
        };
        family.validate()?;
        Ok(family)
    }

    pub fn g(&self, k: u64, i: u64) -> &BigUint {
        &self.g[k as usize][i as usize]
    }

    /// h(k) = g_k(k).
    pub fn h(&self, k: u64) -> &BigUint {
        &self.g[k as usize][k as usize]
    }

    /// The recurrence exponent e(k) (equals h(k) in exact mode).
    pub fn exponent(&self, k: u64) -> &BigUint {
        &self.exponents[k as usize]
    }

    /// g_k as a growth function table.
    pub fn g_fn(&self, k: u64) -> GrowthFn {
        GrowthFn::table(self.g[k as usize].clone())
    }

    /// h as a growth function table on 0..=k_max.
    pub fn h_fn(&self) -> GrowthFn {
        GrowthFn::table((0..=self.k_max).map(|k| self.h(k).clone()).collect())
    }

    /// The width of a temporary restriction made at stage k, at depth i:
    /// `g_k(i) / 2^e(k−1)`, which the recurrence makes exactly
    /// `g_{k−1}(i) · 2^(i+m)`. Requires 1 ≤ k ≤ k_max, i ≥ k.
    pub fn restricted_bound(&self, k: u64, i: u64) -> BigUint {
        self.g[(k - 1) as usize][i as usize].clone() << (i + m_of(self))
    }

    /// The restriction width at stage k as a growth function table.
    pub fn restricted_bound_fn(&self, k: u64) -> GrowthFn {
        GrowthFn::table(
            (0..=self.i_max)
                .map(|i| {
                    if i < k {
                        BigUint::one()
                    } else {
                        self.restricted_bound(k, i)
                    }
                })
                .collect(),
        )
    }

    /// Restriction safety: for all j < k ≤ i within the table,
    /// `g_k(i)/2^e(k−1) ≥ 2^(i+m) · g_j(i)`.
    pub fn restriction_safety_holds(&self) -> bool {
        for k in 1..=self.k_max {
            for i in k..=self.i_max.min(self.k_max) {
                let lhs = self.restricted_bound(k, i);
                for j in 0..k {
                    let rhs = self.g(j, i).clone() << (i + self.m);
                    if lhs < rhs {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Draw floor: for all k < i ≤ k_max, `h(i) ≥ 2^(i+m) · g_k(i)`.
    pub fn draw_floor_holds(&self) -> bool {
        for i in 1..=self.k_max {
            for k in 0..i {
                let rhs = self.g(k, i).clone() << (i + self.m);
                if *self.h(i) < rhs {
                    return false;
                }
            }
        }
        true
    }

    /// Every draw width the runs can use is at least 2^(n+m).
    pub fn floor_two_to_n_plus_m_holds(&self) -> bool {
        for i in 0..=self.k_max {
            if *self.h(i) < (BigUint::one() << (i + self.m)) {
                return false;
            }
        }
        for k in 1..=self.k_max {
            for i in k..=self.i_max {
                if self.restricted_bound(k, i) < (BigUint::one() << (i + self.m)) {
                    return false;
                }
            }
        }
        true
    }

    fn validate(&self) -> Result<(), DncError> {
        if !self.restriction_safety_holds() {
            return Err(DncError::FamilyInequalityViolated("restriction safety"));
        }
        if !self.draw_floor_holds() {
            return Err(DncError::FamilyInequalityViolated("draw floor"));
        }
        Ok(())
    }
}

fn m_of(f: &GrowthFamily) -> u64 {
    f.m
}

/// Ceiling of log2 for positive naturals.
pub fn log2_ceil(v: &BigUint) -> u64 {
    let bits = v.bits();
    if v.count_ones() == 1 {
        bits - 1
    } else {
        bits
    }
}

/// The compressibility threshold at stage k:
/// `2 Σ_{i≤k−1} ⌈log2 h(i)⌉ + K_gamma + c − h(k−1)`, a signed quantity that
/// must fall below −d before a requirement with slack d may receive
/// attention. Requires 1 ≤ k ≤ k_max.
pub fn requirement_threshold(
    family: &GrowthFamily,
    k: u64,
    k_gamma_bits: u64,
    c_machine: u64,
) -> BigInt {
    let mut acc = BigInt::from(0);
    for i in 0..k {
        acc += BigInt::from(2 * log2_ceil(family.h(i)));
    }
    acc += BigInt::from(k_gamma_bits + c_machine);
    acc -= BigInt::from(family.h(k - 1).clone());
    acc
}

/// The first stage at which a requirement with slack `d` may receive
/// attention: least k ≥ 1 with threshold(k) < −d. None if no stage within
/// the family's range qualifies.
pub fn first_allowed_stage(
    family: &GrowthFamily,
    d: u64,
    k_gamma_bits: u64,
    c_machine: u64,
) -> Option<u64> {
    (1..=family.k_max)
        .find(|&k| requirement_threshold(family, k, k_gamma_bits, c_machine) < -BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_base_values_at_m3() {
        let f = GrowthFamily::build(3, FamilyMode::Exact, 2, 6, None).unwrap();
        // g_0(n) = 2^{n+m}
        assert_eq!(*f.g(0, 0), BigUint::from(8u32));
        assert_eq!(*f.g(0, 1), BigUint::from(16u32));
        // h(0) = g_0(0)
        assert_eq!(*f.h(0), BigUint::from(8u32));
        // g_1(0) = 1; g_1(1) = g_0(1)·2^{g_0(0)+1+3} = 16·2^12 = 65536
        assert_eq!(*f.g(1, 0), BigUint::one());
        assert_eq!(*f.g(1, 1), BigUint::from(65536u32));
        assert_eq!(*f.h(1), BigUint::from(65536u32));
        // h(2) = g_2(2) = g_1(2)·2^{h(1)+2+3}
        let g12 = f.g(1, 2).clone();
        assert_eq!(*f.h(2), g12 << (65536 + 5));
    }

    #[test]
    fn exact_mode_rejects_towers() {
        // k = 3 needs a shift by h(2) ≈ 2^65567 bits
        assert!(matches!(
            GrowthFamily::build(3, FamilyMode::Exact, 3, 4, None),
            Err(DncError::FamilyTooLarge { k: 3 })
        ));
    }

    #[test]
    fn h0_variant_changes_the_exponent() {
        // h0 doubling: g_1(1) = g_0(1)·2^{h0(8)+1+3} with h0(8)=16
        let h0 = GrowthFn::table((0..=20u32).map(|v| BigUint::from(2 * v)).collect());
        let f = GrowthFamily::build(3, FamilyMode::Exact, 1, 3, Some(h0)).unwrap();
        assert_eq!(*f.g(1, 1), BigUint::from(16u32) << (16 + 1 + 3));
    }

    #[test]
    fn scaled_family_passes_the_same_audits() {
        let f = GrowthFamily::build(3, FamilyMode::Scaled { exponent_cap: 0 }, 26, 28, None)
            .unwrap();
        assert!(f.restriction_safety_holds());
        assert!(f.draw_floor_holds());
        assert!(f.floor_two_to_n_plus_m_holds());
        // closed form: h(k) = 2^{(k+m)(k+1)}
        for k in 0..=26u64 {
            assert_eq!(*f.h(k), BigUint::one() << ((k + 3) * (k + 1)));
        }
    }

    #[test]
    fn tampered_tables_are_rejected()
    {
        let good = GrowthFamily::build(2, FamilyMode::Scaled { exponent_cap: 0 }, 3, 4, None)
            .unwrap();
        let mut rows: Vec<Vec<BigUint>> = (0..=3u64)
            .map(|k| (0..=4u64).map(|i| good.g(k, i).clone()).collect())
            .collect();
        // sabotage: g_2(3) too small for the draw floor
        rows[3][3] = BigUint::from(2u32);
        let exps: Vec<BigUint> = (0..3).map(|k| good.exponent(k).clone()).collect();
        assert!(matches!(
            GrowthFamily::from_tables(2, rows, exps, FamilyMode::Scaled { exponent_cap: 0 }),
            Err(DncError::FamilyInequalityViolated(_))
        ));
    }

    #[test]
    fn threshold_is_eventually_decreasing_and_scannable() {
        let f = GrowthFamily::build(3, FamilyMode::Exact, 2, 4, None).unwrap();
        let t1 = requirement_threshold(&f, 1, 50, 34);
        let t2 = requirement_threshold(&f, 2, 50, 34);
        assert!(t2 < t1);
        assert!(t2 < BigInt::from(-60000));
        // the linear scan and the helper agree
        let d = 10u64;
        let scan = (1..=2u64)
            .find(|&k| requirement_threshold(&f, k, 50, 34) < -BigInt::from(d));
        assert_eq!(first_allowed_stage(&f, d, 50, 34), scan);
        // monotone in d
        let a0 = first_allowed_stage(&f, 0, 50, 34);
        let a1 = first_allowed_stage(&f, 1_000, 50, 34);
        match (a0, a1) {
            (Some(x), Some(y)) => assert!(x <= y),
            (None, Some(_)) => panic!("gate loosened by larger d"),
            _ => {}
        }
    }

    #[test]
    fn scaled_thresholds_cross_early() {
        let f = GrowthFamily::build(3, FamilyMode::Scaled { exponent_cap: 0 }, 26, 28, None)
            .unwrap();
        let gate = first_allowed_stage(&f, 8, 64, 34).expect("crosses");
        assert!(gate <= 3, "gate at {gate}");
        for k in gate..26 {
            let here = requirement_threshold(&f, k, 64, 34);
            let next = requirement_threshold(&f, k + 1, 64, 34);
            assert!(next < here);
        }
    }
}
