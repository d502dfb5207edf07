//! The deterministic search for a splitting string ρ*: the first ρ (in
//! lexicographic order) whose output-cone is big above the current string.

use std::collections::BTreeSet;

use num_bigint::BigUint;

use bushy_core::{is_big_bounded_with, Caps, GrowthFn, OmegaString, WitnessTree};
use toy_computation::{BitStr, Functional};

/// Scan ρ of length `target_len` lexicographically and return the first one
/// for which `S_ρ = {τ : |Γ^τ| ≥ target_len, Γ^τ ⪰ ρ}` is `g_search`-big
/// above `sigma` within the caps, together with the witness. The scan only
/// needs to touch candidates realized as output prefixes inside the capped
/// grid: any ρ with a nonempty cone there is such a prefix. Absence is data.
pub fn find_rho_star(
    sigma: &OmegaString,
    gamma: &Functional,
    target_len: &BigUint,
    g_search: &GrowthFn,
    caps: Caps,
    gamma_budget: u64,
) -> Option<(BitStr, WitnessTree)> {
    let len = usize::try_from(target_len).ok()?;
    let mut candidates: BTreeSet<BitStr> = BTreeSet::new();
    let mut frontier = vec![sigma.clone()];
    while let Some(node) = frontier.pop() {
        if node.len() as u64 > caps.depth {
            continue;
        }
        let out = gamma.output(&node, gamma_budget);
        if out.bits.len() >= len {
            candidates.insert(out.bits.prefix(len));
        }
        if (node.len() as u64) < caps.depth {
            for c in 0..caps.width {
                frontier.push(node.child(c));
            }
        }
    }
    for rho in candidates {
        let mut member = |tau: &OmegaString| {
            let out = gamma.output(tau, gamma_budget);
            out.bits.len() >= len && rho.is_prefix_of(&out.bits)
        };
        if let Ok(Some(witness)) = is_big_bounded_with(&mut member, sigma, g_search, caps) {
            return Some((rho, witness));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use bushy_core::verify_witness_with;

    #[test]
    fn constant_functional_yields_its_prefix() {
        let gamma = Functional::Constant {
            bits: "110100".parse().unwrap(),
        };
        let sigma = OmegaString::from_u64s(&[2]);
        let (rho, witness) = find_rho_star(
            &sigma,
            &gamma,
            &BigUint::from(4u32),
            &GrowthFn::constant(1u32),
            Caps::new(3, 2),
            100,
        )
        .expect("found");
        assert_eq!(rho.to_string(), "1101");
        assert_eq!(witness.stem(), &sigma);
        assert!(witness.is_leaf(&sigma));
    }

    #[test]
    fn partial_functional_yields_nothing() {
        let r = find_rho_star(
            &OmegaString::root(),
            &Functional::EverywherePartial,
            &BigUint::from(1u32),
            &GrowthFn::constant(1u32),
            Caps::new(3, 3),
            100,
        );
        assert!(r.is_none());
    }

    #[test]
    fn copy_parity_matches_exhaustive_enumeration() {
        // width-2 grid, ρ of length 2, bushiness 2: enumerate all four
        // candidates by brute force and compare
        let gamma = Functional::CopyParity;
        let sigma = OmegaString::root();
        let caps = Caps::new(2, 2);
        let g = GrowthFn::constant(2u32);
        let budget = 100;
        let len = 2usize;

        let mut exhaustive: Option<BitStr> = None;
        for bits in 0..4u8 {
            let rho = BitStr::from_bits(vec![bits & 2 != 0, bits & 1 != 0]);
            let mut member = |tau: &OmegaString| {
                let out = gamma.output(tau, budget).bits;
                out.len() >= len && rho.is_prefix_of(&out)
            };
            if is_big_bounded_with(&mut member, &sigma, &g, caps)
                .unwrap()
                .is_some()
            {
                exhaustive = Some(rho);
                break;
            }
        }

        let found = find_rho_star(&sigma, &gamma, &BigUint::from(2u32), &g, caps, budget);
        match (exhaustive, found) {
            (Some(e), Some((rho, witness))) => {
                assert_eq!(e, rho);
                let mut member = |tau: &OmegaString| {
                    let out = gamma.output(tau, budget).bits;
                    out.len() >= len && rho.is_prefix_of(&out)
                };
                assert!(verify_witness_with(&witness, &mut member, &g));
            }
            (None, None) => {}
            (e, f) => panic!("exhaustive {e:?} vs search {:?}", f.map(|x| x.0)),
        }

        // with unit bushiness the single-path cone of the least output wins
        let (rho, _) = find_rho_star(
            &sigma,
            &gamma,
            &BigUint::from(2u32),
            &GrowthFn::constant(1u32),
            caps,
            budget,
        )
        .expect("unit bushiness is satisfiable");
        assert_eq!(rho.to_string(), "00");
    }
}
