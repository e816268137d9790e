use asg_core::asg::{
    classical_asg_keystream, keystream, random_key, reduce, validate, AsgGenerator, AsgKey, AsgParams, Violation,
};
use asg_core::field::first_primitive;
use asg_core::gf2::{BinaryPolynomial, BitSequence};
use asg_core::registers::decimate;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn params(l: usize, m: usize, n: usize) -> AsgParams {
    AsgParams {
        l,
        m,
        n,
        poly_a: first_primitive(l).unwrap(),
        poly_b: first_primitive(m).unwrap(),
        poly_c: first_primitive(n).unwrap(),
        strict: true,
    }
}

/// Straight-line simulator on `Vec<bool>` cells. Feedback for `x^L + Σ c_i x^i`
/// is `Σ c_i · cell[L-1-i]`; cells shift from 0 towards L-1.
struct Plain {
    cells: Vec<bool>,
    coeffs: Vec<bool>,
}

impl Plain {
    fn new(poly: &BinaryPolynomial, cells: Vec<bool>) -> Self {
        let coeffs = (0..cells.len()).map(|i| poly.coeff(i)).collect();
        Plain { cells, coeffs }
    }

    fn feedback(&self) -> bool {
        let l = self.cells.len();
        (0..l).fold(false, |acc, i| acc ^ (self.coeffs[i] && self.cells[l - 1 - i]))
    }

    fn clock(&mut self, extra: bool) {
        let fb = self.feedback() ^ extra;
        self.cells.rotate_right(1);
        self.cells[0] = fb;
    }

    fn de_bruijn_clock(&mut self) {
        let l = self.cells.len();
        let zeros = self.cells[..l - 1].iter().all(|&c| !c);
        self.clock(zeros);
    }

    fn last(&self) -> bool {
        *self.cells.last().unwrap()
    }
}

fn plain_keystream(p: &AsgParams, k: &AsgKey, count: usize) -> BitSequence {
    let cells = |v: &BitSequence| v.iter().collect::<Vec<bool>>();
    let mut a = Plain::new(&p.poly_a, cells(&k.state_a));
    let mut b = Plain::new(&p.poly_b, cells(&k.state_b));
    let mut c = Plain::new(&p.poly_c, cells(&k.state_c));
    let mut out = BitSequence::new();
    for t in 0..count {
        if t > 0 {
            if a.cells[0] {
                (0..k.r).for_each(|_| b.clock(false));
            } else {
                (0..k.s).for_each(|_| c.clock(false));
            }
            a.de_bruijn_clock();
        }
        out.push(b.last() ^ c.last());
    }
    out
}

#[test]
fn matches_straight_line_simulator() {
    let p = params(3, 3, 4);
    let k = AsgKey {
        state_a: "101".parse().unwrap(),
        state_b: "011".parse().unwrap(),
        state_c: "1001".parse().unwrap(),
        r: 5,
        s: 11,
    };
    assert_eq!(keystream(&p, &k, 64).unwrap(), plain_keystream(&p, &k, 64));
    assert!(keystream(&p, &k, 0).unwrap().is_empty());
}

proptest! {
    #[test]
    fn random_keys_match_simulator(seed in any::<u64>(), big in any::<bool>()) {
        let p = if big { params(5, 5, 7) } else { params(3, 3, 4) };
        let k = random_key(&p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!(validate(&p, &k).is_empty());
        prop_assert_eq!(keystream(&p, &k, 300).unwrap(), plain_keystream(&p, &k, 300));
        let model = reduce(&p, &k).unwrap();
        prop_assert_eq!(classical_asg_keystream(&model, 1000).unwrap(), keystream(&p, &k, 1000).unwrap());
    }

    #[test]
    fn large_jumps_match_simulator(r in 1u64..4000, s in 1u64..4000, seed in any::<u64>()) {
        let p = AsgParams { strict: false, ..params(4, 6, 5) };
        let mut k = random_key(&p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        k.r = r;
        k.s = s;
        prop_assume!(validate(&p, &k).is_empty());
        prop_assert_eq!(keystream(&p, &k, 120).unwrap(), plain_keystream(&p, &k, 120));
    }
}

#[test]
fn one_register_advances_per_bit() {
    let p = params(5, 5, 7);
    let k = random_key(&p, &mut ChaCha8Rng::seed_from_u64(31)).unwrap();
    let mut g = AsgGenerator::new(&p, &k).unwrap();
    for t in 0..500u64 {
        g.next_bit();
        assert_eq!(g.beta_index() + g.lambda_index(), t);
    }
}

#[test]
fn differences_on_b_steps_track_beta() {
    // Instrumented run: on steps where a_t = 1, z_t ⊕ z_(t+1) = β_p ⊕ β_(p+1).
    let p = params(4, 5, 7);
    let k = random_key(&p, &mut ChaCha8Rng::seed_from_u64(32)).unwrap();
    let mut g = AsgGenerator::new(&p, &k).unwrap();
    let mut prev_z = g.next_bit();
    let mut prev_beta = g.generating_outputs().0;
    for _ in 0..400 {
        let a = g.control_bit();
        let z = g.next_bit();
        let beta = g.generating_outputs().0;
        if a {
            assert_eq!(prev_z ^ z, prev_beta ^ beta);
        } else {
            assert_eq!(prev_beta, beta);
        }
        prev_z = z;
        prev_beta = beta;
    }
}

#[test]
fn reduced_registers_are_decimations() {
    let p = params(3, 5, 7);
    let k = random_key(&p, &mut ChaCha8Rng::seed_from_u64(33)).unwrap();
    let model = reduce(&p, &k).unwrap();
    let b = p.spec(asg_core::asg::Register::B).unwrap();
    let b_out = b
        .output_sequence(&asg_core::registers::RegisterState::new(k.state_b.clone()), 31 * k.r as usize + 1)
        .unwrap();
    let beta = model.beta_spec.output_sequence(&model.beta_state, 31).unwrap();
    assert_eq!(beta, decimate(&b_out, k.r as usize).prefix(31));
}

#[test]
fn reduce_feedback_examples() {
    let p = params(3, 3, 4);
    let mut k = AsgKey {
        state_a: "100".parse().unwrap(),
        state_b: "100".parse().unwrap(),
        state_c: "1000".parse().unwrap(),
        r: 1,
        s: 1,
    };
    assert_eq!(reduce(&p, &k).unwrap().beta_spec.feedback(), &p.poly_b);
    k.r = 3;
    assert_eq!(reduce(&p, &k).unwrap().beta_spec.feedback().to_string(), "x^3 + x^2 + 1");
    k.r = 2;
    assert_eq!(reduce(&p, &k).unwrap().beta_spec.feedback(), &p.poly_b);
}

#[test]
fn validation_rules() {
    let p = params(3, 3, 4);
    let ok = AsgKey {
        state_a: "000".parse().unwrap(),
        state_b: "100".parse().unwrap(),
        state_c: "0100".parse().unwrap(),
        r: 2,
        s: 2,
    };
    assert!(validate(&p, &ok).is_empty());
    let bad_jump = AsgKey { s: 3, ..ok.clone() };
    assert!(validate(&p, &bad_jump).iter().any(|v| matches!(v, Violation::JumpNotCoprime { gcd: 3, .. })));
    let p46 = params(3, 4, 6);
    assert!(p46.violations().iter().any(|v| matches!(v, Violation::LengthsNotCoprime { gcd: 2, .. })));
    let relaxed = AsgParams { strict: false, ..p46 };
    assert!(relaxed.violations().is_empty());
}

#[test]
fn random_key_is_deterministic() {
    let p = params(8, 7, 5);
    let a = random_key(&p, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    let b = random_key(&p, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    assert_eq!(a, b);
    assert!(random_key(&params(3, 4, 6), &mut ChaCha8Rng::seed_from_u64(9)).is_err());
}
