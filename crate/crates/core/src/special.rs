//! Gamma and Beta functions.

use crate::scalar::Scalar;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum<T: Scalar>(z: T) -> T {
    // z is the shifted argument, Γ(z+1) is being evaluated.
    let mut acc = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (z + T::from_count(i));
    }
    acc
}

/// Γ(z) by a Lanczos approximation; reflection below 1/2.
pub fn gamma<T: Scalar>(z: T) -> T {
    if z < T::lit(0.5) {
        let pi = T::PI();
        return pi / ((pi * z).sin() * gamma(T::one() - z));
    }
    let z = z - T::one();
    let t = z + T::lit(LANCZOS_G + 0.5);
    (T::TAU()).sqrt() * t.powf(z + T::lit(0.5)) * (-t).exp() * lanczos_sum(z)
}

/// ln|Γ(z)|.
pub fn ln_gamma<T: Scalar>(z: T) -> T {
    if z < T::lit(0.5) {
        let pi = T::PI();
        return (pi / (pi * z).sin().abs()).ln() - ln_gamma(T::one() - z);
    }
    let z = z - T::one();
    let t = z + T::lit(LANCZOS_G + 0.5);
    T::lit(0.5) * T::TAU().ln() + (z + T::lit(0.5)) * t.ln() - t + lanczos_sum(z).ln()
}

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b).
pub fn beta_fn<T: Scalar>(a: T, b: T) -> T {
    gamma(a) * gamma(b) / gamma(a + b)
}
