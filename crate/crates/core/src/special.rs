//! Standard normal and Cauchy quantile helpers.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use statrs::function::erf::erfc;

/// Standard normal quantile `Φ⁻¹(p)` (Wichura, AS 241, PPND16).
///
/// Relative accuracy is about 1e-16 over the whole open interval. Returns
/// `-inf` / `+inf` at the endpoints and NaN outside `[0, 1]`.
pub fn normal_quantile(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }

    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = ((((((2.509_080_928_730_122_672_7e3 * r + 3.343_057_558_358_812_810_5e4) * r
            + 6.726_577_092_700_870_085_3e4)
            * r
            + 4.592_195_393_154_987_145_7e4)
            * r
            + 1.373_169_376_550_946_112_5e4)
            * r
            + 1.971_590_950_306_551_442_7e3)
            * r
            + 1.331_416_678_917_843_774_5e2)
            * r
            + 3.387_132_872_796_366_608_0;
        let den = ((((((5.226_495_278_852_854_561_0e3 * r + 2.872_908_573_572_194_267_4e4) * r
            + 3.930_789_580_009_271_061_0e4)
            * r
            + 2.121_379_430_158_659_586_7e4)
            * r
            + 5.394_196_021_424_751_107_7e3)
            * r
            + 6.871_870_074_920_579_083_0e2)
            * r
            + 4.231_333_070_160_091_125_2e1)
            * r
            + 1.0;
        return q * num / den;
    }

    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let val = if r <= 5.0 {
        r -= 1.6;
        let num = ((((((7.745_450_142_783_414_076_4e-4 * r + 2.272_384_498_926_918_458_33e-2)
            * r
            + 2.417_807_251_774_506_117_7e-1)
            * r
            + 1.270_458_252_452_368_382_58)
            * r
            + 3.647_848_324_763_204_605_04)
            * r
            + 5.769_497_221_460_691_405_5)
            * r
            + 4.630_337_846_156_545_295_9)
            * r
            + 1.423_437_110_749_683_577_34;
        let den = ((((((1.050_750_071_644_416_843_24e-9 * r + 5.475_938_084_995_344_946e-4)
            * r
            + 1.519_866_656_361_645_719_66e-2)
            * r
            + 1.481_039_764_274_800_745_9e-1)
            * r
            + 6.897_673_349_851_000_045_5e-1)
            * r
            + 1.676_384_830_183_803_849_4)
            * r
            + 2.053_191_626_637_758_821_87)
            * r
            + 1.0;
        num / den
    } else {
        r -= 5.0;
        let num = ((((((2.010_334_399_292_288_132_65e-7 * r + 2.711_555_568_743_487_578_15e-5)
            * r
            + 1.242_660_947_388_078_438_6e-3)
            * r
            + 2.653_218_952_657_612_309_3e-2)
            * r
            + 2.965_605_718_285_048_912_3e-1)
            * r
            + 1.784_826_539_917_291_335_8)
            * r
            + 5.463_784_911_164_114_369_9)
            * r
            + 6.657_904_643_501_103_777_2;
        let den = ((((((2.044_263_103_389_939_785_64e-15 * r + 1.421_511_758_316_445_888_7e-7)
            * r
            + 1.846_318_317_510_054_681_8e-5)
            * r
            + 7.868_691_311_456_132_591e-4)
            * r
            + 1.487_536_129_085_061_485_25e-2)
            * r
            + 1.369_298_809_227_358_053_1e-1)
            * r
            + 5.998_322_065_558_879_376_9e-1)
            * r
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

/// Upper tail `1 − Φ(x)`, accurate far into both tails.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Standard Cauchy quantile `tan(π(q − 1/2))`.
pub fn cauchy_quantile(q: f64) -> f64 {
    (PI * (q - 0.5)).tan()
}

/// Upper tail `1 − C(x)` of the standard Cauchy law.
///
/// `atan2(1, x) / π` keeps full relative precision for large positive `x`,
/// where `1/2 − atan(x)/π` would cancel.
pub fn cauchy_sf(x: f64) -> f64 {
    1.0f64.atan2(x) / PI
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference quantiles from an independent implementation (scipy.special.ndtri).
    const NDTRI: &[(f64, f64)] = &[
        (1e-12, -7.034483825301131),
        (1e-8, -5.612001244174789),
        (1e-4, -3.7190164854556804),
        (0.001, -3.090232306167813),
        (0.02275, -2.0000024438996036),
        (0.1, -1.2815515655446004),
        (0.3, -0.5244005127080409),
        (0.7, 0.5244005127080407),
        (0.975, 1.959963984540054),
        (0.999, 3.090232306167813),
        (0.9999999999, 6.361340889697422),
    ];

    #[test]
    fn quantile_matches_reference_values() {
        for &(p, z) in NDTRI {
            let got = normal_quantile(p);
            assert!(((got - z) / z).abs() < 1e-12, "p={p}: {got} vs {z}");
        }
        assert_eq!(normal_quantile(0.5), 0.0);
    }

    #[test]
    fn quantile_inverts_upper_tail() {
        // 1 − Φ(−z_p) = p, checked against the erfc route.
        let mut p = 1e-12;
        while p < 0.5 {
            let z = normal_quantile(p);
            let back = normal_sf(-z);
            assert!(((back - p) / p).abs() < 1e-10, "p={p} back={back}");
            p *= 1.7;
        }
    }

    #[test]
    fn quantile_endpoints() {
        assert_eq!(normal_quantile(0.0), f64::NEG_INFINITY);
        assert_eq!(normal_quantile(1.0), f64::INFINITY);
        assert!(normal_quantile(1.5).is_nan());
    }

    #[test]
    fn cauchy_tail_roundtrip() {
        for &q in &[0.001, 0.1, 0.5, 0.77, 0.999] {
            let x = cauchy_quantile(q);
            assert!((cauchy_sf(x) - (1.0 - q)).abs() < 1e-12);
        }
        assert!((cauchy_sf(1e12) - 1.0 / (std::f64::consts::PI * 1e12)).abs() < 1e-24);
    }
}
