use vnwfet_core::characterize::{characterize_inverter, DynamicOptions};
use vnwfet_core::circuit::{
    build_inverter, dc_operating_point, dc_sweep, InputDrive, InverterCell, InverterOptions, Topology, INPUT,
};
use vnwfet_core::{BiasPoint, ModelCard, Vnwfet};

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let f_lo = f(lo);
    assert!(f_lo * f(hi) < 0.0, "bracket");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn passive_levels_match_load_line() {
    let card = ModelCard::default_p_type();
    let nf = 16;
    for vin in [0.0, 1.0] {
        let opts = InverterOptions {
            input: InputDrive::Dc(vin),
            ..InverterOptions::default()
        };
        let cell = build_inverter(Topology::PassiveLoad, nf, &card, &opts).unwrap();
        let r = cell.load_resistance.unwrap();
        let dev = Vnwfet::new(card.with_nanowires(nf)).unwrap();
        // Current leaving the pull-up drain into the output node minus the
        // current through the load.
        let kcl = |v: f64| -dev.terminal_current(BiasPoint::new(vin - 1.0, v - 1.0)).unwrap() - v / r;
        let expected = bisect(-0.5, 1.0, kcl);
        let op = dc_operating_point(&cell.netlist).unwrap();
        let got = op.voltage(InverterCell::OUTPUT_NODE).unwrap();
        assert!((got - expected).abs() < 1e-7, "vin {vin}: {got} vs {expected}");
    }
}

#[test]
fn complementary_transfer_curve_is_nonincreasing() {
    let cell = build_inverter(
        Topology::Complementary,
        4,
        &ModelCard::default_p_type(),
        &InverterOptions::default(),
    )
    .unwrap();
    let set = dc_sweep(&cell.netlist, INPUT, 0.0, 1.0, 0.005).unwrap();
    let out = set.trace("v(out)").unwrap();
    assert!(out.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    assert!(out[0] > 0.99 && out[out.len() - 1] < 0.01);
}

#[test]
fn complementary_nf16_swings_rail_to_rail() {
    let card = ModelCard::default_p_type();
    let coarse = DynamicOptions::default();
    let fine = DynamicOptions {
        dt: coarse.dt / 2.0,
        ..coarse.clone()
    };
    let (a, _) = characterize_inverter(Topology::Complementary, 16, &card, &coarse).unwrap();
    let (b, _) = characterize_inverter(Topology::Complementary, 16, &card, &fine).unwrap();
    for r in [&a, &b] {
        assert!(r.level_degradation_high < 0.02 && r.overshoot_low < 0.02, "{r:?}");
    }
    assert!((a.t_plh_s / b.t_plh_s - 1.0).abs() < 0.005);
}

#[test]
fn energy_doubles_with_nf() {
    let card = ModelCard::default_p_type();
    let opts = DynamicOptions::default();
    let e = |nf| {
        characterize_inverter(Topology::Complementary, nf, &card, &opts)
            .unwrap()
            .0
            .energy_per_transition_j
    };
    let (e4, e8) = (e(4), e(8));
    assert!((e8 / e4 - 2.0).abs() < 0.02, "{e4:e} {e8:e}");
}
