use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use vnwfet_core::calibrate::{fit, FitParam, FitSpec, IvDataset, IvRecord, Weighting};
use vnwfet_core::numerics::linear_regression;
use vnwfet_core::ModelCard;

fn card(diameter_nm: f64, nanowires: u32) -> ModelCard {
    let mut c = ModelCard::default_p_type().with_nanowires(nanowires);
    c.geometry.radius = 0.5 * diameter_nm * 1e-9;
    c
}

fn biases() -> Vec<(f64, f64)> {
    let mut b = Vec::new();
    for vds in [-0.05, -0.5, -1.0] {
        for k in 0..=30 {
            b.push((0.6 - 1.6 * f64::from(k) / 30.0, vds));
        }
    }
    b
}

fn noisy(truth: &ModelCard, seed: u64) -> IvDataset {
    let mut ds = IvDataset::simulate(truth, &biases()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.02).unwrap();
    for r in &mut ds.records {
        r.id *= 1.0 + noise.sample(&mut rng);
    }
    ds
}

#[test]
fn recovers_eta_and_mobility_from_noisy_data() {
    for (k, (d, nf)) in [(22.0, 16), (50.0, 36), (35.0, 100), (50.0, 625)]
        .into_iter()
        .enumerate()
    {
        let card0 = card(d, nf);
        let mut truth = card0.clone();
        truth.interface_trap *= 1.2;
        truth.mobility *= 0.8;
        let data = noisy(&truth, 7 + k as u64);
        let spec = FitSpec::new(&[FitParam::Eta, FitParam::Mu0]).with_seed(1);
        let (fitted, report) = fit(&card0, &data, &spec).unwrap();
        let e_eta = fitted.interface_trap / truth.interface_trap - 1.0;
        let e_mu = fitted.mobility / truth.mobility - 1.0;
        assert!(
            e_eta.abs() < 0.05 && e_mu.abs() < 0.05,
            "D {d} NF {nf}: eta {e_eta:+.4} mu {e_mu:+.4} rms {}",
            report.rms_decades
        );
    }
}

fn subthreshold_slope(ds: &IvDataset) -> f64 {
    let pts: Vec<&IvRecord> = ds
        .records
        .iter()
        .filter(|r| r.vds == -1.0 && r.vgs > 0.05 && r.vgs < 0.45)
        .collect();
    let x: Vec<f64> = pts.iter().map(|r| r.vgs).collect();
    let y: Vec<f64> = pts.iter().map(|r| r.id.abs().log10()).collect();
    linear_regression(&x, &y).unwrap().0
}

#[test]
fn fitted_eta_reproduces_subthreshold_slope() {
    let card0 = card(22.0, 16);
    let mut truth = card0.clone();
    truth.interface_trap = 1.45;
    let data = IvDataset::simulate(&truth, &biases()).unwrap();
    let spec = FitSpec::new(&[FitParam::Eta]).with_weighting(Weighting::LogCurrent);
    let (fitted, _) = fit(&card0, &data, &spec).unwrap();
    let refit = IvDataset::simulate(&fitted, &biases()).unwrap();
    let (s_true, s_fit) = (subthreshold_slope(&data), subthreshold_slope(&refit));
    assert!((s_fit / s_true - 1.0).abs() < 0.02, "{s_true} vs {s_fit}");
}

#[test]
fn refit_does_not_increase_residual() {
    let card0 = card(22.0, 16);
    let mut truth = card0.clone();
    truth.interface_trap *= 1.1;
    let data = noisy(&truth, 3);
    let spec = FitSpec::new(&[FitParam::Eta, FitParam::Mu0]);
    let (first, r1) = fit(&card0, &data, &spec).unwrap();
    let (_, r2) = fit(&first, &data, &spec).unwrap();
    assert!(r2.rms_decades <= r1.rms_decades * (1.0 + 1e-9));
}
