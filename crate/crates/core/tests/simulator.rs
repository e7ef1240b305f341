use spdiq::imgcore::PlanarImage;
use spdiq::simulator::{
    gaussian_blur, generate_replicates, generate_scene, simulate_capture, Boundary, PipelineConfig, PipelineKind,
    SceneKind, Stage,
};
use spdiq::spectral::{measure_nps, NpsConfig, NpsVariant, TargetKind};

fn std_dev(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n).sqrt()
}

fn stage_image(out: &[spdiq::simulator::StageOutput], stage: Stage) -> &PlanarImage {
    &out.iter().find(|o| o.stage == stage).unwrap().image
}

#[test]
fn uniform_patch_snr_matches_poisson_plus_read_prediction() {
    let (w, h) = (1024, 1024);
    let level = 0.5;
    let scene = PlanarImage::filled(w, h, 3, level).unwrap();
    let cfg = PipelineConfig {
        cfa: false,
        seed: 11,
        ..PipelineConfig::new(PipelineKind::Linear, 80.0)
    };
    let out = simulate_capture(&scene, &cfg).unwrap();
    let green = stage_image(&out, Stage::PreDenoise).plane(1);
    assert!(green.len() >= 1_000_000);
    let mean = green.iter().sum::<f64>() / green.len() as f64;
    let measured = mean / std_dev(green);

    // electrons: Poisson variance L*N plus read variance (r*N)^2, green scale 1
    let n_sat = 80.0f64 * 80.0;
    let e = level * n_sat;
    let read = 0.4 / 80.0 * n_sat;
    let predicted = e / (e + read * read).sqrt();
    let rel = (measured - predicted).abs() / predicted;
    assert!(rel < 0.05, "measured {measured}, predicted {predicted}");
}

#[test]
fn replicate_mean_noise_shrinks_as_inverse_sqrt_n() {
    let scene = PlanarImage::filled(128, 128, 3, 0.4).unwrap();
    let cfg = PipelineConfig {
        cfa: false,
        seed: 3,
        ..PipelineConfig::new(PipelineKind::Linear, 20.0)
    };
    let mean_std = |n: usize| {
        let reps = generate_replicates(&scene, &cfg, n, TargetKind::Uniform, "u").unwrap();
        let set = reps.get(Stage::PreDenoise);
        let len = set.width() * set.height();
        let mut acc = vec![0.0; len];
        for r in set.replicates() {
            for (a, v) in acc.iter_mut().zip(r.plane(1)) {
                *a += v / n as f64;
            }
        }
        std_dev(&acc)
    };
    let ratio = mean_std(4) / mean_std(16);
    assert!((ratio - 2.0).abs() < 0.1, "ratio {ratio}");
}

#[test]
fn lens_blur_preserves_mean() {
    let scene = generate_scene(SceneKind::Shapes, 96, 80, 4).unwrap();
    for sigma in [0.5, 1.0, 2.5] {
        let b = gaussian_blur(&scene, sigma, Boundary::Periodic);
        for c in 0..3 {
            let m0 = scene.plane(c).iter().sum::<f64>();
            let m1 = b.plane(c).iter().sum::<f64>();
            assert!((m1 - m0).abs() / m0 < 1e-9, "sigma {sigma}: {m0} vs {m1}");
        }
    }
}

fn roll(img: &PlanarImage, dx: usize, dy: usize) -> PlanarImage {
    let (w, h) = (img.width(), img.height());
    let planes = (0..img.channels())
        .map(|c| {
            let p = img.plane(c);
            let mut out = vec![0.0; w * h];
            for y in 0..h {
                for x in 0..w {
                    out[((y + dy) % h) * w + (x + dx) % w] = p[y * w + x];
                }
            }
            out
        })
        .collect();
    PlanarImage::from_planes(w, h, planes).unwrap()
}

#[test]
fn noiseless_linear_pipeline_is_shift_invariant_on_a_torus() {
    let scene = generate_scene(SceneKind::Mixed, 64, 64, 9).unwrap();
    let cfg = PipelineConfig {
        boundary: Boundary::Periodic,
        ..PipelineConfig::new(PipelineKind::Linear, f64::INFINITY)
    };
    // the RGGB period is 2, so only even shifts commute with the mosaic
    for (dx, dy) in [(2, 0), (0, 6), (10, 4)] {
        let a = simulate_capture(&scene, &cfg).unwrap();
        let b = simulate_capture(&roll(&scene, dx, dy), &cfg).unwrap();
        for (sa, sb) in a.iter().zip(&b) {
            let shifted = roll(&sa.image, dx, dy);
            let err = shifted
                .data()
                .iter()
                .zip(sb.image.data())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-12, "{} shift ({dx},{dy}): {err}", sa.stage);
        }
    }
}

/// RMS difference of log NPS, so every frequency band counts equally.
fn log_rms(a: &[f64], b: &[f64]) -> f64 {
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x.ln() - y.ln()).powi(2)).sum();
    (sum / a.len() as f64).sqrt()
}

#[test]
fn non_linear_noise_depends_on_content() {
    let kinds = [
        SceneKind::Leaves,
        SceneKind::Texture,
        SceneKind::Blobs,
        SceneKind::Shapes,
    ];
    let scenes: Vec<PlanarImage> = kinds
        .iter()
        .enumerate()
        .map(|(i, &k)| generate_scene(k, 128, 128, 30 + i as u64).unwrap())
        .collect();
    let nps = |scene: &PlanarImage, kind: PipelineKind, seed: u64| {
        let cfg = PipelineConfig {
            seed,
            ..PipelineConfig::new(kind, 40.0)
        };
        let reps = generate_replicates(scene, &cfg, 10, TargetKind::Pictorial, "s").unwrap();
        measure_nps(
            reps.get(Stage::PostSharpen),
            NpsVariant::PictorialSpd,
            &NpsConfig::default(),
        )
        .unwrap()
        .values
    };
    let mean_pairwise = |kind: PipelineKind| {
        let curves: Vec<Vec<f64>> = scenes.iter().map(|s| nps(s, kind, 1)).collect();
        let mut sum = 0.0;
        let mut n = 0;
        for i in 0..curves.len() {
            for j in i + 1..curves.len() {
                sum += log_rms(&curves[i], &curves[j]);
                n += 1;
            }
        }
        sum / n as f64
    };
    let floor = log_rms(
        &nps(&scenes[0], PipelineKind::NonLinear, 1),
        &nps(&scenes[0], PipelineKind::NonLinear, 2),
    );
    let non_linear = mean_pairwise(PipelineKind::NonLinear);
    let linear = mean_pairwise(PipelineKind::Linear);
    assert!(non_linear > 3.0 * floor, "non-linear {non_linear}, noise floor {floor}");
    assert!(non_linear > 2.0 * linear, "non-linear {non_linear}, linear {linear}");
}
