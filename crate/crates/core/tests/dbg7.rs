use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use gamevqa_core::subjective::{bt500_reject, session_zscores, RatingEntry, RatingMatrix};

#[test]
fn instrument() {
    let mut rng = ChaCha8Rng::seed_from_u64(9001);
    let latent: Vec<f64> = (0..100).map(|_| rng.random_range(5.0..95.0)).collect();
    let noise = Normal::new(0.0, 1.0f64).unwrap();
    let mut entries = Vec::new();
    for s in 0..20 {
        for (v, &q) in latent.iter().enumerate() {
            entries.push(RatingEntry {
                subject_id: format!("s{s:02}"), video_id: format!("v{v:03}"),
                session: (v % 3 + 1) as u8,
                score: (q + noise.sample(&mut rng)).clamp(0.0, 100.0),
            });
        }
    }
    for v in 0..100 {
        entries.push(RatingEntry {
            subject_id: "zz_random".into(), video_id: format!("v{v:03}"),
            session: (v % 3 + 1) as u8,
            score: rng.random_range(0.0..100.0),
        });
    }
    let ratings = RatingMatrix::from_entries(entries).unwrap();
    let z = session_zscores(&ratings).unwrap();
    let report = bt500_reject(&z).unwrap();
    let me = report.subjects.iter().find(|s| s.subject_id == "zz_random").unwrap();
    println!("random: P={} Q={} rejected={}", me.p_count, me.q_count, me.rejected);
    // look at the first few videos in detail
    for vs in report.videos.iter().take(6) {
        let zr = z.entries().iter()
            .find(|e| e.subject_id == "zz_random" && e.video_id == vs.video_id)
            .unwrap().z;
        println!("{}: mean={:.3} std={:.3} kurt={:.2} thr={:.3} | z_random={:.3} dev={:.3} flag={}",
            vs.video_id, vs.mean, vs.std, vs.kurtosis, vs.threshold,
            zr, zr - vs.mean, (zr - vs.mean).abs() > vs.threshold);
    }
}
