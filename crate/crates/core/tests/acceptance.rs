//! Acceptance suite: one PASS/FAIL line per criterion, written straight to
//! stderr so the lines appear even when libtest captures output.
//!
//! Everything runs inside one test so the CO-searched codebooks (the slow
//! part) are built once and shared by the Monte-Carlo criteria.

use std::io::Write;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;
use stsk_core::channel::{sample_channel, transmit};
use stsk_core::codebook::{expand, k_vector, ldc_code, qam_decompose, verify_decomposition, StskCodebook};
use stsk_core::constellation::{make_psk, make_square_qam, make_star_qam};
use stsk_core::detect::{mf_detect, ml_detect, single_stream_ml};
use stsk_core::dispersion::{
    cda_code, cda_dm_set, companion_powers, fec_code, fec_dm_set, fixture_co_bpsk8, CdaParams, CdaSubset,
    DispersionMatrixSet, FecParams,
};
use stsk_core::harness::campaign::{run_capacity_with_codebook, run_ser_with_codebook};
use stsk_core::harness::{report, with_threads, SerPoint, SimConfig};
use stsk_core::metrics::{coding_gain, diversity_order};
use stsk_core::rng::stream;
use stsk_core::CMat64;

const PI: f64 = std::f64::consts::PI;

struct Outcome {
    lines: Vec<(usize, bool)>,
}

impl Outcome {
    fn record(&mut self, id: usize, name: &str, pass: bool, detail: String) {
        let verdict = if pass { "PASS" } else { "FAIL" };
        let line = format!("\n[{verdict}] AC{id:02} {name}: {detail}\n");
        let _ = std::io::stderr().lock().write_all(line.as_bytes());
        self.lines.push((id, pass));
    }
}

fn cfg(text: &str) -> SimConfig {
    SimConfig::parse(text).expect("acceptance config")
}

fn book_for(text: &str) -> StskCodebook<f64> {
    stsk_core::harness::build_codebook(&cfg(text)).expect("acceptance codebook")
}

fn ser(book: &StskCodebook<f64>, c: &SimConfig) -> SerPoint {
    run_ser_with_codebook(book, c).expect("SER run").remove(0)
}

fn show(p: &SerPoint) -> String {
    format!("{:.3e} [{:.3e}, {:.3e}] ({} errs / {} trials)", p.ser, p.ci95_low, p.ci95_high, p.errors, p.trials)
}

/// `a` is below `b` with disjoint 95% intervals.
fn clearly_below(a: &SerPoint, b: &SerPoint) -> bool {
    a.ci95_high < b.ci95_low
}

/// Independent oracle: closed-form 2×2 determinant of `ΔΔᴴ`, minimised over
/// all codeword pairs.
fn brute_gain(words: &[CMat64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            let d = &words[i] - &words[j];
            let g = d.matmul(&d.adjoint());
            let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
            best = best.min(det.norm());
        }
    }
    best
}

fn words(book: &StskCodebook<f64>) -> Vec<CMat64> {
    (0..book.len()).map(|i| book.codeword(i).into_owned()).collect()
}

fn power_ok(set: &DispersionMatrixSet<f64>, tol: f64) -> bool {
    set.matrices()
        .iter()
        .all(|a| (a.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>() - set.t() as f64).abs() <= tol)
}

fn example1() -> StskCodebook<f64> {
    let qpsk = make_psk(4).unwrap();
    expand(&qpsk, &fec_dm_set(&qpsk, &FecParams::example1()).unwrap()).unwrap()
}

fn example2() -> StskCodebook<f64> {
    let bpsk = make_psk(2).unwrap();
    expand(&bpsk, &cda_dm_set(&bpsk, &CdaParams::example2()).unwrap()).unwrap()
}

/// QPSK signalling with DMs from the `x² − exp(j2π/L')` field-extension code.
fn fec_table_book(code_order: usize) -> StskCodebook<f64> {
    let qpsk = make_psk(4).unwrap();
    let code = make_psk(code_order).unwrap();
    expand(&qpsk, &fec_dm_set(&code, &FecParams::root_of_unity_poly(code_order, 2)).unwrap()).unwrap()
}

/// QPSK signalling with DMs from an `L' = 4` CDA code.
fn cda_table_book(t: f64, delta: f64, subset: CdaSubset) -> StskCodebook<f64> {
    let qpsk = make_psk(4).unwrap();
    let mut p = CdaParams::from_angles(4, 2, t * PI, delta * PI, 0.0);
    p.subset = subset;
    expand(&qpsk, &cda_dm_set(&qpsk, &p).unwrap()).unwrap()
}

fn ac1(out: &mut Outcome) {
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, build) in [("FEC ex1 QPSK Q=4", example1 as fn() -> _), ("CDA ex2 BPSK Q=8", example2)] {
        let t0 = Instant::now();
        let book = build();
        let g = coding_gain(&book).unwrap();
        let dt = t0.elapsed();
        let oracle = brute_gain(&words(&book));
        pass &= (g - 1.0).abs() <= 1e-9 && (oracle - 1.0).abs() <= 1e-9 && dt < Duration::from_secs(1);
        detail.push(format!("{name} G={g:.12} oracle={oracle:.12} in {dt:.2?}"));
    }
    out.record(1, "coding gain, exact fixtures", pass, detail.join("; "));
}

fn ac2(out: &mut Outcome) {
    let t0 = Instant::now();
    let bpsk = make_psk(2).unwrap();
    let book = expand(&bpsk, &fixture_co_bpsk8()).unwrap();
    let g = coding_gain(&book).unwrap();
    let dt = t0.elapsed();
    let oracle = brute_gain(&words(&book));
    let pass = (g - 0.0455).abs() <= 5e-3 && (g - oracle).abs() <= 1e-12 && dt < Duration::from_secs(1);
    out.record(2, "coding gain, printed fixture", pass, format!("G={g:.6} oracle={oracle:.6} target 0.0455±5e-3 in {dt:.2?}"));
}

fn ac3(out: &mut Outcome) {
    let g16 = coding_gain(&fec_table_book(16)).unwrap();
    let g64 = coding_gain(&fec_table_book(64)).unwrap();
    let rel = |g: f64, want: f64| (g / want - 1.0).abs();
    let pass = rel(g16, 0.0058) <= 0.1 && rel(g64, 0.000_023_18) <= 0.1;
    // reported only: the alphabet behind each CDA column is not stated
    let c16 = coding_gain(&cda_table_book(3.0 / 8.0, 3.0 / 4.0, CdaSubset::Truncated { m: 2, r: 1 })).unwrap();
    let c64 = coding_gain(&cda_table_book(0.25, 27.0 / 16.0, CdaSubset::Full)).unwrap();
    out.record(
        3,
        "soft gain targets",
        pass,
        format!(
            "FEC Q=16 G={g16:.6e} (0.0058, {:.1}%), Q=64 G={g64:.6e} (2.318e-5, {:.1}%); CDA reported: Q=16 {c16:.5}, Q=64 {c64:.5}",
            100.0 * rel(g16, 0.0058),
            100.0 * rel(g64, 0.000_023_18)
        ),
    );
}

fn ac4(out: &mut Outcome) {
    let t0 = Instant::now();
    let qpsk = make_psk::<f64>(4).unwrap();
    let bpsk = make_psk::<f64>(2).unwrap();
    let ex1 = FecParams::example1();
    let r1 = verify_decomposition(
        "ex1",
        qpsk.points(),
        fec_dm_set(&qpsk, &ex1).unwrap().matrices(),
        &fec_code(&qpsk, &ex1).unwrap(),
    );
    let ex2 = CdaParams::example2();
    let r2 = verify_decomposition(
        "ex2",
        bpsk.points(),
        cda_dm_set(&bpsk, &ex2).unwrap().matrices(),
        &cda_code(&bpsk, &ex2).unwrap(),
    );
    let basis = companion_powers(&FecParams::<f64>::root_of_unity_poly(4, 2).coeffs).unwrap();
    let sq = make_square_qam::<f64>(16).unwrap();
    let (sq_sym, sq_e) = qam_decompose(&sq, &basis, 1).unwrap();
    let r3 = verify_decomposition("sqam16", &sq_sym, &sq_e, &ldc_code(&sq, &basis));
    let st = make_star_qam::<f64>(16, 2.0).unwrap();
    let (st_sym, st_e) = qam_decompose(&st, &basis, 1).unwrap();
    let r4 = verify_decomposition("star16", &st_sym, &st_e, &ldc_code(&st, &basis));
    let dt = t0.elapsed();
    let pass = r1.is_bijection()
        && r1.domain_size == 16
        && r2.is_bijection()
        && r2.domain_size == 16
        && r3.is_bijection()
        && sq_e.len() == 64
        && r4.is_bijection()
        && st_e.len() == 32
        && dt < Duration::from_secs(10);
    out.record(
        4,
        "decomposition bijections",
        pass,
        format!(
            "ex1 {}/{}, ex2 {}/{}, sqam16 |E|={} {}/{}, star16 |E|={} {}/{} in {dt:.2?}",
            r1.image_size,
            r1.target_size,
            r2.image_size,
            r2.target_size,
            sq_e.len(),
            r3.image_size,
            r3.target_size,
            st_e.len(),
            r4.image_size,
            r4.target_size
        ),
    );
}

fn ac5(out: &mut Outcome, co_books: &[&StskCodebook<f64>]) {
    let mut books = vec![example1(), example2(), fec_table_book(16), fec_table_book(64)];
    books.push(cda_table_book(3.0 / 8.0, 3.0 / 4.0, CdaSubset::Truncated { m: 2, r: 1 }));
    books.push(cda_table_book(0.25, 27.0 / 16.0, CdaSubset::Full));
    books.extend(co_books.iter().map(|b| (*b).clone()));
    let power = books.iter().all(|b| power_ok(b.dms(), 1e-9));
    let sizes = books.iter().all(|b| b.len() == b.q() * b.l());
    let d1 = diversity_order(&books[0]).unwrap();
    let d2 = diversity_order(&books[1]).unwrap();
    let pass = power && sizes && d1 == 2 && d2 == 2;
    out.record(
        5,
        "structural invariants",
        pass,
        format!("{} sets: power {power}, |C| = Q·L distinct {sizes}, diversity ex1 {d1} ex2 {d2}", books.len()),
    );
}

fn ac6(out: &mut Outcome) {
    let t0 = Instant::now();
    let books = [example1(), example2()];
    let mut r = stream(0xAC06, 0);
    let (mut trials, mut ss_mismatch, mut mf_mismatch) = (0usize, 0usize, 0usize);
    for snr in [0.0, 10.0, 20.0] {
        let rho = 10f64.powf(snr / 10.0);
        for k in 0..10_000 {
            let book = &books[k % 2];
            let block = sample_channel::<f64, _>(2, 2, rho, &mut r);
            let i = r.random_range(0..book.len());
            let obs = transmit(&block, &book.codeword(i), &mut r).unwrap();
            let pts = book.constellation().points();
            let ml = ml_detect(&obs.y, &block.h, book, rho).unwrap();
            let ss = single_stream_ml(&obs.y_bar, &obs.h_bar, book.chi(), pts, rho).unwrap();
            let mf = mf_detect(&obs.y_bar, &obs.h_bar, book.chi(), pts, rho, book.q()).unwrap();
            ss_mismatch += usize::from((ss.p, ss.q) != (ml.p, ml.q));
            mf_mismatch += usize::from((mf.p, mf.q) != (ml.p, ml.q));
            trials += 1;
        }
    }
    let dt = t0.elapsed();
    let pass = ss_mismatch == 0 && mf_mismatch == 0 && dt < Duration::from_secs(30);
    out.record(
        6,
        "detector oracle equivalence",
        pass,
        format!("{trials} trials at 0/10/20 dB: ssml mismatches {ss_mismatch}, mf(Q) mismatches {mf_mismatch} in {dt:.2?}"),
    );
}

fn ac7(out: &mut Outcome) {
    let books = [example1(), example2()];
    let mut r = stream(0xAC07, 0);
    let mut worst = 0.0f64;
    for k in 0..2_000 {
        let book = &books[k % 2];
        let rho = 10f64.powf(r.random_range(-5.0..25.0) / 10.0);
        let block = sample_channel::<f64, _>(2, 2, rho, &mut r);
        let i = r.random_range(0..book.len());
        let (p, q) = book.split(i);
        let s = book.constellation().points()[q];
        // direct matrix model, with its noise recovered afterwards
        let obs = transmit(&block, &book.codeword(i), &mut r).unwrap();
        let x = book.dms().matrices()[p].scale(s);
        let noise = &obs.y - &block.h.matmul(&x).scale_real(block.amplitude());
        // vectorized single-input model
        let kv = k_vector(book.q(), p, s).unwrap();
        let h_bar = CMat64::identity(2).kron(&block.h);
        let drive = h_bar.mul_vec(&book.chi().mul_vec(&kv.k));
        let model: Vec<Complex64> = drive
            .iter()
            .zip(noise.vec())
            .map(|(d, n)| d * block.amplitude() + n)
            .collect();
        for (a, b) in obs.y.vec().iter().zip(&model) {
            worst = worst.max((a - b).norm());
        }
    }
    out.record(7, "vectorization identity", worst <= 1e-12, format!("2000 trials, max |Δ| = {worst:.2e}"));
}

struct Schemes {
    fec: StskCodebook<f64>,
    co4: StskCodebook<f64>,
    cda: StskCodebook<f64>,
    co8: StskCodebook<f64>,
}

fn ac8(out: &mut Outcome, s: &Schemes) {
    let base = "snr_db = 20\nmin_errors = 100\n";
    let fec = ser(&s.fec, &cfg(base));
    let co4 = ser(&s.co4, &cfg(base));
    let mut pass = clearly_below(&fec, &co4);
    let mut detail = vec![format!("QPSK ML: FEC {} vs CO {}", show(&fec), show(&co4))];
    for det in ["ml", "mf:4"] {
        let c = cfg(&format!("{base}detector = {det}\n"));
        let cda = ser(&s.cda, &c);
        let co8 = ser(&s.co8, &c);
        pass &= clearly_below(&cda, &co8);
        detail.push(format!("BPSK {det}: CDA {} vs CO {}", show(&cda), show(&co8)));
    }
    out.record(8, "SER curve ordering at 20 dB", pass, detail.join("; "));
}

fn ac9(out: &mut Outcome, s: &Schemes) {
    let c = cfg("snr_db = 12,15,20,25,30\ncapacity_samples = 10000\n");
    let fec = run_capacity_with_codebook(&s.fec, &cfg("snr_db = 30\ncapacity_samples = 10000\n"));
    let cda = run_capacity_with_codebook(&s.cda, &c);
    let co8 = run_capacity_with_codebook(&s.co8, &c);
    let sat = (fec[0].estimate.bpcu - 2.0).abs() <= 0.02 && (cda[4].estimate.bpcu - 2.0).abs() <= 0.02;
    let mut overlap = true;
    let mut detail = vec![format!(
        "30 dB: FEC {:.4}, CDA {:.4}",
        fec[0].estimate.bpcu, cda[4].estimate.bpcu
    )];
    for (a, b) in cda.iter().zip(&co8) {
        let (x, y) = (&a.estimate, &b.estimate);
        overlap &= x.ci_low <= y.ci_high && y.ci_low <= x.ci_high;
        detail.push(format!(
            "{} dB CDA {:.4} [{:.4},{:.4}] CO {:.4} [{:.4},{:.4}]",
            a.snr_db, x.bpcu, x.ci_low, x.ci_high, y.bpcu, y.ci_low, y.ci_high
        ));
    }
    out.record(9, "capacity saturation", sat && overlap, detail.join("; "));
}

fn ac10(out: &mut Outcome, s: &Schemes) {
    let mut pass = true;
    let mut detail = Vec::new();
    for (label, proposed, co) in [("FEC/QPSK", &s.fec, &s.co4), ("CDA/BPSK", &s.cda, &s.co8)] {
        let mut prev: Option<SerPoint> = None;
        // σ = 0.1 sits in the error floor where the gap narrows; errors are
        // cheap there, so it gets a larger sample
        for (sigma, min_errors) in [(0.0, 400), (0.01, 400), (0.1, 4000)] {
            let c = cfg(&format!("snr_db = 20\nmin_errors = {min_errors}\ncsir_sigma = {sigma}\n"));
            let a = ser(proposed, &c);
            let b = ser(co, &c);
            pass &= clearly_below(&a, &b);
            if let Some(p) = &prev {
                pass &= clearly_below(p, &a);
            }
            detail.push(format!("{label} σ={sigma}: {} vs CO {}", show(&a), show(&b)));
            prev = Some(a);
        }
    }
    out.record(10, "imperfect CSIR", pass, detail.join("; "));
}

fn ac11(out: &mut Outcome, s: &Schemes) {
    let mut pass = true;
    let mut detail = Vec::new();
    for (label, book) in [("CDA/BPSK", &s.cda), ("FEC/QPSK", &s.fec)] {
        let sb = |iters: usize| {
            let c = cfg(&format!("snr_db = 16\nmin_errors = 100\ndetector = semiblind:{iters}\ntraining_blocks = 2\ndata_blocks = 100\n"));
            ser(book, &c)
        };
        let it0 = sb(0);
        let it3 = sb(3);
        // 2 dB-equivalent: no worse than perfect-CSIR ML at 2 dB less SNR
        let ml14 = ser(book, &cfg("snr_db = 14\nmin_errors = 100\n"));
        pass &= it3.ser <= it0.ci95_high && it3.ser <= ml14.ci95_high;
        detail.push(format!("{label} iter0 {} iter3 {} ML@14dB {}", show(&it0), show(&it3), show(&ml14)));
    }
    out.record(11, "semi-blind receiver", pass, detail.join("; "));
}

fn ac12(out: &mut Outcome, s: &Schemes) {
    let runs = |threads: usize| {
        with_threads(Some(threads), || {
            let c = cfg("snr_db = 0,6\nmin_errors = 200\nmax_trials = 50000\n");
            let sb = cfg("snr_db = 10\nmin_errors = 50\nmax_trials = 3000\ndetector = semiblind:2\n");
            let cap = cfg("snr_db = 5\ncapacity_samples = 3000\n");
            let mut text = report::ser_csv(&c, "rev", &run_ser_with_codebook(&s.fec, &c).unwrap());
            text += &report::ser_csv(&sb, "rev", &run_ser_with_codebook(&s.cda, &sb).unwrap());
            text += &report::capacity_csv(&cap, "rev", &run_capacity_with_codebook(&s.co8, &cap));
            text
        })
    };
    let one = runs(1);
    let pass = [2, 4, 7].iter().all(|&t| runs(t) == one);
    out.record(12, "determinism across thread counts", pass, format!("{} CSV bytes identical for 1/2/4/7 threads: {pass}", one.len()));
}

#[test]
fn acceptance_criteria() {
    let mut out = Outcome { lines: Vec::new() };
    ac1(&mut out);
    ac2(&mut out);
    ac3(&mut out);
    ac4(&mut out);

    let co = "dm_family = CO\nco_candidates = 1000\nco_mi_samples = 10000\nco_seed = 1\n";
    let schemes = Schemes {
        fec: book_for(""),
        co4: book_for(&format!("{co}Q = 4\n")),
        cda: book_for("constellation = psk:2\ndm_family = CDA\n"),
        co8: book_for(&format!("{co}Q = 8\nconstellation = psk:2\n")),
    };
    ac5(&mut out, &[&schemes.co4, &schemes.co8]);
    ac6(&mut out);
    ac7(&mut out);
    ac8(&mut out, &schemes);
    ac9(&mut out, &schemes);
    ac10(&mut out, &schemes);
    ac11(&mut out, &schemes);
    ac12(&mut out, &schemes);

    out.lines.sort_unstable();
    let failed: Vec<usize> = out.lines.iter().filter(|(_, p)| !p).map(|(id, _)| *id).collect();
    let summary = format!("acceptance: {}/{} criteria passed\n", out.lines.len() - failed.len(), out.lines.len());
    let _ = std::io::stderr().lock().write_all(summary.as_bytes());
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
