//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion does.

mod common;

use std::collections::HashSet;
use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sealbus::bench::{self, BenchConfig};
use sealbus::channel::{ChannelError, ChannelSession, Frame, Role, SessionConfig};
use sealbus::cipher::{kat, CipherError, CipherKind, CipherState, Radix, TagLen};
use sealbus::soc::{
    build_soc, monobit, Link, SimConfig, Simulator, SocError, TapKind, WorldPartition, TARGET_BASE,
    TARGET_SIZE,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn random_bytes(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    let mut v = vec![0u8; n];
    rng.fill_bytes(&mut v);
    v
}

fn oracle_keystream(cipher: CipherKind, key: &[u8], iv: &[u8], nbits: usize) -> Vec<u8> {
    match cipher {
        CipherKind::Trivium => common::pack_lsb(&common::trivium(key, iv, nbits)),
        CipherKind::Grain128a => common::pack_msb(&common::grain_preoutput(key, iv, nbits)),
        CipherKind::Grain128aAuth => common::pack_msb(&common::grain_auth_keystream(key, iv, nbits)),
    }
}

fn keystream(cipher: CipherKind, key: &[u8], iv: &[u8], radix: Radix, nbits: usize) -> Vec<u8> {
    let tag = cipher.is_authenticated().then_some(TagLen::MAX);
    let mut s = CipherState::load(cipher, key, iv, tag).unwrap();
    s.init(radix);
    s.keystream(radix, nbits).unwrap().to_bytes()
}

fn sim(cipher: CipherKind, radix: Radix, encryption: bool) -> Simulator {
    let config = SimConfig {
        seed: 2024,
        session: SessionConfig::new(1, cipher, radix),
        encryption,
        trustzone_checks: true,
        record_trace: false,
    };
    build_soc(WorldPartition::default(), config).unwrap()
}

fn known_answers() -> Outcome {
    let start = Instant::now();
    let vectors = kat::parse(include_str!("../vectors/estream.txt")).map_err(|e| e.to_string())?;
    let mut failed = Vec::new();
    for v in &vectors {
        if !v.evaluate().map_err(|e| e.to_string())?.passed {
            failed.push(v.line);
        }
    }
    let elapsed = start.elapsed();
    ensure!(vectors.len() == 28, "expected 28 bundled vectors, found {}", vectors.len());
    ensure!(
        vectors.iter().any(|v| v.cipher == CipherKind::Trivium) && vectors.iter().any(|v| v.cipher == CipherKind::Grain128a),
        "vectors must cover both ciphers"
    );
    ensure!(failed.is_empty(), "vectors on lines {failed:?} mismatch");
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("{} vectors bit-exact in {elapsed:?}", vectors.len()))
}

fn init_counts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for cipher in CipherKind::ALL {
        let clocks = match cipher {
            CipherKind::Trivium => 1152,
            _ => 256,
        };
        for radix in Radix::ALL {
            let expected = clocks / u64::from(radix.bits());
            ensure!(cipher.init_steps(radix) == expected, "{cipher} r={radix}: table says {}", cipher.init_steps(radix));
            for _ in 0..16 {
                let p = cipher.params();
                let key = random_bytes(&mut rng, p.key_bytes());
                let iv = random_bytes(&mut rng, p.iv_bytes());
                let tag = cipher.is_authenticated().then_some(TagLen::MAX);
                let mut s = CipherState::load(cipher, &key, &iv, tag).unwrap();
                ensure!(
                    matches!(s.step(radix), Err(CipherError::NotInitialized { .. })),
                    "{cipher} emitted keystream before initialization"
                );
                let report = s.init(radix);
                ensure!(report.steps == expected, "{cipher} r={radix}: {} init steps", report.steps);
                ensure!(s.clocks_done() >= clocks, "{cipher}: {} clocks", s.clocks_done());
            }
        }
    }
    let t = CipherKind::Trivium.init_steps(Radix::R32);
    let g = CipherKind::Grain128a.init_steps(Radix::R32);
    ensure!((g, t) == (8, 36), "r=32 gives {g} and {t}");
    Ok(format!("1152/r and 256/r at r=1,8,16,32; r=32 gives {g} (Grain-128a) and {t} (Trivium)"))
}

fn radix_invariance() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let nbits = 1024;
    let mut pairs = 0;
    for cipher in CipherKind::ALL {
        for _ in 0..100 {
            let p = cipher.params();
            let key = random_bytes(&mut rng, p.key_bytes());
            let iv = random_bytes(&mut rng, p.iv_bytes());
            let serial = keystream(cipher, &key, &iv, Radix::R1, nbits);
            ensure!(
                serial == oracle_keystream(cipher, &key, &iv, nbits),
                "{cipher}: radix-1 disagrees with the bit-serial oracle"
            );
            for radix in [Radix::R8, Radix::R16, Radix::R32] {
                ensure!(
                    keystream(cipher, &key, &iv, radix, nbits) == serial,
                    "{cipher} r={radix} differs from r=1 for key {}",
                    hex::encode(&key)
                );
            }
            pairs += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(format!("{pairs} (K, IV) pairs x {nbits} bits, 0 mismatches in {elapsed:?}"))
}

fn megabyte_roundtrip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let payload = random_bytes(&mut rng, 1 << 20);

    let mut direct = sim(CipherKind::Trivium, Radix::R32, false);
    let report = direct.ta_send(&payload).map_err(|e| e.to_string())?;
    ensure!(report.delivered(), "unencrypted delivery failed: {:?}", report.status);
    let reference = direct.peek_target(TARGET_BASE, payload.len());
    ensure!(reference == payload, "unencrypted delivery corrupted the payload");

    let mut cells = 0;
    for cipher in CipherKind::ALL {
        for radix in Radix::ALL {
            let (mut ta, mut ip) =
                ChannelSession::pair(SessionConfig::new(5, cipher, radix), &random_bytes(&mut rng, cipher.params().key_bytes()))
                    .unwrap();
            let frame = ta.seal(&payload).map_err(|e| e.to_string())?;
            let opened = ip
                .open_frame(&Frame::decode(&frame.encode()).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            ensure!(opened == payload, "{cipher} r={radix}: seal/open lost data");

            let mut s = sim(cipher, radix, true);
            let report = s.ta_send(&payload).map_err(|e| e.to_string())?;
            ensure!(report.delivered(), "{cipher} r={radix}: {:?}", report.status);
            ensure!(
                s.peek_target(TARGET_BASE, payload.len()) == reference,
                "{cipher} r={radix}: simulator delivery differs from direct delivery"
            );
            cells += 1;
        }
    }
    Ok(format!("{cells} (cipher, radix) cells lossless, simulator output equals direct delivery"))
}

fn throughput_ordering() -> Outcome {
    let config = BenchConfig::default();
    let results = bench::run_bench(&config).map_err(|e| e.to_string())?;
    let report = bench::compare_report(&results).map_err(|e| e.to_string())?;
    let ratios: Vec<String> = report
        .rows
        .iter()
        .map(|r| format!("r={}:{:.2}", r.radix, r.ratio))
        .collect();
    ensure!(
        report.trivium_at_least_grain(),
        "Grain-128a faster somewhere; Trivium/Grain ratios {}",
        ratios.join(" ")
    );
    Ok(format!(
        "Trivium/Grain-128a throughput {} (1 MB, median of {}); radix monotonic: {}",
        ratios.join(" "),
        config.repetitions,
        report.monotonic()
    ))
}

fn threat_model() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let message = random_bytes(&mut rng, 64 * 1024);

    let mut baseline = sim(CipherKind::Trivium, Radix::R32, false);
    let tap = baseline.attach_tap(TapKind::EavesdropFifo, Link::TaIp);
    baseline.ta_send(&message).map_err(|e| e.to_string())?;
    let leak = baseline.leakage_report(tap, &message).map_err(|e| e.to_string())?;
    ensure!(leak.exact_match, "baseline tap failed to reconstruct the plaintext");

    // tolerance from the oracle: a 64 KB keystream sits far below it
    let tolerance = 0.01;
    let oracle = oracle_keystream(CipherKind::Trivium, &[0x5a; 10], &[0xa5; 10], 64 * 1024 * 8);
    let oracle_stat = monobit(&oracle);
    ensure!(oracle_stat < tolerance / 4.0, "oracle keystream monobit {oracle_stat} too close to {tolerance}");

    let zeros = vec![0u8; 64 * 1024];
    let mut worst = 0f64;
    for cipher in CipherKind::ALL {
        let mut s = sim(cipher, Radix::R32, true);
        let tap = s.attach_tap(TapKind::EavesdropFifo, Link::TaIp);
        s.ta_send(&message).map_err(|e| e.to_string())?;
        let leak = s.leakage_report(tap, &message).map_err(|e| e.to_string())?;
        ensure!(!leak.exact_match, "{cipher}: plaintext visible on the bus");
        ensure!(!leak.contains_substring_of(&message, 8), "{cipher}: an 8-byte plaintext substring leaked");

        let mut s = sim(cipher, Radix::R32, true);
        let tap = s.attach_tap(TapKind::EavesdropFifo, Link::TaIp);
        s.ta_send(&zeros).map_err(|e| e.to_string())?;
        let stat = s.leakage_report(tap, &zeros).map_err(|e| e.to_string())?.monobit_statistic;
        ensure!(stat < tolerance, "{cipher}: monobit {stat} >= {tolerance}");
        worst = worst.max(stat);
    }

    let mut s = sim(CipherKind::Grain128aAuth, Radix::R32, true);
    let secret = random_bytes(&mut rng, 256);
    s.ta_send(&secret).map_err(|e| e.to_string())?;
    s.attach_tap(TapKind::NsBitFlip, Link::NsPort);
    let trials = 1000;
    let mut rejected = 0;
    for _ in 0..trials {
        let address = TARGET_BASE + (rng.gen_range(0..TARGET_SIZE) & !3);
        let outcome = if rng.gen_bool(0.5) {
            s.ns_read(address).map(|_| ())
        } else {
            s.ns_write(address, rng.gen())
        };
        if matches!(outcome, Err(SocError::AccessDenied { .. })) {
            rejected += 1;
        }
    }
    ensure!(rejected == trials, "{rejected}/{trials} NS-flip attempts rejected");
    ensure!(s.violations().len() == trials, "{} violations logged", s.violations().len());
    ensure!(s.peek_target(TARGET_BASE, secret.len()) == secret, "target memory altered");
    Ok(format!(
        "baseline leaks fully; encrypted: no 8-byte leak, worst monobit {worst:.5} < {tolerance} (oracle {oracle_stat:.5}); NS-flip rejected {rejected}/{trials}"
    ))
}

fn mac_soundness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut corruptions = 0u64;
    for radix in Radix::ALL {
        for _ in 0..16 {
            let config = SessionConfig::new(2, CipherKind::Grain128aAuth, radix);
            let key = random_bytes(&mut rng, 16);
            let mut ta = ChannelSession::open(config, &key, Role::Ta).unwrap();
            let ip = ChannelSession::open(config, &key, Role::CryptoIp).unwrap();
            let msg = random_bytes(&mut rng, 64);
            let frame = ta.seal(&msg).map_err(|e| e.to_string())?;
            let body: Vec<u8> = frame.payload.iter().chain(frame.tag.as_ref().unwrap()).copied().collect();
            for bit in 0..body.len() * 8 {
                let mut bad = body.clone();
                bad[bit / 8] ^= 0x80 >> (bit % 8);
                let mut forged = frame.clone();
                forged.payload = bad[..64].to_vec();
                forged.tag = Some(bad[64..].to_vec());
                let mut rx = ip.clone();
                ensure!(
                    rx.open_frame(&forged) == Err(ChannelError::AuthenticationFailed),
                    "r={radix} bit {bit}: corruption not detected"
                );
                ensure!(rx.recv_counter() == 0, "receiver state advanced on a forged frame");
                corruptions += 1;
            }
        }
    }

    // the same sweep in flight: nothing reaches the target IP
    let msg = random_bytes(&mut rng, 64);
    // payload and tag bits; the payload starts at byte 15 of the frame
    for bit in 0..(64 + 4) * 8 {
        let mut s = sim(CipherKind::Grain128aAuth, Radix::R32, true);
        let byte = 15 + bit / 8;
        let word = byte / 4;
        let mask = (0x80u32 >> (bit % 8)) << (8 * (3 - byte % 4));
        // two command-register beats precede the frame
        s.inject_fault(Link::TaIp, 2 + word, mask);
        let report = s.ta_send(&msg).map_err(|e| e.to_string())?;
        ensure!(
            report.status == sealbus::soc::DeliveryStatus::Rejected(SocError::Channel(ChannelError::AuthenticationFailed)),
            "in-flight bit {bit}: {:?}",
            report.status
        );
        ensure!(s.peek_target(TARGET_BASE, 64) == [0; 64], "plaintext released for in-flight bit {bit}");
        corruptions += 1;
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("{corruptions} single-bit corruptions, all rejected, no plaintext released, {elapsed:?}"))
}

fn replay_hygiene() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let config = SessionConfig::new(4, CipherKind::Grain128aAuth, Radix::R32);
    let key = random_bytes(&mut rng, 16);
    let (mut ta, mut ip) = ChannelSession::pair(config, &key).unwrap();

    let total = 1usize << 16;
    let mut used: HashSet<(Vec<u8>, Vec<u8>)> = HashSet::with_capacity(total);
    let mut reuses = 0;
    let mut delivered: Vec<Frame> = Vec::new();
    let mut held: Vec<(Frame, bool)> = Vec::new(); // (frame, sent by TA)
    let (mut replays, mut replays_rejected) = (0u64, 0u64);
    let (mut fresh, mut fresh_accepted) = (0u64, 0u64);

    for i in 0..total {
        if i > 0 && i % 20_000 == 0 {
            let next = random_bytes(&mut rng, 16);
            ta.rekey(&next).map_err(|e| e.to_string())?;
            ip.rekey(&next).map_err(|e| e.to_string())?;
            held.clear();
        }
        let from_ta = rng.gen_bool(0.5);
        let (tx, rx) = if from_ta { (&mut ta, &mut ip) } else { (&mut ip, &mut ta) };
        let len = rng.gen_range(0..48);
        let msg = random_bytes(&mut rng, len);
        let frame = tx.seal(&msg).map_err(|e| e.to_string())?;
        let iv = tx.iv_for(frame.msg_counter, frame.direction()).map_err(|e| e.to_string())?;
        if !used.insert((tx.key().as_bytes().to_vec(), iv)) {
            reuses += 1;
        }

        match rng.gen_range(0..10) {
            // hold back for later out-of-order delivery
            0 => held.push((frame, from_ta)),
            _ => {
                fresh += 1;
                if rx.open_frame(&frame).map_err(|e| e.to_string())? == msg {
                    fresh_accepted += 1;
                }
                delivered.push(frame);
            }
        }

        // replay something already accepted, possibly from an earlier key
        if rng.gen_bool(0.3) && !delivered.is_empty() {
            let old = delivered[rng.gen_range(0..delivered.len())].clone();
            let rx = if old.direction() == sealbus::channel::Direction::TaToIp { &mut ip } else { &mut ta };
            replays += 1;
            if rx.open_frame(&old).is_err() {
                replays_rejected += 1;
            }
        }

        // late delivery of a held frame: newer traffic has overtaken it
        if rng.gen_bool(0.05) && !held.is_empty() {
            let (late, by_ta) = held.swap_remove(rng.gen_range(0..held.len()));
            let rx = if by_ta { &mut ip } else { &mut ta };
            let expected_fresh = late.msg_counter >= rx.recv_counter();
            let result = rx.open_frame(&late);
            if expected_fresh {
                ensure!(result.is_ok(), "in-order late frame rejected: {result:?}");
                delivered.push(late);
            } else {
                replays += 1;
                ensure!(
                    matches!(result, Err(ChannelError::Replay { .. })),
                    "overtaken frame {} not rejected as replay: {result:?}",
                    late.msg_counter
                );
                replays_rejected += 1;
            }
        }
    }
    ensure!(reuses == 0, "{reuses} (key, IV) reuses");
    ensure!(replays_rejected == replays, "{replays_rejected}/{replays} replays rejected");
    ensure!(fresh_accepted == fresh, "{fresh_accepted}/{fresh} fresh frames accepted");
    Ok(format!(
        "{total} frames sealed, 0 (key, IV) reuses, {replays_rejected}/{replays} replays rejected"
    ))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("1 known-answer conformance", known_answers),
        ("2 initialization step counts", init_counts),
        ("3 radix invariance", radix_invariance),
        ("4 1 MB roundtrip", megabyte_roundtrip),
        ("5 throughput ordering", throughput_ordering),
        ("6 threat model", threat_model),
        ("7 MAC soundness", mac_soundness),
        ("8 replay/IV hygiene", replay_hygiene),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (name, check) in criteria {
        let line = match check() {
            Ok(detail) => format!("PASS  {name}: {detail}"),
            Err(why) => {
                failed.push(name);
                format!("FAIL  {name}: {why}")
            }
        };
        // bypass the test harness capture so the summary is always shown
        writeln!(err, "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
