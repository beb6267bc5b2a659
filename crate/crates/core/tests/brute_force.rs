mod common;

use common::{all_compositions, binomial, naive_count, naive_stats, CHECK_PATTERNS};
use randcomp::analysis;
use randcomp::oracle::exact_prob_uniform;
use randcomp::patterns::{count_occurrences, GapMode};
use randcomp::report::StatsReport;
use randcomp::{count_compositions, parse_pattern, Composition};

const N_MAX: usize = 6;
const M_MAX: u64 = 6;

#[test]
fn composition_counts_match_enumeration() {
    for n in 1..=N_MAX {
        for m in 0..=M_MAX {
            let all = all_compositions(n, m);
            assert_eq!(all.len() as u128, binomial(m + n as u64 - 1, n as u64 - 1));
            assert_eq!(count_compositions(n as u64, m).to_string(), all.len().to_string());
        }
    }
}

#[test]
fn statistics_match_naive_scan() {
    for n in 1..=N_MAX {
        for m in 0..=M_MAX {
            for t in all_compositions(n, m) {
                let c = Composition::new(t.clone()).unwrap();
                let r = StatsReport::new(&c);
                let s = naive_stats(&t);
                let got = (
                    r.components, r.gaps, r.cmax, r.cmin, r.gmax, r.gmin, r.tmax, r.tmin, r.largest_square,
                );
                let want = (s.components, s.gaps, s.cmax, s.cmin, s.gmax, s.gmin, s.tmax, s.tmin, s.largest_square);
                assert_eq!(got, want, "{t:?}");
                assert_eq!(r.square_counts, s.square_counts, "{t:?}");
                assert_eq!(r.longest_increasing_run, s.longest_increasing_run, "{t:?}");
                assert_eq!(r.is_carlitz, s.is_carlitz, "{t:?}");
                assert_eq!(r.max_multiplicity, s.max_multiplicity, "{t:?}");
                assert_eq!(analysis::all_distinct(&c), s.all_distinct, "{t:?}");
                assert_eq!(r.size, m);
            }
        }
    }
}

#[test]
fn matcher_counts_match_naive_tuples() {
    for text in CHECK_PATTERNS {
        let spec = parse_pattern(text).unwrap();
        for gap in [GapMode::Loose, GapMode::Strict] {
            for n in 1..=N_MAX {
                for m in 0..=M_MAX.min(5) {
                    for t in all_compositions(n, m) {
                        let c = Composition::new(t.clone()).unwrap();
                        let got = count_occurrences(&c, &spec, gap).unwrap();
                        let want = naive_count(&t, &spec, gap);
                        assert!(!got.truncated);
                        assert_eq!(got.count, want, "{text} {gap:?} on {t:?}");
                        assert_eq!(got.exists, want > 0);
                    }
                }
            }
        }
    }
}

#[test]
fn uniform_oracle_matches_counting() {
    let spec = parse_pattern("u:[1,1]").unwrap();
    for n in 1..=N_MAX {
        for m in 0..=M_MAX {
            let all = all_compositions(n, m);
            let hits = all.iter().filter(|t| naive_count(t, &spec, GapMode::Loose) > 0).count();
            let p = exact_prob_uniform(n as u64, m, |c| naive_count(c.terms(), &spec, GapMode::Loose) > 0).unwrap();
            let r = p.rational.unwrap();
            assert_eq!(r.to_string().replace(' ', ""), reduced(hits as u128, all.len() as u128), "n={n} m={m}");
        }
    }
}

fn reduced(a: u128, b: u128) -> String {
    fn gcd(a: u128, b: u128) -> u128 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    let g = gcd(a, b).max(1);
    let (a, b) = (a / g, b / g);
    if b == 1 { a.to_string() } else { format!("{a}/{b}") }
}
