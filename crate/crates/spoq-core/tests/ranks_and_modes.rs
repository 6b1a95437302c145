use spoq_core::frt;
use spoq_core::qscalars::{rat, RationalFunction as RF, Scalar};
use spoq_core::quadalg::Mode;
use spoq_core::rmatrix::{QMode, SpoData};
use spoq_core::suite;
use spoq_core::weyl::{self, Source};

fn assert_all(rs: &[spoq_core::report::CheckResult]) {
    for r in rs {
        assert!(r.passed, "{} {}", r.anchor, r.detail);
    }
}

#[test]
fn half_integer_mode_agrees() {
    for (n, m) in [(1, 0), (0, 1), (1, 1), (2, 0)] {
        let d = SpoData::standard_in(n, m, QMode::V).unwrap();
        assert!(suite::check_ybe(&d.build_r()).unwrap().passed, "({n},{m})");
        assert_all(&suite::check_minpoly(&d).unwrap());
        for c in [RF::zero(), RF::one()] {
            assert_all(&weyl::weyl_equivalences(&d, &c));
        }
    }
}

#[test]
fn rank_two_weyl_pbw() {
    for (n, m) in [(2, 0), (0, 2), (1, 1)] {
        let d = SpoData::standard(n, m).unwrap();
        for c in [RF::zero(), RF::one()] {
            let w = weyl::build_weyl(&d, &c, Source::Explicit);
            let r = weyl::pbw_check(&w, 4, &Mode::Specialized(vec![rat(5, 3)])).unwrap();
            assert!(r.passed, "({n},{m}) c={c}: {}", r.detail);
        }
    }
}

#[test]
fn rank_three_equivalences() {
    for (n, m) in [(2, 1), (1, 2)] {
        let d = SpoData::standard(n, m).unwrap();
        assert!(suite::check_ybe(&d.build_r()).unwrap().passed);
        for c in [RF::zero(), RF::one()] {
            assert_all(&weyl::weyl_equivalences(&d, &c));
            assert!(weyl::check_canonical_image(&d, &c).passed);
        }
    }
}

#[test]
fn rank_two_frt_identities_specialized() {
    for (n, m) in [(2, 0), (0, 2)] {
        let d = SpoData::standard(n, m).unwrap();
        let mode = Mode::Specialized(vec![rat(2, 1), rat(7, 2)]);
        assert_all(&frt::check_frt_identities(&d, &mode).unwrap());
        assert!(frt::check_spo_identities(&d, &mode).unwrap().passed);
    }
}
