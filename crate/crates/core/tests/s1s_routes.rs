use nc_hydrogen::corrections::{s1s_abel, s1s_zero, AbelSeriesConfig, Method};
use nc_hydrogen::regularized::{abel_extrapolate, difference_closed_form, EtaSchedule};
use nc_hydrogen::Error;

#[test]
fn routes_agree() {
    let integral = s1s_zero(Method::Integral).unwrap();
    let abel = s1s_zero(Method::AbelSeries).unwrap();
    assert!((integral - abel).abs() <= 2e-3, "{integral} vs {abel}");
}

#[test]
fn closed_form_difference_extrapolates_to_the_integral() {
    let r = abel_extrapolate(&EtaSchedule::default(), difference_closed_form).unwrap();
    let integral = s1s_zero(Method::Integral).unwrap();
    assert!((r.extrapolated - integral).abs() < 1e-3);
    // the same points taken at η = 1 directly
    assert!((difference_closed_form(1.0).unwrap() - integral).abs() < 1e-9);
}

#[test]
fn far_schedule_is_rejected_as_non_monotone() {
    let far = s1s_abel(&AbelSeriesConfig {
        schedule: EtaSchedule::from_values(vec![0.8, 0.85, 0.9, 0.95]).unwrap(),
        ..AbelSeriesConfig::default()
    });
    assert!(matches!(far, Err(Error::NonMonotoneConvergence(_))));
}
