mod suite;

use suite::identity;

#[test]
fn samplers_at_zero_complexity_leave_images_untouched() {
    identity::samplers_at_zero_complexity_leave_images_untouched();
}

#[test]
fn skipped_parameters_are_identity() {
    identity::skipped_parameters_are_identity();
}

#[test]
fn zero_complexity_samples_identity_parameters() {
    identity::zero_complexity_samples_identity_parameters();
}
