use std::ffi::{CStr, CString};
use std::ptr;

use gomsfem_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(gomsfem_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn preset_run_roundtrip() {
    unsafe {
        let name = CString::new("ex3-lo").unwrap();
        let mut p = ptr::null_mut();
        assert_eq!(
            gomsfem_problem_new_preset(4, 16, name.as_ptr(), 0, 0, &mut p),
            GomsfemStatus::Ok
        );
        assert_eq!(gomsfem_problem_num_cells(p), 64 * 64);
        assert_eq!(
            gomsfem_problem_set_goal(p, 0.375, 0.75, 0.4375, 0.8125, -1.0),
            GomsfemStatus::Ok
        );

        let mut cfg = std::mem::zeroed();
        assert_eq!(gomsfem_config_default(&mut cfg), GomsfemStatus::Ok);
        cfg.tol = 1e-30;
        cfg.max_iter = 3;
        let mut run = ptr::null_mut();
        assert_eq!(gomsfem_run(p, &cfg, &mut run), GomsfemStatus::Ok, "{}", last_error());

        let mut term = GomsfemTermination::Converged;
        assert_eq!(gomsfem_run_termination(run, &mut term), GomsfemStatus::Ok);
        assert_eq!(term, GomsfemTermination::IterationCap);
        assert_eq!(gomsfem_run_history_len(run), 4);
        let mut rows = [GomsfemHistoryRow::default(); 4];
        for (k, row) in rows.iter_mut().enumerate() {
            assert_eq!(gomsfem_run_history_row(run, k, row), GomsfemStatus::Ok);
            assert_eq!(row.m, k);
            assert!(row.goal_error.is_finite());
        }
        assert!(rows.windows(2).all(|w| w[1].dof > w[0].dof));
        let mut row = GomsfemHistoryRow::default();
        assert_eq!(
            gomsfem_run_history_row(run, 4, &mut row),
            GomsfemStatus::InvalidArgument
        );

        let mut needed = 0;
        let mut small = [0.0; 4];
        assert_eq!(
            gomsfem_run_solution(run, 0, small.as_mut_ptr(), small.len(), &mut needed),
            GomsfemStatus::BufferTooSmall
        );
        assert_eq!(needed, 63 * 63);
        let mut u = vec![0.0; needed];
        assert_eq!(
            gomsfem_run_solution(run, 1, u.as_mut_ptr(), u.len(), ptr::null_mut()),
            GomsfemStatus::Ok
        );
        assert!(u.iter().any(|&v| v != 0.0));

        gomsfem_run_free(run);
        gomsfem_problem_free(p);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut p = ptr::null_mut();
        let kappa = [1.0, 2.0, 0.0, 1.0];
        assert_eq!(
            gomsfem_problem_new(2, 1, kappa.as_ptr(), 4, &mut p),
            GomsfemStatus::InvalidField
        );
        assert!(last_error().contains("(0, 1)"), "{}", last_error());
        assert!(p.is_null());
        assert_eq!(
            gomsfem_problem_new(2, 1, kappa.as_ptr(), 3, &mut p),
            GomsfemStatus::InvalidField
        );
        assert_eq!(
            gomsfem_problem_new(1, 1, kappa.as_ptr(), 1, &mut p),
            GomsfemStatus::InvalidArgument
        );
        assert_eq!(
            gomsfem_problem_new(2, 1, ptr::null(), 4, &mut p),
            GomsfemStatus::NullPointer
        );

        let name = CString::new("ex9").unwrap();
        assert_eq!(
            gomsfem_problem_new_preset(4, 16, name.as_ptr(), 0, 0, &mut p),
            GomsfemStatus::InvalidArgument
        );

        let ones = [1.0; 64];
        assert_eq!(gomsfem_problem_new(4, 2, ones.as_ptr(), 64, &mut p), GomsfemStatus::Ok);
        let mut cfg = std::mem::zeroed();
        gomsfem_config_default(&mut cfg);
        cfg.strategy = 7;
        let mut run = ptr::null_mut();
        assert_eq!(gomsfem_run(p, &cfg, &mut run), GomsfemStatus::InvalidArgument);
        cfg.strategy = GomsfemStrategy::Product as i32;
        cfg.param_a = 1.5;
        assert_eq!(gomsfem_run(p, &cfg, &mut run), GomsfemStatus::InvalidArgument);
        assert!(run.is_null());
        assert_eq!(
            gomsfem_problem_set_goal(p, 0.5, 0.5, 0.5, 0.9, 1.0),
            GomsfemStatus::InvalidArgument
        );
        assert_eq!(
            gomsfem_problem_set_source(p, ones.as_ptr(), 10),
            GomsfemStatus::InvalidArgument
        );
        gomsfem_problem_free(p);
        gomsfem_problem_free(ptr::null_mut());
        assert_eq!(gomsfem_run_history_len(ptr::null()), 0);
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(gomsfem_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
