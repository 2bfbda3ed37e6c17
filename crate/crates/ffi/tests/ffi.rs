use std::ffi::{CStr, CString};
use std::ptr;

use vie_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(vie_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn example(id: u32) -> *mut VieProblem {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { vie_problem_from_example(id, &mut p) }, VieStatus::Ok);
    p
}

fn from_json(text: &str) -> Result<*mut VieProblem, VieStatus> {
    let json = CString::new(text).unwrap();
    let mut p = ptr::null_mut();
    match unsafe { vie_problem_from_json(json.as_ptr(), &mut p) } {
        VieStatus::Ok => Ok(p),
        status => Err(status),
    }
}

#[test]
fn solve_example_through_handles() {
    let problem = example(1);
    assert_eq!(unsafe { vie_problem_pieces(problem) }, 2);
    assert_eq!(unsafe { vie_problem_horizon(problem) }, 2.0);

    let mut solution = ptr::null_mut();
    assert_eq!(unsafe { vie_solve(problem, 64, &mut solution) }, VieStatus::Ok);
    assert_eq!(last_error(), "");
    let len = unsafe { vie_solution_segments(solution) } + 1;
    assert_eq!(len, 65);

    let mut t = vec![0.0; len];
    let mut x = vec![0.0; len];
    assert_eq!(
        unsafe { vie_solution_nodes(solution, t.as_mut_ptr(), x.as_mut_ptr(), len) },
        VieStatus::Ok
    );
    assert_eq!(t[0], 0.0);
    assert_eq!(t[64], 2.0);
    assert_eq!(x[0], 0.0);

    let mut value = f64::NAN;
    assert_eq!(
        unsafe { vie_solution_evaluate(solution, 2.0, &mut value) },
        VieStatus::Ok
    );
    assert_eq!(value, x[64]);
    assert_eq!(
        unsafe { vie_solution_evaluate(solution, 3.0, &mut value) },
        VieStatus::InvalidArgument
    );

    let mut eps = 0.0;
    assert_eq!(
        unsafe { vie_solution_max_error(solution, problem, &mut eps) },
        VieStatus::Ok
    );
    assert!((eps - 0.07804538180930365).abs() < 1e-12, "{eps}");

    // wrong buffer length
    assert_eq!(
        unsafe { vie_solution_nodes(solution, ptr::null_mut(), x.as_mut_ptr(), 3) },
        VieStatus::InvalidArgument
    );
    assert!(last_error().contains("expected 65"));

    unsafe {
        vie_solution_free(solution);
        vie_problem_free(problem);
    }
}

#[test]
fn diagnostics_struct() {
    let problem = example(2);
    let mut diag = VieDiagnostics::default();
    assert_eq!(unsafe { vie_problem_diagnostics(problem, &mut diag) }, VieStatus::Ok);
    assert!(diag.d0_defined && (diag.d0 - 16.0 / 9.0).abs() < 1e-12);
    assert!(diag.b_defined && (diag.b[0] - 1.0 / 9.0).abs() < 1e-12);
    assert!(diag.ordering_ok);
    assert!(diag.warning_count >= 1);
    assert_eq!(diag.b_flagged_mask, 0);
    unsafe { vie_problem_free(problem) };

    let ill = from_json(r#"{"T": 1, "curves": ["t/2"], "kernels": ["1", "-1"], "rhs": "t"}"#).unwrap();
    assert_eq!(unsafe { vie_problem_diagnostics(ill, &mut diag) }, VieStatus::Ok);
    assert_eq!(diag.b_flagged_mask & 1, 1);
    assert_eq!(diag.x0_denominator, 0.0);
    unsafe { vie_problem_free(ill) };
}

#[test]
fn status_codes_match_cli() {
    assert_eq!(from_json("{not json"), Err(VieStatus::ConfigError));
    assert_eq!(
        from_json(r#"{"T": 1, "curves": [], "kernels": ["1"], "rhs": "t+1"}"#),
        Err(VieStatus::ConfigError)
    );
    assert!(last_error().contains("f(0)"));
    assert_eq!(
        from_json(r#"{"T": 1, "curves": [], "kernels": ["q"], "rhs": "t"}"#),
        Err(VieStatus::ParseError)
    );

    let ill = from_json(r#"{"T": 1, "curves": ["t/2"], "kernels": ["1", "-1"], "rhs": "t"}"#).unwrap();
    let mut solution = ptr::null_mut();
    assert_eq!(unsafe { vie_solve(ill, 100, &mut solution) }, VieStatus::NumericalError);
    assert!(solution.is_null());
    assert!(last_error().contains("denominator"));
    assert_eq!(unsafe { vie_solve(ill, 1, &mut solution) }, VieStatus::ConfigError);
    unsafe { vie_problem_free(ill) };
}

#[test]
fn null_and_invalid_arguments() {
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { vie_problem_from_example(9, &mut p) },
        VieStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { vie_problem_from_example(1, ptr::null_mut()) },
        VieStatus::NullPointer
    );
    assert_eq!(
        unsafe { vie_problem_from_json(ptr::null(), &mut p) },
        VieStatus::NullPointer
    );
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { vie_solve(ptr::null(), 8, &mut s) }, VieStatus::NullPointer);
    assert_eq!(unsafe { vie_problem_pieces(ptr::null()) }, 0);
    assert!(unsafe { vie_problem_horizon(ptr::null()) }.is_nan());
    assert_eq!(unsafe { vie_solution_segments(ptr::null()) }, 0);
    unsafe {
        vie_problem_free(ptr::null_mut());
        vie_solution_free(ptr::null_mut());
    }
}

#[test]
fn convergence_ladder() {
    let problem = example(2);
    let sizes = [32usize, 64, 128];
    let mut h = [0.0; 3];
    let mut eps = [0.0; 3];
    assert_eq!(
        unsafe { vie_convergence(problem, sizes.as_ptr(), 3, h.as_mut_ptr(), eps.as_mut_ptr()) },
        VieStatus::Ok
    );
    assert_eq!(h, [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0]);
    assert!(eps[0] > eps[1] && eps[1] > eps[2]);

    let unsorted = [64usize, 32];
    assert_eq!(
        unsafe { vie_convergence(problem, unsorted.as_ptr(), 2, ptr::null_mut(), ptr::null_mut()) },
        VieStatus::ConfigError
    );
    unsafe { vie_problem_free(problem) };
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/vie.h")).unwrap();
    for symbol in [
        "vie_last_error",
        "vie_problem_from_json",
        "vie_problem_from_example",
        "vie_problem_free",
        "vie_problem_pieces",
        "vie_problem_horizon",
        "vie_problem_diagnostics",
        "vie_solve",
        "vie_solution_free",
        "vie_solution_segments",
        "vie_solution_nodes",
        "vie_solution_evaluate",
        "vie_solution_max_error",
        "vie_convergence",
        "typedef struct VieProblem VieProblem;",
        "VIE_STATUS_NUMERICAL_ERROR = 2",
    ] {
        assert!(header.contains(symbol), "missing {symbol}");
    }
}

/// Builds `tests/c/smoke.c` against the generated header and the static
/// library from this build, then runs it.
#[test]
fn c_program_links_against_static_library() {
    let Ok(compiler) = std::env::var("CC").or_else(|_| which("cc")) else {
        eprintln!("no C compiler on PATH; skipping");
        return;
    };
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|deps| deps.parent()).unwrap();
    let lib = profile_dir.join("libvie_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let manifest = env!("CARGO_MANIFEST_DIR");
    let out = tempfile_path("vie_smoke");
    let status = std::process::Command::new(&compiler)
        .arg(format!("{manifest}/tests/c/smoke.c"))
        .arg(format!("-I{manifest}/include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = std::process::Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}

fn which(program: &str) -> Result<String, ()> {
    std::env::var_os("PATH")
        .and_then(|paths| {
            std::env::split_paths(&paths)
                .map(|dir| dir.join(program))
                .find(|candidate| candidate.is_file())
        })
        .map(|p| p.to_string_lossy().into_owned())
        .ok_or(())
}

fn tempfile_path(stem: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("{stem}_{}", std::process::id()))
}
