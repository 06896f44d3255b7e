//! Guards the example data under data/: every shipped file must parse and
//! agree exactly with the library's frozen constants.
//!
//! Run `cargo test --test shipped_data -- --ignored regenerate` after an
//! intentional change to the constants to rewrite the files.

use std::path::PathBuf;

use formlift::exterior::{wedge, Form};
use formlift::g2;
use formlift::io;
use formlift::lie_model::LieAlgebra;
use formlift::solutions;

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

fn omega0() -> Form {
    Form::from_terms(6, 2, &[(&[1, 4], 1.0), (&[2, 5], 1.0), (&[3, 6], 1.0)]).unwrap()
}

fn phi0() -> Form {
    Form::from_terms(
        6,
        3,
        &[
            (&[1, 2, 3], 1.0),
            (&[1, 5, 6], -1.0),
            (&[2, 4, 6], 1.0),
            (&[3, 4, 5], -1.0),
        ],
    )
    .unwrap()
}

fn shipped_forms() -> Vec<(&'static str, Form)> {
    let omega0 = omega0();
    let phi0 = phi0();
    let sigma0 = wedge(&omega0, &omega0).unwrap().scaled(0.5);
    let psi0 = g2::lift(&omega0, &phi0).unwrap().psi;
    let (_, s) = solutions::nearly_kahler_su2su2();
    vec![
        ("omega0.json", omega0),
        ("phi0.json", phi0),
        ("sigma0.json", sigma0),
        ("psi0.json", psi0),
        ("nk-omega.json", s.omega().clone()),
        ("nk-phi.json", s.phi().clone()),
        ("nk-phihat.json", s.phihat().clone()),
    ]
}

fn shipped_algebras() -> Vec<(&'static str, LieAlgebra)> {
    vec![
        (
            "su2su2.json",
            LieAlgebra::parse_salamon("(23,31,12,56,64,45)").unwrap(),
        ),
        (
            "nilpotent.json",
            LieAlgebra::parse_salamon("(0,0,0,0,12,13)").unwrap(),
        ),
        ("abelian.json", LieAlgebra::abelian()),
    ]
}

#[test]
fn shipped_forms_match_library_constants() {
    for (name, expected) in shipped_forms() {
        let path = data_dir().join("forms").join(name);
        let read = io::read_form(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(read.dim(), expected.dim(), "{name}");
        assert_eq!(read.degree(), expected.degree(), "{name}");
        assert!(
            (&read - &expected).norm() == 0.0,
            "{name} drifted from the library constant"
        );
    }
}

#[test]
fn shipped_algebras_match_library_constants() {
    for (name, expected) in shipped_algebras() {
        let path = data_dir().join("algebras").join(name);
        let read = io::read_algebra(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(read.to_salamon(), expected.to_salamon(), "{name}");
    }
}

#[test]
#[ignore = "rewrites data/ from the library constants"]
fn regenerate() {
    let forms = data_dir().join("forms");
    let algebras = data_dir().join("algebras");
    std::fs::create_dir_all(&forms).unwrap();
    std::fs::create_dir_all(&algebras).unwrap();
    for (name, form) in shipped_forms() {
        io::write_form(&forms.join(name), &form).unwrap();
    }
    for (name, algebra) in shipped_algebras() {
        io::write_algebra(&algebras.join(name), &algebra).unwrap();
    }
}
