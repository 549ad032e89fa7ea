use rifslab_core::dimension::periodic_similarity_dimension;
use rifslab_core::geometry::CONTAINMENT_TOL;
use rifslab_core::measure::cover_mass;
use rifslab_core::*;

const S: f64 = 0.630_929_753_571_457_4;

fn third(t: f64) -> ContractionMap {
    ContractionMap::similarity_1d(1.0 / 3.0, false, t).unwrap()
}

fn triadic() -> Rifs {
    Rifs::new(
        AmbientBox::unit(1),
        vec![
            DeterministicIfs::new("cantor", vec![third(0.0), third(2.0 / 3.0)]).unwrap(),
            DeterministicIfs::new(
                "interval",
                vec![third(0.0), third(1.0 / 3.0), third(2.0 / 3.0)],
            )
            .unwrap(),
        ],
    )
    .unwrap()
}

fn carpets() -> (Vec<CarpetSpec>, Rifs) {
    let c = vec![
        CarpetSpec::from_column_counts(2, 3, &[2, 2]).unwrap(),
        CarpetSpec::from_column_counts(3, 4, &[4, 4, 0]).unwrap(),
    ];
    let systems = c
        .iter()
        .enumerate()
        .map(|(i, c)| DeterministicIfs::from_carpet(format!("c{i}"), c).unwrap())
        .collect();
    (c.clone(), Rifs::new(AmbientBox::unit(2), systems).unwrap())
}

fn cookie() -> Rifs {
    let cf = ContractionMap::closed_form;
    Rifs::new(
        AmbientBox::unit(1),
        vec![
            DeterministicIfs::new(
                "f1",
                vec![
                    cf(ClosedForm::CookieFive(Side::Left)),
                    cf(ClosedForm::CookieFive(Side::Right)),
                ],
            )
            .unwrap(),
            DeterministicIfs::new(
                "f2",
                vec![
                    cf(ClosedForm::CookieNine(Side::Left)),
                    cf(ClosedForm::CookieNine(Side::Right)),
                ],
            )
            .unwrap(),
        ],
    )
    .unwrap()
}

fn omegas() -> Vec<OmegaSeq> {
    vec![
        OmegaSeq::constant(1).unwrap(),
        OmegaSeq::constant(2).unwrap(),
        OmegaSeq::periodic(vec![1, 2]).unwrap(),
        OmegaSeq::new(vec![2, 2, 1], vec![1, 2, 2]).unwrap(),
    ]
}

#[test]
fn nesting_and_count_law() {
    for rifs in [triadic(), carpets().1, cookie()] {
        for w in omegas() {
            for k in 1..=5 {
                let parent = cylinder_cover(&rifs, &w, k).unwrap();
                let child = cylinder_cover(&rifs, &w, k + 1).unwrap();
                assert_eq!(parent.len() as u128, rifs.cylinder_count(&w, k));
                let fan = rifs.system(w.symbol_at(k)).len();
                assert_eq!(child.len(), parent.len() * fan);
                for i in 0..child.len() {
                    assert_eq!(&child.word(i)[..k], parent.word(i / fan));
                    assert!(parent
                        .bbox(i / fan)
                        .contains_box(&child.bbox(i), CONTAINMENT_TOL));
                }
            }
        }
    }
}

#[test]
fn deeper_covers_stay_within_the_certificate() {
    for rifs in [triadic(), carpets().1, cookie()] {
        for w in omegas() {
            // Every depth involved stays at or below 6.
            for k in 1..=3 {
                let a = cylinder_cover(&rifs, &w, k).unwrap();
                let b = cylinder_cover(&rifs, &w, k + 3).unwrap();
                let d = hausdorff_distance(a.points(), b.points()).unwrap();
                assert!(
                    d <= a.error_bound() + 1e-12,
                    "k={k} {d} > {}",
                    a.error_bound()
                );
            }
        }
    }
}

#[test]
fn masses_are_conserved() {
    for rifs in [triadic(), carpets().1, cookie()] {
        for w in omegas() {
            let cm = CylinderMeasure::new(&rifs, &w).unwrap();
            for k in (1..=8).take_while(|&k| rifs.cylinder_count(&w, k) <= 1 << 20) {
                let cover = cylinder_cover(&rifs, &w, k).unwrap();
                let total: f64 = cm.cover_masses(&cover).unwrap().iter().sum();
                assert!((total - 1.0).abs() < 1e-10, "k={k}: {total}");
            }
            let word = [0u16, 1, 0];
            let parent = cm.mass(&word).unwrap();
            let kids: f64 = (0..rifs.system(w.symbol_at(3)).len() as u16)
                .map(|j| cm.mass(&[0, 1, 0, j]).unwrap())
                .sum();
            assert!((parent - kids).abs() <= 1e-15);
        }
    }
}

#[test]
fn power_gauge_scales_with_similarity() {
    let g = Gauge::Power(S);
    let w = OmegaSeq::constant(1).unwrap();
    for c in [0.5, 0.25, 0.9] {
        let small = Rifs::new(
            AmbientBox::new(&[0.0], &[c]).unwrap(),
            vec![DeterministicIfs::new(
                "cantor",
                vec![
                    ContractionMap::similarity_1d(1.0 / 3.0, false, 0.0).unwrap(),
                    ContractionMap::similarity_1d(1.0 / 3.0, false, 2.0 * c / 3.0).unwrap(),
                ],
            )
            .unwrap()],
        )
        .unwrap();
        for k in 1..=6 {
            let base = hausdorff_upper_bound(&cylinder_cover(&triadic(), &w, k).unwrap(), &g);
            let scaled = hausdorff_upper_bound(&cylinder_cover(&small, &w, k).unwrap(), &g);
            assert!((scaled - c.powf(S) * base).abs() < 1e-12);
        }
    }
}

#[test]
fn packing_never_exceeds_scaled_cover() {
    let rifs = triadic();
    for w in omegas() {
        let s = periodic_similarity_dimension(&rifs, &w).unwrap().value;
        let g = Gauge::Power(s.max(1e-3));
        for k in 2..=6 {
            let cover = cylinder_cover(&rifs, &w, k).unwrap();
            let delta = 3f64.powi(-(k as i32));
            let pack = packing_lower_bound(cover.points(), &g, delta).unwrap();
            let up = hausdorff_upper_bound(&cover, &g);
            assert!(pack.value <= 2f64.powf(s) * up + 1e-12, "{w} k={k}");
        }
    }
}

#[test]
fn interval_cover_mass_is_one() {
    let cover = cylinder_cover(&triadic(), &OmegaSeq::constant(2).unwrap(), 5).unwrap();
    let d: Vec<f64> = cover.iter().map(|c| c.diameter).collect();
    assert!((cover_mass(&d, &Gauge::Power(1.0)) - 1.0).abs() < 1e-12);
}

#[test]
fn carpet_attractor_boxes_shrink_anisotropically() {
    let (_, rifs) = carpets();
    let c = cylinder_cover(&rifs, &OmegaSeq::constant(1).unwrap(), 3).unwrap();
    for cyl in c.iter() {
        assert!((cyl.bbox.hi[0] - cyl.bbox.lo[0] - 0.125).abs() < 1e-15);
        assert!((cyl.bbox.hi[1] - cyl.bbox.lo[1] - 1.0 / 27.0).abs() < 1e-15);
    }
}

#[test]
fn full_square_mdp_brackets_area() {
    let maps = (0..2)
        .flat_map(|c| (0..2).map(move |r| ContractionMap::grid_cell(2, 2, c, r).unwrap()))
        .collect();
    let rifs = Rifs::new(
        AmbientBox::unit(2),
        vec![DeterministicIfs::new("square", maps).unwrap()],
    )
    .unwrap();
    let cm = CylinderMeasure::new(&rifs, &OmegaSeq::constant(1).unwrap()).unwrap();
    assert!((cm.exponents()[0] - 2.0).abs() < 1e-12);
    let radii = [0.125, 0.0625];
    let rep = mdp_bounds(&cm, 2.0, &radii, 200, &CoverOptions::default()).unwrap();
    // μ is Lebesgue measure: a ball inside the square has mass πr², at a
    // corner πr²/4.
    let pi = std::f64::consts::PI;
    assert!(rep.lambda_sup >= pi - 1e-9);
    assert!(rep.lambda_inf <= pi / 4.0 + 1e-9);
    assert!(rep.h_lower > 0.0);
}

#[test]
fn executors_agree_exactly() {
    let systems = [
        CarpetSpec::from_column_counts(2, 3, &[2, 2]).unwrap(),
        CarpetSpec::from_column_counts(3, 4, &[4, 4, 0]).unwrap(),
    ]
    .iter()
    .enumerate()
    .map(|(i, c)| DeterministicIfs::from_carpet(format!("c{i}"), c).unwrap())
    .collect();
    let rifs = Rifs::new(AmbientBox::unit(2), systems).unwrap();
    let omega = OmegaSeq::new(vec![2], vec![1, 2]).unwrap();
    let with = |exec| CoverOptions {
        exec,
        ..Default::default()
    };
    let seq = cylinder_cover_with(&rifs, &omega, 7, &with(Exec::Sequential)).unwrap();
    let par = cylinder_cover_with(&rifs, &omega, 7, &with(Exec::Parallel)).unwrap();
    assert_eq!(seq, par);
    let grid = rifslab_core::boxcount::BoxGrid::anchored(rifs.ambient(), 1.0 / 64.0).unwrap();
    assert_eq!(
        grid.count_boxes(seq.boxes(), Exec::Sequential),
        grid.count_boxes(seq.boxes(), Exec::Parallel)
    );
}
