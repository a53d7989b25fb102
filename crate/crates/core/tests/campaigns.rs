use kdiam_core::verify::{build_catalog, default_catalog, Agreement};
use kdiam_core::{run_campaign, Campaign, Config, Resolution, TheoremId};

fn cfg() -> Config {
    let mut c = Config::default().with_resolution(Resolution::new(1024, 12));
    c.seed = 7;
    c
}

#[test]
fn default_catalog_has_no_violations() {
    let (catalog, _) = default_catalog(&cfg()).unwrap();
    let report = run_campaign(&Campaign::new(TheoremId::ALL.to_vec(), catalog, cfg())).unwrap();
    assert_eq!(report.violations(), 0, "{}", report.to_json());
    let s = report.summary();
    assert!(s.agree >= 40, "{s:?}");
}

#[test]
fn campaign_json_is_deterministic() {
    let run = || {
        let (catalog, _) = default_catalog(&cfg()).unwrap();
        let ids = vec![TheoremId::P45, TheoremId::P49];
        run_campaign(&Campaign::new(ids, catalog, cfg()))
            .unwrap()
            .to_json()
            .to_string()
    };
    assert_eq!(run(), run());
}

#[test]
fn interleave_is_not_admitted() {
    let (catalog, _) = default_catalog(&cfg()).unwrap();
    let report = run_campaign(&Campaign::new(vec![TheoremId::T31], catalog, cfg())).unwrap();
    let rows = &report.campaigns[0].rows;
    let inter = rows
        .iter()
        .find(|r| r.space.starts_with("interleave"))
        .unwrap();
    assert!(!inter.admitted);
    // log(n)/alpha_n -> 0 too slowly for alpha = log^2 to show nuclearity here.
    for r in rows
        .iter()
        .filter(|r| r.space.starts_with("Lambda") && !r.space.contains("pow(log"))
    {
        assert!(r.admitted, "{} {:?}", r.space, r.hypotheses);
    }
}

#[test]
fn infinite_type_rows_agree_under_t31() {
    let specs = vec![(
        "lambdainf.toml".to_string(),
        "label = \"Lambda_inf(n)\"\ntype = \"lambdainf\"\nalpha = \"n\"\n".to_string(),
    )];
    let catalog = build_catalog(&specs, &cfg()).unwrap();
    let report = run_campaign(&Campaign::new(vec![TheoremId::T31], catalog, cfg())).unwrap();
    let row = &report.campaigns[0].rows[0];
    assert_eq!(row.agreement, Agreement::Agree, "{}", report.to_json());
}

#[test]
fn empty_catalog_is_rejected() {
    assert!(run_campaign(&Campaign::new(vec![TheoremId::T31], Vec::new(), cfg())).is_err());
}
