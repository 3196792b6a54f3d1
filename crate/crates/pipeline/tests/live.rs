//! Live-provider smoke test. Opt-in: needs network access and a token in
//! `DEDUCE_API_KEY`; `DEDUCE_BASE_URL` and `DEDUCE_MODEL` override the
//! endpoint defaults.

use deduce_pipeline::eval::prompt_for;
use deduce_pipeline::fixtures::fixtures;
use deduce_pipeline::orchestrator::multiple_try;
use deduce_pipeline::provider::{LiveConfig, LiveProvider, ProviderError};
use deduce_pipeline::RetryPolicy;

fn config() -> LiveConfig {
    let mut cfg = LiveConfig::default();
    if let Ok(url) = std::env::var("DEDUCE_BASE_URL") {
        cfg.base_url = url;
    }
    if let Ok(model) = std::env::var("DEDUCE_MODEL") {
        cfg.model = model;
    }
    cfg
}

#[test]
fn missing_token_is_reported_by_name() {
    let cfg = LiveConfig {
        token_env: "DEDUCE_TEST_TOKEN_THAT_IS_NEVER_SET".into(),
        ..LiveConfig::default()
    };
    match LiveProvider::from_env(cfg) {
        Err(e @ ProviderError::MissingCredential(_)) => {
            assert!(e.is_fatal());
            assert!(e.to_string().contains("DEDUCE_TEST_TOKEN_THAT_IS_NEVER_SET"));
        }
        Err(other) => panic!("unexpected {other}"),
        Ok(_) => panic!("provider built without a token"),
    }
}

#[test]
#[ignore = "calls a hosted model"]
fn live_smoke() {
    let provider = LiveProvider::from_env(config()).expect("DEDUCE_API_KEY must be set");
    let problem = fixtures().into_iter().find(|p| p.id == "cs-four-digit").unwrap();
    let policy = RetryPolicy {
        max_attempts: 3,
        ..RetryPolicy::default()
    };
    let prompt = prompt_for(&problem, None).unwrap();
    let out = multiple_try(&problem, &provider, &policy, &prompt, 0, None).unwrap();
    println!("{}", out.to_json());
    assert!(out.attempts_used >= 1 && out.attempts_used <= 3);
    assert!(out
        .attempts
        .iter()
        .all(|a| !a.completion.is_empty() || a.exec_status.as_str() == "provider-error"));
}
