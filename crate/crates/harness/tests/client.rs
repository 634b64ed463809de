use deformbench_harness::client::{ChatModel, EndpointConfig, HttpEndpoint, QueryError};
use deformbench_harness::prompt::{ChatMessage, Role};
use deformbench_harness::stub::{spawn_stub, StubConfig};

fn endpoint(base_url: String, token_env: Option<&str>) -> EndpointConfig {
    EndpointConfig {
        token_env: token_env.map(str::to_string),
        backoff_ms: 10,
        ..EndpointConfig::new("stub", &base_url, "stub-model")
    }
}

fn hello() -> Vec<ChatMessage> {
    vec![ChatMessage::text(Role::User, "hello")]
}

#[tokio::test]
async fn fixed_reply_comes_back_verbatim() {
    let stub = spawn_stub(StubConfig::fixed("Answer: A"), "127.0.0.1:0").await.unwrap();
    let model = HttpEndpoint::new(endpoint(stub.base_url(), None)).unwrap();
    let done = model.complete(&hello()).await.unwrap();
    assert_eq!(done.text, "Answer: A");
    assert_eq!(done.attempts, 1);
}

#[tokio::test]
async fn rate_limit_is_retried() {
    let config = StubConfig { fail_first: vec![429], retry_after_secs: Some(0), ..StubConfig::fixed("Answer: B") };
    let stub = spawn_stub(config, "127.0.0.1:0").await.unwrap();
    let model = HttpEndpoint::new(endpoint(stub.base_url(), None)).unwrap();
    let done = model.complete(&hello()).await.unwrap();
    assert_eq!(done.text, "Answer: B");
    assert_eq!(done.attempts, 2);
    assert_eq!(stub.request_count(), 2);
}

#[tokio::test]
async fn server_errors_back_off_then_give_up() {
    let config = StubConfig { fail_first: vec![503; 10], ..StubConfig::fixed("x") };
    let stub = spawn_stub(config, "127.0.0.1:0").await.unwrap();
    let model = HttpEndpoint::new(EndpointConfig { max_retries: 2, ..endpoint(stub.base_url(), None) }).unwrap();
    assert!(matches!(model.complete(&hello()).await, Err(QueryError::Http { status: 503, .. })));
    assert_eq!(stub.request_count(), 3);
}

#[tokio::test]
async fn bad_token_is_not_retried() {
    std::env::set_var("DEFORMBENCH_TEST_BAD_TOKEN", "wrong");
    let config = StubConfig { required_token: Some("right".into()), ..StubConfig::fixed("Answer: A") };
    let stub = spawn_stub(config, "127.0.0.1:0").await.unwrap();
    let model = HttpEndpoint::new(endpoint(stub.base_url(), Some("DEFORMBENCH_TEST_BAD_TOKEN"))).unwrap();
    assert!(matches!(model.complete(&hello()).await, Err(QueryError::AuthError { status: 401 })));
    assert_eq!(stub.request_count(), 1);
    assert!(!format!("{model:?}").contains("wrong"));
}

#[tokio::test]
async fn missing_token_variable_is_reported() {
    let err = HttpEndpoint::new(endpoint("http://127.0.0.1:9".into(), Some("DEFORMBENCH_TEST_UNSET"))).unwrap_err();
    assert!(matches!(err, QueryError::MissingToken(v) if v == "DEFORMBENCH_TEST_UNSET"));
}

#[tokio::test]
async fn unreachable_host_is_a_transport_error() {
    let model = HttpEndpoint::new(EndpointConfig { max_retries: 0, ..endpoint("http://127.0.0.1:9/v1".into(), None) }).unwrap();
    assert!(matches!(model.complete(&hello()).await, Err(QueryError::Transport(_))));
}
