use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use sentimen::ingest::fetch::{CommentsClient, FetchError};

/// Serves the scripted `(status, body)` responses in order, one per
/// connection, and records each request target.
struct MockServer {
    url: String,
    requests: Arc<Mutex<Vec<String>>>,
}

impl MockServer {
    fn start(responses: Vec<(u16, String)>) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/commentThreads", listener.local_addr().unwrap());
        let requests = Arc::new(Mutex::new(Vec::new()));
        let log = Arc::clone(&requests);
        thread::spawn(move || {
            for (status, body) in responses {
                let Ok((mut stream, _)) = listener.accept() else { return };
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                log.lock().unwrap().push(line.split_whitespace().nth(1).unwrap_or("").to_string());
                loop {
                    let mut h = String::new();
                    if reader.read_line(&mut h).unwrap() == 0 || h == "\r\n" {
                        break;
                    }
                }
                let _ = write!(
                    stream,
                    "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                    body.len()
                );
            }
        });
        Self { url, requests }
    }

    fn requests(&self) -> Vec<String> {
        self.requests.lock().unwrap().clone()
    }
}

fn page(ids: &[&str], next: Option<&str>) -> (u16, String) {
    let items: Vec<String> = ids
        .iter()
        .map(|id| {
            format!(
                r#"{{"id":"t{id}","snippet":{{"topLevelComment":{{"id":"{id}","snippet":{{"textOriginal":"komentar {id}","textDisplay":"x"}}}}}}}}"#
            )
        })
        .collect();
    let next = next.map_or(String::new(), |t| format!(r#","nextPageToken":"{t}""#));
    (200, format!(r#"{{"items":[{}]{next}}}"#, items.join(",")))
}

fn client(url: &str) -> CommentsClient {
    CommentsClient::with_base_url(url, "secret-key").retries(2, Duration::from_millis(1))
}

#[test]
fn follows_page_tokens_until_exhausted() {
    let server = MockServer::start(vec![page(&["a", "b"], Some("P2")), page(&["c"], Some("P3")), page(&["d"], None)]);
    let got = client(&server.url).fetch_comments("vid1", 10).unwrap();
    let ids: Vec<&str> = got.iter().map(|c| c.id.as_str()).collect();
    assert_eq!(ids, ["a", "b", "c", "d"]);
    assert_eq!(got[2].text, "komentar c");
    assert!(got.iter().all(|c| c.label.is_none() && c.source == "vid1"));
    let reqs = server.requests();
    assert_eq!(reqs.len(), 3);
    assert!(reqs[0].contains("videoId=vid1") && !reqs[0].contains("pageToken"));
    assert!(reqs[1].contains("pageToken=P2"));
    assert!(reqs[2].contains("pageToken=P3"));
}

#[test]
fn stops_at_page_limit() {
    let server = MockServer::start(vec![page(&["a"], Some("P2")), page(&["b"], Some("P3"))]);
    let got = client(&server.url).fetch_comments("v", 2).unwrap();
    assert_eq!(got.len(), 2);
    assert_eq!(server.requests().len(), 2);
}

#[test]
fn zero_pages_is_empty_without_requests() {
    let server = MockServer::start(vec![page(&["a"], None)]);
    assert!(client(&server.url).fetch_comments("v", 0).unwrap().is_empty());
    assert!(server.requests().is_empty());
}

#[test]
fn rejected_key_is_an_auth_error_that_hides_the_key() {
    let body = r#"{"error":{"code":400,"message":"API key not valid. Please pass a valid API key.","errors":[{"reason":"badRequest"}]}}"#;
    let server = MockServer::start(vec![(400, body.to_string())]);
    let err = client(&server.url).fetch_comments("v", 3).unwrap_err();
    assert!(matches!(err, FetchError::Auth { status: 400, .. }), "{err:?}");
    assert!(!err.to_string().contains("secret-key"));
    assert_eq!(server.requests().len(), 1);
}

#[test]
fn quota_and_unknown_video() {
    let quota = r#"{"error":{"code":403,"message":"quota","errors":[{"reason":"quotaExceeded"}]}}"#;
    let server = MockServer::start(vec![(403, quota.to_string())]);
    assert!(matches!(client(&server.url).fetch_comments("v", 1), Err(FetchError::Quota { .. })));

    let missing = r#"{"error":{"code":404,"message":"nope","errors":[{"reason":"videoNotFound"}]}}"#;
    let server = MockServer::start(vec![(404, missing.to_string())]);
    match client(&server.url).fetch_comments("nosuch", 1) {
        Err(FetchError::UnknownVideo(v)) => assert_eq!(v, "nosuch"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn server_errors_are_retried() {
    let server = MockServer::start(vec![(503, "busy".into()), page(&["a"], None)]);
    let got = client(&server.url).fetch_comments("v", 1).unwrap();
    assert_eq!(got.len(), 1);
    assert_eq!(server.requests().len(), 2);

    let server = MockServer::start(vec![(500, "x".into()), (500, "x".into()), (500, "x".into())]);
    let err = client(&server.url).fetch_comments("v", 1).unwrap_err();
    assert!(matches!(err, FetchError::Transient(_)));
    assert_eq!(server.requests().len(), 3);
}

#[test]
fn garbage_body_is_malformed() {
    let server = MockServer::start(vec![(200, "<html>".into())]);
    assert!(matches!(client(&server.url).fetch_comments("v", 1), Err(FetchError::Malformed(_))));
}

#[test]
fn empty_inputs_are_rejected_locally() {
    let c = CommentsClient::with_base_url("http://127.0.0.1:9", "");
    assert!(matches!(c.fetch_comments("v", 1), Err(FetchError::Invalid(_))));
    assert!(matches!(client("http://127.0.0.1:9").fetch_comments(" ", 1), Err(FetchError::Invalid(_))));
}
