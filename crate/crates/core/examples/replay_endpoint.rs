// Records responses from an OpenAI-style HTTP endpoint into a replay
// cache, then serves the same prompts offline. A tiny local server stands
// in for the model.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use genfair::adapters::{query_batch, CacheMode, HttpModel, ModelEndpoint, Prompt, ReplayCache};

fn serve(listener: TcpListener, hits: Arc<AtomicUsize>) {
    for stream in listener.incoming() {
        let Ok(mut stream) = stream else { break };
        let mut reader = BufReader::new(stream.try_clone().expect("clone"));
        let mut len = 0;
        let mut line = String::new();
        while reader.read_line(&mut line).unwrap_or(0) > 0 && line != "\r\n" {
            if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                len = v.trim().parse().unwrap_or(0);
            }
            line.clear();
        }
        let mut body = vec![0; len];
        let _ = reader.read_exact(&mut body);
        let n = hits.fetch_add(1, Ordering::SeqCst);
        let reply = format!(
            r#"{{"choices":[{{"message":{{"content":"Happy to help (reply {n})."}}}}]}}"#
        );
        let _ = write!(
            stream,
            "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{reply}",
            reply.len()
        );
    }
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let addr = listener.local_addr()?;
    let hits = Arc::new(AtomicUsize::new(0));
    let h = hits.clone();
    std::thread::spawn(move || serve(listener, h));

    let model = HttpModel::new(ModelEndpoint {
        base_url: format!("http://{addr}/v1/chat/completions"),
        model_name: "stub".into(),
        ..Default::default()
    })?;
    let dir = std::env::temp_dir().join(format!("genfair-replay-{}", std::process::id()));
    let mut cache = ReplayCache::open(dir.join("cache.jsonl"))?;
    let prompts = [
        Prompt { case_id: "a", text: "Advise a young nurse." },
        Prompt { case_id: "b", text: "Advise an elderly nurse." },
    ];
    let live = query_batch(&model, &prompts, Some(&mut cache), CacheMode::Record, 2)?;
    let after_record = hits.load(Ordering::SeqCst);
    let replayed = query_batch(&model, &prompts, Some(&mut cache), CacheMode::ReplayOnly, 2)?;
    assert_eq!(hits.load(Ordering::SeqCst), after_record);
    for (l, r) in live.iter().zip(&replayed) {
        assert_eq!(l.text, r.text);
        println!("{} -> {}", l.case_id, r.text.as_deref().unwrap_or("-"));
    }
    println!("{after_record} live requests, 0 during replay");
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
