//! WebSocket endpoint: one session per connection.

use std::net::SocketAddr;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::IntoResponse;
use axum::routing::get;
use axum::Router;
use exactcsg::BooleanOptions;
use futures::{SinkExt, StreamExt};
use tokio::net::TcpListener;
use tokio::sync::{mpsc, Notify};

use crate::session::{load_pair, Session};
use crate::wire::{Control, Reply};

#[derive(Debug, Clone, Default)]
pub struct ServeConfig {
    /// Workers for the Boolean pipeline; `None` uses all cores.
    pub threads: Option<usize>,
    /// Upper bound on frames per second per session.
    pub max_fps: Option<f64>,
}

#[derive(Clone)]
struct AppState {
    pool: Arc<rayon::ThreadPool>,
    config: ServeConfig,
}

pub fn router(config: ServeConfig) -> std::io::Result<Router> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.threads {
        b = b.num_threads(n.max(1));
    }
    let pool = b.build().map_err(std::io::Error::other)?;
    let state = AppState {
        pool: Arc::new(pool),
        config,
    };
    Ok(Router::new().route("/ws", get(upgrade)).with_state(state))
}

/// Serves until the listener fails.
pub async fn serve(listener: TcpListener, config: ServeConfig) -> std::io::Result<()> {
    axum::serve(listener, router(config)?).await
}

pub async fn bind(port: u16) -> std::io::Result<(TcpListener, SocketAddr)> {
    let l = TcpListener::bind(("127.0.0.1", port)).await?;
    let addr = l.local_addr()?;
    Ok((l, addr))
}

async fn upgrade(ws: WebSocketUpgrade, State(state): State<AppState>) -> impl IntoResponse {
    ws.on_upgrade(move |socket| run_session(socket, state))
}

async fn run_session(socket: WebSocket, state: AppState) {
    let (mut sink, mut stream) = socket.split();
    let (tx, mut rx) = mpsc::channel::<Message>(4);
    let session = Arc::new(Mutex::new(Session::new()));
    let wake = Arc::new(Notify::new());

    let writer = tokio::spawn(async move {
        while let Some(m) = rx.recv().await {
            if sink.send(m).await.is_err() {
                break;
            }
        }
    });
    let compute = tokio::spawn(frame_loop(session.clone(), wake.clone(), tx.clone(), state));

    while let Some(Ok(msg)) = stream.next().await {
        let text = match msg {
            Message::Text(t) => t,
            Message::Close(_) => break,
            Message::Binary(_) => {
                let r = Reply::Error {
                    frame: None,
                    message: "binary control frames are not supported".into(),
                };
                if tx.send(Message::Text(r.to_json().into())).await.is_err() {
                    break;
                }
                continue;
            }
            _ => continue,
        };
        let reply = handle_text(&session, text.as_str());
        wake.notify_one();
        if tx.send(Message::Text(reply.to_json().into())).await.is_err() {
            break;
        }
    }
    compute.abort();
    drop(tx);
    let _ = writer.await;
}

fn handle_text(session: &Mutex<Session>, text: &str) -> Reply {
    let control: Control = match serde_json::from_str(text) {
        Ok(c) => c,
        Err(e) => {
            return Reply::Error {
                frame: None,
                message: format!("bad control message: {e}"),
            }
        }
    };
    let name = control.name().to_string();
    // Files are read before taking the lock so frames are not held up.
    let outcome = match control {
        Control::Load { a, b } => load_pair(&a, &b).map(|(ma, mb)| {
            session.lock().expect("session lock").set_meshes(ma, mb);
            None
        }),
        other => session.lock().expect("session lock").handle(other),
    };
    let s = session.lock().expect("session lock");
    match outcome {
        Ok(note) => Reply::Ack {
            request: name,
            state: s.snapshot(),
            note,
        },
        Err(e) => Reply::Error {
            frame: None,
            message: e.to_string(),
        },
    }
}

async fn frame_loop(
    session: Arc<Mutex<Session>>,
    wake: Arc<Notify>,
    tx: mpsc::Sender<Message>,
    state: AppState,
) {
    let min_gap = state
        .config
        .max_fps
        .filter(|f| *f > 0.0)
        .map(|f| Duration::from_secs_f64(1.0 / f));
    loop {
        let job = session.lock().expect("session lock").begin_frame();
        let Some(job) = job else {
            wake.notified().await;
            continue;
        };
        let started = Instant::now();
        let pool = state.pool.clone();
        let frame = job.frame;
        let result = tokio::task::spawn_blocking(move || {
            pool.install(|| job.run(&BooleanOptions::default()))
        })
        .await;
        let out = match result {
            Ok(Ok(f)) => {
                let f = Arc::new(f);
                session.lock().expect("session lock").end_frame(Some(f.clone()));
                Message::Binary(f.encode().into())
            }
            Ok(Err(e)) => {
                session.lock().expect("session lock").end_frame(None);
                Message::Text(
                    Reply::Error {
                        frame: Some(frame),
                        message: e.to_string(),
                    }
                    .to_json()
                    .into(),
                )
            }
            Err(e) => {
                session.lock().expect("session lock").end_frame(None);
                Message::Text(
                    Reply::Error {
                        frame: Some(frame),
                        message: format!("frame task failed: {e}"),
                    }
                    .to_json()
                    .into(),
                )
            }
        };
        if tx.send(out).await.is_err() {
            return;
        }
        if let Some(gap) = min_gap {
            let spent = started.elapsed();
            if spent < gap {
                tokio::time::sleep(gap - spent).await;
            }
        }
    }
}
