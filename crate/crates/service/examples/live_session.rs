//! Starts the session server in-process, loads two meshes over the
//! WebSocket protocol, switches the operator and prints a few frames.

use std::time::Duration;

use exactcsg::io;
use exactcsg::shapes::{cube, uv_sphere};
use exactcsg_service::server::{bind, serve, ServeConfig};
use exactcsg_service::wire::{FrameMessage, Reply};
use futures::{SinkExt, StreamExt};
use tokio_tungstenite::connect_async;
use tokio_tungstenite::tungstenite::Message;

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir();
    let (pa, pb) = (dir.join("exactcsg_live_a.obj"), dir.join("exactcsg_live_b.obj"));
    io::save(&pa, &cube([-0.5; 3], 1.0), None)?;
    io::save(&pb, &uv_sphere([0.3, 0.2, 0.1], 0.6, 24, 12), None)?;

    let (listener, addr) = bind(0).await?;
    tokio::spawn(serve(listener, ServeConfig { threads: None, max_fps: Some(20.0) }));
    let (mut ws, _) = connect_async(format!("ws://{addr}/ws")).await?;

    let load = serde_json::json!({"t": "load", "a": pa, "b": pb}).to_string();
    ws.send(Message::Text(load.into())).await?;
    ws.send(Message::Text(r#"{"t":"op","v":"subtract"}"#.into())).await?;

    let mut frames = 0;
    while frames < 5 {
        let Some(msg) = tokio::time::timeout(Duration::from_secs(30), ws.next()).await? else { break };
        match msg? {
            Message::Binary(b) => {
                let f = FrameMessage::decode(&b)?;
                println!(
                    "frame {:>3} {:<9} {:>5} triangles {:>6} us",
                    f.frame,
                    f.op.to_string(),
                    f.triangles.len(),
                    f.compute_micros
                );
                frames += 1;
            }
            Message::Text(t) => match serde_json::from_str::<Reply>(t.as_str())? {
                Reply::Ack { request, .. } => println!("ack {request}"),
                Reply::Error { message, .. } => println!("error: {message}"),
            },
            _ => {}
        }
    }
    Ok(())
}
