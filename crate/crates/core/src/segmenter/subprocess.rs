//! Backend bridged over a child process's standard streams.
//!
//! One JSON record per line in each direction. Requests:
//! `{"kind":"prompt"|"decode", "video_id", "exp_id", "expression",
//!   "clip_index", "image_paths":[...]}`
//! Responses: `{"prompt_b64": "..."}` for prompts,
//! `{"mask_paths":[...]}` for decodes (8-bit grayscale PNGs, value/255).
//! Any malformed record aborts the stream with a protocol error.

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use serde::{Deserialize, Serialize};

use crate::compress::CompressedClip;
use crate::error::{Error, Result};
use crate::mask_io::{read_soft_mask, write_frame};
use crate::types::{Frame, SoftMask};

use super::{SegPrompt, SegmentContext, SegmenterBackend};

#[derive(Serialize, Deserialize)]
pub struct WireRequest {
    pub kind: String,
    pub video_id: String,
    pub exp_id: String,
    pub expression: String,
    pub clip_index: usize,
    pub image_paths: Vec<String>,
}

#[derive(Serialize, Deserialize, Default)]
pub struct WireResponse {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prompt_b64: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask_paths: Option<Vec<String>>,
}

pub fn encode_b64(bytes: &[u8]) -> String {
    const TABLE: &[u8; 64] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    let mut out = String::with_capacity(bytes.len().div_ceil(3) * 4);
    for chunk in bytes.chunks(3) {
        let b = [
            chunk[0],
            *chunk.get(1).unwrap_or(&0),
            *chunk.get(2).unwrap_or(&0),
        ];
        let n = ((b[0] as u32) << 16) | ((b[1] as u32) << 8) | b[2] as u32;
        out.push(TABLE[(n >> 18) as usize & 63] as char);
        out.push(TABLE[(n >> 12) as usize & 63] as char);
        out.push(if chunk.len() > 1 {
            TABLE[(n >> 6) as usize & 63] as char
        } else {
            '='
        });
        out.push(if chunk.len() > 2 {
            TABLE[n as usize & 63] as char
        } else {
            '='
        });
    }
    out
}

pub fn decode_b64(text: &str) -> Result<Vec<u8>> {
    fn value(c: u8) -> Result<u32> {
        match c {
            b'A'..=b'Z' => Ok((c - b'A') as u32),
            b'a'..=b'z' => Ok((c - b'a') as u32 + 26),
            b'0'..=b'9' => Ok((c - b'0') as u32 + 52),
            b'+' => Ok(62),
            b'/' => Ok(63),
            _ => Err(Error::Protocol(format!("invalid base64 byte {c:#x}"))),
        }
    }
    let raw: Vec<u8> = text.bytes().filter(|&b| b != b'=').collect();
    if !text.len().is_multiple_of(4) || raw.len() % 4 == 1 {
        return Err(Error::Protocol("truncated base64 payload".to_string()));
    }
    let mut out = Vec::with_capacity(raw.len() * 3 / 4);
    for chunk in raw.chunks(4) {
        let mut n = 0u32;
        for &c in chunk {
            n = (n << 6) | value(c)?;
        }
        n <<= 6 * (4 - chunk.len());
        out.push((n >> 16) as u8);
        if chunk.len() > 2 {
            out.push((n >> 8) as u8);
        }
        if chunk.len() > 3 {
            out.push(n as u8);
        }
    }
    Ok(out)
}

fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

/// A segmenter running as a child process, one instance per
/// (video, expression) stream.
pub struct SubprocessBackend {
    identity: String,
    child: Child,
    stdin: Option<ChildStdin>,
    stdout: BufReader<ChildStdout>,
    /// Where request images are written for the worker to read.
    workdir: PathBuf,
}

impl SubprocessBackend {
    /// Spawn `command` (split on whitespace) with piped stdin/stdout.
    /// `workdir` receives the PNGs referenced by request `image_paths`.
    pub fn spawn(command: &str, workdir: impl Into<PathBuf>) -> Result<Self> {
        let parts: Vec<&str> = command.split_whitespace().collect();
        let (program, args) = parts
            .split_first()
            .ok_or_else(|| Error::validation("empty backend command"))?;
        let workdir = workdir.into();
        std::fs::create_dir_all(&workdir).map_err(|e| Error::io(&workdir, e))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::backend(format!("failed to spawn {command:?}: {e}")))?;
        let stdin = child.stdin.take().expect("stdin is piped");
        let stdout = BufReader::new(child.stdout.take().expect("stdout is piped"));
        Ok(SubprocessBackend {
            identity: format!("subprocess:{program}"),
            child,
            stdin: Some(stdin),
            stdout,
            workdir,
        })
    }

    fn roundtrip(&mut self, request: &WireRequest) -> Result<WireResponse> {
        let mut line = serde_json::to_string(request)
            .map_err(|e| Error::Protocol(format!("cannot encode request: {e}")))?;
        line.push('\n');
        let stdin = self
            .stdin
            .as_mut()
            .ok_or_else(|| Error::Protocol("stream already aborted".to_string()))?;
        stdin
            .write_all(line.as_bytes())
            .and_then(|_| stdin.flush())
            .map_err(|e| Error::backend(format!("worker stdin closed: {e}")))?;

        let mut reply = String::new();
        let n = self
            .stdout
            .read_line(&mut reply)
            .map_err(|e| Error::backend(format!("worker stdout failed: {e}")))?;
        if n == 0 {
            self.abort();
            return Err(Error::backend("worker exited before replying"));
        }
        match serde_json::from_str::<WireResponse>(reply.trim_end()) {
            Ok(response) => Ok(response),
            Err(e) => {
                self.abort();
                Err(Error::Protocol(format!(
                    "malformed response {:?}: {e}",
                    reply.trim_end()
                )))
            }
        }
    }

    fn abort(&mut self) {
        self.stdin = None; // closing stdin signals the worker to stop
        let _ = self.child.kill();
        let _ = self.child.wait();
    }

    fn image_path(&self, name: String) -> Result<(PathBuf, String)> {
        let path = self.workdir.join(name);
        let display = path
            .to_str()
            .ok_or_else(|| Error::validation(format!("non-utf8 path {}", path.display())))?
            .to_string();
        Ok((path, display))
    }
}

impl Drop for SubprocessBackend {
    fn drop(&mut self) {
        self.stdin = None;
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl SegmenterBackend for SubprocessBackend {
    fn identity(&self) -> &str {
        &self.identity
    }

    fn supports_tail_propagation(&self) -> bool {
        true
    }

    fn generate_prompts(
        &mut self,
        ctx: &SegmentContext,
        clips: &[CompressedClip],
    ) -> Result<Vec<SegPrompt>> {
        let stream = format!("{}__{}", sanitize(ctx.video_id), sanitize(ctx.exp_id));
        let mut prompts = Vec::with_capacity(clips.len());
        for (clip_index, clip) in clips.iter().enumerate() {
            let (key_path, key) =
                self.image_path(format!("{stream}_clip{clip_index:03}_key.png"))?;
            let (com_path, com) =
                self.image_path(format!("{stream}_clip{clip_index:03}_com.png"))?;
            write_frame(&key_path, &clip.key_frame.image)?;
            write_frame(&com_path, &clip.compressed)?;
            let response = self.roundtrip(&WireRequest {
                kind: "prompt".into(),
                video_id: ctx.video_id.into(),
                exp_id: ctx.exp_id.into(),
                expression: ctx.expression.into(),
                clip_index,
                image_paths: vec![key, com],
            })?;
            let encoded = response.prompt_b64.ok_or_else(|| {
                self.abort();
                Error::Protocol(format!(
                    "prompt response for clip {clip_index} has no prompt_b64"
                ))
            })?;
            prompts.push(SegPrompt {
                clip_index,
                payload: decode_b64(&encoded)?,
            });
        }
        Ok(prompts)
    }

    fn decode_clip(
        &mut self,
        ctx: &SegmentContext,
        frames: &[Frame],
        prompt: &SegPrompt,
    ) -> Result<Vec<SoftMask>> {
        let stream = format!("{}__{}", sanitize(ctx.video_id), sanitize(ctx.exp_id));
        let mut image_paths = Vec::with_capacity(frames.len());
        for frame in frames {
            let (path, display) = self.image_path(format!(
                "{stream}_clip{:03}_f{:05}.png",
                prompt.clip_index, frame.index
            ))?;
            write_frame(&path, &frame.image)?;
            image_paths.push(display);
        }
        let response = self.roundtrip(&WireRequest {
            kind: "decode".into(),
            video_id: ctx.video_id.into(),
            exp_id: ctx.exp_id.into(),
            expression: ctx.expression.into(),
            clip_index: prompt.clip_index,
            image_paths,
        })?;
        let mask_paths = response.mask_paths.ok_or_else(|| {
            self.abort();
            Error::Protocol(format!(
                "decode response for clip {} has no mask_paths",
                prompt.clip_index
            ))
        })?;
        if mask_paths.len() != frames.len() {
            self.abort();
            return Err(Error::Protocol(format!(
                "decode returned {} masks for {} frames",
                mask_paths.len(),
                frames.len()
            )));
        }
        mask_paths
            .iter()
            .map(|p| read_soft_mask(Path::new(p)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base64_round_trips() {
        for bytes in [
            vec![],
            vec![0u8],
            vec![1, 2],
            vec![250, 251, 252],
            (0..=255u8).collect::<Vec<u8>>(),
        ] {
            let encoded = encode_b64(&bytes);
            assert_eq!(decode_b64(&encoded).unwrap(), bytes, "{encoded}");
        }
        assert_eq!(encode_b64(b"Man"), "TWFu");
        assert_eq!(encode_b64(b"Ma"), "TWE=");
    }

    #[test]
    fn bad_base64_is_a_protocol_error() {
        assert!(decode_b64("!!!!").is_err());
        assert!(decode_b64("TWF").is_err());
    }

    #[test]
    fn spawn_rejects_empty_command() {
        let dir = tempfile::tempdir().unwrap();
        assert!(SubprocessBackend::spawn("", dir.path()).is_err());
    }

    #[test]
    fn response_without_prompt_field_aborts_with_protocol_error() {
        let dir = tempfile::tempdir().unwrap();
        // `cat` echoes the request back: valid JSON, but not a prompt
        // response, so the stream must abort.
        let mut backend = SubprocessBackend::spawn("cat", dir.path()).unwrap();
        let ctx = SegmentContext {
            video_id: "v",
            exp_id: "e",
            expression: "x",
        };
        let frame = Frame::new(0, crate::types::RgbImage::filled(4, 4, [0, 0, 0]));
        let clip = CompressedClip {
            key_frame: frame.clone(),
            compressed: frame.image.clone(),
            source_indices: vec![],
        };
        let err = backend.generate_prompts(&ctx, &[clip]).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
