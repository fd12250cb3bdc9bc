//! Interactive SMT-LIB v2 sessions with an external solver process.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Instant;

use crate::engine::sexp::{self, Sexp};

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("cannot start solver '{cmd}': {reason}")]
    Spawn { cmd: String, reason: String },
    #[error("solver timed out")]
    Timeout,
    #[error("solver exited unexpectedly")]
    Exited,
    #[error("unexpected solver reply to '{command}': {reply}")]
    Protocol { command: String, reply: String },
    #[error("solver reported an error: {0}")]
    Solver(String),
    #[error("cannot write to solver: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Sat,
    Unsat,
    Unknown(String),
}

pub struct Session {
    child: Child,
    stdin: BufWriter<ChildStdin>,
    replies: Receiver<String>,
    deadline: Option<Instant>,
}

impl Session {
    /// Starts `cmd` (program then arguments) and turns on `print-success`.
    pub fn spawn(cmd: &[String]) -> Result<Session, SolverError> {
        let joined = cmd.join(" ");
        let (program, args) = cmd.split_first().ok_or_else(|| SolverError::Spawn {
            cmd: joined.clone(),
            reason: "empty command".into(),
        })?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| SolverError::Spawn {
                cmd: joined.clone(),
                reason: e.to_string(),
            })?;
        let stdin = BufWriter::new(child.stdin.take().expect("piped stdin"));
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            let mut reader = BufReader::new(stdout);
            let mut buf = String::new();
            let mut line = String::new();
            loop {
                line.clear();
                match reader.read_line(&mut line) {
                    Ok(0) | Err(_) => return,
                    Ok(_) => buf.push_str(&line),
                }
                while let Some(n) = sexp::complete_prefix(&buf) {
                    let reply = buf[..n].trim().to_string();
                    buf.drain(..n);
                    if tx.send(reply).is_err() {
                        return;
                    }
                }
                if buf.trim().is_empty() {
                    buf.clear();
                }
            }
        });
        let mut s = Session {
            child,
            stdin,
            replies: rx,
            deadline: None,
        };
        s.command("(set-option :print-success true)")?;
        Ok(s)
    }

    /// Makes every later wait give up at `deadline`.
    pub fn set_deadline(&mut self, deadline: Instant) {
        self.deadline = Some(deadline);
    }

    fn write(&mut self, cmd: &str) -> Result<(), SolverError> {
        tracing::trace!(target: "agv::smt", "{cmd}");
        self.stdin.write_all(cmd.as_bytes())?;
        self.stdin.write_all(b"\n")?;
        Ok(())
    }

    fn reply(&mut self) -> Result<String, SolverError> {
        let r = match self.deadline {
            None => self.replies.recv().map_err(|_| SolverError::Exited),
            Some(d) => {
                let left = d.saturating_duration_since(Instant::now());
                self.replies.recv_timeout(left).map_err(|e| match e {
                    RecvTimeoutError::Timeout => SolverError::Timeout,
                    RecvTimeoutError::Disconnected => SolverError::Exited,
                })
            }
        };
        if matches!(r, Err(SolverError::Timeout)) {
            let _ = self.child.kill();
        }
        r
    }

    fn expect_success(&mut self, command: &str) -> Result<(), SolverError> {
        let r = self.reply()?;
        if r == "success" {
            return Ok(());
        }
        Err(error_or_protocol(command, r))
    }

    /// Sends one command that answers `success`.
    pub fn command(&mut self, cmd: &str) -> Result<(), SolverError> {
        self.write(cmd)?;
        self.stdin.flush()?;
        self.expect_success(cmd)
    }

    /// Sends several commands at once, then collects their replies.
    pub fn commands<S: AsRef<str>>(&mut self, cmds: &[S]) -> Result<(), SolverError> {
        for c in cmds {
            self.write(c.as_ref())?;
        }
        self.stdin.flush()?;
        for c in cmds {
            self.expect_success(c.as_ref())?;
        }
        Ok(())
    }

    pub fn push(&mut self) -> Result<(), SolverError> {
        self.command("(push 1)")
    }

    pub fn pop(&mut self) -> Result<(), SolverError> {
        self.command("(pop 1)")
    }

    pub fn check_sat(&mut self) -> Result<SatResult, SolverError> {
        self.write("(check-sat)")?;
        self.stdin.flush()?;
        let r = self.reply()?;
        match r.as_str() {
            "sat" => Ok(SatResult::Sat),
            "unsat" => Ok(SatResult::Unsat),
            "unknown" => {
                self.write("(get-info :reason-unknown)")?;
                self.stdin.flush()?;
                let why = self.reply()?;
                let reason = sexp::parse(&why)
                    .ok()
                    .and_then(|xs| xs.into_iter().next())
                    .and_then(|x| x.list().and_then(|l| l.get(1).cloned()))
                    .map(|x| x.to_string().trim_matches('"').to_string())
                    .unwrap_or(why);
                Ok(SatResult::Unknown(reason))
            }
            _ => Err(error_or_protocol("(check-sat)", r)),
        }
    }

    /// Values of `terms` in the current model, in the order given.
    pub fn get_values<S: AsRef<str>>(&mut self, terms: &[S]) -> Result<Vec<Sexp>, SolverError> {
        if terms.is_empty() {
            return Ok(Vec::new());
        }
        let mut cmd = String::from("(get-value (");
        for (i, t) in terms.iter().enumerate() {
            if i > 0 {
                cmd.push(' ');
            }
            cmd.push_str(t.as_ref());
        }
        cmd.push_str("))");
        self.write(&cmd)?;
        self.stdin.flush()?;
        let r = self.reply()?;
        let protocol = |reply: &str| SolverError::Protocol {
            command: "(get-value ...)".into(),
            reply: reply.chars().take(200).collect(),
        };
        let parsed = sexp::parse(&r).map_err(|_| protocol(&r))?;
        let pairs = match parsed.as_slice() {
            [Sexp::List(items)] => items,
            _ => return Err(error_or_protocol("(get-value ...)", r)),
        };
        if pairs.len() != terms.len() {
            return Err(protocol(&r));
        }
        pairs
            .iter()
            .map(|p| match p.list() {
                Some([_, v]) => Ok(v.clone()),
                _ => Err(protocol(&r)),
            })
            .collect()
    }
}

fn error_or_protocol(command: &str, reply: String) -> SolverError {
    if let Ok(xs) = sexp::parse(&reply) {
        if let Some([Sexp::Atom(head), msg]) = xs.first().and_then(|x| x.list()) {
            if head == "error" {
                return SolverError::Solver(msg.to_string().trim_matches('"').to_string());
            }
        }
    }
    SolverError::Protocol {
        command: command.chars().take(200).collect(),
        reply: reply.chars().take(200).collect(),
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        let _ = self.write("(exit)");
        let _ = self.stdin.flush();
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::config::default_solver;
    use std::time::Duration;

    fn session() -> Session {
        Session::spawn(&default_solver()).expect("solver available")
    }

    #[test]
    fn empty_assertions_are_satisfiable() {
        assert_eq!(session().check_sat().unwrap(), SatResult::Sat);
    }

    #[test]
    fn contradiction_is_unsatisfiable() {
        let mut s = session();
        s.commands(&["(declare-fun x () Int)", "(assert (> x 0))", "(assert (< x 0))"])
            .unwrap();
        assert_eq!(s.check_sat().unwrap(), SatResult::Unsat);
    }

    #[test]
    fn model_values_are_exact() {
        let mut s = session();
        s.commands(&[
            "(declare-fun in () Int)",
            "(declare-fun out () Int)",
            "(declare-fun r () Real)",
            "(assert (= in 2))",
            "(assert (= in (* 2 out)))",
            "(assert (= (* 3.0 r) 4.0))",
        ])
        .unwrap();
        assert_eq!(s.check_sat().unwrap(), SatResult::Sat);
        let vs = s.get_values(&["in", "out", "r"]).unwrap();
        use crate::engine::sexp::to_value;
        use crate::value::{Type, Value};
        assert_eq!(to_value(&vs[0], &Type::Int), Some(Value::int(2)));
        assert_eq!(to_value(&vs[1], &Type::Int), Some(Value::int(1)));
        assert_eq!(to_value(&vs[2], &Type::Real), Some(Value::real(4, 3)));
    }

    #[test]
    fn push_and_pop_scope_assertions() {
        let mut s = session();
        s.command("(declare-fun b () Bool)").unwrap();
        s.push().unwrap();
        s.commands(&["(assert b)", "(assert (not b))"]).unwrap();
        assert_eq!(s.check_sat().unwrap(), SatResult::Unsat);
        s.pop().unwrap();
        assert_eq!(s.check_sat().unwrap(), SatResult::Sat);
    }

    #[test]
    fn solver_errors_are_reported() {
        let mut s = session();
        let e = s.command("(assert undeclared)").unwrap_err();
        assert!(matches!(e, SolverError::Solver(_)), "{e}");
    }

    #[test]
    fn missing_solver_fails_to_spawn() {
        let e = Session::spawn(&["/nonexistent/solver".to_string()]).err().unwrap();
        assert!(matches!(e, SolverError::Spawn { .. }));
    }

    #[test]
    fn deadline_kills_a_silent_solver() {
        let mut s = Session::spawn(&["sh".into(), "-c".into(), "read x; echo success; sleep 30".into()]).unwrap();
        s.set_deadline(Instant::now() + Duration::from_millis(200));
        let start = Instant::now();
        assert!(matches!(s.check_sat(), Err(SolverError::Timeout)));
        assert!(start.elapsed() < Duration::from_secs(5));
    }
}
