use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::Error;

/// When a test is evaluated relative to the update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    /// Check the test, then execute the update only if it passed.
    Pre,
    /// Execute the update, check the test, roll back if it failed.
    Post,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::Pre => "pre",
            Protocol::Post => "post",
        })
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pre" => Ok(Protocol::Pre),
            "post" => Ok(Protocol::Post),
            other => Err(Error::UnknownMethod(format!("protocol {other}"))),
        }
    }
}

/// An integrity checking method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    /// Delta-driven instantiated denials, checked in the new state.
    DeltaPost,
    /// The same denials read in the old state through the update.
    DeltaPre,
    /// The theory itself evaluated on a shadow copy of the new state.
    PlainPre,
    /// The theory itself, checked in the new state.
    PlainPost,
    /// Hard-coded non-tolerant tests for `{← p(X)}` and the insertion of
    /// `p(b)`; used to validate the auditor.
    Adversarial(Protocol),
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::DeltaPost,
        Method::DeltaPre,
        Method::PlainPre,
        Method::PlainPost,
        Method::Adversarial(Protocol::Pre),
        Method::Adversarial(Protocol::Post),
    ];

    pub fn protocol(self) -> Protocol {
        match self {
            Method::DeltaPost | Method::PlainPost => Protocol::Post,
            Method::DeltaPre | Method::PlainPre => Protocol::Pre,
            Method::Adversarial(p) => p,
        }
    }

    /// Picks the adversarial variant, or confirms the protocol of the others.
    pub fn with_protocol(self, p: Protocol) -> Result<Method, Error> {
        match self {
            Method::Adversarial(_) => Ok(Method::Adversarial(p)),
            m if m.protocol() == p => Ok(m),
            m => Err(Error::MethodNotApplicable {
                method: m.id().to_owned(),
                reason: format!("it only runs under the {} protocol", m.protocol()),
            }),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Method::DeltaPost => "delta-post",
            Method::DeltaPre => "delta-pre",
            Method::PlainPre => "plain-pre",
            Method::PlainPost => "plain-post",
            Method::Adversarial(_) => "example3-adversarial",
        }
    }

    pub fn is_plain(self) -> bool {
        matches!(self, Method::PlainPre | Method::PlainPost)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Adversarial(p) => write!(f, "{}/{p}", self.id()),
            m => f.write_str(m.id()),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    /// `example3-adversarial` defaults to its pre variant; a `/pre` or
    /// `/post` suffix selects one explicitly.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "delta-post" => Ok(Method::DeltaPost),
            "delta-pre" => Ok(Method::DeltaPre),
            "plain-pre" => Ok(Method::PlainPre),
            "plain-post" => Ok(Method::PlainPost),
            "example3-adversarial" | "example3-adversarial/pre" => {
                Ok(Method::Adversarial(Protocol::Pre))
            }
            "example3-adversarial/post" => Ok(Method::Adversarial(Protocol::Post)),
            other => Err(Error::UnknownMethod(other.to_owned())),
        }
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert!("nic82".parse::<Method>().is_err());
    }

    #[test]
    fn protocol_selection() {
        let adv: Method = "example3-adversarial".parse().unwrap();
        assert_eq!(
            adv.with_protocol(Protocol::Post).unwrap(),
            Method::Adversarial(Protocol::Post)
        );
        assert!(Method::DeltaPre.with_protocol(Protocol::Post).is_err());
        assert_eq!(
            Method::DeltaPre.with_protocol(Protocol::Pre).unwrap(),
            Method::DeltaPre
        );
    }
}
