//! Name-keyed registries of interchangeable strategies.
//!
//! Strategies are selected at runtime by a spec string of the form
//! `name` or `name:arg`, e.g. `tfi` or `tfp:31`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegistryError {
    #[error("unknown {kind} '{name}' (available: {available})")]
    Unknown {
        kind: &'static str,
        name: String,
        available: String,
    },
    #[error("invalid argument for {name}: {reason}")]
    BadArgument { name: String, reason: String },
    #[error("duplicate registration of '{0}'")]
    Duplicate(&'static str),
}

/// Builds a strategy from the optional argument after the colon.
pub type Factory<T> = fn(Option<&str>) -> Result<Box<T>, RegistryError>;

struct Entry<T: ?Sized> {
    name: &'static str,
    help: &'static str,
    factory: Factory<T>,
}

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: Vec<Entry<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: Vec::new(),
        }
    }

    pub fn register(
        &mut self,
        name: &'static str,
        help: &'static str,
        factory: Factory<T>,
    ) -> Result<(), RegistryError> {
        if self.entries.iter().any(|e| e.name == name) {
            return Err(RegistryError::Duplicate(name));
        }
        self.entries.push(Entry {
            name,
            help,
            factory,
        });
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.iter().map(|e| e.name)
    }

    pub fn help(&self, name: &str) -> Option<&'static str> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.help)
    }

    pub fn create(&self, spec: &str) -> Result<Box<T>, RegistryError> {
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (spec, None),
        };
        let entry = self
            .entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| RegistryError::Unknown {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().collect::<Vec<_>>().join(", "),
            })?;
        (entry.factory)(arg)
    }
}

impl<T: ?Sized> fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("kind", &self.kind)
            .field("names", &self.names().collect::<Vec<_>>())
            .finish()
    }
}

/// Rejects an argument for strategies that take none.
pub fn no_argument(name: &str, arg: Option<&str>) -> Result<(), RegistryError> {
    match arg {
        None => Ok(()),
        Some(a) => Err(RegistryError::BadArgument {
            name: name.to_string(),
            reason: format!("takes no argument, got '{a}'"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Shape {
        fn sides(&self) -> u32;
    }
    struct Poly(u32);
    impl Shape for Poly {
        fn sides(&self) -> u32 {
            self.0
        }
    }

    fn registry() -> Registry<dyn Shape> {
        let mut r: Registry<dyn Shape> = Registry::new("shape");
        r.register("tri", "triangle", |a| {
            no_argument("tri", a)?;
            Ok(Box::new(Poly(3)))
        })
        .unwrap();
        r.register("poly", "n-gon", |a| {
            let n = a
                .and_then(|a| a.parse().ok())
                .ok_or_else(|| RegistryError::BadArgument {
                    name: "poly".into(),
                    reason: "needs a side count".into(),
                })?;
            Ok(Box::new(Poly(n)))
        })
        .unwrap();
        r
    }

    #[test]
    fn lookup_and_arguments() {
        let r = registry();
        assert_eq!(r.create("tri").unwrap().sides(), 3);
        assert_eq!(r.create("poly:7").unwrap().sides(), 7);
        assert!(matches!(
            r.create("tri:1"),
            Err(RegistryError::BadArgument { .. })
        ));
        assert!(matches!(
            r.create("hex"),
            Err(RegistryError::Unknown { .. })
        ));
        assert_eq!(r.names().collect::<Vec<_>>(), vec!["tri", "poly"]);
    }

    #[test]
    fn duplicates_rejected() {
        let mut r = registry();
        assert_eq!(
            r.register("tri", "", |_| Ok(Box::new(Poly(3)))),
            Err(RegistryError::Duplicate("tri"))
        );
    }
}
