//! The knowledge index: which roles have seen which message values.
//!
//! Every operation is pure. Each checker step consumes one index and returns
//! the next, so an index can be cloned freely and shared between branches.

use thiserror::Error;

use super::types::{RoleId, TypeExpr, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KnowledgeError {
    #[error("message variable `{0}` is already bound")]
    DuplicateVar(VarId),
    #[error("message variable `{0}` is not bound")]
    UnknownVar(VarId),
}

/// One message together with the roles that know its value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KnowledgeItem {
    pub var: VarId,
    pub ty: TypeExpr,
    knowers: Vec<RoleId>,
}

impl KnowledgeItem {
    /// Knowers in the order they learned the value; the creator comes first.
    pub fn knowers(&self) -> &[RoleId] {
        &self.knowers
    }

    pub fn is_known_by(&self, role: &RoleId) -> bool {
        self.knowers.contains(role)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct KnowledgeIndex {
    items: Vec<KnowledgeItem>,
}

impl KnowledgeIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn items(&self) -> &[KnowledgeItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, var: &VarId) -> Option<&KnowledgeItem> {
        self.items.iter().find(|item| &item.var == var)
    }

    pub fn contains(&self, var: &VarId) -> bool {
        self.get(var).is_some()
    }

    /// Adds a freshly created message known only to its creator.
    pub fn introduce(
        &self,
        var: &VarId,
        ty: &TypeExpr,
        creator: &RoleId,
    ) -> Result<KnowledgeIndex, KnowledgeError> {
        if self.contains(var) {
            return Err(KnowledgeError::DuplicateVar(var.clone()));
        }
        let mut next = self.clone();
        next.items.push(KnowledgeItem {
            var: var.clone(),
            ty: ty.clone(),
            knowers: vec![creator.clone()],
        });
        Ok(next)
    }

    /// Records that `role` has learned the value of `var`. Idempotent.
    pub fn learn(&self, var: &VarId, role: &RoleId) -> Result<KnowledgeIndex, KnowledgeError> {
        let pos = self
            .items
            .iter()
            .position(|item| &item.var == var)
            .ok_or_else(|| KnowledgeError::UnknownVar(var.clone()))?;
        let mut next = self.clone();
        let knowers = &mut next.items[pos].knowers;
        if !knowers.contains(role) {
            knowers.push(role.clone());
        }
        Ok(next)
    }

    pub fn knows(&self, var: &VarId, role: &RoleId) -> bool {
        self.get(var).is_some_and(|item| item.is_known_by(role))
    }

    pub fn all_know(&self, var: &VarId, participants: &[RoleId]) -> bool {
        participants.iter().all(|role| self.knows(var, role))
    }
}

/// True if `sub` appears in order (not necessarily contiguously) in `sup`.
pub fn overlapping(sub: &[RoleId], sup: &[RoleId]) -> bool {
    let mut rest = sup.iter();
    sub.iter().all(|role| rest.any(|r| r == role))
}
